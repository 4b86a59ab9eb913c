//! State-space realizations `F(z) = C(zI − A)^{−1}B + D`.
//!
//! Wavelet filters are realized stage by stage: the elementary filter
//! first, then one decimated unitary factor per cascade step. The state
//! dimension grows by `N` per factor, so the final dimension is the McMillan
//! degree `N((N−1)/2 + m)`.

use crate::error::{Error, Result};
use crate::filters::eval::{dft_matrix, root_power};
use crate::filters::params::FilterParameters;
use crate::matrix::{frobenius_distance, mat_mul, solve_linear, CMatrix, C64, ONE, ZERO};

/// System matrix blocks `[[A, B], [C, D]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
}

impl Realization {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        let p = a.rows();
        let mismatch = |op, lhs, rhs| Err(Error::DimensionMismatch { op, lhs, rhs });
        if !a.is_square() {
            return mismatch("realization: A not square", a.shape(), a.shape());
        }
        if b.rows() != p {
            return mismatch("realization: B rows", a.shape(), b.shape());
        }
        if c.cols() != p {
            return mismatch("realization: C cols", a.shape(), c.shape());
        }
        if d.shape() != (c.rows(), b.cols()) {
            return mismatch("realization: D shape", (c.rows(), b.cols()), d.shape());
        }
        Ok(Self { a, b, c, d })
    }

    /// A static gain: no state.
    pub fn static_gain(d: CMatrix) -> Self {
        let (rows, cols) = d.shape();
        Self {
            a: CMatrix::zeros(0, 0),
            b: CMatrix::zeros(0, cols),
            c: CMatrix::zeros(rows, 0),
            d,
        }
    }

    /// Splits a `(p + outputs) × (p + inputs)` system matrix.
    pub fn from_system_matrix(m: &CMatrix, state_dim: usize) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows < state_dim || cols < state_dim {
            return Err(Error::DimensionMismatch {
                op: "from_system_matrix",
                lhs: m.shape(),
                rhs: (state_dim, state_dim),
            });
        }
        let (outs, ins) = (rows - state_dim, cols - state_dim);
        Self::new(
            m.block(0, 0, state_dim, state_dim),
            m.block(0, state_dim, state_dim, ins),
            m.block(state_dim, 0, outs, state_dim),
            m.block(state_dim, state_dim, outs, ins),
        )
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    pub fn d(&self) -> &CMatrix {
        &self.d
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    pub fn outputs(&self) -> usize {
        self.c.rows()
    }

    pub fn system_matrix(&self) -> CMatrix {
        CMatrix::from_blocks(&self.a, &self.b, &self.c, &self.d)
            .expect("blocks validated on construction")
    }

    /// State change `x ↦ T^{−1}x`: `(T^{−1}AT, T^{−1}B, CT, D)`.
    pub fn similarity(&self, t: &CMatrix) -> Result<Self> {
        let tinv_a = solve_linear(t, &self.a)?;
        Self::new(
            mat_mul(&tinv_a, t)?,
            solve_linear(t, &self.b)?,
            mat_mul(&self.c, t)?,
            self.d.clone(),
        )
    }

    /// Same system with `A` replaced; used to build defective variants.
    pub fn with_a(&self, a: CMatrix) -> Result<Self> {
        Self::new(a, self.b.clone(), self.c.clone(), self.d.clone())
    }

    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        let p = self.state_dim();
        (0..p).all(|i| (0..i).all(|j| self.a[(i, j)].norm() <= tol))
    }
}

fn chain_start(k: usize) -> usize {
    k * (k - 1) / 2
}

/// The permutation system matrix `M̃_N`: `A = diag{J_1(0), …, J_{N−1}(0)}`,
/// `D̃ = e_1 e_1ᵀ`, output `k` reads the first state of chain `k` and input
/// `k` feeds the last state of chain `k`. Its transfer function is
/// `diag{1, z^{−1}, …, z^{−(N−1)}}`.
pub fn staircase_permutation(n: usize) -> Result<Realization> {
    if n < 2 {
        return Err(Error::invalid(
            "n",
            format!("band count must be >= 2, got {n}"),
        ));
    }
    let p = n * (n - 1) / 2;
    let mut a = CMatrix::zeros(p, p);
    let mut b = CMatrix::zeros(p, n);
    let mut c = CMatrix::zeros(n, p);
    let mut d = CMatrix::zeros(n, n);
    d[(0, 0)] = ONE;
    for k in 1..n {
        let s = chain_start(k);
        for i in 0..k - 1 {
            a[(s + i, s + i + 1)] = ONE;
        }
        c[(k, s)] = ONE;
        b[(s + k - 1, k)] = ONE;
    }
    Realization::new(a, b, c, d)
}

/// Realization of the elementary wavelet filter: `M̂_N = M̃_N·diag{I_p, Q_N}`.
pub fn realize_elementary_wavelet(n: usize) -> Result<Realization> {
    let tilde = staircase_permutation(n)?;
    let q = dft_matrix(n)?;
    Realization::new(
        tilde.a.clone(),
        mat_mul(&tilde.b, &q)?,
        tilde.c.clone(),
        mat_mul(&tilde.d, &q)?,
    )
}

/// The `n` distinct `n`-th roots of `alpha` in the order used on the
/// diagonal of the scalar core.
///
/// `n = 2` gives `(r, −r)` and `n = 4` gives `(r, −r, ir, −ir)`; other `n`
/// use `r·ω^k`, `k = 0..n−1`. `r` is the principal root.
pub fn core_roots(alpha: C64, n: usize) -> Vec<C64> {
    if alpha == ZERO {
        return vec![ZERO; n];
    }
    let r = C64::from_polar(alpha.norm().powf(1.0 / n as f64), alpha.arg() / n as f64);
    match n {
        4 => vec![r, -r, r * C64::new(0.0, 1.0), r * C64::new(0.0, -1.0)],
        _ => (0..n).map(|k| r * root_power(n, k as i64)).collect(),
    }
}

/// Single-input single-output realization of
/// `ψ_α(z^n) = (1 − |α|²)/(z^n − α)`: upper bidiagonal `A` with the roots of
/// `α` on the diagonal, `b = √(1−|α|²) e_n`, `c = √(1−|α|²) e_1ᵀ`.
pub fn realize_psi(alpha: C64, n: usize) -> Result<Realization> {
    if n == 0 {
        return Err(Error::invalid("n", "decimation exponent must be >= 1"));
    }
    if !(alpha.norm() < 1.0) {
        return Err(Error::invalid(
            "alpha",
            format!("|alpha| = {} must be < 1", alpha.norm()),
        ));
    }
    let roots = core_roots(alpha, n);
    let mut a = CMatrix::diag(&roots);
    for i in 0..n - 1 {
        a[(i, i + 1)] = ONE;
    }
    let g = C64::new((1.0 - alpha.norm_sqr()).sqrt(), 0.0);
    let mut b = CMatrix::zeros(n, 1);
    b[(n - 1, 0)] = g;
    let mut c = CMatrix::zeros(1, n);
    c[(0, 0)] = g;
    Realization::new(a, b, c, CMatrix::zeros(1, 1))
}

/// `V(z^n)` realized as `[[A, b v*], [v c, I − (1 + ᾱ) v v*]]` around the
/// scalar core of [`realize_psi`]. The matrix dimension is `v.len()`.
pub fn realize_decimated_unitary(v: &[C64], alpha: C64, n: usize) -> Result<Realization> {
    let core = realize_psi(alpha, n)?;
    let col = CMatrix::column_vector(v);
    let row = col.adjoint();
    let vv = mat_mul(&col, &row)?;
    let d = &CMatrix::identity(v.len()) - &vv.scale(ONE + alpha.conj());
    Realization::new(
        core.a.clone(),
        mat_mul(&core.b, &row)?,
        mat_mul(&col, &core.c)?,
        d,
    )
}

/// Series connection `F_Δ(z)·F_a(z)`:
/// `[[A_Δ, B_Δ C_a, B_Δ D_a], [0, A_a, B_a], [C_Δ, D_Δ C_a, D_Δ D_a]]`.
pub fn cascade(delta: &Realization, a: &Realization) -> Result<Realization> {
    if delta.inputs() != a.outputs() {
        return Err(Error::DimensionMismatch {
            op: "cascade",
            lhs: delta.d.shape(),
            rhs: a.d.shape(),
        });
    }
    let (pd, pa) = (delta.state_dim(), a.state_dim());
    let mut big_a = CMatrix::zeros(pd + pa, pd + pa);
    big_a.set_block(0, 0, &delta.a);
    big_a.set_block(0, pd, &mat_mul(&delta.b, &a.c)?);
    big_a.set_block(pd, pd, &a.a);

    let mut big_b = CMatrix::zeros(pd + pa, a.inputs());
    big_b.set_block(0, 0, &mat_mul(&delta.b, &a.d)?);
    big_b.set_block(pd, 0, &a.b);

    let mut big_c = CMatrix::zeros(delta.outputs(), pd + pa);
    big_c.set_block(0, 0, &delta.c);
    big_c.set_block(0, pd, &mat_mul(&delta.d, &a.c)?);

    Realization::new(big_a, big_b, big_c, mat_mul(&delta.d, &a.d)?)
}

/// Stage-by-stage realization of a wavelet filter: the elementary filter,
/// then one cascade step per factor in stored order.
pub fn realize_wavelet(params: &FilterParameters) -> Result<Realization> {
    let n = params.n();
    let mut r = realize_elementary_wavelet(n)?;
    for f in params.factors() {
        let v = realize_decimated_unitary(&f.v, f.alpha, n)?;
        r = cascade(&v, &r)?;
    }
    Ok(r)
}

/// Transfer value `C(zI − A)^{−1}B + D`.
pub fn eval_realization(r: &Realization, z: C64) -> Result<CMatrix> {
    let p = r.state_dim();
    if p == 0 {
        return Ok(r.d.clone());
    }
    let zi_a = &CMatrix::identity(p).scale(z) - &r.a;
    let x = solve_linear(&zi_a, &r.b).map_err(|e| match e {
        Error::Singular { .. } => Error::Pole { re: z.re, im: z.im },
        other => other,
    })?;
    Ok(&mat_mul(&r.c, &x)? + &r.d)
}

/// Markov parameters `h(0) = D`, `h(k) = C A^{k−1} B`.
pub fn impulse_response(r: &Realization, horizon: usize) -> Result<Vec<CMatrix>> {
    if horizon == 0 {
        return Err(Error::invalid("horizon", "must be >= 1"));
    }
    let mut out = Vec::with_capacity(horizon);
    out.push(r.d.clone());
    let mut akb = r.b.clone();
    for _ in 1..horizon {
        out.push(mat_mul(&r.c, &akb)?);
        akb = mat_mul(&r.a, &akb)?;
    }
    Ok(out)
}

/// `N((N−1)/2 + m)`.
pub fn mcmillan_degree(params: &FilterParameters) -> usize {
    degree_formula(params.n(), params.m())
}

pub fn degree_formula(n: usize, m: usize) -> usize {
    n * (n - 1) / 2 + n * m
}

/// `max_j |α_j|^{1/N}`: the eigenvalues of the realized `A` are the `N`-th
/// roots of the `α_j` plus zeros from the elementary block.
pub fn spectral_radius(params: &FilterParameters) -> f64 {
    let n = params.n() as f64;
    params
        .factors()
        .iter()
        .map(|f| f.alpha.norm().powf(1.0 / n))
        .fold(0.0, f64::max)
}

/// Solution of the Stein equation `M* diag{H, I} M = diag{H, I}` and the
/// residual of each block.
#[derive(Debug, Clone)]
pub struct SteinCertificate {
    pub h: CMatrix,
    /// `‖A*HA + C*C − H‖_F`
    pub residual_state: f64,
    /// `‖A*HB + C*D‖_F`
    pub residual_cross: f64,
    /// `‖B*HB + D*D − I‖_F`
    pub residual_io: f64,
    pub hermitian_defect: f64,
    /// All Cholesky pivots of `H` positive.
    pub positive_definite: bool,
    /// Ratio of the largest to smallest Cholesky pivot (squared), infinite
    /// when `H` is not positive definite.
    pub cond_estimate: f64,
    pub iterations: usize,
}

impl SteinCertificate {
    pub fn max_residual(&self) -> f64 {
        self.residual_state
            .max(self.residual_cross)
            .max(self.residual_io)
    }

    pub fn passes(&self, tol: f64, hermitian_tol: f64) -> bool {
        self.max_residual() <= tol && self.hermitian_defect <= hermitian_tol
    }
}

/// Iteration cap for the doubling series.
pub const STEIN_MAX_ITER: usize = 64;
/// Relative increment at which the doubling series stops.
pub const STEIN_STOP: f64 = 1e-12;

/// Cholesky pivots of a Hermitian matrix, `None` at the first non-positive one.
fn cholesky_pivots(h: &CMatrix) -> Option<Vec<f64>> {
    let n = h.rows();
    let mut l = CMatrix::zeros(n, n);
    let mut pivots = Vec::with_capacity(n);
    for j in 0..n {
        let mut d = h[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let ljj = d.sqrt();
        pivots.push(d);
        l[(j, j)] = C64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = h[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Some(pivots)
}

/// Solves `A*HA + C*C = H` by the doubling series
/// `H ← H + (A^{2^j})* H A^{2^j}` and reports all three Stein residuals.
pub fn stein_verify(r: &Realization) -> Result<SteinCertificate> {
    let p = r.state_dim();
    let mut h = mat_mul(&r.c.adjoint(), &r.c)?;
    let mut ak = r.a.clone();
    let mut iterations = 0;
    if p > 0 {
        loop {
            if iterations >= STEIN_MAX_ITER {
                return Err(Error::NonConvergence(format!(
                    "no convergence after {STEIN_MAX_ITER} doubling steps"
                )));
            }
            iterations += 1;
            let inc = mat_mul(&mat_mul(&ak.adjoint(), &h)?, &ak)?;
            let inc_norm = inc.max_abs();
            h = &h + &inc;
            if !h.is_finite() || !inc_norm.is_finite() {
                return Err(Error::NonConvergence(
                    "series diverged (spectral radius >= 1)".into(),
                ));
            }
            if inc_norm <= STEIN_STOP * h.max_abs().max(f64::MIN_POSITIVE) {
                break;
            }
            ak = mat_mul(&ak, &ak)?;
            if ak.max_abs() == 0.0 {
                break;
            }
        }
    }
    // Symmetrize away rounding; the defect is reported before that.
    let hermitian_defect = h.hermitian_defect();
    let h = (&h + &h.adjoint()).scale(C64::new(0.5, 0.0));

    let ah = mat_mul(&r.a.adjoint(), &h)?;
    let state = &(&mat_mul(&ah, &r.a)? + &mat_mul(&r.c.adjoint(), &r.c)?) - &h;
    let cross = &mat_mul(&ah, &r.b)? + &mat_mul(&r.c.adjoint(), &r.d)?;
    let io = &(&mat_mul(&mat_mul(&r.b.adjoint(), &h)?, &r.b)? + &mat_mul(&r.d.adjoint(), &r.d)?)
        - &CMatrix::identity(r.inputs());

    let (positive_definite, cond_estimate) = match cholesky_pivots(&h) {
        Some(piv) if !piv.is_empty() => {
            let hi = piv.iter().copied().fold(0.0, f64::max);
            let lo = piv.iter().copied().fold(f64::INFINITY, f64::min);
            (true, hi / lo)
        }
        Some(_) => (true, 1.0),
        None => (false, f64::INFINITY),
    };

    Ok(SteinCertificate {
        h,
        residual_state: state.frobenius_norm(),
        residual_cross: cross.frobenius_norm(),
        residual_io: io.frobenius_norm(),
        hermitian_defect,
        positive_definite,
        cond_estimate,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimalityReport {
    pub state_dim: usize,
    pub controllability_rank: usize,
    pub observability_rank: usize,
}

impl MinimalityReport {
    pub fn is_minimal(&self) -> bool {
        self.controllability_rank == self.state_dim && self.observability_rank == self.state_dim
    }
}

/// Relative rank threshold.
pub const RANK_TOL: f64 = 1e-9;

/// Dimension of the block Krylov space spanned by `[B, AB, …, A^{p−1}B]`.
///
/// Columns are generated one block at a time and orthogonalized with column
/// pivoting (largest remaining residual first, two Gram–Schmidt passes);
/// a candidate is rejected once its residual falls below
/// `RANK_TOL · max(‖A‖_F, ‖B‖_F)`.
fn krylov_rank(a: &CMatrix, b: &CMatrix) -> usize {
    let p = a.rows();
    if p == 0 {
        return 0;
    }
    let scale = a
        .frobenius_norm()
        .max(b.frobenius_norm())
        .max(f64::MIN_POSITIVE);
    let threshold = RANK_TOL * scale;
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut block: Vec<Vec<C64>> = (0..b.cols()).map(|j| b.column(j)).collect();

    for _ in 0..p {
        let mut accepted = Vec::new();
        let mut pending = block;
        loop {
            for v in pending.iter_mut() {
                for _ in 0..2 {
                    for q in &basis {
                        let proj: C64 = q.iter().zip(v.iter()).map(|(qi, vi)| qi.conj() * vi).sum();
                        for (vi, qi) in v.iter_mut().zip(q) {
                            *vi -= proj * qi;
                        }
                    }
                }
            }
            let best = pending
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()))
                .fold(None, |acc: Option<(usize, f64)>, cur| match acc {
                    Some(a) if a.1 >= cur.1 => Some(a),
                    _ => Some(cur),
                });
            match best {
                Some((i, norm)) if norm > threshold && basis.len() < p => {
                    let v = pending.swap_remove(i);
                    let q: Vec<C64> = v.iter().map(|x| x / norm).collect();
                    accepted.push(q.clone());
                    basis.push(q);
                }
                _ => break,
            }
        }
        if accepted.is_empty() || basis.len() == p {
            break;
        }
        block = accepted
            .iter()
            .map(|q| a.apply(q).expect("square A"))
            .collect();
    }
    basis.len()
}

/// Controllability and observability ranks; minimal iff both equal the
/// state dimension.
pub fn verify_minimality(r: &Realization) -> MinimalityReport {
    MinimalityReport {
        state_dim: r.state_dim(),
        controllability_rank: krylov_rank(&r.a, &r.b),
        observability_rank: krylov_rank(&r.a.adjoint(), &r.c.adjoint()),
    }
}

/// Max distance between the transfer functions of two realizations (or a
/// realization and a closed form) at the given points.
pub fn transfer_distance<F>(r: &Realization, other: F, points: &[C64]) -> Result<f64>
where
    F: Fn(C64) -> Result<CMatrix>,
{
    let mut worst: f64 = 0.0;
    for &z in points {
        worst = worst.max(frobenius_distance(&eval_realization(r, z)?, &other(z)?)?);
    }
    Ok(worst)
}
