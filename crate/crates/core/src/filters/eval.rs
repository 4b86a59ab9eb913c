//! Pointwise evaluation of the modulation structure, elementary factors and
//! full wavelet filters.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::matrix::{mat_mul, CMatrix, C64, ONE, ZERO};

use super::params::FilterParameters;

/// Relative distance below which `z` is treated as sitting on a pole.
const POLE_EPS: f64 = 1e-13;

fn check_band_count(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(
            "n",
            format!("band count must be >= 2, got {n}"),
        ));
    }
    Ok(())
}

fn pole(z: C64) -> Error {
    Error::Pole { re: z.re, im: z.im }
}

/// `ε^k` with `ε = e^{i2π/n}`; the exponent is reduced mod `n` first.
pub fn root_power(n: usize, k: i64) -> C64 {
    let r = k.rem_euclid(n as i64) as f64;
    C64::from_polar(1.0, TAU * r / n as f64)
}

/// The primitive root `ε = e^{i2π/n}`.
pub fn epsilon(n: usize) -> C64 {
    root_power(n, 1)
}

/// `(Q_N)_{jk} = ε^{−jk} / √N`.
pub fn dft_matrix(n: usize) -> Result<CMatrix> {
    check_band_count(n)?;
    let s = 1.0 / (n as f64).sqrt();
    Ok(CMatrix::from_fn(n, n, |j, k| {
        root_power(n, -((j * k) as i64)) * s
    }))
}

/// `[[0_{1×(N−1)}, 1], [I_{N−1}, 0]]`.
pub fn permutation_phat(n: usize) -> Result<CMatrix> {
    check_band_count(n)?;
    let mut p = CMatrix::zeros(n, n);
    p[(0, n - 1)] = ONE;
    for i in 1..n {
        p[(i, i - 1)] = ONE;
    }
    Ok(p)
}

/// The constant objects behind the modulation symmetry `F(εz) = F(z)P̂`.
#[derive(Debug, Clone)]
pub struct ModulationStructure {
    pub n: usize,
    pub epsilon: C64,
    pub phat: CMatrix,
    pub dft: CMatrix,
}

impl ModulationStructure {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            n,
            epsilon: epsilon(n),
            phat: permutation_phat(n)?,
            dft: dft_matrix(n)?,
        })
    }
}

/// `Ŵ_N(z) = diag{1, z^{−1}, …, z^{−(N−1)}} · Q_N`.
pub fn elementary_wavelet_eval(n: usize, z: C64) -> Result<CMatrix> {
    check_band_count(n)?;
    if z == ZERO {
        return Err(pole(z));
    }
    let q = dft_matrix(n)?;
    let zinv = z.inv();
    let mut out = q;
    let mut d = ONE;
    for k in 0..n {
        for j in 0..n {
            out[(k, j)] *= d;
        }
        d *= zinv;
    }
    Ok(out)
}

/// Scalar Blaschke factor `φ_α(w) = (1 − ᾱw)/(w − α)`.
pub fn blaschke(alpha: C64, w: C64) -> Result<C64> {
    let den = w - alpha;
    if den.norm() <= POLE_EPS * w.norm().max(1.0) {
        return Err(pole(w));
    }
    Ok((ONE - alpha.conj() * w) / den)
}

fn rank_one_update(v: &[C64], scalar: C64) -> CMatrix {
    let n = v.len();
    let mut out = CMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] += scalar * v[i] * v[j].conj();
        }
    }
    out
}

fn check_alpha(alpha: C64) -> Result<()> {
    if !(alpha.norm() < 1.0) {
        return Err(Error::invalid(
            "alpha",
            format!("|alpha| = {} must be < 1", alpha.norm()),
        ));
    }
    Ok(())
}

/// `V(z) = I + (φ_α(z) − 1) v v*`.
pub fn elementary_unitary_eval(v: &[C64], alpha: C64, z: C64) -> Result<CMatrix> {
    check_alpha(alpha)?;
    Ok(rank_one_update(v, blaschke(alpha, z)? - ONE))
}

/// `V(w)` where the caller has already formed `w = z^N`. Evaluating through
/// this entry point makes the value at `z` and at `εz` bitwise identical
/// whenever the same `w` is passed.
pub fn decimated_unitary_at_power(v: &[C64], alpha: C64, w: C64) -> Result<CMatrix> {
    elementary_unitary_eval(v, alpha, w)
}

/// `V(z^N) = I + (φ_α(z^N) − 1) v v*`. `n` is the decimation exponent; the
/// matrix dimension is `v.len()`.
pub fn decimated_unitary_eval(v: &[C64], alpha: C64, n: usize, z: C64) -> Result<CMatrix> {
    decimated_unitary_at_power(v, alpha, z.powu(n as u32))
}

/// `W(z) = V_m(z^N) ⋯ V_1(z^N) Ŵ_N(z)` with factors applied in stored order.
pub fn wavelet_eval(params: &FilterParameters, z: C64) -> Result<CMatrix> {
    let n = params.n();
    let mut w = elementary_wavelet_eval(n, z)?;
    let zn = z.powu(n as u32);
    for f in params.factors() {
        let v = decimated_unitary_at_power(&f.v, f.alpha, zn)?;
        w = mat_mul(&v, &w)?;
    }
    Ok(w)
}
