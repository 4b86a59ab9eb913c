//! Sampled verification of the defining symmetries.
//!
//! Rational identities are decided by evaluation on the unit circle. Each
//! check takes half of its points from the grid `e^{2πik/K}` and the rest
//! from a seeded uniform draw; a point that lands on a pole (or makes a
//! matrix singular) is redrawn from a per-point generator, so results do not
//! depend on whether the sweep runs in parallel.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::matrix::{frobenius_distance, inverse, mat_mul, CMatrix, C64, TOL};

use super::eval::{epsilon, permutation_phat, wavelet_eval};
use super::params::FilterParameters;

/// Redraws allowed per sample point before giving up.
pub const MAX_RETRIES: usize = 8;

/// Outcome of one sampled check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub samples: usize,
    pub seed: u64,
}

impl CheckReport {
    pub fn new(
        name: impl Into<String>,
        max_residual: f64,
        tolerance: f64,
        samples: usize,
        seed: u64,
    ) -> Self {
        Self {
            name: name.into(),
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
            samples,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckConfig {
    pub points: usize,
    pub tol: f64,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            points: 256,
            tol: TOL,
            seed: 0,
            exec: Execution::default(),
        }
    }
}

impl CheckConfig {
    pub fn with_points(points: usize) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }
}

/// Sound point count for deciding equality of rational functions of the
/// given McMillan degree.
pub fn min_points_for_degree(degree: usize) -> usize {
    2 * degree + 8
}

/// Angles of the sample points: a uniform grid followed by seeded draws.
pub fn circle_angles(count: usize, seed: u64) -> Vec<f64> {
    let grid = count.div_ceil(2);
    let mut angles: Vec<f64> = (0..grid).map(|k| TAU * k as f64 / grid as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    angles.extend((grid..count).map(|_| rng.random_range(0.0..TAU)));
    angles
}

fn retry_angle(seed: u64, index: usize, attempt: usize) -> f64 {
    let mix = seed
        ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (attempt as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    ChaCha8Rng::seed_from_u64(mix).random_range(0.0..TAU)
}

fn is_resamplable(e: &Error) -> bool {
    matches!(e, Error::Pole { .. } | Error::Singular { .. })
}

/// Max of `residual(z)` over the circle sample.
pub fn max_over_circle<F>(cfg: &CheckConfig, residual: F) -> Result<f64>
where
    F: Fn(C64) -> Result<f64> + Sync + Send,
{
    if cfg.points == 0 {
        return Err(Error::invalid(
            "points",
            "at least one sample point is required",
        ));
    }
    let angles = circle_angles(cfg.points, cfg.seed);
    exec::try_max(cfg.exec, cfg.points, |i| {
        let mut angle = angles[i];
        for attempt in 0..=MAX_RETRIES {
            match residual(C64::from_polar(1.0, angle)) {
                Ok(r) if r.is_finite() => return Ok(r),
                Ok(_) => return Ok(f64::INFINITY),
                Err(e) if is_resamplable(&e) => angle = retry_angle(cfg.seed, i, attempt),
                Err(e) => return Err(e),
            }
        }
        Err(Error::SamplingExhausted { index: i })
    })
}

/// `max_z ‖F(εz) − F(z)P̂‖_F`: membership in the modulation class.
pub fn check_symmetry<F>(f: F, n: usize, cfg: &CheckConfig) -> Result<CheckReport>
where
    F: Fn(C64) -> Result<CMatrix> + Sync + Send,
{
    let phat = permutation_phat(n)?;
    let eps = epsilon(n);
    let r = max_over_circle(cfg, |z| {
        let lhs = f(eps * z)?;
        let rhs = mat_mul(&f(z)?, &phat)?;
        frobenius_distance(&lhs, &rhs)
    })?;
    Ok(CheckReport::new(
        "symmetry", r, cfg.tol, cfg.points, cfg.seed,
    ))
}

/// `max_z ‖F(z)*F(z) − I‖_F` on the unit circle.
pub fn check_paraunitary<F>(f: F, cfg: &CheckConfig) -> Result<CheckReport>
where
    F: Fn(C64) -> Result<CMatrix> + Sync + Send,
{
    let r = max_over_circle(cfg, |z| {
        let v = f(z)?;
        let id = CMatrix::identity(v.cols());
        frobenius_distance(&mat_mul(&v.adjoint(), &v)?, &id)
    })?;
    Ok(CheckReport::new(
        "paraunitary",
        r,
        cfg.tol,
        cfg.points,
        cfg.seed,
    ))
}

/// `max_z ‖F(1/z̄)* F(z) − I‖_F`: the synthesis filter `F(1/z̄)*` is a left
/// inverse of the analysis filter on the circle.
pub fn check_perfect_reconstruction<F>(f: F, cfg: &CheckConfig) -> Result<CheckReport>
where
    F: Fn(C64) -> Result<CMatrix> + Sync + Send,
{
    let r = max_over_circle(cfg, |z| {
        let analysis = f(z)?;
        let synthesis = f(z.conj().inv())?.adjoint();
        let id = CMatrix::identity(analysis.cols());
        frobenius_distance(&mat_mul(&synthesis, &analysis)?, &id)
    })?;
    Ok(CheckReport::new(
        "perfect_reconstruction",
        r,
        cfg.tol,
        cfg.points,
        cfg.seed,
    ))
}

/// Frequency-domain perfect reconstruction for a parametrized filter.
pub fn frequency_pr_check(params: &FilterParameters, cfg: &CheckConfig) -> Result<CheckReport> {
    check_perfect_reconstruction(|z| wavelet_eval(params, z), cfg)
}

/// `max_z ‖F_b(εz)F_a(εz)^{−1} − F_b(z)F_a(z)^{−1}‖_F`: the quotient is a
/// function of `z^N`.
pub fn quotient_decimation_check<Fa, Fb>(
    fa: Fa,
    fb: Fb,
    n: usize,
    cfg: &CheckConfig,
) -> Result<CheckReport>
where
    Fa: Fn(C64) -> Result<CMatrix> + Sync + Send,
    Fb: Fn(C64) -> Result<CMatrix> + Sync + Send,
{
    let eps = epsilon(n);
    let quotient = |z: C64| -> Result<CMatrix> { mat_mul(&fb(z)?, &inverse(&fa(z)?)?) };
    let r = max_over_circle(cfg, |z| {
        frobenius_distance(&quotient(eps * z)?, &quotient(z)?)
    })?;
    Ok(CheckReport::new(
        "quotient_decimation",
        r,
        cfg.tol,
        cfg.points,
        cfg.seed,
    ))
}

/// `G(z) = F_b(z)·F_a(1/z̄)*` satisfies `G(εz) = G(z)`.
pub fn conjugate_product_check<Fa, Fb>(
    fa: Fa,
    fb: Fb,
    n: usize,
    cfg: &CheckConfig,
) -> Result<CheckReport>
where
    Fa: Fn(C64) -> Result<CMatrix> + Sync + Send,
    Fb: Fn(C64) -> Result<CMatrix> + Sync + Send,
{
    let eps = epsilon(n);
    let g = |z: C64| -> Result<CMatrix> { mat_mul(&fb(z)?, &fa(z.conj().inv())?.adjoint()) };
    let r = max_over_circle(cfg, |z| frobenius_distance(&g(eps * z)?, &g(z)?))?;
    Ok(CheckReport::new(
        "conjugate_product",
        r,
        cfg.tol,
        cfg.points,
        cfg.seed,
    ))
}

/// Max distance between two matrix functions over the circle sample.
pub fn max_distance<Fa, Fb>(fa: Fa, fb: Fb, cfg: &CheckConfig) -> Result<f64>
where
    Fa: Fn(C64) -> Result<CMatrix> + Sync + Send,
    Fb: Fn(C64) -> Result<CMatrix> + Sync + Send,
{
    max_over_circle(cfg, |z| frobenius_distance(&fa(z)?, &fb(z)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::eval::{decimated_unitary_eval, elementary_wavelet_eval};
    use crate::filters::params::{sample_parameters, Factor};
    use crate::matrix::{ONE, ZERO};

    fn cfg(points: usize) -> CheckConfig {
        CheckConfig {
            points,
            seed: 11,
            ..CheckConfig::default()
        }
    }

    #[test]
    fn angles_are_grid_then_random() {
        let a = circle_angles(8, 3);
        assert_eq!(a.len(), 8);
        assert_eq!(a[0], 0.0);
        assert!((a[1] - TAU / 4.0).abs() < 1e-15);
        assert_eq!(a, circle_angles(8, 3));
        assert_ne!(a[4..], circle_angles(8, 4)[4..]);
    }

    #[test]
    fn elementary_filter_has_the_symmetry() {
        for n in 2..=4 {
            let r = check_symmetry(|z| elementary_wavelet_eval(n, z), n, &cfg(64)).unwrap();
            assert!(r.passed, "n={n}: {}", r.max_residual);
        }
    }

    #[test]
    fn identity_lacks_the_symmetry() {
        for n in 2..=4 {
            let r = check_symmetry(|_| Ok(CMatrix::identity(n)), n, &cfg(16)).unwrap();
            assert!(!r.passed);
        }
    }

    #[test]
    fn left_multiplication_by_function_of_zn() {
        // L(w) = L0 + L1 w + L2 w^2 with fixed non-unitary coefficients.
        let n = 3;
        let l: Vec<CMatrix> = (0..3)
            .map(|k| {
                CMatrix::from_fn(n, n, |i, j| {
                    C64::new((i + 2 * j + k) as f64 * 0.3 - 0.7, (i * j + k) as f64 * 0.1)
                })
            })
            .collect();
        let f = |z: C64| {
            let w = z.powu(n as u32);
            let lz = &(&l[0] + &l[1].scale(w)) + &l[2].scale(w * w);
            mat_mul(&lz, &elementary_wavelet_eval(n, z)?)
        };
        assert!(check_symmetry(f, n, &cfg(64)).unwrap().passed);
        assert!(!check_paraunitary(f, &cfg(64)).unwrap().passed);
    }

    #[test]
    fn paraunitary_examples() {
        for n in 2..=4 {
            for m in 0..=4 {
                let p = sample_parameters(100 + (n * 10 + m) as u64, n, m, 0.9).unwrap();
                let r = check_paraunitary(|z| wavelet_eval(&p, z), &cfg(128)).unwrap();
                assert!(r.passed, "n={n} m={m}: {}", r.max_residual);
                let co = max_over_circle(&cfg(64), |z| {
                    let w = wavelet_eval(&p, z)?;
                    frobenius_distance(&(&w * &w.adjoint()), &CMatrix::identity(n))
                })
                .unwrap();
                assert!(co <= TOL);
            }
        }
        let r = check_paraunitary(
            |_| Ok(CMatrix::identity(2).scale(C64::new(2.0, 0.0))),
            &cfg(8),
        )
        .unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn pr_examples() {
        let p = sample_parameters(5, 3, 2, 0.9).unwrap();
        assert!(frequency_pr_check(&p, &cfg(64)).unwrap().passed);
        let scaled = check_perfect_reconstruction(
            |z| Ok(wavelet_eval(&p, z)?.scale(C64::new(1.1, 0.0))),
            &cfg(64),
        )
        .unwrap();
        assert!(!scaled.passed);
        for n in 2..=4 {
            let e = FilterParameters::elementary(n).unwrap();
            assert!(frequency_pr_check(&e, &cfg(32)).unwrap().passed);
        }
    }

    #[test]
    fn quotient_examples() {
        let w2 = |z| elementary_wavelet_eval(2, z);
        assert!(
            quotient_decimation_check(w2, w2, 2, &cfg(32))
                .unwrap()
                .passed
        );

        let alpha = C64::new(0.5, 0.0);
        let beta = C64::new(0.3, 0.1);
        let wa = FilterParameters::new(2, 0.9, vec![Factor::basis(2, 1, alpha)]).unwrap();
        let mut wb = wa.clone();
        wb.push(Factor::basis(2, 0, beta.sqrt())).unwrap();
        wb.push(Factor::basis(2, 0, -beta.sqrt())).unwrap();
        let fa = |z| wavelet_eval(&wa, z);
        let fb = |z| wavelet_eval(&wb, z);
        assert!(
            quotient_decimation_check(w2, fa, 2, &cfg(64))
                .unwrap()
                .passed
        );
        assert!(
            quotient_decimation_check(fa, fb, 2, &cfg(64))
                .unwrap()
                .passed
        );

        // The quotient W_a Ŵ^{-1} is V_α(z²) itself.
        let d = max_distance(
            |z| mat_mul(&fa(z)?, &inverse(&w2(z)?)?),
            |z| decimated_unitary_eval(&[ZERO, ONE], alpha, 2, z),
            &cfg(32),
        )
        .unwrap();
        assert!(d < 1e-12);
    }

    #[test]
    fn non_decimated_quotient_fails() {
        // Ŵ_2(z) vs V(z)Ŵ_2(z) with an undecimated factor: not a function of z².
        let v = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let fb = |z| {
            mat_mul(
                &decimated_unitary_eval(&v, C64::new(0.2, 0.0), 1, z)?,
                &elementary_wavelet_eval(2, z)?,
            )
        };
        let r =
            quotient_decimation_check(|z| elementary_wavelet_eval(2, z), fb, 2, &cfg(32)).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let p = sample_parameters(77, 4, 3, 0.5).unwrap();
        let seq = CheckConfig {
            exec: Execution::Sequential,
            ..cfg(64)
        };
        let par = CheckConfig {
            exec: Execution::Parallel,
            ..cfg(64)
        };
        let a = check_symmetry(|z| wavelet_eval(&p, z), 4, &seq).unwrap();
        let b = check_symmetry(|z| wavelet_eval(&p, z), 4, &par).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn poles_are_resampled() {
        // Pole exactly on a grid point: z = 1 for alpha = 1 (outside the
        // invariant, exercised directly through the closure).
        let f = |z: C64| {
            if (z - ONE).norm() < 1e-12 {
                Err(Error::Pole { re: z.re, im: z.im })
            } else {
                Ok(CMatrix::identity(2))
            }
        };
        let r = check_paraunitary(f, &cfg(8)).unwrap();
        assert!(r.passed);
        let always = |z: C64| -> Result<CMatrix> { Err(Error::Pole { re: z.re, im: z.im }) };
        assert!(matches!(
            check_paraunitary(always, &cfg(4)),
            Err(Error::SamplingExhausted { .. })
        ));
    }

    #[test]
    fn point_rule() {
        assert_eq!(min_points_for_degree(7), 22);
    }
}
