//! The parameter space of wavelet filters: `m` factors `(v_j, α_j)` with
//! `v_j` on the unit sphere of `ℂ^N` and `α_j` in the disk of radius `ρ`,
//! plus the real box coordinates they are drawn from.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{C64, ZERO};

/// Tolerance on `‖v‖ = 1`.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Largest pole modulus drawn by [`sample_parameters`]; keeps poles off the
/// unit circle when `ρ = 1`.
pub const MAX_SAMPLED_RADIUS: f64 = 0.999;

/// One elementary unitary factor `V(z^N) = I + (φ_α(z^N) − 1) v v*`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub v: Vec<C64>,
    pub alpha: C64,
}

impl Factor {
    pub fn new(v: Vec<C64>, alpha: C64) -> Self {
        Self { v, alpha }
    }

    /// Standard basis vector `e_k` (0-indexed) in `ℂ^n`.
    pub fn basis(n: usize, k: usize, alpha: C64) -> Self {
        let mut v = vec![ZERO; n];
        v[k] = C64::new(1.0, 0.0);
        Self { v, alpha }
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.v)
    }
}

pub(crate) fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// A point of the parametrization: band count `n`, pole bound `rho` and the
/// factors in application order (`factors[0]` is applied first, i.e. sits
/// next to the elementary filter; appending a factor multiplies on the left).
#[derive(Debug, Clone, PartialEq)]
pub struct FilterParameters {
    n: usize,
    rho: f64,
    factors: Vec<Factor>,
}

impl FilterParameters {
    pub fn new(n: usize, rho: f64, factors: Vec<Factor>) -> Result<Self> {
        let p = Self { n, rho, factors };
        p.validate()?;
        Ok(p)
    }

    /// The elementary filter alone (index zero).
    pub fn elementary(n: usize) -> Result<Self> {
        Self::new(n, 0.0, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The index `m`: number of elementary unitary factors.
    pub fn m(&self) -> usize {
        self.factors.len()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// All poles at the origin.
    pub fn is_fir(&self) -> bool {
        self.factors.iter().all(|f| f.alpha == ZERO)
    }

    /// Raises the index by one: the new factor multiplies on the left.
    pub fn push(&mut self, factor: Factor) -> Result<()> {
        check_factor(self.n, self.rho, &factor)?;
        self.factors.push(factor);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid(
                "n",
                format!("band count must be >= 2, got {}", self.n),
            ));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::invalid(
                "rho",
                format!("must lie in [0, 1], got {}", self.rho),
            ));
        }
        for f in &self.factors {
            check_factor(self.n, self.rho, f)?;
        }
        Ok(())
    }
}

fn check_factor(n: usize, rho: f64, f: &Factor) -> Result<()> {
    if f.v.len() != n {
        return Err(Error::invalid(
            "v",
            format!("expected {} components, got {}", n, f.v.len()),
        ));
    }
    if f.v.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::invalid("v", "non-finite component"));
    }
    let norm = f.norm();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::invalid(
            "v",
            format!("not a unit vector (norm {norm:.15})"),
        ));
    }
    if !f.alpha.re.is_finite() || !f.alpha.im.is_finite() {
        return Err(Error::invalid("alpha", "non-finite"));
    }
    let r = f.alpha.norm();
    if rho == 0.0 {
        if f.alpha != ZERO {
            return Err(Error::invalid("alpha", "rho = 0 forces every alpha to 0"));
        }
    } else if r >= rho {
        return Err(Error::invalid(
            "alpha",
            format!("|alpha| = {r} must be strictly below rho = {rho}"),
        ));
    }
    Ok(())
}

/// Box coordinates of a single factor.
///
/// `delta1 ∈ [0, π)`, `angles ∈ [0, 2π)^{2N−3}` (the first `N − 2` are the
/// remaining hyperspherical angles, the last `N − 1` the phases of
/// components `2..N`), `theta ∈ [0, 2π)` and `radius ∈ [0, ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxFactor {
    pub delta1: f64,
    pub angles: Vec<f64>,
    pub theta: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxPoint {
    pub factors: Vec<BoxFactor>,
}

/// Real coordinates per factor in a flat box array.
pub fn coords_per_factor(n: usize) -> usize {
    2 * n
}

impl BoxPoint {
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for f in &self.factors {
            out.push(f.delta1);
            out.extend_from_slice(&f.angles);
            out.push(f.theta);
            out.push(f.radius);
        }
        out
    }

    /// Inverse of [`BoxPoint::to_flat`]. For FIR boxes the short form without
    /// `(theta, radius)` is accepted too.
    pub fn from_flat(n: usize, m: usize, flat: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(
                "n",
                format!("band count must be >= 2, got {n}"),
            ));
        }
        let full = coords_per_factor(n);
        let short = full - 2;
        let per = if flat.len() == full * m {
            full
        } else if flat.len() == short * m {
            short
        } else {
            return Err(Error::invalid(
                "box",
                format!(
                    "expected {} (or {} for FIR) coordinates for n = {n}, m = {m}, got {}",
                    full * m,
                    short * m,
                    flat.len()
                ),
            ));
        };
        let factors = flat
            .chunks(per.max(1))
            .take(m)
            .map(|c| BoxFactor {
                delta1: c[0],
                angles: c[1..2 * n - 2].to_vec(),
                theta: if per == full { c[2 * n - 2] } else { 0.0 },
                radius: if per == full { c[2 * n - 1] } else { 0.0 },
            })
            .collect();
        Ok(Self { factors })
    }
}

fn in_half_open(x: f64, hi: f64) -> bool {
    x.is_finite() && x >= 0.0 && x < hi
}

fn check_box_factor(j: usize, f: &BoxFactor, n: usize, rho: f64) -> Result<()> {
    if !in_half_open(f.delta1, PI) {
        return Err(Error::OutOfRange(format!(
            "factor {j}: delta1 = {} not in [0, pi)",
            f.delta1
        )));
    }
    if f.angles.len() != 2 * n - 3 {
        return Err(Error::OutOfRange(format!(
            "factor {j}: expected {} angles, got {}",
            2 * n - 3,
            f.angles.len()
        )));
    }
    if let Some(a) = f.angles.iter().find(|&&a| !in_half_open(a, TAU)) {
        return Err(Error::OutOfRange(format!(
            "factor {j}: angle {a} not in [0, 2pi)"
        )));
    }
    if !in_half_open(f.theta, TAU) {
        return Err(Error::OutOfRange(format!(
            "factor {j}: theta = {} not in [0, 2pi)",
            f.theta
        )));
    }
    let radius_ok = if rho == 0.0 {
        f.radius == 0.0
    } else {
        in_half_open(f.radius, rho)
    };
    if !radius_ok {
        return Err(Error::OutOfRange(format!(
            "factor {j}: radius = {} not in [0, {rho})",
            f.radius
        )));
    }
    Ok(())
}

/// Unit vector from hyperspherical coordinates.
///
/// Moduli are `(cos a₁, cos a₂ sin a₁, …, ∏ sin a_l)` with `a₁ = delta1` and
/// `a_l` the first `N − 2` entries of `angles`; component 1 is real, the
/// phases of components `2..N` come from the last `N − 1` angles.
fn unit_vector(n: usize, f: &BoxFactor) -> Vec<C64> {
    let amp: Vec<f64> = std::iter::once(f.delta1)
        .chain(f.angles[..n - 2].iter().copied())
        .collect();
    let phases = &f.angles[n - 2..];
    let mut v = Vec::with_capacity(n);
    let mut tail = 1.0;
    for k in 0..n {
        let modulus = if k < n - 1 { tail * amp[k].cos() } else { tail };
        let phase = if k == 0 { 0.0 } else { phases[k - 1] };
        v.push(C64::from_polar(modulus, phase));
        if k < n - 1 {
            tail *= amp[k].sin();
        }
    }
    v
}

/// Maps a box point to filter parameters. `‖v‖ = 1` holds by construction.
pub fn box_to_params(point: &BoxPoint, n: usize, m: usize, rho: f64) -> Result<FilterParameters> {
    if n < 2 {
        return Err(Error::invalid(
            "n",
            format!("band count must be >= 2, got {n}"),
        ));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid(
            "rho",
            format!("must lie in [0, 1], got {rho}"),
        ));
    }
    if point.factors.len() != m {
        return Err(Error::OutOfRange(format!(
            "box has {} factors, index is {m}",
            point.factors.len()
        )));
    }
    let mut factors = Vec::with_capacity(m);
    for (j, f) in point.factors.iter().enumerate() {
        check_box_factor(j, f, n, rho)?;
        let v = unit_vector(n, f);
        let alpha = if f.radius == 0.0 {
            ZERO
        } else {
            C64::from_polar(f.radius, f.theta)
        };
        factors.push(Factor { v, alpha });
    }
    FilterParameters::new(n, rho, factors)
}

/// Rotates `v` by a global phase so that its first nonzero component is
/// real and positive. `vv*` is unchanged.
pub fn canonicalize(v: &[C64]) -> Result<Vec<C64>> {
    let norm = vec_norm(v);
    if !(norm > 0.0) || (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::NonCanonical(format!("vector norm {norm} is not 1")));
    }
    let lead = v
        .iter()
        .find(|x| x.norm() > UNIT_NORM_TOL)
        .ok_or_else(|| Error::NonCanonical("no component above tolerance".into()))?;
    let rot = lead.conj() / lead.norm();
    Ok(v.iter().map(|x| x * rot).collect())
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Inverse of [`box_to_params`] on canonical vectors.
///
/// Every vector is first canonicalized (see [`canonicalize`]); the returned
/// point then has `delta1` and the remaining amplitude angles in
/// `[0, π/2]`, which is the fundamental domain on which the round trip
/// `params_to_box ∘ box_to_params` is the identity.
pub fn params_to_box(params: &FilterParameters) -> Result<BoxPoint> {
    let n = params.n();
    let mut factors = Vec::with_capacity(params.m());
    for f in params.factors() {
        let v = canonicalize(&f.v)?;
        let mut amp = Vec::with_capacity(n - 1);
        let mut phases = Vec::with_capacity(n - 1);
        for k in 0..n - 1 {
            let tail = vec_norm(&v[k + 1..]);
            let head = if k == 0 {
                v[0].re.max(0.0)
            } else {
                v[k].norm()
            };
            amp.push(tail.atan2(head));
        }
        for x in &v[1..] {
            phases.push(if x.norm() > UNIT_NORM_TOL {
                wrap_angle(x.arg())
            } else {
                0.0
            });
        }
        let (theta, radius) = if f.alpha == ZERO {
            (0.0, 0.0)
        } else {
            (wrap_angle(f.alpha.arg()), f.alpha.norm())
        };
        let mut angles = amp[1..].to_vec();
        angles.extend(phases);
        factors.push(BoxFactor {
            delta1: amp[0],
            angles,
            theta,
            radius,
        });
    }
    Ok(BoxPoint { factors })
}

/// Uniform draw from the box `([0,π)×[0,2π)^{2(N−1)}×[0,ρ))^m`.
///
/// The radius is capped at [`MAX_SAMPLED_RADIUS`]; with `ρ = 0` it is 0.
pub fn sample_box(seed: u64, n: usize, m: usize, rho: f64) -> BoxPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r_max = rho.min(MAX_SAMPLED_RADIUS);
    let factors = (0..m)
        .map(|_| {
            let delta1 = rng.random_range(0.0..PI);
            let angles = (0..2 * n.max(2) - 3)
                .map(|_| rng.random_range(0.0..TAU))
                .collect();
            let theta = rng.random_range(0.0..TAU);
            let radius = if r_max > 0.0 {
                rng.random_range(0.0..r_max)
            } else {
                0.0
            };
            BoxFactor {
                delta1,
                angles,
                theta,
                radius,
            }
        })
        .collect();
    BoxPoint { factors }
}

/// Deterministic parameter draw for a given seed.
pub fn sample_parameters(seed: u64, n: usize, m: usize, rho: f64) -> Result<FilterParameters> {
    if n < 2 {
        return Err(Error::invalid(
            "n",
            format!("band count must be >= 2, got {n}"),
        ));
    }
    box_to_params(&sample_box(seed, n, m, rho), n, m, rho)
}
