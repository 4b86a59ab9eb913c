//! Hand-entered printed matrices and closed-form filters used as oracles.
#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use wfk::filters::params::Factor;
use wfk::matrix::{CMatrix, C64, ONE, ZERO};
use wfk::FilterParameters;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn gain(a: C64) -> C64 {
    r((1.0 - a.norm_sqr()).sqrt())
}

/// Principal `k`-th root.
pub fn principal_root(a: C64, k: u32) -> C64 {
    C64::from_polar(a.norm().powf(1.0 / k as f64), a.arg() / k as f64)
}

pub fn circle(k: usize) -> Vec<C64> {
    (0..k)
        .map(|i| C64::from_polar(1.0, TAU * (i as f64 + 0.37) / k as f64))
        .collect()
}

pub fn hat_m2() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    CMatrix::from_real_rows(&[[0., s, -s], [0., s, s], [1., 0., 0.]])
}

pub fn tilde_m4() -> CMatrix {
    CMatrix::from_real_rows(&[
        [0., 0., 0., 0., 0., 0., 0., 1., 0., 0.],
        [0., 0., 1., 0., 0., 0., 0., 0., 0., 0.],
        [0., 0., 0., 0., 0., 0., 0., 0., 1., 0.],
        [0., 0., 0., 0., 1., 0., 0., 0., 0., 0.],
        [0., 0., 0., 0., 0., 1., 0., 0., 0., 0.],
        [0., 0., 0., 0., 0., 0., 0., 0., 0., 1.],
        [0., 0., 0., 0., 0., 0., 1., 0., 0., 0.],
        [1., 0., 0., 0., 0., 0., 0., 0., 0., 0.],
        [0., 1., 0., 0., 0., 0., 0., 0., 0., 0.],
        [0., 0., 0., 1., 0., 0., 0., 0., 0., 0.],
    ])
}

pub fn hat_m4() -> CMatrix {
    let h = 0.5;
    let (o, l) = (ZERO, ONE);
    let row_b1 = [r(h), c(0., -h), r(-h), c(0., h)];
    let row_b3 = [r(h), r(-h), r(h), r(-h)];
    let row_b6 = [r(h), c(0., h), r(-h), c(0., -h)];
    let row_d1 = [r(h), r(h), r(h), r(h)];
    let z4 = [o; 4];
    let mk = |a: [C64; 6], b: [C64; 4]| -> Vec<C64> { a.iter().chain(b.iter()).copied().collect() };
    CMatrix::from_rows(&[
        mk([o, o, o, o, o, o], row_b1),
        mk([o, o, l, o, o, o], z4),
        mk([o, o, o, o, o, o], row_b3),
        mk([o, o, o, o, l, o], z4),
        mk([o, o, o, o, o, l], z4),
        mk([o, o, o, o, o, o], row_b6),
        mk([o, o, o, o, o, o], row_d1),
        mk([l, o, o, o, o, o], z4),
        mk([o, l, o, o, o, o], z4),
        mk([o, o, o, l, o, o], z4),
    ])
}

/// Scalar core for `ψ_α(z²)`.
pub fn tilde_m_alpha2(alpha: C64) -> CMatrix {
    let q = principal_root(alpha, 2);
    let g = gain(alpha);
    CMatrix::from_rows(&[[q, ONE, ZERO], [ZERO, -q, g], [g, ZERO, ZERO]])
}

/// Scalar core for `ψ_α(z⁴)`.
pub fn tilde_m_alpha4(alpha: C64) -> CMatrix {
    let q = principal_root(alpha, 4);
    let i = c(0., 1.);
    let g = gain(alpha);
    let (o, l) = (ZERO, ONE);
    CMatrix::from_rows(&[
        [q, l, o, o, o],
        [o, -q, l, o, o],
        [o, o, i * q, l, o],
        [o, o, o, -i * q, g],
        [g, o, o, o, o],
    ])
}

/// `V_α(z²)` with `v = e_2`.
pub fn m_alpha(alpha: C64) -> CMatrix {
    let q = principal_root(alpha, 2);
    let g = gain(alpha);
    let (o, l) = (ZERO, ONE);
    CMatrix::from_rows(&[
        [q, l, o, o],
        [o, -q, o, g],
        [o, o, l, o],
        [g, o, o, -alpha.conj()],
    ])
}

/// `v = e_1` around the four-state core.
pub fn m_beta4(beta: C64) -> CMatrix {
    let q = principal_root(beta, 4);
    let i = c(0., 1.);
    let g = gain(beta);
    let (o, l) = (ZERO, ONE);
    CMatrix::from_rows(&[
        [q, l, o, o, o, o],
        [o, -q, l, o, o, o],
        [o, o, i * q, l, o, o],
        [o, o, o, -i * q, g, o],
        [g, o, o, o, -beta.conj(), o],
        [o, o, o, o, o, l],
    ])
}

/// Printed system matrix of `W_a` (three states).
pub fn printed_m_a(alpha: C64) -> CMatrix {
    let q = principal_root(alpha, 2);
    let s2 = r(1.0 - alpha.norm_sqr());
    let h = r(FRAC_1_SQRT_2);
    let (o, l) = (ZERO, ONE);
    CMatrix::from_rows(&[
        [q, s2, o, o, o],
        [o, -q, l, o, o],
        [o, o, o, h, -h],
        [o, o, o, h, h],
        [l, o, -alpha.conj(), o, o],
    ])
}

/// Printed system matrix of `W_b` (seven states), entered as printed.
pub fn printed_m_b(alpha: C64, beta: C64) -> CMatrix {
    let qa = principal_root(alpha, 2);
    let qb = principal_root(beta, 4);
    let i = c(0., 1.);
    let ga = gain(alpha);
    let gb = gain(beta);
    let s2 = r(1.0 - alpha.norm_sqr());
    let h = r(FRAC_1_SQRT_2);
    let (o, l) = (ZERO, ONE);
    CMatrix::from_rows(&[
        [qb, l, o, o, o, o, o, o, o],
        [o, -qb, l, o, o, o, o, o, o],
        [o, o, i * qb, l, o, o, o, o, o],
        [o, o, o, -i * qb, o, o, o, gb * h, gb * h],
        [o, o, o, o, qa, l, o, o, o],
        [o, o, o, o, o, -qa, s2, o, o],
        [o, o, o, o, o, o, o, h, -h],
        [gb, o, o, o, o, o, o, -beta.conj() * h, -beta.conj() * h],
        [o, o, o, o, ga, o, -alpha.conj(), o, o],
    ])
}

/// Closed form of `W_a(z)`.
pub fn w_a(alpha: C64, z: C64) -> CMatrix {
    let h = FRAC_1_SQRT_2;
    let den = z * (z * z - alpha);
    let x = (ONE - alpha.conj() * z * z) / den;
    CMatrix::from_rows(&[[r(h), r(h)], [x * h, -x * h]])
}

/// Closed form of `W_b(z)`.
pub fn w_b(alpha: C64, beta: C64, z: C64) -> CMatrix {
    let h = FRAC_1_SQRT_2;
    let z4 = z.powu(4);
    let top = (ONE - beta.conj() * z4) / (z4 - beta);
    let mut m = w_a(alpha, z);
    m[(0, 0)] = top * h;
    m[(0, 1)] = top * h;
    m
}

/// Parameters of `W_a`: one factor `(e_2, α)`.
pub fn params_w_a(alpha: C64) -> FilterParameters {
    FilterParameters::new(2, 1.0, vec![Factor::basis(2, 1, alpha)]).unwrap()
}

/// Parameters of `W_b`: `(e_2, α)` then the pair `(e_1, ±√β)`, whose product
/// is the fourth-power Blaschke factor in the first coordinate.
pub fn params_w_b(alpha: C64, beta: C64) -> FilterParameters {
    let q = principal_root(beta, 2);
    FilterParameters::new(
        2,
        1.0,
        vec![
            Factor::basis(2, 1, alpha),
            Factor::basis(2, 0, q),
            Factor::basis(2, 0, -q),
        ],
    )
    .unwrap()
}

pub fn max_entry_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
