//! Sampled signals: decimation, expansion, circular subband analysis and
//! synthesis, and direct simulation of a realization.

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::filters::subband::SubbandFilterSet;
use crate::matrix::{C64, ZERO};
use crate::realization::Realization;

/// `b_k = x_{nk}`; length `⌈L/n⌉`.
pub fn decimate(x: &[C64], n: usize) -> Vec<C64> {
    assert!(n >= 1, "decimation factor must be >= 1");
    x.iter().step_by(n).copied().collect()
}

/// `c_{nk} = x_k`, zeros elsewhere; length `nL`.
pub fn expand(x: &[C64], n: usize) -> Vec<C64> {
    assert!(n >= 1, "expansion factor must be >= 1");
    let mut out = vec![ZERO; x.len() * n];
    for (k, &v) in x.iter().enumerate() {
        out[k * n] = v;
    }
    out
}

/// `y_t = Σ_s h_s x_{(t−s) mod L}`.
pub fn circular_convolve(x: &[C64], h: &[C64]) -> Result<Vec<C64>> {
    let l = x.len();
    if h.len() > l {
        return Err(Error::invalid(
            "filter",
            format!("filter length {} exceeds signal length {l}", h.len()),
        ));
    }
    Ok((0..l)
        .map(|t| {
            h.iter()
                .enumerate()
                .map(|(s, &hs)| hs * x[(t + l - s) % l])
                .sum()
        })
        .collect())
}

/// `y_t = x_{(t−k) mod L}`.
pub fn circular_shift(x: &[C64], k: usize) -> Vec<C64> {
    let l = x.len();
    if l == 0 {
        return Vec::new();
    }
    (0..l).map(|t| x[(t + l - k % l) % l]).collect()
}

/// Output of [`analyze`]: one decimated signal per band.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandSet {
    pub bands: Vec<Vec<C64>>,
}

impl SubbandSet {
    pub fn energy(&self) -> f64 {
        self.bands.iter().flatten().map(|x| x.norm_sqr()).sum()
    }

    pub fn band_len(&self) -> Option<usize> {
        self.bands.first().map(Vec::len)
    }
}

fn band_gain(n: usize) -> C64 {
    C64::new((n as f64).sqrt(), 0.0)
}

/// Band `k` is `decimate(√N · h_k ⊛ x, N)`.
///
/// The band filters of a paraunitary filter carry total energy 1, so the
/// `√N` gain on each side makes the analysis map an isometry.
pub fn analyze(x: &[C64], filters: &SubbandFilterSet, n: usize) -> Result<SubbandSet> {
    analyze_with(x, filters, n, Execution::default())
}

pub fn analyze_with(
    x: &[C64],
    filters: &SubbandFilterSet,
    n: usize,
    exec: Execution,
) -> Result<SubbandSet> {
    check_bands(filters, n)?;
    if x.is_empty() || !x.len().is_multiple_of(n) {
        return Err(Error::invalid(
            "signal",
            format!("length {} is not a positive multiple of n = {n}", x.len()),
        ));
    }
    let g = band_gain(n);
    let bands = exec::try_map_indexed(exec, n, |k| {
        let h: Vec<C64> = filters.filters[k].iter().map(|&t| t * g).collect();
        Ok(decimate(&circular_convolve(x, &h)?, n))
    })?;
    Ok(SubbandSet { bands })
}

/// `x̂ = Σ_k √N · g_k ⊛ expand(band_k, N)` with `g_k` the conjugate time
/// reversals; `synthesize(analyze(x))` is `x` circularly delayed by
/// [`SubbandFilterSet::delay`].
pub fn synthesize(bands: &SubbandSet, filters: &SubbandFilterSet, n: usize) -> Result<Vec<C64>> {
    synthesize_with(bands, filters, n, Execution::default())
}

pub fn synthesize_with(
    bands: &SubbandSet,
    filters: &SubbandFilterSet,
    n: usize,
    exec: Execution,
) -> Result<Vec<C64>> {
    check_bands(filters, n)?;
    if bands.bands.len() != n {
        return Err(Error::invalid(
            "bands",
            format!("expected {n} bands, got {}", bands.bands.len()),
        ));
    }
    let len = bands.band_len().unwrap_or(0);
    if len == 0 || bands.bands.iter().any(|b| b.len() != len) {
        return Err(Error::invalid(
            "bands",
            "bands must be non-empty and of equal length",
        ));
    }
    let g = band_gain(n);
    let synth = filters.synthesis_filters();
    let parts = exec::try_map_indexed(exec, n, |k| {
        let gk: Vec<C64> = synth[k].iter().map(|&t| t * g).collect();
        circular_convolve(&expand(&bands.bands[k], n), &gk)
    })?;
    let mut out = vec![ZERO; len * n];
    for part in parts {
        for (o, p) in out.iter_mut().zip(part) {
            *o += p;
        }
    }
    Ok(out)
}

fn check_bands(filters: &SubbandFilterSet, n: usize) -> Result<()> {
    if n < 2 || filters.bands() != n {
        return Err(Error::invalid(
            "filters",
            format!("expected {n} band filters, got {}", filters.bands()),
        ));
    }
    Ok(())
}

/// Runs `x(k+1) = Ax(k) + Bu(k)`, `y(k) = Cx(k) + Du(k)`; returns the
/// outputs and the final state.
pub fn simulate(
    r: &Realization,
    inputs: &[Vec<C64>],
    x0: &[C64],
) -> Result<(Vec<Vec<C64>>, Vec<C64>)> {
    if x0.len() != r.state_dim() {
        return Err(Error::DimensionMismatch {
            op: "simulate: initial state",
            lhs: (r.state_dim(), 1),
            rhs: (x0.len(), 1),
        });
    }
    let mut x = x0.to_vec();
    let mut outputs = Vec::with_capacity(inputs.len());
    for u in inputs {
        if u.len() != r.inputs() {
            return Err(Error::DimensionMismatch {
                op: "simulate: input",
                lhs: (r.inputs(), 1),
                rhs: (u.len(), 1),
            });
        }
        let cx = r.c().apply(&x)?;
        let du = r.d().apply(u)?;
        outputs.push(cx.iter().zip(&du).map(|(a, b)| a + b).collect());
        let ax = r.a().apply(&x)?;
        let bu = r.b().apply(u)?;
        x = ax.iter().zip(&bu).map(|(a, b)| a + b).collect();
    }
    Ok((outputs, x))
}

/// Euclidean norm.
pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::params::FilterParameters;
    use crate::filters::subband::subband_filters;
    use crate::matrix::{CMatrix, ONE};
    use crate::realization::{impulse_response, realize_elementary_wavelet};

    fn re(xs: &[f64]) -> Vec<C64> {
        xs.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn decimate_and_expand() {
        assert_eq!(
            decimate(&re(&[0., 1., 2., 3., 4., 5.]), 2),
            re(&[0., 2., 4.])
        );
        assert_eq!(decimate(&re(&[0., 1., 2., 3., 4.]), 2), re(&[0., 2., 4.]));
        assert_eq!(expand(&re(&[1., 2.]), 3), re(&[1., 0., 0., 2., 0., 0.]));
        let x = re(&[3., 1., 4., 1., 5., 9., 2.]);
        assert_eq!(decimate(&x, 1), x);
        assert_eq!(expand(&x, 1), x);
        assert_eq!(decimate(&expand(&x, 3), 3), x);
        assert_eq!(
            expand(&decimate(&x, 2), 2)[..7],
            re(&[3., 0., 4., 0., 5., 0., 2.])[..]
        );
    }

    #[test]
    fn convolution_examples() {
        let x = re(&[1., 2., 3., 4.]);
        assert_eq!(circular_convolve(&x, &[ONE]).unwrap(), x);
        assert_eq!(
            circular_convolve(&x, &re(&[0., 1.])).unwrap(),
            re(&[4., 1., 2., 3.])
        );
        assert_eq!(circular_shift(&x, 1), re(&[4., 1., 2., 3.]));
        assert!(circular_convolve(&x, &re(&[1.; 5])).is_err());
    }

    #[test]
    fn haar_analysis() {
        let filters = subband_filters(&FilterParameters::elementary(2).unwrap()).unwrap();
        let bands = analyze(&re(&[1., 1., 1., 1.]), &filters, 2).unwrap();
        for b in &bands.bands {
            for v in b {
                assert!((v - ONE).norm() < 1e-15);
            }
        }
        assert!((bands.energy() - 4.0).abs() < 1e-12);
        let zero = analyze(&[ZERO; 6], &filters, 2).unwrap();
        assert!(zero.bands.iter().flatten().all(|v| *v == ZERO));
        assert!(analyze(&re(&[1., 2., 3.]), &filters, 2).is_err());
    }

    #[test]
    fn haar_round_trip() {
        let filters = subband_filters(&FilterParameters::elementary(2).unwrap()).unwrap();
        let x: Vec<C64> = (0..64)
            .map(|i| C64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let y = synthesize(&analyze(&x, &filters, 2).unwrap(), &filters, 2).unwrap();
        let shifted = circular_shift(&x, filters.delay());
        let err: f64 = y
            .iter()
            .zip(&shifted)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn synthesize_rejects_ragged_bands() {
        let filters = subband_filters(&FilterParameters::elementary(2).unwrap()).unwrap();
        let bands = SubbandSet {
            bands: vec![re(&[1., 2.]), re(&[1.])],
        };
        assert!(synthesize(&bands, &filters, 2).is_err());
        let zero = SubbandSet {
            bands: vec![vec![ZERO; 3]; 2],
        };
        assert!(synthesize(&zero, &filters, 2)
            .unwrap()
            .iter()
            .all(|v| *v == ZERO));
    }

    #[test]
    fn simulate_impulse_matches_markov_parameters() {
        let r = realize_elementary_wavelet(3).unwrap();
        let h = impulse_response(&r, 6).unwrap();
        for j in 0..3 {
            let mut inputs = vec![vec![ZERO; 3]; 6];
            inputs[0][j] = ONE;
            let (y, _) = simulate(&r, &inputs, &vec![ZERO; r.state_dim()]).unwrap();
            for (k, yk) in y.iter().enumerate() {
                for i in 0..3 {
                    assert!((yk[i] - h[k][(i, j)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn simulate_static_gain() {
        let r = Realization::static_gain(CMatrix::identity(2));
        let u = vec![re(&[1., 2.]), re(&[3., 4.])];
        let (y, x) = simulate(&r, &u, &[]).unwrap();
        assert_eq!(y, u);
        assert!(x.is_empty());
        assert!(simulate(&r, &[re(&[1.])], &[]).is_err());
    }
}
