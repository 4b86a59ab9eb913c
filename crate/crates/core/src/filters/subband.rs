//! Scalar band filters read off the first column of an FIR wavelet filter.

use crate::error::{Error, Result};
use crate::matrix::C64;
use crate::realization::{impulse_response, realize_wavelet};

use super::params::FilterParameters;

/// Trailing taps at or below this magnitude are dropped.
const TAP_EPS: f64 = 1e-13;

/// Impulse responses `h_k(t)` with `f̂_k(z) = Σ_t h_k(t) z^{−t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandFilterSet {
    pub filters: Vec<Vec<C64>>,
}

impl SubbandFilterSet {
    pub fn bands(&self) -> usize {
        self.filters.len()
    }

    /// Shared synthesis delay `T = max_k len(h_k) − 1`.
    pub fn delay(&self) -> usize {
        self.filters
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    pub fn max_len(&self) -> usize {
        self.filters.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Conjugate time reversals `g_k(t) = conj(h_k(T − t))`, all of length `T + 1`.
    pub fn synthesis_filters(&self) -> Vec<Vec<C64>> {
        let t = self.delay();
        self.filters
            .iter()
            .map(|h| {
                (0..=t)
                    .map(|s| h.get(t - s).map_or(C64::new(0.0, 0.0), |x| x.conj()))
                    .collect()
            })
            .collect()
    }

    /// `Σ_k Σ_t |h_k(t)|²`.
    pub fn energy(&self) -> f64 {
        self.filters.iter().flatten().map(|x| x.norm_sqr()).sum()
    }
}

/// Band filters of an FIR wavelet filter, taken from the first input column
/// of the realization's impulse response. The response vanishes after
/// `state_dim` steps, so every filter has at most `state_dim + 1` taps.
pub fn subband_filters(params: &FilterParameters) -> Result<SubbandFilterSet> {
    if !params.is_fir() {
        return Err(Error::NotFir);
    }
    let r = realize_wavelet(params)?;
    let h = impulse_response(&r, r.state_dim() + 1)?;
    let filters = (0..params.n())
        .map(|k| {
            let mut taps: Vec<C64> = h.iter().map(|m| m[(k, 0)]).collect();
            while taps.len() > 1 && taps.last().is_some_and(|x| x.norm() <= TAP_EPS) {
                taps.pop();
            }
            for x in taps.iter_mut() {
                if x.norm() <= TAP_EPS {
                    *x = C64::new(0.0, 0.0);
                }
            }
            taps
        })
        .collect();
    Ok(SubbandFilterSet { filters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::eval::wavelet_eval;
    use crate::filters::params::{sample_parameters, Factor};
    use crate::matrix::{ONE, ZERO};
    use std::f64::consts::{FRAC_1_SQRT_2, TAU};

    fn close(a: &[C64], b: &[f64]) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|(x, &y)| (x - C64::new(y, 0.0)).norm() < 1e-14)
    }

    #[test]
    fn haar_type_filters() {
        let s = FRAC_1_SQRT_2;
        let f = subband_filters(&FilterParameters::elementary(2).unwrap()).unwrap();
        assert!(close(&f.filters[0], &[s]));
        assert!(close(&f.filters[1], &[0.0, s]));
        assert_eq!(f.delay(), 1);
    }

    #[test]
    fn printed_degree_three_at_zero_pole() {
        let s = FRAC_1_SQRT_2;
        let p = FilterParameters::new(2, 0.0, vec![Factor::basis(2, 1, ZERO)]).unwrap();
        let f = subband_filters(&p).unwrap();
        assert!(close(&f.filters[0], &[s]));
        assert!(close(&f.filters[1], &[0.0, 0.0, 0.0, s]));
    }

    #[test]
    fn first_column_matches_evaluation() {
        for seed in 0..20 {
            let n = 2 + (seed as usize % 3);
            let p = sample_parameters(seed, n, seed as usize % 5, 0.0).unwrap();
            let f = subband_filters(&p).unwrap();
            for k in 0..8 {
                let z = C64::from_polar(1.0, TAU * k as f64 / 8.0 + 0.2);
                let w = wavelet_eval(&p, z).unwrap();
                for (band, h) in f.filters.iter().enumerate() {
                    let mut acc = ZERO;
                    let mut zp = ONE;
                    for &tap in h {
                        acc += tap * zp;
                        zp /= z;
                    }
                    assert!((acc - w[(band, 0)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unit_energy_by_circle_quadrature() {
        // Parseval: (1/K) Σ_z Σ_k |f̂_k(z)|² equals the tap energy once K
        // exceeds the filter length; the column of a paraunitary W has unit norm.
        for seed in 0..20 {
            let n = 2 + (seed as usize % 3);
            let p = sample_parameters(1000 + seed, n, 1 + seed as usize % 4, 0.0).unwrap();
            let f = subband_filters(&p).unwrap();
            let k_pts = 4 * f.max_len() + 8;
            let quad: f64 = (0..k_pts)
                .map(|k| {
                    let z = C64::from_polar(1.0, TAU * k as f64 / k_pts as f64);
                    let w = wavelet_eval(&p, z).unwrap();
                    (0..n).map(|b| w[(b, 0)].norm_sqr()).sum::<f64>()
                })
                .sum::<f64>()
                / k_pts as f64;
            assert!((quad - 1.0).abs() < 1e-12);
            assert!((f.energy() - quad).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_iir() {
        let p =
            FilterParameters::new(2, 0.5, vec![Factor::basis(2, 1, C64::new(0.1, 0.0))]).unwrap();
        assert!(matches!(subband_filters(&p), Err(Error::NotFir)));
    }

    #[test]
    fn synthesis_filters_are_reversed_conjugates() {
        let f = SubbandFilterSet {
            filters: vec![
                vec![C64::new(1.0, 1.0)],
                vec![C64::new(0.0, 0.0), C64::new(2.0, -1.0)],
            ],
        };
        let g = f.synthesis_filters();
        assert_eq!(g[0], vec![ZERO, C64::new(1.0, -1.0)]);
        assert_eq!(g[1], vec![C64::new(2.0, 1.0), ZERO]);
    }
}
