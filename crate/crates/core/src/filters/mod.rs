//! Wavelet filters in evaluation form: the parametrization, pointwise
//! evaluation and sampled membership checks.

pub mod checks;
pub mod eval;
pub mod params;
pub mod subband;

pub use checks::{
    check_paraunitary, check_perfect_reconstruction, check_symmetry, conjugate_product_check,
    frequency_pr_check, quotient_decimation_check, CheckConfig, CheckReport,
};
pub use eval::{
    decimated_unitary_eval, dft_matrix, elementary_unitary_eval, elementary_wavelet_eval,
    permutation_phat, wavelet_eval, ModulationStructure,
};
pub use params::{
    box_to_params, params_to_box, sample_box, sample_parameters, BoxFactor, BoxPoint, Factor,
    FilterParameters,
};
pub use subband::{subband_filters, SubbandFilterSet};
