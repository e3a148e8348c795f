//! Toeplitz operators `T_φ + F` on `ℓ²(ℕ)` or `ℓ²(ℤ)` with Laurent-polynomial
//! symbol `φ` and a finite-rank perturbation `F`, studied modulo the
//! finite-rank operators.

mod bilateral;
mod classify;
mod element;
mod index;
mod spectrum;
mod symbol;

pub use bilateral::{bilateral_shift_example, polar_grid, BilateralReport, Conclusion, LambdaVerdict, Membership};
pub use classify::{classify_operator, element_operator_consistency, ConsistencyReport, OperatorReport};
pub use element::{matvec_truncated, Space, ToeplitzElement, MAX_PERTURBATION};
pub use index::{
    inverse_bandwidth, inverse_symbol, kernel_cokernel_oracle, kernel_cokernel_oracle_with_tol, trace_commutator_index,
    winding_index, TraceIndex, TruncationSeries, WindingIndex, DEFAULT_CIRCLE_TOL, DEFAULT_ORACLE_SIZES, MAX_ORACLE_SIZE,
    ORACLE_RANK_TOL,
};
pub use spectrum::{
    bf_spectrum_curve, spectral_mapping_bf_check, spectral_mapping_bf_check_with_samples, CurveMappingReport, SpectrumCurve,
    DEFAULT_CURVE_SAMPLES,
};
pub use symbol::{LaurentSymbol, MAX_DEGREE};
