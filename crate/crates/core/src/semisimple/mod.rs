//! Finite-dimensional semisimple algebras `M_{n_1}(C) ⊕ ... ⊕ M_{n_r}(C)`
//! and Fredholm theory relative to a block ideal.

mod classify;
mod element;
mod regularity;
mod spectrum;
mod trace;

pub use classify::{
    classify, is_b_fredholm, is_fredholm, is_fredholm_at, is_generalized_fredholm, project, witness_holds, witness_search,
    BlockDrazin, ClassificationReport, GeneralizedFredholm, Projection, WitnessSource,
};
pub use element::{BlockAlgebra, BlockElement, IdealSpec};
pub use regularity::{
    check_closure_props, check_regularity_axioms, Axiom, ClosureOutcome, ClosureReport, Predicate, RegularityConfig,
    RegularityReport, Violation,
};
pub use spectrum::{
    b_fredholm_spectrum, fredholm_spectrum, spectral_mapping_check, spectrum_match_threshold, SpectralMappingReport,
};
pub use trace::{
    b_weyl_decompose, index, index_with_inverse, index_with_lift, quotient_drazin_lift, socle_trace,
    BWeylDecomposition,
};
