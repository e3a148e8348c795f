//! Drazin inverses, B-Fredholm classification in block algebras, and
//! Toeplitz models on the circle.

pub mod drazin;
pub mod eigen;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod sample;
pub mod scenario;
pub mod semisimple;
pub mod toeplitz;
pub mod sets;
pub mod suite;

pub use drazin::{drazin_inverse, DrazinResult};
pub use eigen::{eigen_multiset, EigenMultiset};
pub use error::{Error, Result};
pub use linalg::{numerical_rank, RankDecision};
pub use matrix::{ComplexMatrix, C64};
pub use poly::poly_eval;
pub use semisimple::{BlockAlgebra, BlockElement, IdealSpec};
pub use toeplitz::{LaurentSymbol, ToeplitzElement};
