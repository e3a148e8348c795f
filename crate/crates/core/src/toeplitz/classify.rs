//! Fredholm-type verdicts for `T_φ + F` modulo the finite-rank operators.
//!
//! Modulo finite-rank operators only the symbol matters. For a non-constant
//! Laurent polynomial the essential spectrum is the connected curve `φ(𝕋)`,
//! so when 0 lies on it, 0 is an accumulation point of the spectrum of `π(T)`
//! and `π(T)` cannot be Drazin invertible: off the zero symbol, "not Fredholm"
//! implies "not B-Fredholm". The zero symbol gives `π(T) = 0`, which is
//! Drazin invertible (with inverse 0) but not invertible.

use serde::{Deserialize, Serialize};

use crate::drazin::drazin_index;
use crate::error::{Error, Result};
use crate::linalg::DEFAULT_RANK_TOL;
use crate::matrix::C64;

use super::element::{Space, ToeplitzElement};
use super::index::{kernel_cokernel_oracle, place, symbol_zeros, Placement, DEFAULT_ORACLE_SIZES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorReport {
    pub fredholm: bool,
    pub b_fredholm: bool,
    pub generalized_fredholm: bool,
    pub b_weyl: bool,
    pub index: Option<i64>,
    /// Symbol zeros found on the unit circle.
    pub circle_zeros: Vec<C64>,
    /// The symbol is zero, so `T` is finite rank.
    pub finite_rank_only: bool,
}

/// Classifies `t` modulo finite-rank operators. `tol` is the distance from the
/// unit circle below which a symbol zero is examined as a circle zero.
pub fn classify_operator(t: &ToeplitzElement, tol: f64) -> Result<OperatorReport> {
    if t.symbol().is_zero() {
        return Ok(OperatorReport {
            fredholm: false,
            b_fredholm: true,
            generalized_fredholm: true,
            b_weyl: true,
            index: Some(0),
            circle_zeros: Vec::new(),
            finite_rank_only: true,
        });
    }
    let z = symbol_zeros(t.symbol())?;
    let mut inside = 0i64;
    let mut circle_zeros = Vec::new();
    for &root in &z.roots {
        match place(&z.q, root, tol) {
            Placement::Inside => inside += 1,
            Placement::Outside => {}
            Placement::OnCircle => circle_zeros.push(root),
            Placement::Ambiguous => {
                return Err(Error::BoundaryAmbiguous {
                    root,
                    distance: (1.0 - root.norm()).abs(),
                })
            }
        }
    }
    if !circle_zeros.is_empty() {
        return Ok(OperatorReport {
            fredholm: false,
            b_fredholm: false,
            generalized_fredholm: false,
            b_weyl: false,
            index: None,
            circle_zeros,
            finite_rank_only: false,
        });
    }
    let index = match t.space() {
        Space::Unilateral => -(z.dmin as i64 + inside),
        Space::Bilateral => 0,
    };
    Ok(OperatorReport {
        fredholm: true,
        b_fredholm: true,
        generalized_fredholm: true,
        b_weyl: index == 0,
        index: Some(index),
        circle_zeros,
        finite_rank_only: false,
    })
}

/// Element verdict (modulo finite rank) next to an operator-level verdict
/// computed without the symbol calculus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub element_b_fredholm: bool,
    /// `None` when the operator test does not apply (symbol zeros on the circle).
    pub operator_b_fredholm: Option<bool>,
    pub operator_index: Option<i64>,
    /// Element B-Fredholm implies operator B-Fredholm, with matching index.
    pub consistent: bool,
    pub method: String,
}

/// Checks that a B-Fredholm element is a B-Fredholm operator.
///
/// For the zero symbol `T = F`: the ranks of `F^k` stagnate at the Drazin
/// index `n`, `R(T^n)` is finite dimensional, and `T` acts invertibly on it,
/// so `T` is B-Fredholm of index 0. Otherwise the finite-section oracle must
/// stabilize, which makes `T` Fredholm.
pub fn element_operator_consistency(t: &ToeplitzElement, tol: f64) -> Result<ConsistencyReport> {
    let element = classify_operator(t, tol)?;
    let (operator_b_fredholm, operator_index, method) = if element.finite_rank_only {
        let index_note = match t.perturbation() {
            Some(f) => format!("ranks of powers of F stagnate at power {}", drazin_index(f, DEFAULT_RANK_TOL)?.0),
            None => "T = 0".to_string(),
        };
        (Some(true), Some(0), index_note)
    } else if element.fredholm {
        let series = kernel_cokernel_oracle(t, &oracle_sizes(t))?;
        match series.index() {
            Some(i) => (Some(true), Some(i), format!("finite sections stabilized at {:?}", series.sizes)),
            None => (Some(false), None, "finite sections did not stabilize".to_string()),
        }
    } else {
        (None, None, "symbol vanishes on the circle".to_string())
    };
    let consistent = !element.b_fredholm || (operator_b_fredholm == Some(true) && operator_index == element.index);
    Ok(ConsistencyReport {
        element_b_fredholm: element.b_fredholm,
        operator_b_fredholm,
        operator_index,
        consistent,
        method,
    })
}

fn oracle_sizes(t: &ToeplitzElement) -> Vec<usize> {
    let min = t.min_section_size();
    DEFAULT_ORACLE_SIZES.iter().map(|&n| n + min).collect()
}
