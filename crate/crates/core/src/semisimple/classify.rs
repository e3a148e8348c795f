//! Fredholm-type predicates modulo a block ideal.
//!
//! The quotient `A/J` is the direct sum of the blocks outside `J`, so each
//! predicate reduces to a per-block matrix question:
//!
//! * Fredholm: every surviving block is invertible.
//! * B-Fredholm: every surviving block is Drazin invertible (always true for
//!   matrices; the Drazin data is still computed and verified).
//! * generalized Fredholm: every surviving block has Drazin index at most 1,
//!   i.e. `range(a) ⊕ null(a)` is the whole block space.
//!
//! `classify` evaluates B-Fredholmness twice, once from the quotient Drazin
//! inverse and once by searching for `n >= 1` and `c` with `a^n c a^n - a^n ∈ J`
//! and `e - a^n c - c a^n` Fredholm mod `J`, and refuses to answer if the two
//! routes disagree.

use serde::{Deserialize, Serialize};

use crate::drazin::{drazin_inverse, DrazinResult, VERIFY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, numerical_rank_against};
use crate::matrix::{ComplexMatrix, C64};

use super::element::{BlockElement, IdealSpec};
use super::trace;

/// Image of an element in `A/J`: the blocks outside the ideal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub kept: Vec<usize>,
    pub deleted: Vec<usize>,
    pub blocks: Vec<ComplexMatrix>,
}

impl Projection {
    /// The quotient is the zero ring.
    pub fn is_zero_ring(&self) -> bool {
        self.kept.is_empty()
    }
}

/// Drazin data for one surviving block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockDrazin {
    pub block: usize,
    pub result: DrazinResult,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub fredholm: bool,
    pub generalized_fredholm: bool,
    pub b_fredholm: bool,
    pub b_weyl: bool,
    /// Exponent `n` of the constructive witness (`c = b^n`, `b` the quotient Drazin inverse).
    pub witness_n: Option<usize>,
    pub witness_c: Option<BlockElement>,
    /// Smallest `n` found by the independent pseudo-inverse search, when it ran.
    pub search_n: Option<usize>,
    pub quotient_drazin: Vec<BlockDrazin>,
    pub index: Option<C64>,
}

/// Result of the generalized-Fredholm decision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneralizedFredholm {
    pub holds: bool,
    /// `b` with `aba - a ∈ J` and `e - ab - ba` Fredholm mod `J`.
    pub witness: Option<BlockElement>,
    pub source: Option<WitnessSource>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    /// Blockwise Moore-Penrose inverse of the quotient image.
    PseudoInverse,
    /// Group inverse from the core-nilpotent splitting.
    GroupInverse,
}

fn check_compatible(a: &BlockElement, ideal: &IdealSpec) -> Result<()> {
    ideal.validate(a.algebra())
}

pub fn project(a: &BlockElement, ideal: &IdealSpec) -> Result<Projection> {
    check_compatible(a, ideal)?;
    let kept = ideal.complement(a.algebra());
    let deleted = ideal.members().collect();
    let blocks = kept.iter().map(|&i| a.block(i).clone()).collect();
    Ok(Projection { kept, deleted, blocks })
}

/// `π(a)` invertible in `A/J`.
pub fn is_fredholm(a: &BlockElement, ideal: &IdealSpec, tol: f64) -> Result<bool> {
    is_fredholm_against(a, ideal, tol, 0.0)
}

/// `a - λe` Fredholm mod `J`; ranks are judged against `‖a‖ + |λ|`, so a
/// block that cancels to rounding noise counts as singular.
pub fn is_fredholm_at(a: &BlockElement, ideal: &IdealSpec, lambda: C64, tol: f64) -> Result<bool> {
    is_fredholm_against(&a.shift(-lambda), ideal, tol, a.norm() + lambda.norm())
}

/// Fredholm test whose rank threshold is at least `tol * reference`; used when
/// `a` is a combination of terms of size `reference` that may cancel to noise.
fn is_fredholm_against(a: &BlockElement, ideal: &IdealSpec, tol: f64, reference: f64) -> Result<bool> {
    let proj = project(a, ideal)?;
    for b in &proj.blocks {
        if numerical_rank_against(b, tol, reference)?.rank < b.rows() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lifts per-block quotient data back to `A`, filling ideal blocks with zero.
fn lift(a: &BlockElement, kept: &[usize], quotient_blocks: &[ComplexMatrix]) -> BlockElement {
    a.map_blocks(|i, b| match kept.iter().position(|&k| k == i) {
        Some(pos) => quotient_blocks[pos].clone(),
        None => ComplexMatrix::zeros(b.rows(), b.cols()),
    })
}

/// Whether `x` lies in `J` up to `VERIFY_TOL * scale`.
fn in_ideal_rel(x: &BlockElement, ideal: &IdealSpec, scale: f64) -> bool {
    x.in_ideal(ideal, VERIFY_TOL * scale.max(1.0))
}

/// Checks the two witness conditions for `(n, c)`:
/// `a^n c a^n - a^n ∈ J` and `e - a^n c - c a^n` Fredholm mod `J`.
pub fn witness_holds(a: &BlockElement, ideal: &IdealSpec, n: usize, c: &BlockElement, tol: f64) -> Result<bool> {
    a.ensure_same_algebra(c)?;
    let an = a.pow(n as u32);
    let anc = an.mul(c)?;
    let can = c.mul(&an)?;
    let inner = anc.mul(&an)?.sub(&an)?;
    let na = an.norm();
    let scale = na * (na * c.norm()).max(1.0);
    if !in_ideal_rel(&inner, ideal, scale) {
        return Ok(false);
    }
    let t = a.algebra().identity().sub(&anc)?.sub(&can)?;
    is_fredholm_against(&t, ideal, tol, 1.0 + 2.0 * na * c.norm())
}

/// Generalized-Fredholm decision for `a` modulo `J`.
///
/// The blockwise pseudo-inverse is tried first; when it fails, the
/// core-nilpotent criterion (Drazin index at most 1 on every surviving block)
/// decides, and the group inverse serves as witness.
pub fn is_generalized_fredholm(a: &BlockElement, ideal: &IdealSpec, tol: f64) -> Result<GeneralizedFredholm> {
    let proj = project(a, ideal)?;
    let pinv = proj
        .blocks
        .iter()
        .map(|b| linalg::pseudo_inverse(b, tol))
        .collect::<Result<Vec<_>>>()?;
    let candidate = lift(a, &proj.kept, &pinv);
    if witness_holds(a, ideal, 1, &candidate, tol)? {
        return Ok(GeneralizedFredholm {
            holds: true,
            witness: Some(candidate),
            source: Some(WitnessSource::PseudoInverse),
        });
    }

    let drazin = proj
        .blocks
        .iter()
        .map(|b| drazin_inverse(b, tol))
        .collect::<Result<Vec<_>>>()?;
    if drazin.iter().any(|d| d.drazin_index > 1) {
        return Ok(GeneralizedFredholm {
            holds: false,
            witness: None,
            source: None,
        });
    }
    let group: Vec<_> = drazin.into_iter().map(|d| d.inverse).collect();
    let witness = lift(a, &proj.kept, &group);
    if !witness_holds(a, ideal, 1, &witness, tol)? {
        return Err(Error::Consistency(
            "group inverse fails the generalized-Fredholm conditions although every block has index <= 1".into(),
        ));
    }
    Ok(GeneralizedFredholm {
        holds: true,
        witness: Some(witness),
        source: Some(WitnessSource::GroupInverse),
    })
}

/// Direct route: Drazin-invert every surviving block and build the
/// constructive witness `n = max(k, 1)`, `c = b^n`.
pub fn is_b_fredholm(a: &BlockElement, ideal: &IdealSpec, tol: f64) -> Result<ClassificationReport> {
    let proj = project(a, ideal)?;
    let mut quotient_drazin = Vec::with_capacity(proj.kept.len());
    for (&block, m) in proj.kept.iter().zip(&proj.blocks) {
        quotient_drazin.push(BlockDrazin {
            block,
            result: drazin_inverse(m, tol)?,
        });
    }
    let k = quotient_drazin
        .iter()
        .map(|d| d.result.drazin_index)
        .max()
        .unwrap_or(0);
    let n = k.max(1);
    let b_powers: Vec<ComplexMatrix> = quotient_drazin
        .iter()
        .map(|d| d.result.inverse.pow(n as u32))
        .collect();
    let c = lift(a, &proj.kept, &b_powers);
    if !witness_holds(a, ideal, n, &c, tol)? {
        return Err(Error::Consistency(format!(
            "constructive witness (n = {n}, c = b^n) fails the witness conditions"
        )));
    }

    let fredholm = quotient_drazin.iter().all(|d| d.result.splitting.core_rank == d.result.inverse.rows());
    let generalized_fredholm = quotient_drazin.iter().all(|d| d.result.drazin_index <= 1);
    let a0 = lift(
        a,
        &proj.kept,
        &quotient_drazin.iter().map(|d| d.result.inverse.clone()).collect::<Vec<_>>(),
    );
    let index = trace::index_with_inverse(a, ideal, &a0, tol)?;
    Ok(ClassificationReport {
        fredholm,
        generalized_fredholm,
        b_fredholm: true,
        b_weyl: index.norm() <= index_zero_tol(a, &a0),
        witness_n: Some(n),
        witness_c: Some(c),
        search_n: None,
        quotient_drazin,
        index: Some(index),
    })
}

/// Absolute threshold below which a computed index counts as zero.
pub(crate) fn index_zero_tol(a: &BlockElement, a0: &BlockElement) -> f64 {
    1e-8 * (1.0 + a.norm() * a0.norm()) * a.algebra().dim() as f64
}

/// Witness route: smallest `n` in `1..=bound` for which the blockwise
/// pseudo-inverse of `π(a)^n` satisfies the witness conditions.
pub fn witness_search(a: &BlockElement, ideal: &IdealSpec, tol: f64) -> Result<Option<(usize, BlockElement)>> {
    let proj = project(a, ideal)?;
    let bound = proj.blocks.iter().map(|b| b.rows()).sum::<usize>().max(1);
    let norms: Vec<f64> = proj.blocks.iter().map(|b| b.op_norm()).collect();
    for n in 1..=bound {
        let pinv = proj
            .blocks
            .iter()
            .zip(&norms)
            .map(|(b, nb)| linalg::pseudo_inverse_against(&b.pow(n as u32), tol, nb.powi(n as i32)))
            .collect::<Result<Vec<_>>>()?;
        let c = lift(a, &proj.kept, &pinv);
        if witness_holds(a, ideal, n, &c, tol)? {
            log::debug!("witness found at n = {n} of {bound}");
            return Ok(Some((n, c)));
        }
    }
    log::debug!("no witness up to n = {bound}");
    Ok(None)
}

/// Full classification with both B-Fredholm routes cross-checked.
pub fn classify(a: &BlockElement, ideal: &IdealSpec, tol: f64) -> Result<ClassificationReport> {
    let mut report = is_b_fredholm(a, ideal, tol)?;
    let fredholm = is_fredholm(a, ideal, tol)?;
    if fredholm != report.fredholm {
        return Err(Error::Consistency(format!(
            "rank test says Fredholm = {fredholm}, Drazin splitting says {}",
            report.fredholm
        )));
    }
    let search = witness_search(a, ideal, tol)?;
    let witness = search.is_some();
    if witness != report.b_fredholm {
        return Err(Error::EquivalenceViolation {
            direct: report.b_fredholm,
            witness,
        });
    }
    report.search_n = search.map(|(n, _)| n);
    let gf = is_generalized_fredholm(a, ideal, tol)?;
    if gf.holds != report.generalized_fredholm {
        return Err(Error::Consistency(format!(
            "generalized-Fredholm witness says {}, index criterion says {}",
            gf.holds, report.generalized_fredholm
        )));
    }
    Ok(report)
}
