//! Trace on the ideal, the commutator index, and the B-Weyl decomposition.

use serde::{Deserialize, Serialize};

use crate::drazin::{drazin_inverse, DrazinResult, VERIFY_TOL};
use crate::eigen::eigen_multiset;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};

use super::classify::{is_b_fredholm, project};
use super::element::{BlockElement, IdealSpec};

/// `τ(a) = Σ m(λ, a) λ` for `a ∈ J`.
///
/// Blocks outside `J` must be zero up to `tol * max(1, ‖a‖)`. The spectral sum
/// is cross-checked against the plain matrix traces of the ideal blocks.
pub fn socle_trace(a: &BlockElement, ideal: &IdealSpec, tol: f64) -> Result<C64> {
    ideal.validate(a.algebra())?;
    let norm = a.norm();
    if !a.in_ideal(ideal, tol * norm.max(1.0)) {
        return Err(Error::Domain(
            "trace is only defined on the ideal; element has non-zero blocks outside it".into(),
        ));
    }
    let mut spectral = ZERO;
    let mut plain = ZERO;
    for (i, b) in a.blocks().iter().enumerate() {
        spectral += eigen_multiset(b, tol)?.weighted_sum();
        if ideal.contains(i) {
            plain += b.trace();
        }
    }
    let slack = 1e-8 * (1.0 + norm) * a.algebra().dim() as f64;
    if (spectral - plain).norm() > slack {
        return Err(Error::Consistency(format!(
            "spectral trace {spectral} disagrees with matrix trace {plain}"
        )));
    }
    Ok(spectral)
}

/// `τ([a, a0])` for a given Drazin inverse `a0` of `a` modulo `J`.
pub fn index_with_inverse(a: &BlockElement, ideal: &IdealSpec, a0: &BlockElement, tol: f64) -> Result<C64> {
    let comm = a.mul(a0)?.sub(&a0.mul(a)?)?;
    let scale = (a.norm() * a0.norm()).max(1.0);
    if !comm.in_ideal(ideal, VERIFY_TOL * scale) {
        return Err(Error::Consistency("commutator [a, a0] is not in the ideal".into()));
    }
    // the membership check above is looser than socle_trace's own, so clear the noise
    socle_trace(&comm.ideal_part(ideal), ideal, tol)
}

/// Drazin inverse of `a` modulo `J`, with arbitrary `ideal_blocks` placed in the ideal slots.
pub fn quotient_drazin_lift(a: &BlockElement, ideal: &IdealSpec, ideal_blocks: Option<&BlockElement>, tol: f64) -> Result<BlockElement> {
    let proj = project(a, ideal)?;
    let mut blocks: Vec<ComplexMatrix> = match ideal_blocks {
        Some(x) => {
            a.ensure_same_algebra(x)?;
            x.ideal_part(ideal).into_blocks()
        }
        None => a.algebra().zero().into_blocks(),
    };
    for (&i, m) in proj.kept.iter().zip(&proj.blocks) {
        blocks[i] = drazin_inverse(m, tol)?.inverse;
    }
    BlockElement::new(a.algebra().clone(), blocks)
}

/// Index `i(a) = τ(a a0 - a0 a)` with the zero-padded quotient Drazin lift.
pub fn index(a: &BlockElement, ideal: &IdealSpec, tol: f64) -> Result<C64> {
    let a0 = quotient_drazin_lift(a, ideal, None, tol)?;
    index_with_inverse(a, ideal, &a0, tol)
}

/// Index computed with a caller-chosen lift: `ideal_blocks` fills the ideal slots of `a0`.
pub fn index_with_lift(a: &BlockElement, ideal: &IdealSpec, ideal_blocks: &BlockElement, tol: f64) -> Result<C64> {
    let a0 = quotient_drazin_lift(a, ideal, Some(ideal_blocks), tol)?;
    index_with_inverse(a, ideal, &a0, tol)
}

/// `a = b + c` with `b` Drazin invertible in `A` and `c ∈ J`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BWeylDecomposition {
    pub b: BlockElement,
    pub c: BlockElement,
    /// Drazin data of `b`, one entry per block of `A`.
    pub b_drazin: Vec<DrazinResult>,
}

pub fn b_weyl_decompose(a: &BlockElement, ideal: &IdealSpec, tol: f64) -> Result<BWeylDecomposition> {
    let report = is_b_fredholm(a, ideal, tol)?;
    if !report.b_weyl {
        let idx = report.index.unwrap_or(ZERO);
        return Err(Error::Domain(format!("element is not B-Weyl (index {idx})")));
    }
    let b = a.without_ideal(ideal);
    let c = a.ideal_part(ideal);
    let b_drazin = b
        .blocks()
        .iter()
        .map(|m| drazin_inverse(m, tol))
        .collect::<Result<Vec<_>>>()?;
    if !c.in_ideal_exact(ideal) {
        return Err(Error::Consistency("ideal part has blocks outside the ideal".into()));
    }
    if &b.add(&c)? != a {
        return Err(Error::Consistency("b + c does not reproduce a".into()));
    }
    Ok(BWeylDecomposition { b, c, b_drazin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;
    use crate::semisimple::element::BlockAlgebra;

    const TOL: f64 = 1e-10;

    #[test]
    fn rank_one_idempotent_has_trace_one() {
        let p = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 0.0]]);
        let a = BlockElement::from_blocks(vec![ComplexMatrix::zeros(1, 1), p]).unwrap();
        let t = socle_trace(&a, &IdealSpec::new([1]), TOL).unwrap();
        assert!((t - ONE).norm() < 1e-12);
    }

    #[test]
    fn trace_examples() {
        let alg = BlockAlgebra::new(vec![2, 2]).unwrap();
        let j = IdealSpec::new([1]);
        assert_eq!(socle_trace(&alg.zero(), &j, TOL).unwrap(), ZERO);
        let d = BlockElement::new(alg.clone(), vec![ComplexMatrix::zeros(2, 2), ComplexMatrix::diag_real(&[2.0, 3.0])]).unwrap();
        assert!((socle_trace(&d, &j, TOL).unwrap() - C64::new(5.0, 0.0)).norm() < 1e-12);
        assert!(matches!(socle_trace(&alg.identity(), &j, TOL), Err(Error::Domain(_))));
    }

    #[test]
    fn index_of_invertible_is_zero() {
        let a = BlockElement::from_blocks(vec![ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]])]).unwrap();
        assert!(index(&a, &IdealSpec::zero(), TOL).unwrap().norm() < 1e-12);
    }

    #[test]
    fn index_independent_of_lift() {
        let x = ComplexMatrix::from_real_rows(&[&[1.0, 7.0], &[-2.0, 0.5]]);
        let a = BlockElement::from_blocks(vec![ComplexMatrix::jordan(2, ZERO), x.clone()]).unwrap();
        let j = IdealSpec::new([1]);
        let other = BlockElement::from_blocks(vec![ComplexMatrix::zeros(2, 2), ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[5.0, 2.0]])]).unwrap();
        let i0 = index(&a, &j, TOL).unwrap();
        let i1 = index_with_lift(&a, &j, &other, TOL).unwrap();
        assert!((i0 - i1).norm() < 1e-10);
        assert!(i0.norm() < 1e-10);
    }

    #[test]
    fn decomposition_examples() {
        let x = ComplexMatrix::from_real_rows(&[&[1.0, 7.0], &[-2.0, 0.5]]);
        let a = BlockElement::from_blocks(vec![ComplexMatrix::jordan(2, ZERO), x.clone()]).unwrap();
        let d = b_weyl_decompose(&a, &IdealSpec::new([1]), TOL).unwrap();
        assert_eq!(d.b.block(0), &ComplexMatrix::jordan(2, ZERO));
        assert!(d.b.block(1).is_zero());
        assert!(d.c.block(0).is_zero());
        assert_eq!(d.c.block(1), &x);
        assert_eq!(d.b_drazin[0].drazin_index, 2);

        let full = IdealSpec::full(a.algebra());
        let d = b_weyl_decompose(&a, &full, TOL).unwrap();
        assert!(d.b.blocks().iter().all(|m| m.is_zero()));
        assert_eq!(d.c, a);

        let inv = BlockElement::from_blocks(vec![ComplexMatrix::diag_real(&[1.0, 2.0])]).unwrap();
        let d = b_weyl_decompose(&inv, &IdealSpec::zero(), TOL).unwrap();
        assert_eq!(d.b, inv);
        assert!(d.c.blocks()[0].is_zero());
    }
}
