//! Fredholm and B-Fredholm spectra of Toeplitz elements as sampled curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::qr_pivoted;
use crate::matrix::{ComplexMatrix, C64};
use crate::poly::{degree, ensure_nonconstant, poly_eval, poly_eval_scalar};
use crate::sets::hausdorff;

use super::classify::classify_operator;
use super::element::ToeplitzElement;
use super::index::DEFAULT_CIRCLE_TOL;

pub const DEFAULT_CURVE_SAMPLES: usize = 1024;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumCurve {
    pub sigma_f: Vec<C64>,
    pub sigma_bf: Vec<C64>,
    /// Every sample was classified as neither Fredholm nor B-Fredholm.
    pub coincide: bool,
}

/// Samples `φ(e^{iθ})` and classifies `T - λ` at each sample point.
pub fn bf_spectrum_curve(t: &ToeplitzElement, samples: usize) -> Result<SpectrumCurve> {
    if t.symbol().is_constant() {
        return Err(Error::InvalidInput("spectrum curve needs a non-constant symbol".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let curve = t.symbol().curve(samples);
    let mut sigma_f = Vec::with_capacity(samples);
    let mut sigma_bf = Vec::with_capacity(samples);
    for &lambda in &curve {
        let r = classify_operator(&t.minus_scalar(lambda), DEFAULT_CIRCLE_TOL)?;
        if !r.fredholm {
            sigma_f.push(lambda);
        }
        if !r.b_fredholm {
            sigma_bf.push(lambda);
        }
    }
    let coincide = sigma_f.len() == samples && sigma_bf.len() == samples;
    Ok(SpectrumCurve {
        sigma_f,
        sigma_bf,
        coincide,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveMappingReport {
    /// `f(φ(e^{iθ}))`.
    pub mapped_curve: Vec<C64>,
    /// `(f∘φ)(e^{iθ})`, the symbol curve of `f(T)` modulo finite rank.
    pub image_curve: Vec<C64>,
    pub distance: f64,
    pub tol: f64,
    /// Section size on which `f(T) - T_{f∘φ}` was examined, and its rank there.
    pub discrepancy_sections: Vec<(usize, usize)>,
    /// The discrepancy has the same rank on both sections and lives in the
    /// top-left corner of size `deg f · bandwidth`.
    pub discrepancy_finite_rank: bool,
    pub holds: bool,
}

/// Compares `f(σ_BF(T))` with `σ_BF(f(T))` for a pure Toeplitz `T`.
pub fn spectral_mapping_bf_check(t: &ToeplitzElement, f: &[C64], tol: f64) -> Result<CurveMappingReport> {
    spectral_mapping_bf_check_with_samples(t, f, tol, DEFAULT_CURVE_SAMPLES)
}

pub fn spectral_mapping_bf_check_with_samples(t: &ToeplitzElement, f: &[C64], tol: f64, samples: usize) -> Result<CurveMappingReport> {
    ensure_nonconstant(f)?;
    if !t.is_pure() {
        return Err(Error::InvalidInput("curve mapping check needs a pure Toeplitz element".into()));
    }
    let phi = t.symbol();
    if phi.is_constant() {
        return Err(Error::InvalidInput("curve mapping check needs a non-constant symbol".into()));
    }
    let composed = phi.compose(f)?;
    let mapped_curve: Vec<C64> = phi.curve(samples).into_iter().map(|z| poly_eval_scalar(f, z)).collect();
    let image_curve = composed.curve(samples);
    let distance = hausdorff(&mapped_curve, &image_curve);

    let image = ToeplitzElement::new(composed, None, t.space())?;
    let deg_f = degree(f).unwrap_or(0);
    let reach = deg_f * phi.bandwidth();
    let base = 2 * reach + 8;
    let mut discrepancy_sections = Vec::new();
    let mut corner_only = true;
    for n in [base, 2 * base] {
        let margin = reach as i64;
        let idx = t.section_indices(n);
        let wide = (if t.in_domain(idx.start - margin) { idx.start - margin } else { idx.start })..idx.end + margin;
        let big = t.section(wide.clone(), wide.clone());
        let powered = poly_eval(&big, f)?;
        let off = (idx.start - wide.start) as usize;
        let dim = (idx.end - idx.start) as usize;
        let cropped = powered.submatrix(off..off + dim, off..off + dim);
        let diff = &cropped - &image.section(idx.clone(), idx.clone());
        let scale = 1.0 + cropped.max_abs();
        discrepancy_sections.push((n, qr_pivoted(&diff).rank_against(1e-10, scale)));
        corner_only &= corner_supported(&diff, reach, scale);
    }
    let discrepancy_finite_rank = corner_only && discrepancy_sections[0].1 == discrepancy_sections[1].1;
    Ok(CurveMappingReport {
        holds: distance <= tol && discrepancy_finite_rank,
        mapped_curve,
        image_curve,
        distance,
        tol,
        discrepancy_sections,
        discrepancy_finite_rank,
    })
}

/// Entries outside the top-left `reach × reach` corner vanish. The crop is
/// exact, so for bilateral sections (where `f(T) = T_{f∘φ}`) the whole
/// difference vanishes and the test still applies.
fn corner_supported(diff: &ComplexMatrix, reach: usize, scale: f64) -> bool {
    let n = diff.rows();
    (0..n).all(|i| (0..n).all(|j| (i < reach && j < reach) || diff[(i, j)].norm() <= 1e-12 * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ONE, ZERO};
    use crate::toeplitz::symbol::LaurentSymbol;

    #[test]
    fn shift_curve_is_unit_circle() {
        let t = ToeplitzElement::unilateral(LaurentSymbol::shift());
        let c = bf_spectrum_curve(&t, 64).unwrap();
        assert!(c.coincide);
        assert!(c.sigma_f.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn cosine_curve_is_segment() {
        let s = LaurentSymbol::from_terms(&[(1, ONE), (-1, ONE)]).unwrap();
        let c = bf_spectrum_curve(&ToeplitzElement::unilateral(s), 64).unwrap();
        assert!(c.coincide);
        assert!(c.sigma_bf.iter().all(|z| z.im.abs() < 1e-12 && z.re.abs() <= 2.0 + 1e-12));
    }

    #[test]
    fn constant_symbol_rejected() {
        let t = ToeplitzElement::unilateral(LaurentSymbol::constant(ONE));
        assert!(bf_spectrum_curve(&t, 16).is_err());
    }

    #[test]
    fn mapping_examples() {
        let t = ToeplitzElement::unilateral(LaurentSymbol::shift());
        let r = spectral_mapping_bf_check(&t, &[ZERO, ONE], 1e-6).unwrap();
        assert!(r.holds);
        let r = spectral_mapping_bf_check(&t, &[ZERO, ZERO, ONE], 1e-6).unwrap();
        assert!(r.holds);
        assert_eq!(r.discrepancy_sections[0].1, 0);

        let cos = ToeplitzElement::unilateral(LaurentSymbol::from_terms(&[(1, ONE), (-1, ONE)]).unwrap());
        let r = spectral_mapping_bf_check(&cos, &[ZERO, ZERO, ONE], 1e-6).unwrap();
        assert!(r.holds);
        assert_eq!(r.discrepancy_sections[0].1, 1);
    }
}
