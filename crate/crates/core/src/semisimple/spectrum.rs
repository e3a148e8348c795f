//! Fredholm spectrum and the spectral mapping check in the block model.

use serde::{Deserialize, Serialize};

use crate::eigen::eigen_multiset;
use crate::error::Result;
use crate::matrix::C64;
use crate::poly::{ensure_nonconstant, poly_eval_scalar};
use crate::sets::{hausdorff, max_modulus};

use super::classify::project;
use super::element::{BlockElement, IdealSpec};

/// Matching threshold for spectra: `10 tol (1 + max|λ|)`.
pub fn spectrum_match_threshold(tol: f64, points: &[C64]) -> f64 {
    10.0 * tol * (1.0 + max_modulus(points))
}

/// Drops points within the matching threshold of an earlier point.
fn dedup(points: Vec<C64>, tol: f64) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(points.len());
    for p in points {
        let radius = 10.0 * tol * (1.0 + p.norm());
        if out.iter().all(|q| (p - q).norm() > radius) {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

/// `σ_F(a)`: the eigenvalues of the blocks outside `J`, as a set.
pub fn fredholm_spectrum(a: &BlockElement, ideal: &IdealSpec, tol: f64) -> Result<Vec<C64>> {
    let proj = project(a, ideal)?;
    let mut points = Vec::new();
    for b in &proj.blocks {
        points.extend(eigen_multiset(b, tol)?.values());
    }
    Ok(dedup(points, tol))
}

/// `σ_BF(a)`; every element of a finite-dimensional algebra is B-Fredholm,
/// so the set is empty.
pub fn b_fredholm_spectrum(a: &BlockElement, ideal: &IdealSpec) -> Result<Vec<C64>> {
    project(a, ideal)?;
    Ok(Vec::new())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralMappingReport {
    /// `f(σ_F(a))`.
    pub mapped_spectrum: Vec<C64>,
    /// `σ_F(f(a))`.
    pub spectrum_of_image: Vec<C64>,
    pub distance: f64,
    pub threshold: f64,
    /// Both sides of the B-Fredholm identity (empty in this model).
    pub mapped_bf_spectrum: Vec<C64>,
    pub bf_spectrum_of_image: Vec<C64>,
    pub holds: bool,
}

/// Compares `f(σ_F(a))` with `σ_F(f(a))`, and likewise for `σ_BF`.
///
/// `f` is given by ascending coefficients and must be non-constant. A mismatch
/// is reported through `holds`, not as an error.
pub fn spectral_mapping_check(a: &BlockElement, ideal: &IdealSpec, f: &[C64], tol: f64) -> Result<SpectralMappingReport> {
    ensure_nonconstant(f)?;
    let sigma = fredholm_spectrum(a, ideal, tol)?;
    let mapped_spectrum = dedup(sigma.iter().map(|&z| poly_eval_scalar(f, z)).collect(), tol);
    let fa = a.poly_eval(f)?;
    let spectrum_of_image = fredholm_spectrum(&fa, ideal, tol)?;
    let distance = hausdorff(&mapped_spectrum, &spectrum_of_image);
    let mut all = mapped_spectrum.clone();
    all.extend(&spectrum_of_image);
    let threshold = spectrum_match_threshold(tol, &all);

    let bf = b_fredholm_spectrum(a, ideal)?;
    let mapped_bf_spectrum: Vec<C64> = bf.iter().map(|&z| poly_eval_scalar(f, z)).collect();
    let bf_spectrum_of_image = b_fredholm_spectrum(&fa, ideal)?;
    let bf_distance = hausdorff(&mapped_bf_spectrum, &bf_spectrum_of_image);

    Ok(SpectralMappingReport {
        holds: distance <= threshold && bf_distance <= threshold,
        mapped_spectrum,
        spectrum_of_image,
        distance,
        threshold,
        mapped_bf_spectrum,
        bf_spectrum_of_image,
    })
}
