//! Point-set comparisons for spectra and curves.

use crate::matrix::C64;

/// Symmetric Hausdorff distance between finite point sets.
///
/// Two empty sets are at distance 0; an empty and a non-empty set at infinity.
pub fn hausdorff(a: &[C64], b: &[C64]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    directed(a, b).max(directed(b, a))
}

fn directed(from: &[C64], to: &[C64]) -> f64 {
    from.iter()
        .map(|p| to.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Distance from `p` to the nearest point of `set` (infinity when empty).
pub fn distance_to(p: C64, set: &[C64]) -> f64 {
    set.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)
}

pub fn max_modulus(points: &[C64]) -> f64 {
    points.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
