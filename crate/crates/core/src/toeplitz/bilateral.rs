//! The bilateral shift inside the algebra generated by the shift and the
//! compact operators.
//!
//! As an operator on `ℓ²(ℤ)` the bilateral shift `T` is unitary, so `T - λ`
//! is invertible (Fredholm of index 0) for every `|λ| != 1`. Inside the
//! algebra generated by `T` and the compacts, symbols are limits of
//! polynomials in `z`, so an inverse must have a symbol with vanishing
//! negative Fourier coefficients. The symbol of `(T - λ)^-1` is `1/(z - λ)`,
//! whose coefficients live on negative degrees for `|λ| < 1` and on
//! non-negative degrees for `|λ| > 1`. The whole open disk therefore lies in
//! the spectrum relative to that algebra, and 0 is not an isolated point of
//! it. The coefficient test below is a numerical witness for this, not a proof.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{C64, ONE, ZERO};

use super::classify::classify_operator;
use super::element::ToeplitzElement;
use super::index::{CircleSamples, DEFAULT_CIRCLE_TOL};
use super::symbol::LaurentSymbol;

/// Half-width `M` of the coefficient window `-M..=M`.
const COEFF_HALF_WIDTH: usize = 256;
const IN_SPECTRUM_FRACTION: f64 = 0.5;
const OUTSIDE_FRACTION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    InSpectrum,
    NotInSpectrum,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaVerdict {
    pub lambda: C64,
    /// `T - λ` is a Fredholm operator of index 0 on `ℓ²(ℤ)`.
    pub operator_fredholm_index_zero: bool,
    /// Share of the coefficient mass of `1/(z - λ)` on negative degrees.
    pub negative_fraction: f64,
    /// Fitted ratio `|c_{k+1}| / |c_k|` on the dominant side.
    pub decay: f64,
    pub membership: Membership,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    Consistent,
    Inconsistent,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BilateralReport {
    pub check_radius: f64,
    pub points: Vec<LambdaVerdict>,
    /// `T` itself is invertible on `ℓ²(ℤ)`.
    pub operator_invertible: bool,
    pub operator_b_fredholm: bool,
    /// Verdict for `T` as an element of the generated algebra; `None` when
    /// the grid does not settle it.
    pub element_b_fredholm: Option<bool>,
    /// Every grid point with `0 < |λ| <= check_radius` was found in the spectrum.
    pub zero_non_isolated: bool,
    pub conclusion: Conclusion,
    pub note: String,
}

/// Polar grid of exactly `grid` points: the origin, then rings of radius
/// `2.5 (j + 1) / rings` with about `sqrt(grid)` angles each.
pub fn polar_grid(grid: usize) -> Vec<C64> {
    let mut points = vec![ZERO];
    if grid <= 1 {
        points.truncate(grid);
        return points;
    }
    let rest = grid - 1;
    let angles = ((rest as f64).sqrt().round() as usize).max(1);
    let rings = rest.div_ceil(angles);
    'outer: for j in 0..rings {
        let radius = 2.5 * (j + 1) as f64 / rings as f64;
        let offset = if j % 2 == 0 { 0.0 } else { 0.5 };
        for a in 0..angles {
            if points.len() == grid {
                break 'outer;
            }
            points.push(C64::from_polar(radius, TAU * (a as f64 + offset) / angles as f64));
        }
    }
    points
}

/// Fourier coefficients `c_k`, `k = -M..=M`, of `1/(z - λ)` by a DFT of size `2M + 1`.
fn resolvent_coefficients(lambda: C64, half_width: usize) -> Vec<C64> {
    let samples = CircleSamples::new(2 * half_width + 1, |z| (z - lambda).inv());
    (-(half_width as i64)..=half_width as i64).map(|k| samples.coefficient(k)).collect()
}

/// Least-squares slope of `ln |c_k|` over the leading coefficients of one side.
fn fitted_decay(side: &[C64]) -> f64 {
    let logs: Vec<(f64, f64)> = side
        .iter()
        .take(16)
        .enumerate()
        .filter(|(_, c)| c.norm() > 1e-300)
        .map(|(k, c)| (k as f64, c.norm().ln()))
        .collect();
    if logs.len() < 2 {
        return 0.0;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx).exp()
}

fn examine(lambda: C64) -> Result<LambdaVerdict> {
    let symbol = LaurentSymbol::from_terms(&[(1, ONE), (0, -lambda)])?;
    let op = classify_operator(&ToeplitzElement::bilateral(symbol), DEFAULT_CIRCLE_TOL)?;
    let operator_fredholm_index_zero = op.fredholm && op.index == Some(0);
    if !op.fredholm {
        // λ on the circle: already in the operator spectrum
        return Ok(LambdaVerdict {
            lambda,
            operator_fredholm_index_zero,
            negative_fraction: f64::NAN,
            decay: 1.0,
            membership: Membership::InSpectrum,
        });
    }
    let m = COEFF_HALF_WIDTH;
    let coeffs = resolvent_coefficients(lambda, m);
    let negative: f64 = coeffs[..m].iter().map(|c| c.norm()).sum();
    let total: f64 = coeffs.iter().map(|c| c.norm()).sum();
    let negative_fraction = negative / total;
    let positive_side: Vec<C64> = coeffs[m..].to_vec();
    let negative_side: Vec<C64> = coeffs[..m].iter().rev().copied().collect();
    let decay = if negative_fraction >= IN_SPECTRUM_FRACTION {
        fitted_decay(&negative_side)
    } else {
        fitted_decay(&positive_side)
    };
    let membership = if negative_fraction >= IN_SPECTRUM_FRACTION {
        Membership::InSpectrum
    } else if negative_fraction <= OUTSIDE_FRACTION && decay < 1.0 {
        Membership::NotInSpectrum
    } else {
        Membership::Inconclusive
    };
    Ok(LambdaVerdict {
        lambda,
        operator_fredholm_index_zero,
        negative_fraction,
        decay,
        membership,
    })
}

/// Sweeps a polar grid and reports the spectrum of the bilateral shift
/// relative to the algebra generated by the shift and the compacts.
pub fn bilateral_shift_example(check_radius: f64, grid: usize) -> Result<BilateralReport> {
    if !(check_radius > 0.0 && check_radius < 1.0) {
        return Err(Error::InvalidInput(format!("check radius must lie in (0, 1), got {check_radius}")));
    }
    if grid < 2 {
        return Err(Error::InvalidInput("grid needs at least two points".into()));
    }
    let points = polar_grid(grid)
        .into_iter()
        .map(examine)
        .collect::<Result<Vec<_>>>()?;

    // a Laurent operator is invertible exactly when its symbol has no circle zeros
    let operator_invertible = classify_operator(&ToeplitzElement::bilateral(LaurentSymbol::shift()), DEFAULT_CIRCLE_TOL)?.fredholm;
    let near: Vec<&LambdaVerdict> = points
        .iter()
        .filter(|p| p.lambda.norm() > 0.0 && p.lambda.norm() <= check_radius)
        .collect();
    let origin_in = points.iter().any(|p| p.lambda == ZERO && p.membership == Membership::InSpectrum);
    let near_in = near.iter().all(|p| p.membership == Membership::InSpectrum);
    let zero_non_isolated = !near.is_empty() && origin_in && near_in;
    let contradicted = points.iter().any(|p| {
        let r = p.lambda.norm();
        (r < 1.0 && p.membership == Membership::NotInSpectrum) || (r > 1.0 && p.membership == Membership::InSpectrum)
    }) || points.iter().any(|p| (p.lambda.norm() - 1.0).abs() > 1e-9 && !p.operator_fredholm_index_zero);

    let (conclusion, note) = if contradicted {
        (Conclusion::Inconsistent, "a grid verdict contradicts the disk-inclusion picture".to_string())
    } else if near.is_empty() {
        (Conclusion::Inconclusive, "grid too coarse: no points inside the check radius besides 0".to_string())
    } else if zero_non_isolated {
        (
            Conclusion::Consistent,
            format!(
                "all {} grid points with |λ| <= {check_radius} lie in the algebra spectrum; consistent with 0 being non-isolated, so T is not B-Fredholm as an element although it is invertible as an operator",
                near.len()
            ),
        )
    } else {
        (Conclusion::Inconclusive, "some points inside the check radius were inconclusive".to_string())
    };

    Ok(BilateralReport {
        check_radius,
        points,
        operator_invertible,
        operator_b_fredholm: operator_invertible,
        element_b_fredholm: (conclusion == Conclusion::Consistent).then_some(false),
        zero_non_isolated,
        conclusion,
        note,
    })
}
