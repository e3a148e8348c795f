use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};

use super::symbol::LaurentSymbol;

/// Largest admissible perturbation block.
pub const MAX_PERTURBATION: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    /// `ℓ²(ℕ)`, indices `0, 1, 2, ...`.
    #[default]
    Unilateral,
    /// `ℓ²(ℤ)`, realized on index windows `-N..=N`.
    Bilateral,
}

/// `T = T_φ + F` with `F` a finite block on indices `0..p` of both axes.
///
/// Entry `(i, j)` is `φ̂(i - j) + F(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementJson", into = "ElementJson")]
pub struct ToeplitzElement {
    symbol: LaurentSymbol,
    perturbation: Option<ComplexMatrix>,
    space: Space,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    coeffs: LaurentSymbol,
    #[serde(default)]
    space: Space,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    perturbation: Option<ComplexMatrix>,
}

impl TryFrom<ElementJson> for ToeplitzElement {
    type Error = Error;

    fn try_from(j: ElementJson) -> Result<Self> {
        ToeplitzElement::new(j.coeffs, j.perturbation, j.space)
    }
}

impl From<ToeplitzElement> for ElementJson {
    fn from(t: ToeplitzElement) -> Self {
        ElementJson {
            coeffs: t.symbol,
            space: t.space,
            perturbation: t.perturbation,
        }
    }
}

impl ToeplitzElement {
    pub fn new(symbol: LaurentSymbol, perturbation: Option<ComplexMatrix>, space: Space) -> Result<Self> {
        if let Some(f) = &perturbation {
            if !f.is_square() {
                return Err(Error::NotSquare {
                    rows: f.rows(),
                    cols: f.cols(),
                });
            }
            if f.rows() > MAX_PERTURBATION {
                return Err(Error::InvalidInput(format!(
                    "perturbation is {0}x{0}, the limit is {MAX_PERTURBATION}",
                    f.rows()
                )));
            }
        }
        let perturbation = perturbation.filter(|f| !f.is_empty());
        Ok(ToeplitzElement {
            symbol,
            perturbation,
            space,
        })
    }

    pub fn unilateral(symbol: LaurentSymbol) -> Self {
        ToeplitzElement {
            symbol,
            perturbation: None,
            space: Space::Unilateral,
        }
    }

    pub fn bilateral(symbol: LaurentSymbol) -> Self {
        ToeplitzElement {
            symbol,
            perturbation: None,
            space: Space::Bilateral,
        }
    }

    pub fn with_perturbation(&self, f: ComplexMatrix) -> Result<Self> {
        Self::new(self.symbol.clone(), Some(f), self.space)
    }

    pub fn symbol(&self) -> &LaurentSymbol {
        &self.symbol
    }

    pub fn perturbation(&self) -> Option<&ComplexMatrix> {
        self.perturbation.as_ref()
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn perturbation_size(&self) -> usize {
        self.perturbation.as_ref().map_or(0, |f| f.rows())
    }

    /// True when there is no perturbation or it is exactly zero.
    pub fn is_pure(&self) -> bool {
        self.perturbation.as_ref().is_none_or(|f| f.is_zero())
    }

    /// `T - λ`.
    pub fn minus_scalar(&self, lambda: C64) -> Self {
        ToeplitzElement {
            symbol: self.symbol.add_constant(-lambda),
            perturbation: self.perturbation.clone(),
            space: self.space,
        }
    }

    /// `T*`: adjoint symbol and `F^H`.
    pub fn adjoint(&self) -> Self {
        ToeplitzElement {
            symbol: self.symbol.adjoint(),
            perturbation: self.perturbation.as_ref().map(|f| f.adjoint()),
            space: self.space,
        }
    }

    /// Smallest admissible section parameter: `p + 2 · bandwidth`.
    pub fn min_section_size(&self) -> usize {
        self.perturbation_size() + 2 * self.symbol.bandwidth()
    }

    /// Index window of the size-`n` section: `0..n` or `-n..n+1`.
    pub fn section_indices(&self, n: usize) -> Range<i64> {
        match self.space {
            Space::Unilateral => 0..n as i64,
            Space::Bilateral => -(n as i64)..n as i64 + 1,
        }
    }

    pub fn in_domain(&self, i: i64) -> bool {
        self.space == Space::Bilateral || i >= 0
    }

    pub fn entry(&self, i: i64, j: i64) -> C64 {
        let d = i - j;
        let mut v = if d.unsigned_abs() <= super::symbol::MAX_DEGREE as u64 {
            self.symbol.coeff(d as i32)
        } else {
            ZERO
        };
        if let Some(f) = &self.perturbation {
            let p = f.rows() as i64;
            if (0..p).contains(&i) && (0..p).contains(&j) {
                v += f[(i as usize, j as usize)];
            }
        }
        v
    }

    /// Matrix of entries over `rows × cols` (index ranges, not offsets).
    pub fn section(&self, rows: Range<i64>, cols: Range<i64>) -> ComplexMatrix {
        let (r0, c0) = (rows.start, cols.start);
        ComplexMatrix::from_fn(
            (rows.end - rows.start).max(0) as usize,
            (cols.end - cols.start).max(0) as usize,
            |i, j| self.entry(r0 + i as i64, c0 + j as i64),
        )
    }

    /// The square finite section over [`Self::section_indices`].
    pub fn square_section(&self, n: usize) -> ComplexMatrix {
        let idx = self.section_indices(n);
        self.section(idx.clone(), idx)
    }

    fn check_section_size(&self, n: usize) -> Result<()> {
        let min = self.min_section_size().max(1);
        if n < min {
            return Err(Error::InvalidInput(format!(
                "section size {n} is below the minimum {min} (perturbation size + 2 * bandwidth)"
            )));
        }
        Ok(())
    }
}

/// Applies the size-`n` finite section of `t` to `v`.
///
/// `v` has length `n` (unilateral) or `2n + 1` (bilateral, indices `-n..=n`).
pub fn matvec_truncated(t: &ToeplitzElement, v: &[C64], n: usize) -> Result<Vec<C64>> {
    t.check_section_size(n)?;
    let dim = t.section_indices(n).count();
    if v.len() != dim {
        return Err(Error::ShapeMismatch(format!(
            "vector has length {}, the section has dimension {dim}",
            v.len()
        )));
    }
    Ok(t.square_section(n).matvec(v))
}

pub(crate) fn ensure_section_size(t: &ToeplitzElement, n: usize) -> Result<()> {
    t.check_section_size(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;

    fn e(k: usize, n: usize) -> Vec<C64> {
        (0..n).map(|i| if i == k { ONE } else { ZERO }).collect()
    }

    #[test]
    fn shift_moves_basis_vector() {
        let t = ToeplitzElement::unilateral(LaurentSymbol::shift());
        assert_eq!(matvec_truncated(&t, &e(0, 4), 4).unwrap(), e(1, 4));
    }

    #[test]
    fn cosine_symbol_truncates_at_boundary() {
        let s = LaurentSymbol::from_terms(&[(1, ONE), (-1, ONE)]).unwrap();
        let t = ToeplitzElement::unilateral(s);
        assert_eq!(matvec_truncated(&t, &e(0, 4), 4).unwrap(), e(1, 4));
    }

    #[test]
    fn zero_symbol_applies_perturbation() {
        let f = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let t = ToeplitzElement::new(LaurentSymbol::zero(), Some(f), Space::Unilateral).unwrap();
        let v = vec![ONE, ONE, ONE];
        let out = matvec_truncated(&t, &v, 3).unwrap();
        assert_eq!(out, vec![C64::new(3.0, 0.0), C64::new(7.0, 0.0), ZERO]);
    }

    #[test]
    fn section_size_is_checked() {
        let f = ComplexMatrix::identity(3);
        let t = ToeplitzElement::new(LaurentSymbol::shift(), Some(f), Space::Unilateral).unwrap();
        assert!(matvec_truncated(&t, &e(0, 4), 4).is_err());
        assert!(matvec_truncated(&t, &e(0, 5), 5).is_ok());
        assert!(matvec_truncated(&t, &e(0, 4), 5).is_err());
    }

    #[test]
    fn bilateral_window() {
        let t = ToeplitzElement::bilateral(LaurentSymbol::shift());
        let out = matvec_truncated(&t, &e(2, 5), 2).unwrap();
        assert_eq!(out, e(3, 5));
        assert_eq!(t.square_section(2).rows(), 5);
    }

    #[test]
    fn json_schema() {
        let t: ToeplitzElement = serde_json::from_str(
            r#"{"coeffs":{"1":[1.0,0.0]},"space":"unilateral","perturbation":{"rows":1,"cols":1,"re":[2.0]}}"#,
        )
        .unwrap();
        assert_eq!(t.entry(0, 0), C64::new(2.0, 0.0));
        assert_eq!(t.entry(1, 0), ONE);
        let back: ToeplitzElement = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
        let bare: ToeplitzElement = serde_json::from_str(r#"{"coeffs":{"0":[1.0,0.0]}}"#).unwrap();
        assert_eq!(bare.space(), Space::Unilateral);
    }
}
