use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{C64, ONE, ZERO};

/// Largest admissible `|d|` for a coefficient `c_d`.
pub const MAX_DEGREE: i32 = 32;

/// Laurent polynomial `φ(z) = Σ c_d z^d` with `|d| <= MAX_DEGREE`.
///
/// Serialized as a map from degree to `[re, im]`; zero coefficients are dropped.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<i32, C64>", into = "BTreeMap<i32, C64>")]
pub struct LaurentSymbol {
    coeffs: BTreeMap<i32, C64>,
}

impl LaurentSymbol {
    pub fn new(coeffs: BTreeMap<i32, C64>) -> Result<Self> {
        let mut kept = BTreeMap::new();
        for (d, c) in coeffs {
            if d.abs() > MAX_DEGREE {
                return Err(Error::InvalidInput(format!(
                    "symbol degree {d} exceeds the bound {MAX_DEGREE}"
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidInput(format!("coefficient of z^{d} is not finite")));
            }
            if c != ZERO {
                kept.insert(d, c);
            }
        }
        Ok(LaurentSymbol { coeffs: kept })
    }

    pub fn from_terms(terms: &[(i32, C64)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(d, c) in terms {
            *map.entry(d).or_insert(ZERO) += c;
        }
        Self::new(map)
    }

    pub fn zero() -> Self {
        LaurentSymbol::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, c)
    }

    /// `c z^d`; panics if `|d|` exceeds [`MAX_DEGREE`].
    pub fn monomial(d: i32, c: C64) -> Self {
        Self::from_terms(&[(d, c)]).expect("monomial degree within bounds")
    }

    /// The unilateral or bilateral shift symbol `z`.
    pub fn shift() -> Self {
        Self::monomial(1, ONE)
    }

    pub fn coeff(&self, d: i32) -> C64 {
        self.coeffs.get(&d).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.coeffs.iter().map(|(&d, &c)| (d, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|&d| d == 0)
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// `max |d|` over non-zero coefficients.
    pub fn bandwidth(&self) -> usize {
        self.coeffs.keys().map(|d| d.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// `Σ |c_d|`, an upper bound for `|φ|` on the circle.
    pub fn norm1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().map(|(&d, &c)| c * z.powi(d)).sum()
    }

    /// `φ(e^{iθ})` at `samples` equally spaced angles starting from `θ = 0`.
    pub fn curve(&self, samples: usize) -> Vec<C64> {
        (0..samples)
            .map(|k| self.eval(C64::from_polar(1.0, TAU * k as f64 / samples as f64)))
            .collect()
    }

    /// `φ + c`.
    pub fn add_constant(&self, c: C64) -> Self {
        let mut out = self.clone();
        let v = out.coeff(0) + c;
        if v == ZERO {
            out.coeffs.remove(&0);
        } else {
            out.coeffs.insert(0, v);
        }
        out
    }

    pub fn add(&self, other: &LaurentSymbol) -> Self {
        let mut map = self.coeffs.clone();
        for (&d, &c) in &other.coeffs {
            *map.entry(d).or_insert(ZERO) += c;
        }
        Self::new(map).expect("degrees stay within the operands' bounds")
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|(&d, &c)| (d, c * s)).collect()).expect("same degrees")
    }

    pub fn mul(&self, other: &LaurentSymbol) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (&d1, &c1) in &self.coeffs {
            for (&d2, &c2) in &other.coeffs {
                *map.entry(d1 + d2).or_insert(ZERO) += c1 * c2;
            }
        }
        Self::new(map)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::constant(ONE);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `f ∘ φ` for a polynomial `f` given by ascending coefficients.
    pub fn compose(&self, f: &[C64]) -> Result<Self> {
        let mut acc = LaurentSymbol::zero();
        for &c in f.iter().rev() {
            acc = acc.mul(self)?.add_constant(c);
        }
        Ok(acc)
    }

    /// Symbol of the adjoint operator: `c_d -> conj(c_{-d})`.
    pub fn adjoint(&self) -> Self {
        Self::new(self.coeffs.iter().map(|(&d, &c)| (-d, c.conj())).collect()).expect("same bounds")
    }

    /// `(dmin, Q)` with `φ(z) = z^dmin Q(z)`, `Q` an ordinary polynomial
    /// (ascending coefficients) and `Q(0) != 0`. `None` for the zero symbol.
    pub fn factor_monomial(&self) -> Option<(i32, Vec<C64>)> {
        let dmin = self.min_degree()?;
        let dmax = self.max_degree()?;
        let q = (dmin..=dmax).map(|d| self.coeff(d)).collect();
        Some((dmin, q))
    }
}

impl TryFrom<BTreeMap<i32, C64>> for LaurentSymbol {
    type Error = Error;

    fn try_from(map: BTreeMap<i32, C64>) -> Result<Self> {
        LaurentSymbol::new(map)
    }
}

impl From<LaurentSymbol> for BTreeMap<i32, C64> {
    fn from(s: LaurentSymbol) -> Self {
        s.coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn json_round_trip() {
        let s: LaurentSymbol = serde_json::from_str(r#"{"-1":[1.0,0.0],"0":[0.0,0.0],"2":[0.5,-1.0]}"#).unwrap();
        assert_eq!(s.coeff(-1), ONE);
        assert_eq!(s.coeff(2), C64::new(0.5, -1.0));
        assert_eq!(s.min_degree(), Some(-1));
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"-1":[1.0,0.0],"2":[0.5,-1.0]}"#);
        assert!(serde_json::from_str::<LaurentSymbol>(r#"{"40":[1.0,0.0]}"#).is_err());
    }

    #[test]
    fn cosine_curve() {
        let s = LaurentSymbol::from_terms(&[(1, ONE), (-1, ONE)]).unwrap();
        for (k, p) in s.curve(16).iter().enumerate() {
            let want = 2.0 * (TAU * k as f64 / 16.0).cos();
            assert!((p - c(want)).norm() < 1e-12);
        }
    }

    #[test]
    fn compose_and_factor() {
        let phi = LaurentSymbol::from_terms(&[(1, ONE), (-1, ONE)]).unwrap();
        let sq = phi.compose(&[ZERO, ZERO, ONE]).unwrap();
        assert_eq!(sq, LaurentSymbol::from_terms(&[(2, ONE), (0, c(2.0)), (-2, ONE)]).unwrap());
        let (dmin, q) = phi.factor_monomial().unwrap();
        assert_eq!(dmin, -1);
        assert_eq!(q, vec![ONE, ZERO, ONE]);
        assert!(LaurentSymbol::zero().factor_monomial().is_none());
        assert!(LaurentSymbol::monomial(20, ONE).pow(2).is_err());
    }

    #[test]
    fn adjoint_reflects_degrees() {
        let s = LaurentSymbol::from_terms(&[(2, C64::new(0.0, 1.0)), (-1, c(3.0))]).unwrap();
        let a = s.adjoint();
        assert_eq!(a.coeff(-2), C64::new(0.0, -1.0));
        assert_eq!(a.coeff(1), c(3.0));
    }
}
