//! Polynomial functional calculus.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};

/// Evaluates `sum coeffs[i] * a^i` by Horner's rule; `coeffs[0]` multiplies the identity.
pub fn poly_eval(a: &ComplexMatrix, coeffs: &[C64]) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    let mut acc = ComplexMatrix::zeros(n, n);
    for &c in coeffs.iter().rev() {
        acc = acc.matmul(a).shift(c);
    }
    Ok(acc)
}

/// Scalar Horner evaluation.
pub fn poly_eval_scalar(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

pub fn poly_mul(p: &[C64], q: &[C64]) -> Vec<C64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub fn poly_sub(p: &[C64], q: &[C64]) -> Vec<C64> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|i| p.get(i).copied().unwrap_or(ZERO) - q.get(i).copied().unwrap_or(ZERO))
        .collect()
}

/// Degree ignoring trailing zero coefficients; `None` for the zero polynomial.
pub fn degree(p: &[C64]) -> Option<usize> {
    p.iter().rposition(|&c| c != ZERO)
}

/// Rejects constant (or zero) polynomials where the calculus needs `f` non-constant.
pub fn ensure_nonconstant(p: &[C64]) -> Result<()> {
    match degree(p) {
        Some(d) if d >= 1 => Ok(()),
        _ => Err(Error::InvalidInput("polynomial must be non-constant".into())),
    }
}
