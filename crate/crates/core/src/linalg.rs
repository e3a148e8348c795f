//! Rank-revealing factorizations and solvers.
//!
//! Numerical rank is decided by Householder QR with column pivoting: a pivot
//! survives when `|R_kk| > tol * |R_00|`. The null basis is read off the
//! trailing columns of the pivoted QR of the adjoint, so both bases come out
//! orthonormal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{vec_norm, ComplexMatrix, C64, ONE, ZERO};

/// Default relative pivot threshold used throughout the crate.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Outcome of a numerical rank decision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankDecision {
    pub tolerance: f64,
    pub rank: usize,
    /// Orthonormal basis of the numerical null space (`cols - rank` vectors).
    pub null_basis: Vec<Vec<C64>>,
    /// Orthonormal basis of the numerical range (`rank` vectors).
    pub range_basis: Vec<Vec<C64>>,
    /// Absolute values of the diagonal of R, in pivot order.
    pub pivots: Vec<f64>,
}

/// Householder QR with column pivoting, `A P = Q R`.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    /// Unitary factor, `rows x rows`.
    pub q: ComplexMatrix,
    /// Upper-trapezoidal factor, `rows x cols`.
    pub r: ComplexMatrix,
    /// `perm[k]` is the original column placed at position `k`.
    pub perm: Vec<usize>,
}

impl PivotedQr {
    pub fn pivots(&self) -> Vec<f64> {
        (0..self.r.rows().min(self.r.cols()))
            .map(|k| self.r[(k, k)].norm())
            .collect()
    }

    /// Number of pivots above `tol` relative to the leading pivot.
    pub fn rank(&self, tol: f64) -> usize {
        self.rank_against(tol, 0.0)
    }

    /// Number of pivots above `tol * max(lead, reference)`.
    ///
    /// `reference` lets a caller that knows the expected magnitude (say
    /// `‖a‖^k` for a power `a^k`) discard a matrix made of rounding noise.
    pub fn rank_against(&self, tol: f64, reference: f64) -> usize {
        let piv = self.pivots();
        let Some(&lead) = piv.first() else { return 0 };
        let scale = lead.max(reference);
        if scale == 0.0 {
            return 0;
        }
        piv.iter().take_while(|&&p| p > tol * scale).count()
    }
}

/// Builds the Householder vector that maps `x` onto a multiple of `e_0`.
/// Returns `None` when `x` is already zero.
fn householder(x: &[C64]) -> Option<(Vec<C64>, C64)> {
    let norm = vec_norm(x);
    if norm == 0.0 {
        return None;
    }
    let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
    let alpha = -phase * norm;
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vn = vec_norm(&v);
    if vn == 0.0 {
        return None;
    }
    for z in &mut v {
        *z /= vn;
    }
    Some((v, alpha))
}

pub fn qr_pivoted(a: &ComplexMatrix) -> PivotedQr {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(m);
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..m.min(n) {
        // Exact trailing column norms; sizes are small enough to skip downdating.
        let mut best = k;
        let mut best_norm = -1.0;
        for j in k..n {
            let s: f64 = (k..m).map(|i| r[(i, j)].norm_sqr()).sum();
            if s > best_norm {
                best_norm = s;
                best = j;
            }
        }
        if best != k {
            for i in 0..m {
                let t = r[(i, k)];
                r[(i, k)] = r[(i, best)];
                r[(i, best)] = t;
            }
            perm.swap(k, best);
        }

        let x: Vec<C64> = (k..m).map(|i| r[(i, k)]).collect();
        let Some((v, alpha)) = householder(&x) else {
            continue;
        };
        // R <- (I - 2 v v^H) R on rows k..m
        for j in k..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * r[(k + t, j)]).sum();
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] -= vi * dot * 2.0;
            }
        }
        r[(k, k)] = alpha;
        for i in k + 1..m {
            r[(i, k)] = ZERO;
        }
        // Q <- Q (I - 2 v v^H) on columns k..m
        for i in 0..m {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| q[(i, k + t)] * vi).sum();
            for (t, vi) in v.iter().enumerate() {
                q[(i, k + t)] -= dot * vi.conj() * 2.0;
            }
        }
    }
    PivotedQr { q, r, perm }
}

/// Rank decision with orthonormal range and null bases.
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> Result<RankDecision> {
    numerical_rank_against(m, tol, 0.0)
}

/// Rank decision with the threshold `tol * max(lead pivot, reference)`.
pub fn numerical_rank_against(m: &ComplexMatrix, tol: f64, reference: f64) -> Result<RankDecision> {
    if m.is_empty() {
        return Err(Error::InvalidInput("numerical_rank on an empty matrix".into()));
    }
    if !(tol >= 0.0) || !tol.is_finite() {
        return Err(Error::InvalidInput(format!("tolerance must be finite and >= 0, got {tol}")));
    }
    let qr = qr_pivoted(m);
    let rank = qr.rank_against(tol, reference);
    let range_basis = (0..rank).map(|j| qr.q.column(j)).collect();

    let adj = qr_pivoted(&m.adjoint());
    let null_basis = (rank..m.cols()).map(|j| adj.q.column(j)).collect();

    Ok(RankDecision {
        tolerance: tol,
        rank,
        null_basis,
        range_basis,
        pivots: qr.pivots(),
    })
}

/// LU factorization with partial pivoting, stored compactly.
struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

fn lu_factor(a: &ComplexMatrix) -> Result<Lu> {
    let n = a.ensure_square()?;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = a.max_abs();
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pmax <= f64::EPSILON * scale * n as f64 || pmax == 0.0 {
            return Err(Error::NumericalInstability {
                context: format!("LU factorization: pivot {k} is {pmax:.3e}"),
                worst: pmax,
                threshold: f64::EPSILON * scale,
            });
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            perm.swap(k, p);
        }
        let piv = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / piv;
            lu[(i, k)] = f;
            if f != ZERO {
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
    }
    Ok(Lu { lu, perm })
}

impl Lu {
    fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.lu.rows();
        let mut x = ComplexMatrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        x
    }
}

/// Solves `A X = B`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::ShapeMismatch(format!(
            "solve: A has {} rows, B has {}",
            a.rows(),
            b.rows()
        )));
    }
    Ok(lu_factor(a)?.solve(b))
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    solve(a, &ComplexMatrix::identity(n))
}

/// Moore-Penrose pseudo-inverse through the rank-revealing full-rank
/// factorization `A = F G` (F orthonormal columns). With `G^H = Q2 R2` the
/// inverse is `Q2 (G Q2)^-1 F^H`, which avoids squaring the condition of `G`.
pub fn pseudo_inverse(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    pseudo_inverse_against(a, tol, 0.0)
}

/// Pseudo-inverse with the rank threshold `tol * max(lead pivot, reference)`.
pub fn pseudo_inverse_against(a: &ComplexMatrix, tol: f64, reference: f64) -> Result<ComplexMatrix> {
    let (m, n) = (a.rows(), a.cols());
    let qr = qr_pivoted(a);
    let r = qr.rank_against(tol, reference);
    if r == 0 {
        return Ok(ComplexMatrix::zeros(n, m));
    }
    let f = qr.q.submatrix(0..m, 0..r);
    let mut g = ComplexMatrix::zeros(r, n);
    for (k, &orig) in qr.perm.iter().enumerate() {
        for i in 0..r {
            g[(i, orig)] = qr.r[(i, k)];
        }
    }
    let q2 = qr_pivoted(&g.adjoint()).q.submatrix(0..n, 0..r);
    let k = g.matmul(&q2);
    Ok(q2.matmul(&inverse(&k)?).matmul(&f.adjoint()))
}

/// Singular values (descending) by one-sided Jacobi on the columns.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let work = if a.rows() < a.cols() { a.adjoint() } else { a.clone() };
    let (m, n) = (work.rows(), work.cols());
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| work.column(j)).collect();

    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[i].iter().zip(&cols[j]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let x = cols[i][k];
                    let y = cols[j][k] * phase.conj();
                    cols[i][k] = x * c - y * s;
                    cols[j][k] = (x * s + y * c) * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| vec_norm(c)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Gram matrix `B^H B` of a set of column vectors.
pub fn gram(columns: &ComplexMatrix) -> ComplexMatrix {
    columns.adjoint().matmul(columns)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_has_full_rank() {
        let d = numerical_rank(&ComplexMatrix::identity(3), 1e-10).unwrap();
        assert_eq!(d.rank, 3);
        assert!(d.null_basis.is_empty());
        assert_eq!(d.range_basis.len(), 3);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let d = numerical_rank(&ComplexMatrix::zeros(2, 2), 1e-10).unwrap();
        assert_eq!(d.rank, 0);
        assert_eq!(d.null_basis.len(), 2);
        let basis = ComplexMatrix::from_columns(2, &d.null_basis);
        assert!(gram(&basis).rel_diff(&ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn all_ones_two_by_two_has_rank_one() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let d = numerical_rank(&a, 1e-10).unwrap();
        assert_eq!(d.rank, 1);
        let v = &d.null_basis[0];
        assert!(vec_norm(&a.matvec(v)) < 1e-14);
        // range is span{(1,1)}
        let r = &d.range_basis[0];
        assert!((r[0] - r[1]).norm() < 1e-14);
    }

    #[test]
    fn rank_rejects_empty_and_bad_tolerance() {
        assert!(numerical_rank(&ComplexMatrix::zeros(0, 0), 1e-10).is_err());
        assert!(numerical_rank(&ComplexMatrix::identity(2), -1.0).is_err());
        assert!(numerical_rank(&ComplexMatrix::identity(2), f64::NAN).is_err());
    }

    #[test]
    fn inverse_of_small_matrix() {
        let a = ComplexMatrix::from_rows(&[vec![c(2.0), C64::new(0.0, 1.0)], vec![c(1.0), c(3.0)]]);
        let inv = inverse(&a).unwrap();
        assert!(a.matmul(&inv).rel_diff(&ComplexMatrix::identity(2)) < 1e-14);
        assert!(inverse(&ComplexMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn pseudo_inverse_satisfies_penrose_equations() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]]);
        let p = pseudo_inverse(&a, 1e-10).unwrap();
        assert!(a.matmul(&p).matmul(&a).rel_diff(&a) < 1e-12);
        assert!(p.matmul(&a).matmul(&p).rel_diff(&p) < 1e-12);
        let ap = a.matmul(&p);
        assert!(ap.rel_diff(&ap.adjoint()) < 1e-12);
        let pa = p.matmul(&a);
        assert!(pa.rel_diff(&pa.adjoint()) < 1e-12);
    }

    #[test]
    fn singular_values_of_rank_one() {
        let a = ComplexMatrix::from_real_rows(&[&[3.0, 4.0], &[0.0, 0.0]]);
        let s = singular_values(&a);
        assert!((s[0] - 5.0).abs() < 1e-12);
        assert!(s[1].abs() < 1e-12);
    }
}
