//! Drazin inverse through the core-nilpotent splitting.
//!
//! For the smallest `k` with `rank(a^k) = rank(a^{k+1})` the space splits as
//! `range(a^k) ⊕ null(a^k)`, both subspaces invariant under `a`. In the basis
//! `P = [range | null]` the matrix is `diag(C, N)` with `C` invertible and `N`
//! nilpotent of index `k`, and
//!
//! ```text
//! b = P diag(C^-1, 0) P^-1,   p = P diag(I, 0) P^-1,   q = P diag(0, I) P^-1.
//! ```
//!
//! Every result is checked against the Drazin axioms `bab = b`, `ab = ba`,
//! `a^{k+1} b = a^k`, and the idempotent identities `p + q = e`, `pq = qp = 0`,
//! `p = ab`, before it is returned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, numerical_rank_against};
use crate::matrix::ComplexMatrix;

/// Residual threshold applied when verifying a computed Drazin inverse.
pub const VERIFY_TOL: f64 = 1e-8;

/// Normwise relative residuals of the Drazin axioms.
///
/// Each residual is scaled by the product of operand norms that bounds the
/// expression, e.g. `‖a^{k+1}b - a^k‖ / (‖a‖^k max(1, ‖a‖‖b‖))`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomResiduals {
    pub bab_minus_b: f64,
    pub ab_minus_ba: f64,
    pub power: f64,
}

impl AxiomResiduals {
    pub fn worst(&self) -> f64 {
        self.bab_minus_b.max(self.ab_minus_ba).max(self.power)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DrazinResiduals {
    pub axioms: AxiomResiduals,
    pub p_idempotent: f64,
    pub q_idempotent: f64,
    pub p_plus_q: f64,
    pub pq: f64,
    pub qp: f64,
    /// `‖p - ab‖`; the splitting idempotent must equal `ab`.
    pub p_minus_ab: f64,
    /// Off-diagonal blocks of `P^-1 a P`, relative to `‖a‖`.
    pub coupling: f64,
}

impl DrazinResiduals {
    pub fn worst(&self) -> f64 {
        [
            self.axioms.worst(),
            self.p_idempotent,
            self.q_idempotent,
            self.p_plus_q,
            self.pq,
            self.qp,
            self.p_minus_ab,
            self.coupling,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Evidence that `range(a^k)` and `null(a^k)` are complementary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingCheck {
    pub core_rank: usize,
    pub combined_rank: usize,
    /// Smallest singular value of the combined (orthonormal-blocks) basis.
    pub min_singular_value: f64,
    pub complementary: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DrazinResult {
    pub inverse: ComplexMatrix,
    pub drazin_index: usize,
    /// Idempotent onto `range(a^k)` along `null(a^k)`.
    pub p: ComplexMatrix,
    /// Idempotent onto `null(a^k)` along `range(a^k)`.
    pub q: ComplexMatrix,
    pub splitting: SplittingCheck,
    pub residuals: DrazinResiduals,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Normwise residuals of `bab = b`, `ab = ba`, `a^{k+1} b = a^k`.
pub fn axiom_residuals(a: &ComplexMatrix, b: &ComplexMatrix, k: usize) -> AxiomResiduals {
    let na = a.op_norm();
    let nb = b.op_norm();
    let ab = a.matmul(b);
    let ba = b.matmul(a);
    let ak = a.pow(k as u32);
    let bab = b.matmul(&ab);
    let growth = (na * nb).max(1.0);
    AxiomResiduals {
        bab_minus_b: ratio((&bab - b).op_norm(), nb * growth),
        ab_minus_ba: ratio((&ab - &ba).op_norm(), na * nb),
        power: ratio((&ak.matmul(&ab) - &ak).op_norm(), na.powi(k as i32) * growth),
    }
}

/// `‖a‖^k`, the magnitude against which ranks of `a^k` are judged.
pub fn power_reference(a: &ComplexMatrix, k: usize) -> f64 {
    a.op_norm().powi(k as i32)
}

/// Smallest `k` with `rank(a^k) = rank(a^{k+1})`, plus the power `a^k`.
///
/// The rank of `a^j` is measured against `‖a‖^j`, so a power that is zero up
/// to rounding counts as zero.
pub fn drazin_index(a: &ComplexMatrix, tol: f64) -> Result<(usize, ComplexMatrix)> {
    let n = a.ensure_square()?;
    if n == 0 {
        return Err(Error::InvalidInput("Drazin inverse of an empty matrix".into()));
    }
    let na = a.op_norm();
    let mut power = ComplexMatrix::identity(n);
    let mut rank = n;
    for k in 0..=n {
        let next = power.matmul(a);
        let next_rank = numerical_rank_against(&next, tol, na.powi(k as i32 + 1))?.rank;
        if next_rank == rank {
            return Ok((k, power));
        }
        rank = next_rank;
        power = next;
    }
    Err(Error::Consistency(format!(
        "rank of powers did not stagnate within {n} steps"
    )))
}

/// Checks that `range(a^k) ⊕ null(a^k)` spans the space, returning the combined basis.
///
/// `reference` is the expected magnitude of `a_k` (see [`power_reference`]).
pub fn splitting(a_k: &ComplexMatrix, tol: f64, reference: f64) -> Result<(SplittingCheck, ComplexMatrix)> {
    let n = a_k.ensure_square()?;
    let decision = numerical_rank_against(a_k, tol, reference)?;
    let columns: Vec<_> = decision
        .range_basis
        .iter()
        .chain(&decision.null_basis)
        .cloned()
        .collect();
    let basis = ComplexMatrix::from_columns(n, &columns);
    let sv = linalg::singular_values(&basis);
    let combined_rank = linalg::qr_pivoted(&basis).rank(tol);
    let min_sv = sv.last().copied().unwrap_or(0.0);
    Ok((
        SplittingCheck {
            core_rank: decision.rank,
            combined_rank,
            min_singular_value: min_sv,
            complementary: combined_rank == n && min_sv > tol.max(f64::EPSILON),
        },
        basis,
    ))
}

pub fn drazin_inverse(a: &ComplexMatrix, tol: f64) -> Result<DrazinResult> {
    let n = a.ensure_square()?;
    let (k, a_k) = drazin_index(a, tol)?;
    let (check, basis) = splitting(&a_k, tol, power_reference(a, k))?;
    if !check.complementary {
        return Err(Error::NumericalInstability {
            context: format!("core-nilpotent splitting is degenerate: {check:?}"),
            worst: check.min_singular_value,
            threshold: tol,
        });
    }
    let r = check.core_rank;
    let basis_inv = linalg::inverse(&basis)?;
    let similar = basis_inv.matmul(a).matmul(&basis);

    let na = a.op_norm();
    let coupling = if r == 0 || r == n {
        0.0
    } else {
        let upper = similar.submatrix(0..r, r..n).op_norm();
        let lower = similar.submatrix(r..n, 0..r).op_norm();
        ratio(upper.max(lower), na)
    };

    let mut inner = ComplexMatrix::zeros(n, n);
    let mut core_proj = ComplexMatrix::zeros(n, n);
    let mut nil_proj = ComplexMatrix::zeros(n, n);
    if r > 0 {
        let core_inv = linalg::inverse(&similar.submatrix(0..r, 0..r))?;
        for i in 0..r {
            for j in 0..r {
                inner[(i, j)] = core_inv[(i, j)];
            }
        }
    }
    for i in 0..n {
        if i < r {
            core_proj[(i, i)] = crate::matrix::ONE;
        } else {
            nil_proj[(i, i)] = crate::matrix::ONE;
        }
    }
    let conj = |m: &ComplexMatrix| basis.matmul(m).matmul(&basis_inv);
    let b = conj(&inner);
    let p = conj(&core_proj);
    let q = conj(&nil_proj);

    let residuals = splitting_residuals(a, &b, &p, &q, k, coupling);
    let worst = residuals.worst();
    if !(worst <= VERIFY_TOL) {
        return Err(Error::NumericalInstability {
            context: format!("Drazin verification (index {k}): {residuals:?}"),
            worst,
            threshold: VERIFY_TOL,
        });
    }
    Ok(DrazinResult {
        inverse: b,
        drazin_index: k,
        p,
        q,
        splitting: check,
        residuals,
    })
}

fn splitting_residuals(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    p: &ComplexMatrix,
    q: &ComplexMatrix,
    k: usize,
    coupling: f64,
) -> DrazinResiduals {
    let n = a.rows();
    let id = ComplexMatrix::identity(n);
    let np = p.op_norm();
    let nq = q.op_norm();
    let ab = a.matmul(b);
    DrazinResiduals {
        axioms: axiom_residuals(a, b, k),
        p_idempotent: ratio((&p.matmul(p) - p).op_norm(), (np * np).max(1.0)),
        q_idempotent: ratio((&q.matmul(q) - q).op_norm(), (nq * nq).max(1.0)),
        p_plus_q: ratio((&(p + q) - &id).op_norm(), (np + nq).max(1.0)),
        pq: ratio(p.matmul(q).op_norm(), (np * nq).max(1.0)),
        qp: ratio(q.matmul(p).op_norm(), (np * nq).max(1.0)),
        p_minus_ab: ratio((p - &ab).op_norm(), np.max(1.0)),
        coupling,
    }
}
