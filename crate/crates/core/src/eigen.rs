//! Eigenvalues of dense complex matrices and their algebraic multiplicities.
//!
//! Householder reduction to upper Hessenberg form, then single-shift complex
//! QR sweeps with Wilkinson shifts and deflation. Defective eigenvalues come
//! out split by roughly `eps^(1/m)` for an `m`-fold Jordan chain, so the
//! multiset is formed by agglomerative clustering: two clusters merge when the
//! merged diameter stays below `scale * tol^(1/size)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{vec_norm, ComplexMatrix, C64, ONE, ZERO};

const MAX_ITER_PER_EIGENVALUE: usize = 60;

/// Eigenvalues paired with algebraic multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenMultiset {
    pub pairs: Vec<(C64, usize)>,
}

impl EigenMultiset {
    pub fn total_multiplicity(&self) -> usize {
        self.pairs.iter().map(|&(_, m)| m).sum()
    }

    /// `sum m(lambda) * lambda`.
    pub fn weighted_sum(&self) -> C64 {
        self.pairs.iter().map(|&(l, m)| l * m as f64).sum()
    }

    pub fn values(&self) -> Vec<C64> {
        self.pairs.iter().map(|&(l, _)| l).collect()
    }

    pub fn multiplicity_near(&self, lambda: C64, radius: f64) -> usize {
        self.pairs
            .iter()
            .filter(|(l, _)| (l - lambda).norm() <= radius)
            .map(|&(_, m)| m)
            .sum()
    }
}

pub fn hessenberg(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = vec_norm(&x);
        if norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let mut v = x;
        v[0] += phase * norm;
        let vn = vec_norm(&v);
        for z in &mut v {
            *z /= vn;
        }
        // left: rows k+1..n
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * h[(k + 1 + t, j)]).sum();
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vi * dot * 2.0;
            }
        }
        // right: cols k+1..n
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| h[(i, k + 1 + t)] * vi).sum();
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= dot * vi.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    Ok(h)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues, unordered.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = a.ensure_square()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(a)?;
    let norm = h.norm_fro().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut out = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;

    loop {
        if hi == 0 {
            out.push(h[(0, 0)]);
            break;
        }
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= eps * diag || sub <= eps * norm * 1e-3 {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out.push(h[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_ITER_PER_EIGENVALUE {
            return Err(Error::Convergence {
                iterations: iter,
                lo,
                hi,
                subdiagonal: h[(hi, hi - 1)].norm(),
            });
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift to break cycles
            let sub = h[(hi, hi - 1)].norm();
            h[(hi, hi)] + C64::new(0.75 * sub, 0.3 * sub)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 { (ONE, ZERO) } else { (x / r, y / r) };
            for j in k..=hi {
                let u = h[(k, j)];
                let v = h[(k + 1, j)];
                h[(k, j)] = c.conj() * u + s.conj() * v;
                h[(k + 1, j)] = -s * u + c * v;
            }
            rotations.push((c, s));
        }
        for (idx, k) in (lo..hi).enumerate() {
            let (c, s) = rotations[idx];
            for i in lo..=(k + 1).min(hi) {
                let u = h[(i, k)];
                let v = h[(i, k + 1)];
                h[(i, k)] = u * c + v * s;
                h[(i, k + 1)] = -u * s.conj() + v * c.conj();
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(out)
}

/// Clusters raw eigenvalue approximations into a multiset.
///
/// Builds a single-linkage dendrogram, then walks it from the root: a node of
/// `s` members is kept whole when its diameter is at most `scale * tol^(1/s)`,
/// otherwise its children are examined. The representative is the member mean.
/// `scale` is a magnitude reference, typically `1 + ‖a‖`.
pub fn cluster(values: &[C64], tol: f64, scale: f64) -> EigenMultiset {
    let tol = tol.clamp(f64::EPSILON, 0.5);
    let n = values.len();
    if n == 0 {
        return EigenMultiset { pairs: Vec::new() };
    }
    // nodes[i] = (members, children)
    let mut nodes: Vec<(Vec<usize>, Option<(usize, usize)>)> =
        (0..n).map(|i| (vec![i], None)).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (values[i] - values[j]).norm()).collect())
        .collect();
    while active.len() > 1 {
        let mut best = (0, 1, f64::INFINITY);
        for x in 0..active.len() {
            for y in x + 1..active.len() {
                let d = dist[active[x]][active[y]];
                if d < best.2 {
                    best = (x, y, d);
                }
            }
        }
        let (ia, ib) = (active[best.0], active[best.1]);
        let id = nodes.len();
        let mut members = nodes[ia].0.clone();
        members.extend(&nodes[ib].0);
        nodes.push((members, Some((ia, ib))));
        let row: Vec<f64> = (0..id).map(|k| dist[ia][k].min(dist[ib][k])).collect();
        for (k, d) in row.iter().enumerate() {
            dist[k].push(*d);
        }
        let mut own = row;
        own.push(0.0);
        dist.push(own);
        active.swap_remove(best.1);
        active.swap_remove(best.0);
        active.push(id);
    }

    let diameter = |members: &[usize]| {
        let mut d: f64 = 0.0;
        for (t, &i) in members.iter().enumerate() {
            for &j in &members[t + 1..] {
                d = d.max((values[i] - values[j]).norm());
            }
        }
        d
    };
    let mut pairs = Vec::new();
    let mut stack = vec![nodes.len() - 1];
    while let Some(node) = stack.pop() {
        let (members, children) = &nodes[node];
        let radius = scale * tol.powf(1.0 / members.len() as f64);
        match children {
            Some((l, r)) if diameter(members) > radius => {
                stack.push(*l);
                stack.push(*r);
            }
            _ => {
                let mean = members.iter().map(|&i| values[i]).sum::<C64>() / members.len() as f64;
                pairs.push((mean, members.len()));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    EigenMultiset { pairs }
}

/// Eigenvalues of `a` with algebraic multiplicities.
pub fn eigen_multiset(a: &ComplexMatrix, tol: f64) -> Result<EigenMultiset> {
    let raw = eigenvalues(a)?;
    let scale = 1.0 + a.op_norm();
    Ok(cluster(&raw, tol, scale))
}

/// Roots of `sum coeffs[i] z^i` via companion-matrix eigenvalues, polished
/// with a few Newton steps. Leading zero coefficients are dropped.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1] == ZERO {
        deg -= 1;
    }
    if deg == 0 {
        return Err(Error::Domain("roots of the zero polynomial".into()));
    }
    let deg = deg - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let mut comp = ComplexMatrix::zeros(deg, deg);
    for j in 0..deg {
        comp[(0, j)] = -coeffs[deg - 1 - j] / lead;
    }
    for i in 1..deg {
        comp[(i, i - 1)] = ONE;
    }
    let mut roots = eigenvalues(&comp)?;
    let p = &coeffs[..=deg];
    for r in &mut roots {
        for _ in 0..3 {
            let (val, der) = horner_with_derivative(p, *r);
            if der == ZERO {
                break;
            }
            let cand = *r - val / der;
            if horner_with_derivative(p, cand).0.norm() < val.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    Ok(roots)
}

pub(crate) fn horner_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut val = ZERO;
    let mut der = ZERO;
    for &c in coeffs.iter().rev() {
        der = der * z + val;
        val = val * z + c;
    }
    (val, der)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn diagonal_multiplicities() {
        let m = eigen_multiset(&ComplexMatrix::diag_real(&[1.0, 1.0, 3.0]), 1e-10).unwrap();
        assert_eq!(m.pairs.len(), 2);
        assert!(approx(m.pairs[0].0, C64::new(1.0, 0.0), 1e-12) && m.pairs[0].1 == 2);
        assert!(approx(m.pairs[1].0, C64::new(3.0, 0.0), 1e-12) && m.pairs[1].1 == 1);
    }

    #[test]
    fn jordan_block_is_one_eigenvalue() {
        let m = eigen_multiset(&ComplexMatrix::jordan(2, C64::new(5.0, 0.0)), 1e-10).unwrap();
        assert_eq!(m.pairs.len(), 1);
        assert!(approx(m.pairs[0].0, C64::new(5.0, 0.0), 1e-10));
        assert_eq!(m.pairs[0].1, 2);
    }

    #[test]
    fn rotation_has_conjugate_pair() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let m = eigen_multiset(&a, 1e-10).unwrap();
        assert_eq!(m.pairs.len(), 2);
        assert_eq!(m.multiplicity_near(C64::new(0.0, 1.0), 1e-10), 1);
        assert_eq!(m.multiplicity_near(C64::new(0.0, -1.0), 1e-10), 1);
    }

    #[test]
    fn similar_jordan_chain_is_remerged() {
        // S J_4(2) S^-1 with a non-trivial S splits the eigenvalue numerically.
        let j = ComplexMatrix::jordan(4, C64::new(2.0, 0.0));
        let s = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.3, 0.0, 0.2],
            &[0.1, 1.0, 0.4, 0.0],
            &[0.0, 0.2, 1.0, 0.5],
            &[0.3, 0.0, 0.1, 1.0],
        ]);
        let a = s.matmul(&j).matmul(&crate::linalg::inverse(&s).unwrap());
        let m = eigen_multiset(&a, 1e-10).unwrap();
        assert_eq!(m.pairs.len(), 1, "{:?}", m);
        assert!(approx(m.pairs[0].0, C64::new(2.0, 0.0), 1e-8));
    }

    #[test]
    fn roots_of_quadratic() {
        // z^2 + 1
        let r = polynomial_roots(&[ONE, ZERO, ONE]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|z| approx(*z, C64::new(0.0, 1.0), 1e-12)));
        assert!(r.iter().any(|z| approx(*z, C64::new(0.0, -1.0), 1e-12)));
        assert!(polynomial_roots(&[ZERO, ZERO]).is_err());
        assert!(polynomial_roots(&[ONE]).unwrap().is_empty());
    }

    #[test]
    fn trace_matches_weighted_sum_on_random_upper_triangular() {
        let a = ComplexMatrix::from_fn(6, 6, |i, j| {
            if j >= i {
                C64::new((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0 - 1.0)
            } else {
                ZERO
            }
        });
        let m = eigen_multiset(&a, 1e-10).unwrap();
        assert_eq!(m.total_multiplicity(), 6);
        assert!((m.weighted_sum() - a.trace()).norm() < 1e-10 * (1.0 + a.op_norm()));
    }
}
