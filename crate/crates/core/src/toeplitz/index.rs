//! Symbol winding number, finite-section kernel/cokernel counts, and the
//! trace-commutator index.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::eigen::polynomial_roots;
use crate::error::{Error, Result};
use crate::linalg::qr_pivoted;
use crate::matrix::{C64, ZERO};
use crate::poly::poly_eval_scalar;

use super::element::{ensure_section_size, ToeplitzElement};
use super::symbol::LaurentSymbol;

/// Tolerance for deciding whether a symbol zero sits on the unit circle.
pub const DEFAULT_CIRCLE_TOL: f64 = 1e-9;
/// Relative singular-value cutoff used by the finite-section oracle.
pub const ORACLE_RANK_TOL: f64 = 1e-8;
pub const DEFAULT_ORACLE_SIZES: [usize; 3] = [32, 48, 64];
/// Sections are doubled up to this size while the dimensions keep changing.
pub const MAX_ORACLE_SIZE: usize = 512;

/// Zeros of `φ` away from the origin, with the monomial order split off.
#[derive(Debug, Clone)]
pub(crate) struct SymbolZeros {
    pub(crate) dmin: i32,
    pub(crate) q: Vec<C64>,
    pub(crate) roots: Vec<C64>,
}

pub(crate) fn symbol_zeros(s: &LaurentSymbol) -> Result<SymbolZeros> {
    let (dmin, q) = s
        .factor_monomial()
        .ok_or_else(|| Error::Domain("the zero symbol has no winding number".into()))?;
    let roots = polynomial_roots(&q)?;
    Ok(SymbolZeros { dmin, q, roots })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Placement {
    Inside,
    Outside,
    /// Within `tol` of the circle and `φ` numerically vanishes on its radial projection.
    OnCircle,
    /// Within `tol` of the circle but not confirmed to lie on it.
    Ambiguous,
}

pub(crate) fn place(q: &[C64], root: C64, tol: f64) -> Placement {
    let r = root.norm();
    if (1.0 - r).abs() > tol {
        return if r < 1.0 { Placement::Inside } else { Placement::Outside };
    }
    let projected = if r > 0.0 { root / r } else { root };
    let norm1: f64 = q.iter().map(|c| c.norm()).sum();
    if poly_eval_scalar(q, projected).norm() <= f64::EPSILON.sqrt() * norm1 {
        Placement::OnCircle
    } else {
        Placement::Ambiguous
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindingIndex {
    pub fredholm: bool,
    /// Winding number of `φ(e^{iθ})` around 0.
    pub winding: i64,
    /// Fredholm index of `T_φ` on `ℓ²(ℕ)`: minus the winding number.
    pub index: i64,
}

/// Winding number by zero counting: `dmin + #{zeros of Q in the open disk}`
/// where `φ = z^dmin Q`. Any zero within `tol` of the circle is an error.
pub fn winding_index(s: &LaurentSymbol, tol: f64) -> Result<WindingIndex> {
    let z = symbol_zeros(s)?;
    let mut inside = 0i64;
    for &root in &z.roots {
        match place(&z.q, root, tol) {
            Placement::Inside => inside += 1,
            Placement::Outside => {}
            Placement::OnCircle | Placement::Ambiguous => {
                return Err(Error::BoundaryAmbiguous {
                    root,
                    distance: (1.0 - root.norm()).abs(),
                })
            }
        }
    }
    let winding = z.dmin as i64 + inside;
    Ok(WindingIndex {
        fredholm: true,
        winding,
        index: -winding,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationSeries {
    pub sizes: Vec<usize>,
    pub kernel_dims: Vec<usize>,
    pub cokernel_dims: Vec<usize>,
    /// The last three entries of both lists agree.
    pub stabilized: bool,
}

impl TruncationSeries {
    /// `ker - coker` of the last section when the series stabilized.
    pub fn index(&self) -> Option<i64> {
        if !self.stabilized {
            return None;
        }
        Some(*self.kernel_dims.last()? as i64 - *self.cokernel_dims.last()? as i64)
    }
}

fn tail_constant(v: &[usize]) -> bool {
    v.len() >= 3 && v[v.len() - 3..].iter().all(|&x| x == v[v.len() - 1])
}

/// Dimension of `{x supported on the size-n window : T x = 0}`, using all
/// rows the window's columns reach (a rectangular section).
fn window_nullity(t: &ToeplitzElement, n: usize, tol: f64) -> usize {
    let cols = t.section_indices(n);
    let reach = t.symbol().bandwidth() as i64;
    let lo = cols.start - reach;
    let lo = if t.in_domain(lo) { lo } else { 0 };
    let rows = lo..cols.end + reach;
    let m = t.section(rows, cols);
    m.cols() - qr_pivoted(&m).rank(tol)
}

/// Kernel and cokernel dimensions of rectangular finite sections.
///
/// When the last three dimensions of the requested sizes disagree, the
/// largest size is doubled until they settle or [`MAX_ORACLE_SIZE`] is hit.
///
/// Square sections of the unilateral shift are nilpotent Jordan blocks, which
/// show a spurious kernel; rectangular sections with all reachable rows avoid
/// that artifact.
pub fn kernel_cokernel_oracle(t: &ToeplitzElement, sizes: &[usize]) -> Result<TruncationSeries> {
    kernel_cokernel_oracle_with_tol(t, sizes, ORACLE_RANK_TOL)
}

pub fn kernel_cokernel_oracle_with_tol(t: &ToeplitzElement, sizes: &[usize], tol: f64) -> Result<TruncationSeries> {
    if sizes.is_empty() {
        return Err(Error::InvalidInput("oracle needs at least one section size".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(format!("section sizes must increase: {sizes:?}")));
    }
    for &n in sizes {
        ensure_section_size(t, n)?;
    }
    let adjoint = t.adjoint();
    let mut sizes = sizes.to_vec();
    let mut kernel_dims: Vec<usize> = sizes.iter().map(|&n| window_nullity(t, n, tol)).collect();
    let mut cokernel_dims: Vec<usize> = sizes.iter().map(|&n| window_nullity(&adjoint, n, tol)).collect();
    let mut stabilized = tail_constant(&kernel_dims) && tail_constant(&cokernel_dims);
    // kernel vectors decaying like ρ^k only show once ρ^n drops below tol
    while !stabilized && sizes.len() >= 3 {
        let next = 2 * sizes[sizes.len() - 1];
        if next > MAX_ORACLE_SIZE {
            break;
        }
        log::debug!("oracle dimensions unsettled at {sizes:?}, extending to {next}");
        sizes.push(next);
        kernel_dims.push(window_nullity(t, next, tol));
        cokernel_dims.push(window_nullity(&adjoint, next, tol));
        stabilized = tail_constant(&kernel_dims) && tail_constant(&cokernel_dims);
    }
    Ok(TruncationSeries {
        sizes,
        kernel_dims,
        cokernel_dims,
        stabilized,
    })
}

/// Fourier coefficients `ψ̂_k`, `|k| <= bandwidth`, of `1/φ` from `samples`
/// equally spaced circle points.
pub fn inverse_symbol(s: &LaurentSymbol, bandwidth: usize, samples: usize) -> Result<LaurentSymbol> {
    let values = CircleSamples::new(samples, |z| s.eval(z));
    let floor = f64::EPSILON.sqrt() * s.norm1();
    if let Some(v) = values.values().iter().find(|v| v.norm() <= floor) {
        return Err(Error::Domain(format!("symbol nearly vanishes on the circle (|φ| = {:.2e})", v.norm())));
    }
    let inverted = CircleSamples::new(samples, |z| s.eval(z).inv());
    let b = bandwidth.min(super::symbol::MAX_DEGREE as usize) as i64;
    let terms: Vec<(i32, C64)> = (-b..=b).map(|k| (k as i32, inverted.coefficient(k))).collect();
    LaurentSymbol::from_terms(&terms)
}

/// Samples of a function at the `M`-th roots of unity and its Fourier coefficients.
pub(crate) struct CircleSamples {
    values: Vec<C64>,
    /// `e^{-2πi j / M}`.
    twiddles: Vec<C64>,
}

impl CircleSamples {
    pub(crate) fn new(size: usize, f: impl Fn(C64) -> C64) -> Self {
        let roots: Vec<C64> = (0..size).map(|m| C64::from_polar(1.0, TAU * m as f64 / size as f64)).collect();
        let values = roots.iter().map(|&z| f(z)).collect();
        let twiddles = roots.iter().map(|z| z.conj()).collect();
        CircleSamples { values, twiddles }
    }

    pub(crate) fn values(&self) -> &[C64] {
        &self.values
    }

    /// `(1/M) Σ_m v_m e^{-2πi k m / M}`.
    pub(crate) fn coefficient(&self, k: i64) -> C64 {
        let size = self.values.len();
        let step = k.rem_euclid(size as i64) as usize;
        let mut j = 0usize;
        let mut acc = ZERO;
        for v in &self.values {
            acc += v * self.twiddles[j];
            j = (j + step) % size;
        }
        acc / size as f64
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceIndex {
    /// Trace at the largest ladder size.
    pub value: C64,
    /// Nearest integer to `value`.
    pub index: i64,
    /// Smallest ladder size whose trace is already within `tol` of `value`.
    pub n0: usize,
    /// Bandwidth of the approximate inverse at each ladder size.
    pub bandwidths: Vec<usize>,
    pub ladder: Vec<(usize, C64)>,
}

/// `B(N) = ⌈ln N⌉ · max(deg, 1)`, capped at the symbol degree bound.
pub fn inverse_bandwidth(n: usize, degree: usize) -> usize {
    let growth = (n.max(2) as f64).ln().ceil() as usize;
    (growth * degree.max(1)).min(super::symbol::MAX_DEGREE as usize)
}

const INVERSE_SAMPLES: usize = 4096;

/// Trace of the size-`N` section of `[T, T0]`, with `T0 = T_ψ` built from the
/// truncated Fourier series of `1/φ`. Evaluated on the ladder `N, 2N, 4N`.
///
/// Both factors are banded, so every diagonal entry of the product sections
/// is summed exactly over the full index range.
pub fn trace_commutator_index(t: &ToeplitzElement, n: usize, tol: f64) -> Result<TraceIndex> {
    ensure_section_size(t, n)?;
    if t.symbol().is_zero() {
        return Err(Error::Domain("zero symbol: T is not Fredholm".into()));
    }
    if t.space() == super::element::Space::Unilateral {
        winding_index(t.symbol(), DEFAULT_CIRCLE_TOL)?;
    }
    let degree = t.symbol().bandwidth();
    let ladder_sizes = [n, 2 * n, 4 * n];
    let mut ladder = Vec::with_capacity(3);
    let mut bandwidths = Vec::with_capacity(3);
    for &size in &ladder_sizes {
        let b = inverse_bandwidth(size, degree);
        let t0 = ToeplitzElement::new(inverse_symbol(t.symbol(), b, INVERSE_SAMPLES)?, None, t.space())?;
        ladder.push((size, section_commutator_trace(t, &t0, size, b)));
        bandwidths.push(b);
    }
    log::debug!("trace ladder {ladder:?} with bandwidths {bandwidths:?}");
    let value = ladder[2].1;
    let index = value.re.round();
    let settled = (ladder[1].1 - value).norm() <= tol;
    let integral = (value - C64::new(index, 0.0)).norm() <= tol;
    if !(settled && integral) {
        return Err(Error::NoConvergence {
            ladder: ladder.iter().map(|&(s, v)| (s, (v - C64::new(index, 0.0)).norm())).collect(),
        });
    }
    let n0 = ladder
        .iter()
        .find(|(_, v)| (v - value).norm() <= tol)
        .map_or(4 * n, |&(s, _)| s);
    Ok(TraceIndex {
        value,
        index: index as i64,
        n0,
        bandwidths,
        ladder,
    })
}

/// `Σ_{i in window} (T T0 - T0 T)(i, i)`; `T0` has bandwidth `b`.
fn section_commutator_trace(t: &ToeplitzElement, t0: &ToeplitzElement, n: usize, b: usize) -> C64 {
    let b = b as i64;
    let mut acc = ZERO;
    for i in t.section_indices(n) {
        for j in i - b..=i + b {
            if !t.in_domain(j) {
                continue;
            }
            acc += t.entry(i, j) * t0.entry(j, i) - t0.entry(i, j) * t.entry(j, i);
        }
    }
    acc
}
