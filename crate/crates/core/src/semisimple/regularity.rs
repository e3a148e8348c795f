//! Randomized checks of the regularity axioms and of the closure properties
//! of B-Fredholm elements.
//!
//! A subset `R` of `A` is a regularity when
//! 1. `a ∈ R ⇔ a^n ∈ R` for every `n >= 1`, and
//! 2. for mutually commuting `a, b, c, d` with `ac + bd = e`: `ab ∈ R ⇔ a, b ∈ R`.
//!
//! Samples are kept as `S D S^-1` with `D` upper triangular, so powers and
//! polynomials are evaluated on `D` and nilpotent parts vanish exactly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::drazin::VERIFY_TOL;
use crate::error::Result;
use crate::linalg::DEFAULT_RANK_TOL;
use crate::matrix::ComplexMatrix;
use crate::poly::{poly_eval, poly_eval_scalar};
use crate::sample::{self, SampleRng, Similar};

use super::classify::{classify, is_b_fredholm, is_fredholm, is_generalized_fredholm};
use super::element::{BlockAlgebra, BlockElement, IdealSpec};

/// Membership test evaluated modulo an ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Fredholm,
    BFredholm,
    /// Not a regularity (`J_2(0)` fails, its square passes); useful as a harness check.
    GeneralizedFredholm,
    /// The empty set; fails only the requirement `e ∈ R`.
    ConstantFalse,
}

impl Predicate {
    pub fn holds(self, a: &BlockElement, ideal: &IdealSpec, tol: f64) -> Result<bool> {
        match self {
            Predicate::Fredholm => is_fredholm(a, ideal, tol),
            Predicate::BFredholm => Ok(is_b_fredholm(a, ideal, tol)?.b_fredholm),
            Predicate::GeneralizedFredholm => Ok(is_generalized_fredholm(a, ideal, tol)?.holds),
            Predicate::ConstantFalse => Ok(false),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularityConfig {
    pub seed: u64,
    pub samples: usize,
    pub max_blocks: usize,
    pub max_block_dim: usize,
    pub max_power: u32,
    pub tol: f64,
}

impl Default for RegularityConfig {
    fn default() -> Self {
        RegularityConfig {
            seed: 42,
            samples: 500,
            max_blocks: 3,
            max_block_dim: 4,
            max_power: 4,
            tol: DEFAULT_RANK_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Power,
    Commuting,
    /// `e ∈ R`.
    ContainsIdentity,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub sample: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularityReport {
    pub predicate: Predicate,
    pub config: RegularityConfig,
    pub power_checks: usize,
    pub commuting_checks: usize,
    /// Samples that could not be evaluated, with the reason.
    pub skipped: Vec<(usize, String)>,
    pub violations: Vec<Violation>,
}

impl RegularityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_of(&self, axiom: Axiom) -> usize {
        self.violations.iter().filter(|v| v.axiom == axiom).count()
    }
}

/// One factored matrix per block.
struct FactoredElement {
    algebra: BlockAlgebra,
    blocks: Vec<Similar>,
}

impl FactoredElement {
    fn random(rng: &mut SampleRng, cfg: &RegularityConfig) -> Result<Self> {
        let sizes = sample::block_sizes(rng, cfg.max_blocks, cfg.max_block_dim);
        let blocks = sizes.iter().map(|&n| sample::structured_block(rng, n)).collect();
        Ok(FactoredElement {
            algebra: BlockAlgebra::new(sizes)?,
            blocks,
        })
    }

    /// `g(M)` computed blockwise on the inner matrices.
    fn apply(&self, g: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>) -> Result<(Vec<ComplexMatrix>, BlockElement)> {
        let inner = self.blocks.iter().map(|b| g(&b.inner)).collect::<Result<Vec<_>>>()?;
        let element = self.realize(&inner)?;
        Ok((inner, element))
    }

    fn realize(&self, inner: &[ComplexMatrix]) -> Result<BlockElement> {
        let blocks = self.blocks.iter().zip(inner).map(|(s, x)| s.realize(x)).collect();
        BlockElement::new(self.algebra.clone(), blocks)
    }
}

fn random_ideal(rng: &mut SampleRng, algebra: &BlockAlgebra) -> IdealSpec {
    IdealSpec::new(sample::ideal_blocks(rng, algebra.num_blocks()))
}


/// Runs both axioms over `cfg.samples` seeded samples.
pub fn check_regularity_axioms(predicate: Predicate, cfg: &RegularityConfig) -> Result<RegularityReport> {
    let mut rng = sample::rng(cfg.seed);
    let mut report = RegularityReport {
        predicate,
        config: cfg.clone(),
        power_checks: 0,
        commuting_checks: 0,
        skipped: Vec::new(),
        violations: Vec::new(),
    };

    let probe = BlockAlgebra::new(vec![1])?;
    if !predicate.holds(&probe.identity(), &IdealSpec::zero(), cfg.tol)? {
        report.violations.push(Violation {
            axiom: Axiom::ContainsIdentity,
            sample: 0,
            detail: "identity is not in R".into(),
        });
    }

    for i in 0..cfg.samples {
        let m = FactoredElement::random(&mut rng, cfg)?;
        let ideal = random_ideal(&mut rng, &m.algebra);
        if let Err(e) = power_axiom(predicate, &m, &ideal, i, cfg, &mut report) {
            report.skipped.push((i, format!("power axiom: {e}")));
        }
        if let Err(e) = commuting_axiom(predicate, &m, &ideal, i, cfg, &mut rng, &mut report) {
            report.skipped.push((i, format!("commuting axiom: {e}")));
        }
    }
    Ok(report)
}

fn power_axiom(
    predicate: Predicate,
    m: &FactoredElement,
    ideal: &IdealSpec,
    sample: usize,
    cfg: &RegularityConfig,
    report: &mut RegularityReport,
) -> Result<()> {
    let (_, a) = m.apply(|d| Ok(d.clone()))?;
    let base = predicate.holds(&a, ideal, cfg.tol)?;
    for n in 2..=cfg.max_power {
        let (_, an) = m.apply(|d| Ok(d.pow(n)))?;
        let powered = predicate.holds(&an, ideal, cfg.tol)?;
        report.power_checks += 1;
        if powered != base {
            report.violations.push(Violation {
                axiom: Axiom::Power,
                sample,
                detail: format!("a in R = {base}, a^{n} in R = {powered}"),
            });
        }
    }
    Ok(())
}

/// Quadruple `a = p(M)`, `c = u(M)`, `b = e - ac`, `d = e`. Half of the time
/// `u` is tuned so that `u(μ) p(μ) = 1` at an eigenvalue `μ` of `M`, which makes
/// `b` singular on the block carrying `μ`.
fn commuting_axiom(
    predicate: Predicate,
    m: &FactoredElement,
    ideal: &IdealSpec,
    sample: usize,
    cfg: &RegularityConfig,
    rng: &mut SampleRng,
    report: &mut RegularityReport,
) -> Result<()> {
    let degree = rng.random_range(1..=2);
    let p = sample::polynomial(rng, degree);
    let mut u = sample::polynomial(rng, 1);
    if rng.random_bool(0.5) {
        let block = rng.random_range(0..m.blocks.len());
        let diag = m.blocks[block].inner_diagonal();
        let mu = diag[rng.random_range(0..diag.len())];
        let pm = poly_eval_scalar(&p, mu);
        if pm.norm() < 0.1 {
            report.skipped.push((sample, "p(μ) too small to tune u".into()));
            return Ok(());
        }
        u[0] = pm.inv() - u[1] * mu;
    }

    let (a_in, a) = m.apply(|d| poly_eval(d, &p))?;
    let (c_in, c) = m.apply(|d| poly_eval(d, &u))?;
    let b_in: Vec<ComplexMatrix> = a_in
        .iter()
        .zip(&c_in)
        .map(|(x, y)| ComplexMatrix::identity(x.rows()) - x.matmul(y))
        .collect();
    let b = m.realize(&b_in)?;
    let ab_in: Vec<ComplexMatrix> = a_in.iter().zip(&b_in).map(|(x, y)| x.matmul(y)).collect();
    let ab = m.realize(&ab_in)?;
    let e = m.algebra.identity();

    let lhs = a.mul(&c)?.add(&b)?;
    let scale = 1.0 + a.norm() * c.norm() + b.norm();
    let residual = lhs.sub(&e)?.norm() / scale;
    if residual > VERIFY_TOL {
        report.skipped.push((sample, format!("ac + bd = e residual {residual:.2e}")));
        return Ok(());
    }
    let commute = [(&a, &b), (&a, &c), (&b, &c)]
        .iter()
        .map(|(x, y)| {
            let xy = x.mul(y)?;
            let yx = y.mul(x)?;
            Ok(xy.sub(&yx)?.norm() / (1.0 + x.norm() * y.norm()))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if commute > VERIFY_TOL {
        report.skipped.push((sample, format!("commutator residual {commute:.2e}")));
        return Ok(());
    }

    let in_a = predicate.holds(&a, ideal, cfg.tol)?;
    let in_b = predicate.holds(&b, ideal, cfg.tol)?;
    let in_ab = predicate.holds(&ab, ideal, cfg.tol)?;
    report.commuting_checks += 1;
    if in_ab != (in_a && in_b) {
        report.violations.push(Violation {
            axiom: Axiom::Commuting,
            sample,
            detail: format!("a in R = {in_a}, b in R = {in_b}, ab in R = {in_ab}"),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "reason", rename_all = "snake_case")]
pub enum ClosureOutcome {
    Passed,
    Failed(String),
    Skipped(String),
}

impl ClosureOutcome {
    pub fn is_failure(&self) -> bool {
        matches!(self, ClosureOutcome::Failed(_))
    }
}

/// Outcomes for `a1 + a2`, `a1 a2` and `a1 + i` (`i` the ideal part of `a2`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosureReport {
    pub sum: ClosureOutcome,
    pub product: ClosureOutcome,
    pub ideal_perturbation: ClosureOutcome,
}

impl ClosureReport {
    pub fn any_failure(&self) -> bool {
        self.sum.is_failure() || self.product.is_failure() || self.ideal_perturbation.is_failure()
    }
}

fn b_fredholm_outcome(x: &BlockElement, ideal: &IdealSpec, tol: f64, what: &str) -> Result<ClosureOutcome> {
    let report = classify(x, ideal, tol)?;
    Ok(if report.b_fredholm {
        ClosureOutcome::Passed
    } else {
        ClosureOutcome::Failed(format!("{what} is not B-Fredholm"))
    })
}

/// Closure of B-Fredholm elements under sums with products in `J`, commuting
/// products, and perturbation by elements of `J`.
pub fn check_closure_props(a1: &BlockElement, a2: &BlockElement, ideal: &IdealSpec, tol: f64) -> Result<ClosureReport> {
    a1.ensure_same_algebra(a2)?;
    ideal.validate(a1.algebra())?;
    let bf1 = classify(a1, ideal, tol)?.b_fredholm;
    let bf2 = classify(a2, ideal, tol)?.b_fredholm;
    if !(bf1 && bf2) {
        let reason = format!("inputs must be B-Fredholm (a1: {bf1}, a2: {bf2})");
        return Ok(ClosureReport {
            sum: ClosureOutcome::Skipped(reason.clone()),
            product: ClosureOutcome::Skipped(reason.clone()),
            ideal_perturbation: ClosureOutcome::Skipped(reason),
        });
    }
    let scale = (a1.norm() * a2.norm()).max(1.0);
    let p12 = a1.mul(a2)?;
    let p21 = a2.mul(a1)?;

    let sum = if p12.in_ideal(ideal, VERIFY_TOL * scale) && p21.in_ideal(ideal, VERIFY_TOL * scale) {
        b_fredholm_outcome(&a1.add(a2)?, ideal, tol, "a1 + a2")?
    } else {
        ClosureOutcome::Skipped("a1 a2 and a2 a1 are not both in the ideal".into())
    };

    let product = if p12.sub(&p21)?.norm() <= VERIFY_TOL * scale {
        b_fredholm_outcome(&p12, ideal, tol, "a1 a2")?
    } else {
        ClosureOutcome::Skipped("a1 and a2 do not commute".into())
    };

    let perturbed = a1.add(&a2.ideal_part(ideal))?;
    let ideal_perturbation = b_fredholm_outcome(&perturbed, ideal, tol, "a1 + i")?;

    Ok(ClosureReport {
        sum,
        product,
        ideal_perturbation,
    })
}
