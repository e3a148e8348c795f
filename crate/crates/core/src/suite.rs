//! Seeded verification suites shared by the command-line front-end and the
//! integration tests.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::drazin::{axiom_residuals, VERIFY_TOL};
use crate::error::{Error, Result};
use crate::linalg::DEFAULT_RANK_TOL;
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::poly::poly_mul;
use crate::sample::{self, SampleRng};
use crate::semisimple::{
    b_weyl_decompose, check_closure_props, check_regularity_axioms, index, index_with_lift, spectral_mapping_check,
    Axiom, BlockElement, ClosureOutcome, IdealSpec, Predicate, RegularityConfig,
};
use crate::toeplitz::{
    bilateral_shift_example, classify_operator, element_operator_consistency, kernel_cokernel_oracle,
    spectral_mapping_bf_check_with_samples, trace_commutator_index, winding_index, Conclusion, LaurentSymbol,
    Membership, ToeplitzElement, DEFAULT_CIRCLE_TOL, DEFAULT_CURVE_SAMPLES, DEFAULT_ORACLE_SIZES,
};

const MAX_BLOCKS: usize = 3;
const MAX_BLOCK_DIM: usize = 6;
/// Absolute tolerance on the finite-dimensional index.
const INDEX_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-6;
const CURVE_TOL: f64 = 1e-6;
const EXAMPLE_RADIUS: f64 = 0.9;
const DEFAULT_EXAMPLE_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Regularity,
    Closure,
    Index,
    Mapping,
    /// B-Weyl decompositions and their Toeplitz converse.
    #[serde(rename = "thm31")]
    Decomposition,
    Example,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Regularity,
        Suite::Closure,
        Suite::Index,
        Suite::Mapping,
        Suite::Decomposition,
        Suite::Example,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Regularity => "regularity",
            Suite::Closure => "closure",
            Suite::Index => "index",
            Suite::Mapping => "mapping",
            Suite::Decomposition => "thm31",
            Suite::Example => "example",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    /// Curve samples for the mapping suite, grid points for the example suite.
    pub grid: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            samples: 500,
            tol: DEFAULT_RANK_TOL,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Controls demonstrate that the harness can fail; they do not decide the suite.
    pub gating: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Failure counter that keeps the first failure for the report.
struct Tally {
    name: String,
    runs: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally {
            name: name.to_string(),
            runs: 0,
            failures: 0,
            first: None,
        }
    }

    fn record(&mut self, sample: usize, outcome: Result<Option<String>>) {
        self.runs += 1;
        let problem = match outcome {
            Ok(None) => return,
            Ok(Some(why)) => why,
            Err(e) => format!("error: {e}"),
        };
        self.failures += 1;
        self.first.get_or_insert_with(|| format!("sample {sample}: {problem}"));
    }

    fn check(self) -> Check {
        let mut detail = format!("{} of {} failed", self.failures, self.runs);
        if let Some(first) = self.first {
            detail = format!("{detail}; first: {first}");
        }
        Check {
            name: self.name,
            passed: self.failures == 0,
            gating: true,
            detail,
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let checks = match suite {
        Suite::Regularity => regularity(cfg)?,
        Suite::Closure => closure(cfg),
        Suite::Index => index_suite(cfg),
        Suite::Mapping => mapping(cfg)?,
        Suite::Decomposition => decomposition(cfg),
        Suite::Example => example(cfg)?,
    };
    let passed = checks.iter().all(|c| c.passed || !c.gating);
    Ok(SuiteReport {
        suite,
        config: *cfg,
        checks,
        passed,
    })
}

fn regularity(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let rc = RegularityConfig {
        seed: cfg.seed,
        samples: cfg.samples,
        tol: cfg.tol,
        ..RegularityConfig::default()
    };
    let mut checks = Vec::new();
    for predicate in [Predicate::Fredholm, Predicate::BFredholm] {
        let r = check_regularity_axioms(predicate, &rc)?;
        checks.push(Check {
            name: format!("{predicate:?}").to_lowercase(),
            passed: r.passed(),
            gating: true,
            detail: format!(
                "{} power and {} commuting checks, {} skipped, {} violations",
                r.power_checks,
                r.commuting_checks,
                r.skipped.len(),
                r.violations.len()
            ),
        });
    }
    let gf = check_regularity_axioms(Predicate::GeneralizedFredholm, &rc)?;
    checks.push(Check {
        name: "control_generalized_fredholm".into(),
        passed: gf.violations_of(Axiom::Power) > 0,
        gating: false,
        detail: format!("{} power violations detected", gf.violations_of(Axiom::Power)),
    });
    let empty = check_regularity_axioms(Predicate::ConstantFalse, &rc)?;
    checks.push(Check {
        name: "control_constant_false".into(),
        passed: empty.violations_of(Axiom::ContainsIdentity) > 0,
        gating: false,
        detail: format!("{} identity violations detected", empty.violations_of(Axiom::ContainsIdentity)),
    });
    Ok(checks)
}

/// New element of the algebra of `a`, one `gen(rng, n)` per block.
fn fresh_like(rng: &mut SampleRng, a: &BlockElement, gen: impl Fn(&mut SampleRng, usize) -> ComplexMatrix) -> BlockElement {
    let blocks = a.algebra().block_sizes().iter().map(|&n| gen(rng, n)).collect();
    BlockElement::new(a.algebra().clone(), blocks).expect("blocks match the algebra")
}

/// Second element sharing the algebra of `a`; `mode` picks a pair with
/// products in the ideal, a commuting pair, or an unrelated pair.
fn partner(rng: &mut SampleRng, a: &BlockElement, ideal: &IdealSpec, mode: usize) -> Result<(BlockElement, BlockElement)> {
    match mode {
        0 => {
            let left: Vec<bool> = (0..a.algebra().num_blocks()).map(|_| rng.random_bool(0.5)).collect();
            let a1 = a.map_blocks(|i, b| if left[i] || ideal.contains(i) { b.clone() } else { ComplexMatrix::zeros(b.rows(), b.cols()) });
            let other = fresh_like(rng, a, sample::corpus_block);
            let a2 = other.map_blocks(|i, b| if left[i] && !ideal.contains(i) { ComplexMatrix::zeros(b.rows(), b.cols()) } else { b.clone() });
            Ok((a1, a2))
        }
        1 => {
            let degree = rng.random_range(1..=3);
            let p = sample::polynomial(rng, degree);
            Ok((a.clone(), a.poly_eval(&p)?))
        }
        _ => Ok((a.clone(), fresh_like(rng, a, sample::corpus_block))),
    }
}

fn closure(cfg: &SuiteConfig) -> Vec<Check> {
    let mut rng = sample::rng(cfg.seed);
    let mut tallies = [Tally::new("sum"), Tally::new("product"), Tally::new("ideal_perturbation")];
    let mut skipped = [0usize; 3];
    for s in 0..cfg.samples {
        let (a, ideal) = sample::block_element(&mut rng, MAX_BLOCKS, MAX_BLOCK_DIM);
        let mode = s % 3;
        let report = partner(&mut rng, &a, &ideal, mode).and_then(|(a1, a2)| check_closure_props(&a1, &a2, &ideal, cfg.tol));
        match report {
            Ok(r) => {
                for (k, outcome) in [r.sum, r.product, r.ideal_perturbation].into_iter().enumerate() {
                    match outcome {
                        ClosureOutcome::Skipped(_) => skipped[k] += 1,
                        ClosureOutcome::Passed => tallies[k].record(s, Ok(None)),
                        ClosureOutcome::Failed(why) => tallies[k].record(s, Ok(Some(why))),
                    }
                }
            }
            Err(e) => {
                let msg = e.to_string();
                for t in &mut tallies {
                    t.record(s, Err(Error::Consistency(msg.clone())));
                }
            }
        }
    }
    tallies
        .into_iter()
        .zip(skipped)
        .map(|(t, skip)| {
            let mut c = t.check();
            c.detail = format!("{}, {skip} skipped", c.detail);
            c
        })
        .collect()
}

fn toeplitz_index_cases() -> Vec<(&'static str, LaurentSymbol, i64)> {
    vec![
        ("shift", LaurentSymbol::shift(), -1),
        ("z^2", LaurentSymbol::monomial(2, ONE), -2),
        ("z-2", LaurentSymbol::from_terms(&[(1, ONE), (0, C64::new(-2.0, 0.0))]).expect("valid symbol"), 0),
    ]
}

fn toeplitz_index_check(name: &str, symbol: LaurentSymbol, expected: i64) -> Check {
    let t = ToeplitzElement::unilateral(symbol);
    let mut found = Vec::new();
    let winding = winding_index(t.symbol(), DEFAULT_CIRCLE_TOL).map(|w| w.index);
    let oracle = kernel_cokernel_oracle(&t, &DEFAULT_ORACLE_SIZES).map(|o| o.index());
    let trace = trace_commutator_index(&t, 16, TRACE_TOL);
    let mut passed = true;
    match winding {
        Ok(i) => {
            passed &= i == expected;
            found.push(format!("winding {i}"));
        }
        Err(e) => {
            passed = false;
            found.push(format!("winding failed: {e}"));
        }
    }
    match oracle {
        Ok(Some(i)) => {
            passed &= i == expected;
            found.push(format!("oracle {i}"));
        }
        Ok(None) => {
            passed = false;
            found.push("oracle did not stabilize".into());
        }
        Err(e) => {
            passed = false;
            found.push(format!("oracle failed: {e}"));
        }
    }
    match trace {
        Ok(tr) => {
            let largest = tr.ladder.last().map_or(0, |l| l.0);
            passed &= (tr.value - C64::new(expected as f64, 0.0)).norm() <= TRACE_TOL && largest <= 512;
            found.push(format!("trace {:.3e}{:+.3e}i at N = {largest}", tr.value.re, tr.value.im));
        }
        Err(e) => {
            passed = false;
            found.push(format!("trace failed: {e}"));
        }
    }
    Check {
        name: format!("toeplitz_{name}"),
        passed,
        gating: true,
        detail: format!("expected {expected}; {}", found.join(", ")),
    }
}

fn index_suite(cfg: &SuiteConfig) -> Vec<Check> {
    let mut rng = sample::rng(cfg.seed);
    let mut zero = Tally::new("block_index_zero");
    let mut lift = Tally::new("block_lift_independence");
    for s in 0..cfg.samples {
        let (a, ideal) = sample::block_element(&mut rng, MAX_BLOCKS, MAX_BLOCK_DIM);
        let other = fresh_like(&mut rng, &a, |r, n| sample::gaussian_matrix(r, n, n));
        let i0 = index(&a, &ideal, cfg.tol);
        zero.record(
            s,
            i0.as_ref()
                .map(|i| (i.norm() > INDEX_TOL).then(|| format!("index {i}")))
                .map_err(|e| Error::Consistency(e.to_string())),
        );
        let i1 = index_with_lift(&a, &ideal, &other, cfg.tol);
        lift.record(
            s,
            match (i0, i1) {
                (Ok(x), Ok(y)) => Ok(((x - y).norm() > INDEX_TOL).then(|| format!("lifts give {x} and {y}"))),
                (Err(e), _) | (_, Err(e)) => Err(e),
            },
        );
    }
    let mut checks = vec![zero.check(), lift.check()];
    for (name, symbol, expected) in toeplitz_index_cases() {
        checks.push(toeplitz_index_check(name, symbol, expected));
    }
    checks
}

fn mapping_polynomials() -> Vec<(&'static str, Vec<C64>)> {
    vec![
        ("z^2", vec![ZERO, ZERO, ONE]),
        ("z^2-z", vec![ZERO, -ONE, ONE]),
        ("z^3", vec![ZERO, ZERO, ZERO, ONE]),
    ]
}

fn mapping_symbols() -> Result<Vec<(&'static str, LaurentSymbol)>> {
    Ok(vec![
        ("z", LaurentSymbol::shift()),
        ("z+1/z", LaurentSymbol::from_terms(&[(1, ONE), (-1, ONE)])?),
        ("2z+z^2", LaurentSymbol::from_terms(&[(1, C64::new(2.0, 0.0)), (2, ONE)])?),
    ])
}

fn mapping(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut rng = sample::rng(cfg.seed);
    let mut block = Tally::new("block_fredholm_spectrum");
    for s in 0..cfg.samples {
        let (a, ideal) = sample::block_element(&mut rng, MAX_BLOCKS, MAX_BLOCK_DIM);
        let degree = rng.random_range(1..=3);
        let f = sample::polynomial(&mut rng, degree);
        block.record(
            s,
            spectral_mapping_check(&a, &ideal, &f, cfg.tol).map(|r| {
                (!r.holds).then(|| format!("distance {:.3e} above threshold {:.3e}", r.distance, r.threshold))
            }),
        );
    }
    let mut checks = vec![block.check()];
    let samples = cfg.grid.unwrap_or(DEFAULT_CURVE_SAMPLES);
    for (fname, f) in mapping_polynomials() {
        for (pname, phi) in mapping_symbols()? {
            let t = ToeplitzElement::unilateral(phi);
            let check = match spectral_mapping_bf_check_with_samples(&t, &f, CURVE_TOL, samples) {
                Ok(r) => Check {
                    name: format!("toeplitz f={fname} phi={pname}"),
                    passed: r.holds,
                    gating: true,
                    detail: format!(
                        "distance {:.3e}, discrepancy ranks {:?}",
                        r.distance,
                        r.discrepancy_sections.iter().map(|d| d.1).collect::<Vec<_>>()
                    ),
                },
                Err(e) => Check {
                    name: format!("toeplitz f={fname} phi={pname}"),
                    passed: false,
                    gating: true,
                    detail: format!("error: {e}"),
                },
            };
            checks.push(check);
        }
    }
    Ok(checks)
}

/// Symbol `z^-k Q(z)` where `Q` has `k` zeros inside the disk and the rest
/// outside, so the winding number is zero and `T_φ` is invertible.
fn invertible_symbol(rng: &mut SampleRng) -> Result<LaurentSymbol> {
    let degree = rng.random_range(1..=4);
    let mut q = vec![ONE];
    let mut inside = 0;
    for _ in 0..degree {
        let radius = if rng.random_bool(0.5) {
            inside += 1;
            rng.random_range(0.0..0.5)
        } else {
            rng.random_range(2.0..4.0)
        };
        let root = C64::from_polar(radius, rng.random_range(0.0..std::f64::consts::TAU));
        q = poly_mul(&q, &[-root, ONE]);
    }
    let terms: Vec<(i32, C64)> = q.iter().enumerate().map(|(i, &c)| (i as i32 - inside, c)).collect();
    LaurentSymbol::from_terms(&terms)
}

/// `U V*` with `U, V` of size `p x r`, `r <= 3`.
fn low_rank(rng: &mut SampleRng) -> ComplexMatrix {
    let p = rng.random_range(3..=8);
    let r = rng.random_range(1..=3);
    let u = sample::gaussian_matrix(rng, p, r);
    let v = sample::gaussian_matrix(rng, p, r);
    u.matmul(&v.adjoint())
}

fn decomposition(cfg: &SuiteConfig) -> Vec<Check> {
    let mut rng = sample::rng(cfg.seed);
    let mut block = Tally::new("block_decomposition");
    for s in 0..cfg.samples {
        let (a, ideal) = sample::block_element(&mut rng, MAX_BLOCKS, MAX_BLOCK_DIM);
        let outcome = b_weyl_decompose(&a, &ideal, cfg.tol).map(|d| {
            let worst = d
                .b
                .blocks()
                .iter()
                .zip(&d.b_drazin)
                .map(|(m, r)| axiom_residuals(m, &r.inverse, r.drazin_index).worst())
                .fold(0.0, f64::max);
            if worst > VERIFY_TOL {
                Some(format!("Drazin residual {worst:.3e} for b"))
            } else if !d.c.in_ideal_exact(&ideal) {
                Some("c is not in the ideal".into())
            } else if d.b.add(&d.c).ok().as_ref() != Some(&a) {
                Some("b + c differs from a".into())
            } else {
                None
            }
        });
        block.record(s, outcome);
    }
    let mut converse = Tally::new("toeplitz_converse");
    let count = cfg.samples.min(100);
    for s in 0..count {
        let outcome = invertible_symbol(&mut rng).and_then(|phi| {
            let t = ToeplitzElement::unilateral(phi).with_perturbation(low_rank(&mut rng))?;
            let report = classify_operator(&t, DEFAULT_CIRCLE_TOL)?;
            let consistency = element_operator_consistency(&t, DEFAULT_CIRCLE_TOL)?;
            Ok(if !report.b_weyl {
                Some(format!("not B-Weyl, index {:?}", report.index))
            } else if consistency.operator_index != Some(0) {
                Some(format!("finite sections give index {:?}", consistency.operator_index))
            } else {
                None
            })
        });
        converse.record(s, outcome);
    }
    vec![block.check(), converse.check()]
}

fn conclusion_name(c: Conclusion) -> &'static str {
    match c {
        Conclusion::Consistent => "consistent",
        Conclusion::Inconsistent => "inconsistent",
        Conclusion::Inconclusive => "inconclusive",
    }
}

fn example(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let nilpotent = ComplexMatrix::jordan(3, ZERO);
    let finite = ToeplitzElement::new(LaurentSymbol::zero(), Some(nilpotent), Default::default())?;
    let c = element_operator_consistency(&finite, DEFAULT_CIRCLE_TOL)?;
    let mut checks = vec![Check {
        name: "finite_rank_consistency".into(),
        passed: c.element_b_fredholm && c.consistent,
        gating: true,
        detail: format!(
            "element B-Fredholm {}, operator B-Fredholm {:?}, index {:?}; {}",
            c.element_b_fredholm, c.operator_b_fredholm, c.operator_index, c.method
        ),
    }];

    let grid = cfg.grid.unwrap_or(DEFAULT_EXAMPLE_GRID);
    let report = bilateral_shift_example(EXAMPLE_RADIUS, grid)?;
    let false_outside = report
        .points
        .iter()
        .filter(|p| p.lambda.norm() <= EXAMPLE_RADIUS && p.membership == Membership::NotInSpectrum)
        .count();
    let false_inside = report
        .points
        .iter()
        .filter(|p| p.lambda.norm() >= 1.5 && p.membership == Membership::InSpectrum)
        .count();
    checks.push(Check {
        name: "bilateral_shift".into(),
        passed: report.conclusion == Conclusion::Consistent,
        gating: true,
        detail: format!("{}: {}", conclusion_name(report.conclusion), report.note),
    });
    checks.push(Check {
        name: "bilateral_membership".into(),
        passed: false_outside == 0 && false_inside == 0,
        gating: true,
        detail: format!(
            "{} points; {false_outside} marked outside for |λ| <= {EXAMPLE_RADIUS}, {false_inside} marked inside for |λ| >= 1.5",
            report.points.len()
        ),
    });
    Ok(checks)
}
