//! Acceptance criteria. Runs as a plain binary so that every criterion prints
//! its verdict; any failure makes the process exit non-zero.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::Instant;

use bfredholm::drazin::VERIFY_TOL;
use bfredholm::linalg::{numerical_rank, singular_values};
use bfredholm::matrix::{ONE, ZERO};
use bfredholm::poly::{poly_eval_scalar, poly_mul};
use bfredholm::sample::{self, SampleRng};
use bfredholm::semisimple::{
    b_weyl_decompose, check_regularity_axioms, classify, fredholm_spectrum, index, index_with_lift, spectral_mapping_check,
    Axiom, Predicate, RegularityConfig,
};
use bfredholm::toeplitz::{
    bilateral_shift_example, classify_operator, element_operator_consistency, kernel_cokernel_oracle,
    spectral_mapping_bf_check, trace_commutator_index, winding_index, Conclusion, Membership, DEFAULT_CIRCLE_TOL,
    DEFAULT_ORACLE_SIZES,
};
use bfredholm::{drazin_inverse, BlockElement, ComplexMatrix, IdealSpec, LaurentSymbol, ToeplitzElement, C64};
use rand::Rng;

const RANK_TOL: f64 = 1e-10;

struct Verdict {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

fn rel(num: f64, den: f64) -> f64 {
    num / den.max(f64::MIN_POSITIVE)
}

/// Drazin residuals, recomputed from scratch.
fn drazin_residual(a: &ComplexMatrix, b: &ComplexMatrix, k: usize) -> f64 {
    let na = a.op_norm();
    let nb = b.op_norm();
    let growth = (na * nb).max(1.0);
    let bab = b.matmul(a).matmul(b);
    let ab = a.matmul(b);
    let ba = b.matmul(a);
    let ak = a.pow(k as u32);
    let ak1b = a.pow(k as u32 + 1).matmul(b);
    let r1 = if nb == 0.0 { 0.0 } else { rel((&bab - b).op_norm(), nb * growth) };
    let r2 = if na * nb == 0.0 { 0.0 } else { rel((&ab - &ba).op_norm(), na * nb) };
    let r3 = if ak.is_zero() { ak1b.op_norm() } else { rel((&ak1b - &ak).op_norm(), na.powi(k as i32) * growth) };
    r1.max(r2).max(r3)
}

fn corpus(seed: u64, count: usize) -> Vec<ComplexMatrix> {
    let mut rng = sample::rng(seed);
    (0..count).map(|_| sample::drazin_corpus_matrix(&mut rng, 8)).collect()
}

fn criterion_1() -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (i, a) in corpus(2024, 1000).iter().enumerate() {
        match drazin_inverse(a, RANK_TOL) {
            Ok(d) => {
                let r = drazin_residual(a, &d.inverse, d.drazin_index);
                worst = worst.max(r);
                v.require(r <= 1e-8, || format!("matrix {i}: residual {r:.3e}"));
            }
            Err(e) => v.require(false, || format!("matrix {i}: {e}")),
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    v.require(elapsed < 10.0, || format!("took {elapsed:.2}s"));
    v.note(format!("worst residual {worst:.2e}, {elapsed:.2}s"));
    v
}

fn criterion_2() -> Verdict {
    let mut v = Verdict::new();
    let mut split_ok = 0;
    for (i, a) in corpus(2024, 1000).iter().enumerate() {
        let n = a.rows();
        let result = drazin_inverse(a, RANK_TOL);
        let k = match &result {
            Ok(d) => d.drazin_index,
            Err(_) => n,
        };
        let ak = a.pow(k as u32);
        // the combined basis of range(a^k) and null(a^k) must be nonsingular
        let rank = numerical_rank(&ak, RANK_TOL).unwrap();
        let mut columns = rank.range_basis.clone();
        columns.extend(rank.null_basis.iter().cloned());
        let combined = ComplexMatrix::from_columns(n, &columns);
        let sv = singular_values(&combined);
        let nonsingular = columns.len() == n && sv.last().copied().unwrap_or(1.0) > 1e-8;
        split_ok += usize::from(nonsingular);
        v.require(nonsingular == result.is_ok(), || {
            format!("matrix {i}: splitting {nonsingular}, Drazin success {}", result.is_ok())
        });
        if let Ok(d) = &result {
            let ab = a.matmul(&d.inverse);
            let scale = d.p.op_norm().max(1.0);
            let gap = (&d.p - &ab).op_norm() / scale;
            v.require(gap <= 1e-8, || format!("matrix {i}: ‖p - ab‖ = {gap:.3e}"));
            v.require(d.splitting.complementary == nonsingular, || format!("matrix {i}: reported splitting disagrees"));
        }
    }
    v.note(format!("{split_ok} of 1000 splittings verified"));
    v
}

/// `e - a^n c - c a^n` invertible on every block outside `J` and
/// `a^n c a^n - a^n` zero there.
fn witness_by_hand(a: &BlockElement, ideal: &IdealSpec, n: usize, c: &BlockElement) -> bool {
    (0..a.algebra().num_blocks()).filter(|&i| !ideal.contains(i)).all(|i| {
        let an = a.block(i).pow(n as u32);
        let ci = c.block(i);
        let scale = (1.0 + an.op_norm()).powi(2) * (1.0 + ci.op_norm());
        let residual = (&an.matmul(ci).matmul(&an) - &an).op_norm();
        let m = &(&ComplexMatrix::identity(an.rows()) - &an.matmul(ci)) - &ci.matmul(&an);
        let sv = singular_values(&m);
        residual <= 1e-8 * scale && sv.last().copied().unwrap_or(1.0) > 1e-8 * sv[0].max(1.0)
    })
}

fn criterion_3() -> Verdict {
    let mut v = Verdict::new();
    let mut rng = sample::rng(77);
    let mut agree = 0;
    for i in 0..1000 {
        let (a, ideal) = sample::block_element(&mut rng, 3, 6);
        match classify(&a, &ideal, RANK_TOL) {
            Ok(r) => {
                let witness = match (r.witness_n, &r.witness_c) {
                    (Some(n), Some(c)) => witness_by_hand(&a, &ideal, n, c),
                    _ => false,
                };
                agree += usize::from(witness == r.b_fredholm);
                v.require(witness == r.b_fredholm, || format!("element {i}: direct {}, witness {witness}", r.b_fredholm));
            }
            Err(e) => v.require(false, || format!("element {i}: {e}")),
        }
    }
    v.note(format!("{agree} of 1000 agree"));
    v
}

fn criterion_4() -> Verdict {
    let mut v = Verdict::new();
    let cfg = RegularityConfig::default();
    for p in [Predicate::Fredholm, Predicate::BFredholm] {
        match check_regularity_axioms(p, &cfg) {
            Ok(r) => {
                v.require(r.passed(), || format!("{p:?}: {} violations", r.violations.len()));
                v.note(format!("{p:?}: {} power, {} commuting checks", r.power_checks, r.commuting_checks));
            }
            Err(e) => v.require(false, || format!("{p:?}: {e}")),
        }
    }
    // the harness must be able to see a violation
    let control = check_regularity_axioms(Predicate::GeneralizedFredholm, &cfg).unwrap();
    v.require(control.violations_of(Axiom::Power) > 0, || "control predicate produced no violation".into());
    v
}

fn criterion_5() -> Verdict {
    let mut v = Verdict::new();
    let mut rng = sample::rng(5);
    for i in 0..500 {
        let (a, ideal) = sample::block_element(&mut rng, 3, 6);
        let other = BlockElement::new(
            a.algebra().clone(),
            a.algebra().block_sizes().iter().map(|&n| sample::gaussian_matrix(&mut rng, n, n)).collect(),
        )
        .unwrap();
        match (index(&a, &ideal, RANK_TOL), index_with_lift(&a, &ideal, &other, RANK_TOL)) {
            (Ok(i0), Ok(i1)) => {
                v.require(i0.norm() <= 1e-10, || format!("(a) element {i}: index {i0}"));
                v.require((i0 - i1).norm() <= 1e-10, || format!("(b) element {i}: {i0} vs {i1}"));
            }
            (Err(e), _) | (_, Err(e)) => v.require(false, || format!("element {i}: {e}")),
        }
    }
    let cases = [
        ("shift", LaurentSymbol::shift(), -1),
        ("z^2", LaurentSymbol::monomial(2, ONE), -2),
        ("z-2", LaurentSymbol::from_terms(&[(1, ONE), (0, C64::new(-2.0, 0.0))]).unwrap(), 0),
    ];
    for (name, s, expected) in cases {
        let t = ToeplitzElement::unilateral(s.clone());
        let w = winding_index(&s, DEFAULT_CIRCLE_TOL).map(|w| w.index).ok();
        let o = kernel_cokernel_oracle(&t, &DEFAULT_ORACLE_SIZES).ok().and_then(|o| o.index());
        v.require(w == Some(expected), || format!("(c) {name}: winding {w:?}"));
        v.require(o == Some(expected), || format!("(c) {name}: oracle {o:?}"));
        let mut n = 8;
        let converged = loop {
            if let Ok(tr) = trace_commutator_index(&t, n, 1e-6) {
                if (tr.value - C64::new(expected as f64, 0.0)).norm() <= 1e-6 {
                    break Some(tr.ladder.last().unwrap().0);
                }
            }
            if 4 * n >= 512 {
                break None;
            }
            n *= 2;
        };
        v.require(converged.is_some(), || format!("(c) {name}: trace did not converge by N = 512"));
        v.note(format!("{name}: {expected} at N = {}", converged.unwrap_or(0)));
    }
    v
}

/// `z^-k Q(z)` with `k` zeros of `Q` inside the disk and the rest outside.
fn winding_zero_symbol(rng: &mut SampleRng) -> LaurentSymbol {
    let degree = rng.random_range(1..=5);
    let mut q = vec![ONE];
    let mut inside = 0;
    for _ in 0..degree {
        let r = if rng.random_bool(0.5) {
            inside += 1;
            rng.random_range(0.05..0.6)
        } else {
            rng.random_range(1.7..3.0)
        };
        q = poly_mul(&q, &[-C64::from_polar(r, rng.random_range(0.0..TAU)), ONE]);
    }
    let terms: Vec<(i32, C64)> = q.iter().enumerate().map(|(i, &c)| (i as i32 - inside, c)).collect();
    LaurentSymbol::from_terms(&terms).unwrap()
}

fn criterion_6() -> Verdict {
    let mut v = Verdict::new();
    let mut rng = sample::rng(31);
    for i in 0..500 {
        let (a, ideal) = sample::block_element(&mut rng, 3, 6);
        match b_weyl_decompose(&a, &ideal, RANK_TOL) {
            Ok(d) => {
                for (j, (m, r)) in d.b.blocks().iter().zip(&d.b_drazin).enumerate() {
                    let res = drazin_residual(m, &r.inverse, r.drazin_index);
                    v.require(res <= VERIFY_TOL, || format!("sample {i} block {j}: Drazin residual {res:.3e}"));
                }
                let outside_zero = (0..a.algebra().num_blocks()).all(|j| ideal.contains(j) || d.c.block(j).is_zero());
                v.require(outside_zero, || format!("sample {i}: c not in J"));
                v.require(d.b.add(&d.c).unwrap() == a, || format!("sample {i}: b + c != a"));
            }
            Err(e) => v.require(false, || format!("sample {i}: {e}")),
        }
    }
    for i in 0..100 {
        let phi = winding_zero_symbol(&mut rng);
        let p = rng.random_range(2..=8);
        let r = rng.random_range(1..=3usize.min(p));
        let f = sample::gaussian_matrix(&mut rng, p, r).matmul(&sample::gaussian_matrix(&mut rng, r, p));
        let t = ToeplitzElement::unilateral(phi).with_perturbation(f).unwrap();
        let report = classify_operator(&t, DEFAULT_CIRCLE_TOL).unwrap();
        let sections = element_operator_consistency(&t, DEFAULT_CIRCLE_TOL).unwrap();
        v.require(report.b_weyl, || format!("converse {i}: not B-Weyl"));
        v.require(sections.operator_index == Some(0), || format!("converse {i}: sections give {:?}", sections.operator_index));
    }
    v
}

fn laurent_eval(s: &LaurentSymbol, z: C64) -> C64 {
    s.terms().map(|(d, c)| c * z.powi(d)).sum()
}

fn brute_hausdorff(a: &[C64], b: &[C64]) -> f64 {
    let one_way = |x: &[C64], y: &[C64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Blocks with eigenvalues from a fixed list, so `σ_F` is known exactly.
fn known_spectrum_element(rng: &mut SampleRng) -> (BlockElement, IdealSpec, Vec<C64>) {
    let sizes = sample::block_sizes(rng, 3, 4);
    let ideal = IdealSpec::new(sample::ideal_blocks(rng, sizes.len()));
    let mut blocks = Vec::new();
    let mut sigma = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let (m, eig) = sample::nice_spectrum_matrix(rng, n);
        if !ideal.contains(i) {
            sigma.extend(eig);
        }
        blocks.push(m);
    }
    (BlockElement::from_blocks(blocks).unwrap(), ideal, sigma)
}

fn criterion_7() -> Verdict {
    let mut v = Verdict::new();
    let mut rng = sample::rng(7);
    let mut worst = 0.0f64;
    for i in 0..300 {
        let (a, ideal, sigma) = known_spectrum_element(&mut rng);
        let degree = rng.random_range(1..=3);
        let f: Vec<C64> = (0..=degree)
            .map(|_| C64::new(rng.random_range(-2i32..=2) as f64, rng.random_range(-1i32..=1) as f64))
            .chain(std::iter::once(ONE))
            .collect();
        let mapped: Vec<C64> = sigma.iter().map(|&l| poly_eval_scalar(&f, l)).collect();
        let fa = a.poly_eval(&f).unwrap();
        let image = fredholm_spectrum(&fa, &ideal, RANK_TOL).unwrap();
        let scale = 1.0 + mapped.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let d = if mapped.is_empty() && image.is_empty() { 0.0 } else { brute_hausdorff(&mapped, &image) };
        worst = worst.max(d / scale);
        v.require(d <= 1e-8 * scale, || format!("block {i}: distance {d:.3e}"));
        let r = spectral_mapping_check(&a, &ideal, &f, RANK_TOL).unwrap();
        v.require(r.holds, || format!("block {i}: library check failed at {:.3e}", r.distance));
    }
    v.note(format!("block worst {worst:.1e}·scale"));

    let fs: [(&str, Vec<C64>); 3] = [
        ("z^2", vec![ZERO, ZERO, ONE]),
        ("z^2-z", vec![ZERO, -ONE, ONE]),
        ("z^3", vec![ZERO, ZERO, ZERO, ONE]),
    ];
    let phis = [
        ("z", LaurentSymbol::shift()),
        ("z+1/z", LaurentSymbol::from_terms(&[(1, ONE), (-1, ONE)]).unwrap()),
        ("2z+z^2", LaurentSymbol::from_terms(&[(1, C64::new(2.0, 0.0)), (2, ONE)]).unwrap()),
    ];
    let mut worst = 0.0f64;
    for (fname, f) in &fs {
        for (pname, phi) in &phis {
            let circle: Vec<C64> = (0..1024).map(|j| C64::from_polar(1.0, TAU * j as f64 / 1024.0)).collect();
            let mapped: Vec<C64> = circle.iter().map(|&z| poly_eval_scalar(f, laurent_eval(phi, z))).collect();
            let composed = phi.compose(f).unwrap();
            let image: Vec<C64> = circle.iter().map(|&z| laurent_eval(&composed, z)).collect();
            let d = brute_hausdorff(&mapped, &image);
            worst = worst.max(d);
            v.require(d <= 1e-6, || format!("f={fname}, φ={pname}: distance {d:.3e}"));
            let r = spectral_mapping_bf_check(&ToeplitzElement::unilateral(phi.clone()), f, 1e-6).unwrap();
            v.require(r.holds, || format!("f={fname}, φ={pname}: library check failed"));
        }
    }
    v.note(format!("curve worst {worst:.1e}"));
    v
}

fn criterion_8() -> Verdict {
    let mut v = Verdict::new();
    let f = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0], &[0.0, 0.0, 0.0]]);
    // ranks of F^k: 2, 1, 0, 0, ... stagnate, so F is B-Fredholm as an operator
    let ranks: Vec<usize> = (1..=4).map(|k| numerical_rank(&f.pow(k), RANK_TOL).unwrap().rank).collect();
    v.require(ranks == [2, 1, 0, 0], || format!("ranks of powers {ranks:?}"));
    let t = ToeplitzElement::new(LaurentSymbol::zero(), Some(f), Default::default()).unwrap();
    let c = element_operator_consistency(&t, DEFAULT_CIRCLE_TOL).unwrap();
    v.require(c.element_b_fredholm && c.operator_b_fredholm == Some(true) && c.consistent, || format!("{c:?}"));

    let report = bilateral_shift_example(0.9, 64).unwrap();
    v.require(report.points.len() == 64, || format!("{} grid points", report.points.len()));
    v.require(report.conclusion == Conclusion::Consistent, || format!("conclusion {:?}", report.conclusion));
    for p in &report.points {
        let r = p.lambda.norm();
        v.require(!(r <= 0.9 && p.membership == Membership::NotInSpectrum), || format!("λ = {}: false exclusion", p.lambda));
        v.require(!(r >= 1.5 && p.membership == Membership::InSpectrum), || format!("λ = {}: false inclusion", p.lambda));
        // 1/(z - λ) = Σ λ^k z^(-k-1) inside the disk: all mass on negative degrees
        if r < 1.0 {
            v.require(p.negative_fraction > 0.5, || format!("λ = {}: negative mass {}", p.lambda, p.negative_fraction));
        }
    }
    let inside = report.points.iter().filter(|p| p.lambda.norm() <= 0.9).count();
    v.note(format!("{inside} points with |λ| <= 0.9"));
    v
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("1 Drazin axioms", criterion_1),
        ("2 core-nilpotent splitting", criterion_2),
        ("3 quotient-Drazin vs witness", criterion_3),
        ("4 regularity axioms", criterion_4),
        ("5 index theory", criterion_5),
        ("6 B-Weyl decomposition", criterion_6),
        ("7 spectral mapping", criterion_7),
        ("8 finite-rank element and bilateral shift", criterion_8),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let v = run();
        let secs = t.elapsed().as_secs_f64();
        let status = if v.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} criterion {name} ({secs:.2}s) {}", v.notes.join("; "));
        for f in v.failures.iter().take(5) {
            println!("    {f}");
        }
        if v.failures.len() > 5 {
            println!("    ... {} more", v.failures.len() - 5);
        }
        failed += usize::from(!v.failures.is_empty());
    }
    println!("{} of 8 criteria passed in {:.1}s", 8 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
