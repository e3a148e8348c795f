use std::f64::consts::TAU;

use bfredholm::matrix::{ONE, ZERO};
use bfredholm::poly::poly_mul;
use bfredholm::sample::{self, SampleRng, NICE_EIGENVALUES};
use bfredholm::semisimple::{fredholm_spectrum, is_fredholm_at, socle_trace, BlockAlgebra};
use bfredholm::toeplitz::{
    bf_spectrum_curve, classify_operator, kernel_cokernel_oracle, winding_index, DEFAULT_CIRCLE_TOL, DEFAULT_ORACLE_SIZES,
};
use bfredholm::{drazin_inverse, BlockElement, ComplexMatrix, IdealSpec, LaurentSymbol, ToeplitzElement, C64};
use proptest::prelude::*;
use rand::Rng;

const TOL: f64 = 1e-10;

/// Symbol `z^shift Q(z)` with zeros of `Q` kept away from the circle.
fn symbol(rng: &mut SampleRng, max_degree: usize) -> LaurentSymbol {
    let degree = rng.random_range(1..=max_degree);
    let mut q = vec![C64::new(rng.random_range(0.5..2.0), 0.0)];
    for _ in 0..degree {
        let r = if rng.random_bool(0.5) { rng.random_range(0.0..0.6) } else { rng.random_range(1.6..3.0) };
        q = poly_mul(&q, &[-C64::from_polar(r, rng.random_range(0.0..TAU)), ONE]);
    }
    let shift: i32 = rng.random_range(-(degree as i32)..=1);
    let terms: Vec<(i32, C64)> = q.iter().enumerate().map(|(i, &c)| (i as i32 + shift, c)).collect();
    LaurentSymbol::from_terms(&terms).unwrap()
}

fn ideal_element(rng: &mut SampleRng, alg: &BlockAlgebra, ideal: &IdealSpec) -> BlockElement {
    let blocks = alg
        .block_sizes()
        .iter()
        .enumerate()
        .map(|(i, &n)| if ideal.contains(i) { sample::gaussian_matrix(rng, n, n) } else { ComplexMatrix::zeros(n, n) })
        .collect();
    BlockElement::new(alg.clone(), blocks).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_is_linear_and_central(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let alg = BlockAlgebra::new(sample::block_sizes(&mut rng, 3, 4)).unwrap();
        let ideal = IdealSpec::full(&alg);
        let a = ideal_element(&mut rng, &alg, &ideal);
        let b = ideal_element(&mut rng, &alg, &ideal);
        let s = sample::gaussian(&mut rng);
        let ta = socle_trace(&a, &ideal, TOL).unwrap();
        let tb = socle_trace(&b, &ideal, TOL).unwrap();
        let scale = 1.0 + a.norm() * b.norm() * 10.0;
        prop_assert!((socle_trace(&a.add(&b).unwrap(), &ideal, TOL).unwrap() - ta - tb).norm() < 1e-8 * scale);
        prop_assert!((socle_trace(&a.scale(s), &ideal, TOL).unwrap() - ta * s).norm() < 1e-8 * scale);
        let ab = socle_trace(&a.mul(&b).unwrap(), &ideal, TOL).unwrap();
        let ba = socle_trace(&b.mul(&a).unwrap(), &ideal, TOL).unwrap();
        prop_assert!((ab - ba).norm() < 1e-8 * scale);
    }

    #[test]
    fn rank_one_idempotents_have_trace_one(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = sample::rng(seed);
        let u = sample::gaussian_matrix(&mut rng, n, 1);
        let w = sample::gaussian_matrix(&mut rng, n, 1);
        let inner = w.adjoint().matmul(&u)[(0, 0)];
        prop_assume!(inner.norm() > 0.1);
        let p = u.matmul(&w.adjoint()).scale(inner.inv());
        let a = BlockElement::from_blocks(vec![ComplexMatrix::zeros(1, 1), p]).unwrap();
        let t = socle_trace(&a, &IdealSpec::new([1]), TOL).unwrap();
        prop_assert!((t - ONE).norm() < 1e-8);
    }

    #[test]
    fn fredholm_spectrum_matches_pointwise_test(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let sizes = sample::block_sizes(&mut rng, 3, 4);
        let ideal = IdealSpec::new(sample::ideal_blocks(&mut rng, sizes.len()));
        let blocks: Vec<ComplexMatrix> = sizes.iter().map(|&n| sample::nice_spectrum_matrix(&mut rng, n).0).collect();
        let a = BlockElement::from_blocks(blocks).unwrap();
        let sigma = fredholm_spectrum(&a, &ideal, TOL).unwrap();
        let mut grid: Vec<C64> = NICE_EIGENVALUES.to_vec();
        grid.extend([C64::new(0.5, 0.0), C64::new(-2.0, 1.0), C64::new(3.0, 0.0)]);
        for lambda in grid {
            let in_sigma = sigma.iter().any(|z| (z - lambda).norm() < 1e-6);
            let fred = is_fredholm_at(&a, &ideal, lambda, 1e-8).unwrap();
            prop_assert_eq!(in_sigma, !fred, "λ = {}", lambda);
        }
    }

    #[test]
    fn drazin_inverse_commutes_with_similarity(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let n = rng.random_range(1..=6);
        let a = sample::core_nilpotent(&mut rng, n);
        let s = sample::near_identity(&mut rng, n);
        let s_inv = bfredholm::linalg::inverse(&s).unwrap();
        let da = drazin_inverse(&a, TOL).unwrap();
        let conj = drazin_inverse(&s.matmul(&a).matmul(&s_inv), TOL).unwrap();
        prop_assert_eq!(da.drazin_index, conj.drazin_index);
        let expected = s.matmul(&da.inverse).matmul(&s_inv);
        prop_assert!(conj.inverse.rel_diff(&expected) < 1e-7);
    }

    #[test]
    fn index_is_additive(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let phi = symbol(&mut rng, 3);
        let psi = symbol(&mut rng, 3);
        let i_phi = winding_index(&phi, DEFAULT_CIRCLE_TOL).unwrap().index;
        let i_psi = winding_index(&psi, DEFAULT_CIRCLE_TOL).unwrap().index;
        let product = phi.mul(&psi).unwrap();
        prop_assert_eq!(winding_index(&product, DEFAULT_CIRCLE_TOL).unwrap().index, i_phi + i_psi);
    }

    #[test]
    fn finite_rank_perturbations_keep_the_class(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let t = ToeplitzElement::unilateral(symbol(&mut rng, 4));
        let p = rng.random_range(1..=6);
        let f = sample::gaussian_matrix(&mut rng, p, p);
        let tf = t.with_perturbation(f).unwrap();
        let plain = classify_operator(&t, DEFAULT_CIRCLE_TOL).unwrap();
        prop_assert_eq!(&plain, &classify_operator(&tf, DEFAULT_CIRCLE_TOL).unwrap());
        let sizes: Vec<usize> = DEFAULT_ORACLE_SIZES.iter().map(|n| n + tf.min_section_size()).collect();
        let oracle = kernel_cokernel_oracle(&tf, &sizes).unwrap();
        prop_assert_eq!(oracle.index(), plain.index);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fredholm_and_b_fredholm_spectra_coincide(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let t = ToeplitzElement::unilateral(symbol(&mut rng, 3));
        let curve = bf_spectrum_curve(&t, 64).unwrap();
        prop_assert!(curve.coincide);
        // off the curve both predicates hold together
        for _ in 0..8 {
            let lambda = sample::gaussian(&mut rng) * 3.0;
            if t.symbol().curve(256).iter().any(|z| (z - lambda).norm() < 1e-3) {
                continue;
            }
            let r = classify_operator(&t.minus_scalar(lambda), DEFAULT_CIRCLE_TOL).unwrap();
            prop_assert_eq!(r.fredholm, r.b_fredholm);
        }
    }

    #[test]
    fn invertible_symbol_plus_low_rank_is_b_weyl(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let phi = loop {
            let s = symbol(&mut rng, 4);
            if winding_index(&s, DEFAULT_CIRCLE_TOL).unwrap().winding == 0 {
                break s;
            }
        };
        let p = rng.random_range(3..=8);
        let r = rng.random_range(1..=3);
        let f = sample::gaussian_matrix(&mut rng, p, r).matmul(&sample::gaussian_matrix(&mut rng, r, p));
        let t = ToeplitzElement::unilateral(phi).with_perturbation(f).unwrap();
        let report = classify_operator(&t, DEFAULT_CIRCLE_TOL).unwrap();
        prop_assert!(report.b_weyl);
        prop_assert_eq!(report.index, Some(0));
    }

    #[test]
    fn symbol_json_round_trips(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let t = ToeplitzElement::unilateral(symbol(&mut rng, 5));
        let text = serde_json::to_string(&t).unwrap();
        let back: ToeplitzElement = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, t);
    }
}

#[test]
fn zero_symbol_curve_is_rejected() {
    let t = ToeplitzElement::unilateral(LaurentSymbol::constant(ZERO));
    assert!(bf_spectrum_curve(&t, 16).is_err());
}
