//! Seeded random generators for property suites.
//!
//! Everything is driven by `ChaCha8Rng` so that a seed reproduces a run
//! byte-for-byte on every platform.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg;
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::semisimple::{BlockElement, IdealSpec};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut SampleRng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut SampleRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// `I + 0.3 G / sqrt(n)`: a well-conditioned random change of basis.
pub fn near_identity(rng: &mut SampleRng, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n).scale(C64::new(0.3 / (n as f64).sqrt(), 0.0));
    &ComplexMatrix::identity(n) + &g
}

/// Random partition of `n` into Jordan-block sizes.
fn jordan_sizes(rng: &mut SampleRng, n: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = rng.random_range(1..=left);
        sizes.push(s);
        left -= s;
    }
    sizes
}

/// Nilpotent matrix: direct sum of Jordan blocks at zero with superdiagonal
/// entries drawn from `[0.5, 1.5]`.
pub fn nilpotent(rng: &mut SampleRng, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    let mut start = 0;
    for s in jordan_sizes(rng, n) {
        for i in start..start + s - 1 {
            m[(i, i + 1)] = C64::new(rng.random_range(0.5..1.5), 0.0);
        }
        start += s;
    }
    m
}

/// Upper-triangular invertible matrix with eigenvalue moduli in `[0.5, 2]`.
pub fn invertible_core(rng: &mut SampleRng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let r = rng.random_range(0.5..2.0);
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            C64::from_polar(r, theta)
        } else if j > i {
            gaussian(rng) * 0.5
        } else {
            ZERO
        }
    })
}

/// `S diag(C, N) S^-1` with random core size; the Drazin index is the
/// largest Jordan block of `N`.
pub fn core_nilpotent(rng: &mut SampleRng, n: usize) -> ComplexMatrix {
    let r = rng.random_range(0..=n);
    let core = invertible_core(rng, r);
    let nil = nilpotent(rng, n - r);
    let inner = ComplexMatrix::block_diag(&[&core, &nil]);
    conjugate(rng, &inner)
}

/// Random similarity transform of `m`.
pub fn conjugate(rng: &mut SampleRng, m: &ComplexMatrix) -> ComplexMatrix {
    let (s, inv) = similarity(rng, m.rows());
    s.matmul(m).matmul(&inv)
}

/// `S X S^-1` kept in factored form, so that functions of the element can be
/// evaluated on the inner matrix `X` where exact zeros stay exact.
#[derive(Debug, Clone)]
pub struct Similar {
    pub basis: ComplexMatrix,
    pub basis_inv: ComplexMatrix,
    pub inner: ComplexMatrix,
}

impl Similar {
    pub fn realize(&self, inner: &ComplexMatrix) -> ComplexMatrix {
        self.basis.matmul(inner).matmul(&self.basis_inv)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.realize(&self.inner)
    }

    /// Diagonal of the inner matrix; these are the eigenvalues when the
    /// inner matrix is upper triangular.
    pub fn inner_diagonal(&self) -> Vec<C64> {
        (0..self.inner.rows()).map(|i| self.inner[(i, i)]).collect()
    }
}

fn similarity(rng: &mut SampleRng, n: usize) -> (ComplexMatrix, ComplexMatrix) {
    loop {
        let s = near_identity(rng, n);
        if let Ok(inv) = linalg::inverse(&s) {
            return (s, inv);
        }
    }
}

/// Core-nilpotent matrix in factored form; the inner matrix is upper triangular.
pub fn structured_block(rng: &mut SampleRng, n: usize) -> Similar {
    let r = rng.random_range(0..=n);
    let core = invertible_core(rng, r);
    let nil = nilpotent(rng, n - r);
    let inner = ComplexMatrix::block_diag(&[&core, &nil]);
    let (basis, basis_inv) = similarity(rng, n);
    Similar { basis, basis_inv, inner }
}

/// Block sizes for a random algebra with `1..=max_blocks` blocks of size `1..=max_dim`.
pub fn block_sizes(rng: &mut SampleRng, max_blocks: usize, max_dim: usize) -> Vec<usize> {
    let count = rng.random_range(1..=max_blocks);
    (0..count).map(|_| rng.random_range(1..=max_dim)).collect()
}

/// Each block joins the ideal with probability `1/3`.
pub fn ideal_blocks(rng: &mut SampleRng, num_blocks: usize) -> Vec<usize> {
    (0..num_blocks).filter(|_| rng.random_range(0..3) == 0).collect()
}

/// Square matrix for Drazin corpora: a mix of dense Gaussian, core-nilpotent,
/// purely nilpotent and zero matrices of dimension `1..=max_dim`.
pub fn drazin_corpus_matrix(rng: &mut SampleRng, max_dim: usize) -> ComplexMatrix {
    let n = rng.random_range(1..=max_dim);
    corpus_block(rng, n)
}

/// One `n x n` matrix from the Drazin corpus mix.
pub fn corpus_block(rng: &mut SampleRng, n: usize) -> ComplexMatrix {
    match rng.random_range(0..10) {
        0..=1 => gaussian_matrix(rng, n, n),
        2 => {
            let nil = nilpotent(rng, n);
            conjugate(rng, &nil)
        }
        3 => ComplexMatrix::zeros(n, n),
        _ => core_nilpotent(rng, n),
    }
}

/// Random element of a random block algebra, with a random ideal.
pub fn block_element(rng: &mut SampleRng, max_blocks: usize, max_dim: usize) -> (BlockElement, IdealSpec) {
    let sizes = block_sizes(rng, max_blocks, max_dim);
    let blocks = sizes.iter().map(|&n| corpus_block(rng, n)).collect();
    let ideal = IdealSpec::new(ideal_blocks(rng, sizes.len()));
    let a = BlockElement::from_blocks(blocks).expect("square blocks of positive size");
    (a, ideal)
}

/// Polynomial of exact degree `degree` with Gaussian coefficients, ascending order.
pub fn polynomial(rng: &mut SampleRng, degree: usize) -> Vec<C64> {
    let mut p: Vec<C64> = (0..=degree).map(|_| gaussian(rng)).collect();
    if p[degree].norm() < 0.2 {
        p[degree] = ONE;
    }
    p
}

/// Eigenvalues used when the test needs exactly-known spectra.
pub const NICE_EIGENVALUES: [C64; 7] = [
    C64::new(0.0, 0.0),
    C64::new(1.0, 0.0),
    C64::new(-1.0, 0.0),
    C64::new(2.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(0.0, -1.0),
    C64::new(1.0, 1.0),
];

/// Jordan-structured matrix with eigenvalues from [`NICE_EIGENVALUES`],
/// conjugated by a random near-identity. Returns the matrix and its eigenvalues.
pub fn nice_spectrum_matrix(rng: &mut SampleRng, n: usize) -> (ComplexMatrix, Vec<C64>) {
    let mut m = ComplexMatrix::zeros(n, n);
    let mut eig = Vec::with_capacity(n);
    let mut start = 0;
    for s in jordan_sizes(rng, n) {
        let lambda = *NICE_EIGENVALUES.choose(rng).unwrap();
        for i in start..start + s {
            m[(i, i)] = lambda;
            eig.push(lambda);
            if i + 1 < start + s {
                m[(i, i + 1)] = ONE;
            }
        }
        start += s;
    }
    (conjugate(rng, &m), eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a = gaussian_matrix(&mut rng(7), 3, 3);
        let b = gaussian_matrix(&mut rng(7), 3, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn nilpotent_power_vanishes() {
        let mut r = rng(1);
        for n in 1..6 {
            let m = nilpotent(&mut r, n);
            assert!(m.pow(n as u32).is_zero());
        }
    }
}
