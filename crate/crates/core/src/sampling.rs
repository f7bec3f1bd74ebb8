//! Seeded random sampling of vectors, states and unitaries.
//!
//! Every stochastic routine in the crate draws from a ChaCha stream derived
//! from a master seed and a stream index, so results do not depend on how
//! work is scheduled across threads.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{CMatrix, CVector, HermitianOperator, ProductVector};

pub type SeededRng = ChaCha8Rng;

/// Independent generator for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random unit vector in `ℂᵈ` (normalised complex Gaussian).
pub fn haar_unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVector {
    loop {
        let v = CVector::from_fn(d, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-300 {
            return v.unscale(norm);
        }
    }
}

pub fn random_product_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> ProductVector {
    let left = haar_unit_vector(rng, n);
    let right = haar_unit_vector(rng, m);
    ProductVector::normalized(&left, &right).expect("unit vectors")
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// GUE-like random Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> HermitianOperator {
    HermitianOperator::symmetrized(ginibre(rng, d, d))
}

/// Random full-rank density matrix `G G* / Tr(G G*)`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> HermitianOperator {
    let g = ginibre(rng, d, d);
    let p = &g * g.adjoint();
    let tr = p.trace().re;
    HermitianOperator::symmetrized(p.unscale(tr))
}

/// Haar-random unitary via Gram–Schmidt on Gaussian columns.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let mut u = ginibre(rng, d, d);
    for k in 0..d {
        for j in 0..k {
            let proj = u.column(j).dotc(&u.column(k));
            let cj = u.column(j).into_owned();
            let mut ck = u.column_mut(k);
            ck -= cj * proj;
        }
        let norm = u.column(k).norm();
        u.column_mut(k).unscale_mut(norm);
    }
    u
}
