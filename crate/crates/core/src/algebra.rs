//! Finite-dimensional C*-algebra constructions.
//!
//! * Trace simplices of multi-matrix algebras `⊕ M_{nᵢ}` and how they
//!   tensor.
//! * The operator-valued function `X(s,t) = s·t·S⁽ⁿ⁾` on a grid of `[0,1]²`,
//!   which is not positive yet is nonnegative on every product of pure
//!   states of the two cone algebras.
//! * A finite check that `0, F ≤ E₁₁, E₂₂` has no interpolating element in
//!   `M₂`, for `F = [[−2/3, 1], [1, −2/3]]`.

use std::ops::Range;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{kron_vec, swap_operator, BipartiteOperator, HermitianOperator};
use crate::polytopes::{affine_dimension, min_tensor, simplex, Polytope};
use crate::sampling::{haar_unit_vector, rng_for};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct MultiMatrixAlgebra {
    blocks: Vec<usize>,
}

impl TryFrom<Vec<usize>> for MultiMatrixAlgebra {
    type Error = Error;

    fn try_from(blocks: Vec<usize>) -> Result<Self> {
        Self::new(blocks)
    }
}

impl From<MultiMatrixAlgebra> for Vec<usize> {
    fn from(a: MultiMatrixAlgebra) -> Self {
        a.blocks
    }
}

impl MultiMatrixAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::InvalidInput(format!(
                "block sizes must be a nonempty list of positive integers, got {blocks:?}"
            )));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Vector-space dimension `Σ nᵢ²`.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }
}

/// `Δ_{k−1}` with one vertex per block (the normalised block traces).
pub fn trace_simplex(a: &MultiMatrixAlgebra) -> Polytope {
    simplex(a.blocks.len() - 1)
}

/// Blocks `nᵢ·mⱼ` in lexicographic order of `(i, j)`.
pub fn algebra_tensor(a: &MultiMatrixAlgebra, b: &MultiMatrixAlgebra) -> MultiMatrixAlgebra {
    let blocks = a
        .blocks
        .iter()
        .flat_map(|n| b.blocks.iter().map(move |m| n * m))
        .collect();
    MultiMatrixAlgebra { blocks }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceTensorReport {
    pub factors: Vec<MultiMatrixAlgebra>,
    pub product: MultiMatrixAlgebra,
    /// Product of the factor block counts.
    pub expected_blocks: usize,
    pub product_blocks: usize,
    /// Vertices of the iterated minimal tensor product of trace simplices.
    pub vertex_count: usize,
    pub affine_dimension: usize,
    pub affinely_independent: bool,
    pub passed: bool,
}

pub fn verify_trace_tensor(a: &MultiMatrixAlgebra, b: &MultiMatrixAlgebra) -> TraceTensorReport {
    verify_trace_tensor_iterated(&[a.clone(), b.clone()])
}

/// The minimal tensor product of the trace simplices is a simplex with one
/// vertex per block of the tensor-product algebra.
pub fn verify_trace_tensor_iterated(factors: &[MultiMatrixAlgebra]) -> TraceTensorReport {
    assert!(!factors.is_empty(), "at least one factor");
    let mut product = factors[0].clone();
    let mut polytope = trace_simplex(&factors[0]);
    for f in &factors[1..] {
        product = algebra_tensor(&product, f);
        polytope = min_tensor(&polytope, &trace_simplex(f)).polytope;
    }
    let expected_blocks = factors.iter().map(|f| f.blocks.len()).product();
    let vertex_count = polytope.vertices().len();
    let dim = affine_dimension(polytope.vertices());
    let affinely_independent = dim + 1 == vertex_count;
    let product_blocks = product.blocks.len();
    let passed = product_blocks == expected_blocks
        && vertex_count == product_blocks
        && affinely_independent
        && dim == trace_simplex(&product).affine_dimension();
    TraceTensorReport {
        factors: factors.to_vec(),
        product,
        expected_blocks,
        product_blocks,
        vertex_count,
        affine_dimension: dim,
        affinely_independent,
        passed,
    }
}

fn check_grid(grid: &[f64], require_endpoints: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("grid is empty".into()));
    }
    if grid.iter().any(|s| !(0.0..=1.0).contains(s)) {
        return Err(Error::InvalidInput("grid points must lie in [0, 1]".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    if require_endpoints && (grid[0] != 0.0 || *grid.last().expect("nonempty") != 1.0) {
        return Err(Error::InvalidInput("grid must contain 0 and 1".into()));
    }
    Ok(())
}

/// A matrix-valued function on `[0,1]` sampled on a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConeElement {
    n: usize,
    grid: Vec<f64>,
    values: Vec<HermitianOperator>,
    scalar_at_zero: bool,
}

impl GridConeElement {
    /// With `scalar_at_zero`, the value at 0 must be a real multiple of `I`.
    pub fn new(
        n: usize,
        grid: Vec<f64>,
        values: Vec<HermitianOperator>,
        scalar_at_zero: bool,
    ) -> Result<Self> {
        check_grid(&grid, true)?;
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.dim(),
            });
        }
        if scalar_at_zero {
            let v0 = &values[0];
            let c = v0.trace() / n as f64;
            if v0.max_abs_diff(&HermitianOperator::identity(n).scale(c)) > 1e-12 {
                return Err(Error::InvalidInput("value at 0 is not a multiple of the identity".into()));
            }
        }
        Ok(Self {
            n,
            grid,
            values,
            scalar_at_zero,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[HermitianOperator] {
        &self.values
    }

    pub fn scalar_at_zero(&self) -> bool {
        self.scalar_at_zero
    }

    /// Pointwise positivity over the grid.
    pub fn is_positive(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.min_eigenvalue() >= -tol)
    }
}

/// `X(s,t) = s·t·S⁽ⁿ⁾` restricted to a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeWitness {
    pub n: usize,
    pub grid: Vec<f64>,
}

impl ConeWitness {
    pub fn at(&self, s: f64, t: f64) -> BipartiteOperator {
        swap_operator(self.n).scale(s * t)
    }

    /// `t ↦ X(s, t)` as an element of the cone algebra over `M_n ⊗ M_n`.
    pub fn slice(&self, s: f64) -> Result<GridConeElement> {
        let values = self
            .grid
            .iter()
            .map(|&t| self.at(s, t).op().clone())
            .collect();
        GridConeElement::new(self.n * self.n, self.grid.clone(), values, true)
    }
}

pub fn entangled_witness_x(n: usize, grid: &[f64]) -> Result<ConeWitness> {
    if n < 2 {
        return Err(Error::InvalidInput("matrix size must be at least 2".into()));
    }
    check_grid(grid, false)?;
    Ok(ConeWitness {
        n,
        grid: grid.to_vec(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XSeparationReport {
    pub n: usize,
    pub grid: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    /// Most negative eigenvalue of `X(s,t)` over grid pairs, and where.
    pub min_eigenvalue: f64,
    pub min_eigenvalue_at: (f64, f64),
    pub nonpositive: bool,
    /// Smallest `s·t·⟨σ₁⊗σ₂, S σ₁⊗σ₂⟩` over the sampled pure product states.
    pub min_sample_value: f64,
    pub negative_samples: usize,
    pub separable_nonnegative: bool,
    pub passed: bool,
}

const SAMPLE_CHUNK: usize = 4096;
pub const SEPARATION_TOL: f64 = 1e-9;

/// Checks that `X` is not positive while every sampled product of pure
/// states `σ₁ ∘ π_s ⊗ σ₂ ∘ π_t` is nonnegative on it.
pub fn verify_x_separating(n: usize, grid: &[f64], samples: usize, seed: u64) -> Result<XSeparationReport> {
    let witness = entangled_witness_x(n, grid)?;
    if !grid.iter().any(|&s| s > 0.0) {
        return Err(Error::InvalidInput("grid has no point pair with s, t > 0".into()));
    }

    let mut min_eigenvalue = f64::INFINITY;
    let mut min_eigenvalue_at = (0.0, 0.0);
    for &s in grid {
        for &t in grid {
            let e = witness.at(s, t).op().min_eigenvalue();
            if e < min_eigenvalue {
                min_eigenvalue = e;
                min_eigenvalue_at = (s, t);
            }
        }
    }

    let chunks: Vec<Range<usize>> = (0..samples)
        .step_by(SAMPLE_CHUNK)
        .map(|start| start..(start + SAMPLE_CHUNK).min(samples))
        .collect();
    let swap = swap_operator(n);
    let (min_sample_value, negative_samples) = chunks
        .into_par_iter()
        .map(|range| {
            let mut rng = rng_for(seed, (range.start / SAMPLE_CHUNK) as u64);
            let mut lo = f64::INFINITY;
            let mut negatives = 0;
            for _ in range {
                let s = grid[rng.random_range(0..grid.len())];
                let t = grid[rng.random_range(0..grid.len())];
                let s1 = haar_unit_vector(&mut rng, n);
                let s2 = haar_unit_vector(&mut rng, n);
                let v = kron_vec(&s1, &s2);
                let w = swap.entries() * &v;
                let value = s * t * v.dotc(&w).re;
                lo = lo.min(value);
                if value < -SEPARATION_TOL {
                    negatives += 1;
                }
            }
            (lo, negatives)
        })
        .reduce(|| (f64::INFINITY, 0), |a, b| (a.0.min(b.0), a.1 + b.1));

    let nonpositive = min_eigenvalue < -SEPARATION_TOL;
    let separable_nonnegative = negative_samples == 0;
    Ok(XSeparationReport {
        n,
        grid: grid.to_vec(),
        samples,
        seed,
        min_eigenvalue,
        min_eigenvalue_at,
        nonpositive,
        min_sample_value,
        negative_samples,
        separable_nonnegative,
        passed: nonpositive && separable_nonnegative,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszConfig {
    /// Grid step for the trace and the Bloch coordinates.
    pub step: f64,
    /// Norm below which an admissible `C` counts as zero.
    pub threshold: f64,
}

impl Default for RieszConfig {
    fn default() -> Self {
        Self {
            step: 0.02,
            threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RieszReport {
    pub f: [[f64; 2]; 2],
    /// Eigenvalues of `E₁₁ − F` and `E₂₂ − F`.
    pub upper_bound_eigenvalues: [[f64; 2]; 2],
    pub upper_bounds_hold: bool,
    pub f_eigenvalues: [f64; 2],
    pub f_not_nonpositive: bool,
    pub step: f64,
    pub threshold: f64,
    pub grid_points: usize,
    pub admissible: usize,
    pub max_admissible_norm: f64,
    pub no_interpolant: bool,
    pub passed: bool,
}

/// Eigenvalues of a real symmetric 2×2 matrix, ascending.
fn sym2_eigenvalues(a: f64, b: f64, d: f64) -> [f64; 2] {
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [mean - r, mean + r]
}

const PSD2_TOL: f64 = 1e-12;

/// `[[a, b], [b̄, d]] ⪰ 0` with `|b|² = b2`.
fn psd2(a: f64, d: f64, b2: f64) -> bool {
    a >= -PSD2_TOL && d >= -PSD2_TOL && a * d - b2 >= -PSD2_TOL
}

/// Verifies that `F ≤ E₁₁`, `F ≤ E₂₂`, `F ⋠ 0`, and that on a grid of
/// 2×2 positive matrices `C = (τ/2)(I + x σx + y σy + z σz)` every `C` with
/// `C ≤ E₁₁` and `C ≤ E₂₂` has norm below the threshold.
pub fn riesz_counterexample_check(cfg: &RieszConfig) -> Result<RieszReport> {
    if !(cfg.step > 0.0 && cfg.step <= 1.0) || !(cfg.threshold > 0.0) {
        return Err(Error::InvalidInput("step must lie in (0, 1] and threshold be positive".into()));
    }
    let f = [[-2.0 / 3.0, 1.0], [1.0, -2.0 / 3.0]];
    let e11 = sym2_eigenvalues(1.0 - f[0][0], -f[0][1], -f[1][1]);
    let e22 = sym2_eigenvalues(-f[0][0], -f[0][1], 1.0 - f[1][1]);
    let upper_bounds_hold = e11[0] >= 0.0 && e22[0] >= 0.0;
    let f_eigenvalues = sym2_eigenvalues(f[0][0], f[0][1], f[1][1]);
    let f_not_nonpositive = f_eigenvalues[1] > 0.0;

    let steps = (1.0 / cfg.step).round() as i64;
    let coord = |k: i64| (k - steps) as f64 / steps as f64;
    let (grid_points, admissible, max_norm) = (0..=2 * steps)
        .into_par_iter()
        .map(|ix| {
            let x = coord(ix);
            let mut count = (0usize, 0usize, 0.0_f64);
            for iy in 0..=2 * steps {
                let y = coord(iy);
                for iz in 0..=2 * steps {
                    let z = coord(iz);
                    let r2 = x * x + y * y + z * z;
                    if r2 > 1.0 + 1e-12 {
                        continue;
                    }
                    for it in 0..=2 * steps {
                        let tau = it as f64 / steps as f64;
                        count.0 += 1;
                        let h = 0.5 * tau;
                        let (c11, c22) = (h * (1.0 + z), h * (1.0 - z));
                        let b2 = h * h * (x * x + y * y);
                        if psd2(1.0 - c11, -c22, b2) && psd2(-c11, 1.0 - c22, b2) {
                            count.1 += 1;
                            count.2 = count.2.max(h * (1.0 + r2.sqrt()));
                        }
                    }
                }
            }
            count
        })
        .reduce(|| (0, 0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2.max(b.2)));
    let no_interpolant = max_norm < cfg.threshold;
    Ok(RieszReport {
        f,
        upper_bound_eigenvalues: [e11, e22],
        upper_bounds_hold,
        f_eigenvalues,
        f_not_nonpositive,
        step: cfg.step,
        threshold: cfg.threshold,
        grid_points,
        admissible,
        max_admissible_norm: max_norm,
        no_interpolant,
        passed: upper_bounds_hold && f_not_nonpositive && no_interpolant,
    })
}
