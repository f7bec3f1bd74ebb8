//! Norms of functionals on the maximal tensor product of matrix state spaces.
//!
//! For matrix algebras the order-unit norm of a functional `⟨·, T⟩` equals
//! `‖T‖₁`, the supremum of that norm over normalised positive functionals is
//! `min(n, m)`, and `n⁻¹S⁽ⁿ⁾` attains it. The completely bounded norm of a
//! unital positive map `Φ` is estimated from below as `‖(Φ ⊗ id_m)(X)‖`
//! maximised over Hermitian symmetries `X`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cones::{is_block_positive_with, OptimizerConfig, OPTIMIZER_TOL};
use crate::maps::{adjoint_map, MatrixMap};
use crate::matrix::{embedded_swap, swap_operator, BipartiteOperator, CMatrix, HermitianOperator};
use crate::sampling::{haar_unitary, rng_for};
use crate::verdict::Verdict;

pub fn max_norm_of_functional(t: &BipartiteOperator) -> f64 {
    t.op().trace_norm()
}

pub fn kappa_exact(n: usize, m: usize) -> f64 {
    assert!(n >= 1 && m >= 1, "dimensions must be positive");
    n.min(m) as f64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KappaWitness {
    /// `n⁻¹S⁽ⁿ⁾`, a unit-trace block-positive operator.
    pub functional: BipartiteOperator,
    /// Its max-norm, `‖n⁻¹S⁽ⁿ⁾‖₁ = n`.
    pub value: f64,
    pub block_positivity: Verdict,
}

pub fn kappa_witness(n: usize) -> KappaWitness {
    kappa_witness_with(n, &OptimizerConfig::default())
}

pub fn kappa_witness_with(n: usize, cfg: &OptimizerConfig) -> KappaWitness {
    assert!(n >= 1, "dimension must be positive");
    let functional = swap_operator(n).scale(1.0 / n as f64);
    let value = max_norm_of_functional(&functional);
    let block_positivity = is_block_positive_with(&functional, OPTIMIZER_TOL, cfg);
    KappaWitness {
        functional,
        value,
        block_positivity,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CbConfig {
    /// Random starts after the two structured ones.
    pub starts: usize,
    pub steps: usize,
    pub seed: u64,
}

impl Default for CbConfig {
    fn default() -> Self {
        Self {
            starts: 100,
            steps: 300,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CbEstimate {
    /// `‖(Φ ⊗ id_m)(X)‖` at the returned `X`; a lower bound on `‖Φ‖_cb`.
    pub value: f64,
    /// Hermitian symmetry (`X² = I`) on `ℂⁿ ⊗ ℂᵐ` attaining `value`.
    pub maximizer: BipartiteOperator,
    pub best_start: usize,
    pub starts: usize,
    pub steps: usize,
    pub seed: u64,
}

/// Lower bound on `‖Φ ⊗ id_m‖` for `Φ: M_n → M_m`.
///
/// Each start runs the ascent `y ← top |eigen|vector of L(X)`,
/// `X ← sign(L*(y y*))` with `L = Φ ⊗ id`, which never decreases
/// `|⟨y, L(X) y⟩|`. Starts: the identity, the embedded swap completed by
/// the identity, then random `U diag(±1) U*`.
pub fn cb_norm_estimate(phi: &MatrixMap, cfg: &CbConfig) -> CbEstimate {
    let n = phi.input_dim();
    let m = phi.output_dim();
    let dual = adjoint_map(phi);
    let d = n * m;

    let mut seeds: Vec<CMatrix> = vec![CMatrix::identity(d, d)];
    let k = n.min(m);
    let mut swap = embedded_swap(n, m, k).entries().clone();
    for i in 0..n {
        for j in 0..m {
            if i >= k || j >= k {
                swap[(i * m + j, i * m + j)] += 1.0;
            }
        }
    }
    seeds.push(swap);
    let fixed = seeds.len();
    seeds.extend((0..cfg.starts).map(|s| {
        let mut rng = rng_for(cfg.seed, s as u64);
        let u = haar_unitary(&mut rng, d);
        let signs: Vec<f64> = (0..d)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let diag = CMatrix::from_diagonal(&DVector::from_iterator(
            d,
            signs.iter().map(|&s| Complex64::new(s, 0.0)),
        ));
        &u * diag * u.adjoint()
    }));

    let results: Vec<(f64, CMatrix)> = seeds
        .into_par_iter()
        .map(|x0| ascend(phi, &dual, n, m, x0, cfg.steps))
        .collect();
    let best_start = (0..results.len())
        .max_by(|&a, &b| results[a].0.total_cmp(&results[b].0).then(b.cmp(&a)))
        .expect("at least one start");
    let (value, x) = results[best_start].clone();
    CbEstimate {
        value,
        maximizer: BipartiteOperator::new(n, m, HermitianOperator::symmetrized(x)).expect("dims"),
        best_start,
        starts: fixed + cfg.starts,
        steps: cfg.steps,
        seed: cfg.seed,
    }
}

fn image_norm(phi: &MatrixMap, x: &BipartiteOperator) -> (f64, DVector<Complex64>) {
    let image = phi.apply_left_tensor_identity(x).expect("dims");
    let spec = image.op().eigen();
    let lo = spec.values[0];
    let hi = *spec.values.last().expect("nonempty");
    if hi.abs() >= lo.abs() {
        (hi.abs(), spec.vector(spec.values.len() - 1))
    } else {
        (lo.abs(), spec.vector(0))
    }
}

fn ascend(
    phi: &MatrixMap,
    dual: &MatrixMap,
    n: usize,
    m: usize,
    x0: CMatrix,
    steps: usize,
) -> (f64, CMatrix) {
    let mut x = BipartiteOperator::new(n, m, HermitianOperator::symmetrized(x0)).expect("dims");
    let (mut value, mut y) = image_norm(phi, &x);
    for _ in 0..steps {
        let proj = BipartiteOperator::new(m, m, HermitianOperator::projector(&y)).expect("dims");
        let g = dual.apply_left_tensor_identity(&proj).expect("dims");
        let sign = g.op().map_spectrum(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let candidate = BipartiteOperator::new(n, m, sign).expect("dims");
        let (next, y_next) = image_norm(phi, &candidate);
        if next <= value * (1.0 + 1e-14) {
            if next > value {
                x = candidate;
                value = next;
            }
            break;
        }
        x = candidate;
        value = next;
        y = y_next;
    }
    (value, x.entries().clone())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KappaReport {
    pub n: usize,
    pub m: usize,
    pub exact: f64,
    pub witness_lower_bound: f64,
    pub cb_estimate: f64,
    /// `k⁻¹S⁽ᵏ⁾`, `k = min(n, m)`, embedded in `ℂⁿ ⊗ ℂᵐ`.
    pub witness: BipartiteOperator,
}

/// Report for `M_n`, `M_m`; the cb estimate is taken for `map` when given and
/// otherwise for the unital positive map [`MatrixMap::corner_transpose`].
pub fn kappa_report(n: usize, m: usize, map: Option<&MatrixMap>, cfg: &CbConfig) -> KappaReport {
    let k = n.min(m);
    let witness = embedded_swap(n, m, k).scale(1.0 / k as f64);
    let default_map;
    let phi = match map {
        Some(p) => p,
        None => {
            default_map = MatrixMap::corner_transpose(n, m);
            &default_map
        }
    };
    KappaReport {
        n,
        m,
        exact: kappa_exact(n, m),
        witness_lower_bound: max_norm_of_functional(&witness),
        cb_estimate: cb_norm_estimate(phi, cfg).value,
        witness,
    }
}
