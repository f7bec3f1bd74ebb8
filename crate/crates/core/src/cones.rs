//! Membership oracles for the separable, PSD and block-positive cones in
//! `M_n ⊗ M_m`.
//!
//! PSD membership is exact up to the eigensolver. Block-positivity is decided
//! by minimising `⟨φ⊗ψ, X φ⊗ψ⟩` over unit product vectors: a coarse
//! deterministic grid seeds a multistart projected-gradient descent on the
//! product of unit spheres, and the best local minima are polished by
//! alternating exact eigen-minimisation in each factor. A value below `-tol`
//! is a certificate of non-membership; the absence of one is only evidence,
//! which is why [`is_block_positive`] answers `Unknown` above `n·m = 16`.
//!
//! Separability is claimed only constructively ([`separable_decompose`]) or,
//! at `2⊗2`, `2⊗3`, `3⊗2`, by the PPT test.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    kron_vec,
    from_hermitian_coordinates, hermitian_coordinates, partial_trace, partial_transpose,
    BipartiteOperator, CMatrix, CVector, HermitianOperator, ProductVector, Side,
};
use crate::sampling::{haar_unit_vector, rng_for};
use crate::verdict::{
    Certificate, OptimizerTrace, PptCertificate, SeparableDecomposition, SpectralCertificate,
    Status, Verdict, WitnessCertificate,
};

pub const SPECTRAL_TOL: f64 = 1e-9;
pub const OPTIMIZER_TOL: f64 = 1e-6;
/// Largest `n·m` at which a clean optimiser run is reported as `In`.
pub const CERTIFIED_PRODUCT_DIM: usize = 16;

const POLISHED_CANDIDATES: usize = 4;
const GRID_SEEDS: usize = 8;
const GRID_WORK_LIMIT: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Random Haar starts, in addition to the grid-seeded ones.
    pub starts: usize,
    /// Projected-gradient iterations per start.
    pub steps: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 200,
            steps: 500,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// `⟨φ⊗ψ, X φ⊗ψ⟩` and its partial gradients.
struct ProductForm<'a> {
    x: &'a CMatrix,
    n: usize,
    m: usize,
}

impl<'a> ProductForm<'a> {
    fn new(x: &'a BipartiteOperator) -> Self {
        Self {
            x: x.entries(),
            n: x.n(),
            m: x.m(),
        }
    }

    fn apply(&self, phi: &CVector, psi: &CVector) -> (CVector, CVector) {
        let v = crate::matrix::kron_vec(phi, psi);
        let w = self.x * &v;
        (v, w)
    }

    fn value(&self, phi: &CVector, psi: &CVector) -> f64 {
        let (v, w) = self.apply(phi, psi);
        v.dotc(&w).re
    }

    fn value_and_gradients(&self, phi: &CVector, psi: &CVector) -> (f64, CVector, CVector) {
        let (v, w) = self.apply(phi, psi);
        let f = v.dotc(&w).re;
        let (n, m) = (self.n, self.m);
        let g_phi = CVector::from_fn(n, |i, _| {
            (0..m).map(|k| psi[k].conj() * w[i * m + k]).sum()
        });
        let g_psi = CVector::from_fn(m, |k, _| {
            (0..n).map(|i| phi[i].conj() * w[i * m + k]).sum()
        });
        (f, g_phi, g_psi)
    }

    /// `A(ψ)_{ij} = Σ_{kl} conj(ψ_k) X_{(i,k),(j,l)} ψ_l`.
    fn left_compression(&self, psi: &CVector) -> CMatrix {
        let m = self.m;
        CMatrix::from_fn(self.n, self.n, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m {
                for l in 0..m {
                    acc += psi[k].conj() * self.x[(i * m + k, j * m + l)] * psi[l];
                }
            }
            acc
        })
    }

    fn right_compression(&self, phi: &CVector) -> CMatrix {
        let m = self.m;
        CMatrix::from_fn(m, m, |k, l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..self.n {
                for j in 0..self.n {
                    acc += phi[i].conj() * self.x[(i * m + k, j * m + l)] * phi[j];
                }
            }
            acc
        })
    }

    fn descend(&self, mut phi: CVector, mut psi: CVector, steps: usize, scale: f64) -> Candidate {
        let mut eta = 1.0 / scale;
        let (mut f, mut g_phi, mut g_psi) = self.value_and_gradients(&phi, &psi);
        for _ in 0..steps {
            let r_phi = &g_phi - &phi * Complex64::new(f, 0.0);
            let r_psi = &g_psi - &psi * Complex64::new(f, 0.0);
            let gnorm2 = r_phi.norm_squared() + r_psi.norm_squared();
            if gnorm2 <= 1e-28 * scale * scale {
                break;
            }
            let mut accepted = false;
            for _ in 0..50 {
                let p = normalize(&phi - &r_phi * Complex64::new(eta, 0.0));
                let q = normalize(&psi - &r_psi * Complex64::new(eta, 0.0));
                let (f_new, gp, gq) = self.value_and_gradients(&p, &q);
                if f_new <= f - 1e-4 * eta * gnorm2 {
                    phi = p;
                    psi = q;
                    f = f_new;
                    g_phi = gp;
                    g_psi = gq;
                    eta = (eta * 2.0).min(1e3 / scale);
                    accepted = true;
                    break;
                }
                eta *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Candidate { value: f, phi, psi }
    }

    /// Alternating exact minimisation over each factor; never increases the value.
    fn polish(&self, c: Candidate, scale: f64) -> Candidate {
        let Candidate {
            mut value,
            mut phi,
            mut psi,
        } = c;
        for _ in 0..200 {
            let a = HermitianOperator::symmetrized(self.left_compression(&psi)).eigen();
            let p = a.vector(0);
            let b = HermitianOperator::symmetrized(self.right_compression(&p)).eigen();
            let q = b.vector(0);
            let next = self.value(&p, &q);
            if next > value {
                break;
            }
            let gain = value - next;
            phi = p;
            psi = q;
            value = next;
            if gain <= 1e-15 * scale {
                break;
            }
        }
        Candidate { value, phi, psi }
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    value: f64,
    phi: CVector,
    psi: CVector,
}

fn normalize(v: CVector) -> CVector {
    let n = v.norm();
    v.unscale(n)
}

fn basis_vector(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = Complex64::new(1.0, 0.0);
    v
}

/// Basis vectors and the balanced superpositions `(e_i ± e_j)/√2`, `(e_i ± i e_j)/√2`.
fn coarse_grid(d: usize, with_pairs: bool) -> Vec<CVector> {
    let mut out: Vec<CVector> = (0..d).map(|i| basis_vector(d, i)).collect();
    if with_pairs {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phases = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ];
        for i in 0..d {
            for j in i + 1..d {
                for ph in phases {
                    let mut v = CVector::zeros(d);
                    v[i] = Complex64::new(h, 0.0);
                    v[j] = ph * h;
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Minimises `⟨φ⊗ψ, X φ⊗ψ⟩`. `seeds` are tried before the grid and the random starts.
pub(crate) fn minimize_product_form(
    x: &BipartiteOperator,
    cfg: &OptimizerConfig,
    seeds: &[ProductVector],
) -> OptimizerTrace {
    let form = ProductForm::new(x);
    let (n, m) = x.dims();
    let nm = n * m;
    let scale = x.op().frobenius_norm().max(1e-300);

    let full_pairs = {
        let gl = n + 2 * n * n.saturating_sub(1);
        let gr = m + 2 * m * m.saturating_sub(1);
        gl * gr * nm * nm <= GRID_WORK_LIMIT
    };
    let left_grid = coarse_grid(n, full_pairs);
    let right_grid = coarse_grid(m, full_pairs);
    let mut grid: Vec<(f64, usize)> = Vec::with_capacity(left_grid.len() * right_grid.len());
    for (a, phi) in left_grid.iter().enumerate() {
        for (b, psi) in right_grid.iter().enumerate() {
            grid.push((form.value(phi, psi), a * right_grid.len() + b));
        }
    }
    let grid_points = grid.len();
    grid.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let mut starts: Vec<(CVector, CVector)> = seeds
        .iter()
        .map(|s| (s.left_vector(), s.right_vector()))
        .collect();
    for &(_, idx) in grid.iter().take(GRID_SEEDS) {
        let (a, b) = (idx / right_grid.len(), idx % right_grid.len());
        starts.push((left_grid[a].clone(), right_grid[b].clone()));
    }
    let fixed = starts.len();
    starts.extend((0..cfg.starts).map(|k| {
        let mut rng = rng_for(cfg.seed, k as u64);
        (haar_unit_vector(&mut rng, n), haar_unit_vector(&mut rng, m))
    }));

    let mut results: Vec<Candidate> = starts
        .into_par_iter()
        .map(|(phi, psi)| form.descend(phi, psi, cfg.steps, scale))
        .collect();

    let mut order: Vec<usize> = (0..results.len()).collect();
    order.sort_by(|&a, &b| results[a].value.total_cmp(&results[b].value).then(a.cmp(&b)));
    let polished: Vec<(usize, Candidate)> = order
        .iter()
        .take(POLISHED_CANDIDATES)
        .map(|&k| (k, results[k].clone()))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, c)| (k, form.polish(c, scale)))
        .collect();
    for (k, c) in polished {
        results[k] = c;
    }

    let best_start = (0..results.len())
        .min_by(|&a, &b| results[a].value.total_cmp(&results[b].value).then(a.cmp(&b)))
        .expect("at least one start");
    let best = &results[best_start];
    let best_vector =
        ProductVector::normalized(&best.phi, &best.psi).expect("iterates stay on the sphere");
    // Re-evaluate on the stored (renormalised) vector so the trace is self-consistent.
    let best_value = form.value(&best_vector.left_vector(), &best_vector.right_vector());
    OptimizerTrace {
        best_value,
        best_vector,
        best_start,
        seed: cfg.seed,
        starts: fixed + cfg.starts,
        steps: cfg.steps,
        grid_points,
    }
}

/// Best-found minimum of `⟨φ⊗ψ, X φ⊗ψ⟩` over unit product vectors. This is an
/// upper bound on the true minimum.
pub fn block_positive_min(x: &BipartiteOperator, cfg: &OptimizerConfig) -> (f64, OptimizerTrace) {
    let trace = minimize_product_form(x, cfg, &[]);
    (trace.best_value, trace)
}

pub fn is_psd(x: &BipartiteOperator, tol: f64) -> Verdict {
    let spec = x.op().eigen();
    let eigenvalue = spec.values.first().copied().unwrap_or(0.0);
    let certificate = Certificate::Spectral(SpectralCertificate {
        eigenvalue,
        eigenvector: spec.vector(0).iter().copied().collect(),
    });
    let status = if eigenvalue >= -tol {
        Status::In
    } else {
        Status::Out
    };
    Verdict::new(status, certificate)
}

pub fn is_block_positive(x: &BipartiteOperator, tol: f64) -> Verdict {
    is_block_positive_with(x, tol, &OptimizerConfig::default())
}

pub fn is_block_positive_with(x: &BipartiteOperator, tol: f64, cfg: &OptimizerConfig) -> Verdict {
    let (value, trace) = block_positive_min(x, cfg);
    let status = if value < -tol {
        Status::Out
    } else if x.n() * x.m() <= CERTIFIED_PRODUCT_DIM {
        Status::In
    } else {
        Status::Unknown
    };
    Verdict::new(status, Certificate::Optimizer(trace))
}

/// Positive-partial-transpose test.
///
/// `Out` carries a block-positive witness `W` with `⟨X, W⟩ < -tol`: either
/// the projector onto a negative eigenvector of `X`, or the partial transpose
/// of the projector onto a negative eigenvector of `X^Γ`.
pub fn ppt_check(x: &BipartiteOperator, tol: f64) -> Verdict {
    let (n, m) = x.dims();
    let spec = x.op().eigen();
    let min_eig = spec.values[0];
    if min_eig < -tol {
        let witness = BipartiteOperator::from_matrix_unchecked(
            n,
            m,
            HermitianOperator::projector(&spec.vector(0)).into_matrix(),
        );
        let value = x.inner(&witness).expect("same dims");
        return Verdict::new(
            Status::Out,
            Certificate::Witness(WitnessCertificate { witness, value }),
        );
    }
    let pt = partial_transpose(x, Side::Right);
    let pt_spec = pt.op().eigen();
    let min_pt = pt_spec.values[0];
    if min_pt < -tol {
        let projector = BipartiteOperator::from_matrix_unchecked(
            n,
            m,
            HermitianOperator::projector(&pt_spec.vector(0)).into_matrix(),
        );
        let witness = partial_transpose(&projector, Side::Right);
        let value = x.inner(&witness).expect("same dims");
        return Verdict::new(
            Status::Out,
            Certificate::Witness(WitnessCertificate { witness, value }),
        );
    }
    let exact = n == 1 || m == 1 || matches!((n, m), (2, 2) | (2, 3) | (3, 2));
    let certificate = Certificate::Ppt(PptCertificate {
        min_eigenvalue: min_eig,
        min_partial_transpose_eigenvalue: min_pt,
        exact,
    });
    let status = if exact { Status::In } else { Status::Unknown };
    Verdict::new(status, certificate)
}

/// Real trace inner product `⟨T, W⟩ = Tr(T W)`.
pub fn witness_value(w: &BipartiteOperator, t: &BipartiteOperator) -> Result<f64> {
    if w.dims() != t.dims() {
        return Err(Error::DimensionMismatch {
            expected: w.n() * w.m(),
            found: t.n() * t.m(),
        });
    }
    t.inner(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecomposeBudget {
    /// Maximum number of greedy atom insertions.
    pub max_terms: usize,
    /// Joint refinement iterations after each insertion.
    pub refine_steps: usize,
    pub optimizer: OptimizerConfig,
}

impl Default for DecomposeBudget {
    fn default() -> Self {
        Self {
            max_terms: 40,
            refine_steps: 300,
            optimizer: OptimizerConfig {
                starts: 20,
                steps: 200,
                seed: 0,
            },
        }
    }
}

pub const DECOMPOSITION_RESIDUAL: f64 = 1e-7;
const STATE_TOL: f64 = 1e-9;

/// Greedy column generation for a separable decomposition of a state.
///
/// Each round adds the product vector with the largest overlap with the
/// current residual, refits nonnegative weights by least squares, then
/// jointly refines atoms and weights by projected gradient on the squared
/// Frobenius residual. `In` once the residual drops below `1e-7`; `Unknown`
/// when the budget runs out.
pub fn separable_decompose(x: &BipartiteOperator, budget: &DecomposeBudget) -> Result<Verdict> {
    let tr = x.trace();
    if (tr - 1.0).abs() > STATE_TOL {
        return Err(Error::NotAState(format!("trace {tr}")));
    }
    let min_eig = x.op().min_eigenvalue();
    if min_eig < -STATE_TOL {
        return Err(Error::NotAState(format!("minimum eigenvalue {min_eig:e}")));
    }

    let target = DVector::from_vec(hermitian_coordinates(x.entries()));
    let mut atoms: Vec<ProductVector> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut residual = target.norm();

    for round in 0..budget.max_terms {
        if residual < DECOMPOSITION_RESIDUAL {
            break;
        }
        let r = residual_operator(x, &atoms, &weights);
        let seeds = marginal_seeds(&r);
        let cfg = OptimizerConfig {
            seed: budget.optimizer.seed.wrapping_add(round as u64),
            ..budget.optimizer
        };
        let trace = minimize_product_form(&r.scale(-1.0), &cfg, &seeds);
        if -trace.best_value <= 1e-15 {
            break;
        }
        atoms.push(trace.best_vector);
        weights = nnls(&atom_matrix(&atoms), &target).iter().copied().collect();
        prune(&mut atoms, &mut weights);
        residual = refine(x, &target, &mut atoms, &mut weights, budget.refine_steps);
        prune(&mut atoms, &mut weights);
    }

    let decomposition = SeparableDecomposition {
        weights,
        factors: atoms,
        residual,
    };
    let status = if residual < DECOMPOSITION_RESIDUAL {
        Status::In
    } else {
        Status::Unknown
    };
    Ok(Verdict::new(
        status,
        Certificate::SeparableDecomposition(decomposition),
    ))
}

fn residual_operator(
    x: &BipartiteOperator,
    atoms: &[ProductVector],
    weights: &[f64],
) -> BipartiteOperator {
    let mut r = x.entries().clone();
    for (a, w) in atoms.iter().zip(weights) {
        let v = a.kron();
        r -= (&v * v.adjoint()).scale(*w);
    }
    BipartiteOperator::from_matrix_unchecked(x.n(), x.m(), r)
}

/// Products of eigenvectors of the two marginals of `r`.
fn marginal_seeds(r: &BipartiteOperator) -> Vec<ProductVector> {
    let left = partial_trace(r, Side::Right).eigen();
    let right = partial_trace(r, Side::Left).eigen();
    let mut out = Vec::new();
    for a in (0..r.n()).rev() {
        for b in (0..r.m()).rev() {
            if let Ok(p) = ProductVector::normalized(&left.vector(a), &right.vector(b)) {
                out.push(p);
            }
        }
    }
    out
}

fn atom_matrix(atoms: &[ProductVector]) -> DMatrix<f64> {
    let cols: Vec<Vec<f64>> = atoms
        .iter()
        .map(|a| hermitian_coordinates(a.projector().entries()))
        .collect();
    let rows = cols.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

fn prune(atoms: &mut Vec<ProductVector>, weights: &mut Vec<f64>) {
    let mut k = 0;
    while k < atoms.len() {
        if weights[k] <= 0.0 {
            atoms.remove(k);
            weights.remove(k);
        } else {
            k += 1;
        }
    }
}

/// Levenberg–Marquardt on unnormalised product vectors `√w·φ ⊗ ψ`, so
/// weights stay nonnegative without constraints. Returns the final residual.
fn refine(
    x: &BipartiteOperator,
    target: &DVector<f64>,
    atoms: &mut Vec<ProductVector>,
    weights: &mut Vec<f64>,
    steps: usize,
) -> f64 {
    let (n, m) = x.dims();
    let mut params: Vec<(CVector, CVector)> = atoms
        .iter()
        .zip(weights.iter())
        .map(|(a, &w)| (a.left_vector() * Complex64::new(w.sqrt(), 0.0), a.right_vector()))
        .collect();
    let mut r = lm_residual(target, &params);
    let mut current = r.norm_squared();
    let mut lambda = 1e-3 * target.norm_squared().max(1e-300);
    for _ in 0..steps {
        if current.sqrt() < DECOMPOSITION_RESIDUAL * 0.1 {
            break;
        }
        let j = lm_jacobian(n, m, &params);
        let jjt = &j * j.transpose();
        let mut accepted = false;
        for _ in 0..30 {
            let mut damped = jjt.clone();
            for k in 0..damped.nrows() {
                damped[(k, k)] += lambda;
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let delta = j.transpose() * chol.solve(&r);
            let trial = lm_step(&params, &delta, n, m);
            let tr = lm_residual(target, &trial);
            let l = tr.norm_squared();
            if l < current {
                params = trial;
                r = tr;
                current = l;
                lambda = (lambda / 3.0).max(1e-300);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    atoms.clear();
    weights.clear();
    for (a, b) in params {
        let w = a.norm_squared() * b.norm_squared();
        if w > 0.0 {
            if let Ok(p) = ProductVector::normalized(&a, &b) {
                atoms.push(p);
                weights.push(w);
            }
        }
    }
    current.sqrt()
}

fn lm_residual(target: &DVector<f64>, params: &[(CVector, CVector)]) -> DVector<f64> {
    let mut r = target.clone();
    for (a, b) in params {
        let v = kron_vec(a, b);
        let p: CMatrix = &v * v.adjoint();
        r -= DVector::from_vec(hermitian_coordinates(&p));
    }
    r
}

/// Columns: derivatives of `Σ|aₖ⊗bₖ⟩⟨aₖ⊗bₖ|` along the real and imaginary
/// part of every entry of every `aₖ` and `bₖ`.
fn lm_jacobian(n: usize, m: usize, params: &[(CVector, CVector)]) -> DMatrix<f64> {
    let d = n * m;
    let per = 2 * (n + m);
    let mut j = DMatrix::zeros(d * d, per * params.len());
    let units = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
    for (k, (a, b)) in params.iter().enumerate() {
        let v = kron_vec(a, b);
        let mut col = k * per;
        for side in 0..2 {
            let len = if side == 0 { n } else { m };
            for i in 0..len {
                for e in units {
                    let dv = if side == 0 {
                        CVector::from_fn(d, |r, _| if r / m == i { e * b[r % m] } else { Complex64::new(0.0, 0.0) })
                    } else {
                        CVector::from_fn(d, |r, _| if r % m == i { e * a[r / m] } else { Complex64::new(0.0, 0.0) })
                    };
                    let dm: CMatrix = &dv * v.adjoint() + &v * dv.adjoint();
                    j.set_column(col, &DVector::from_vec(hermitian_coordinates(&dm)));
                    col += 1;
                }
            }
        }
    }
    j
}

fn lm_step(params: &[(CVector, CVector)], delta: &DVector<f64>, n: usize, m: usize) -> Vec<(CVector, CVector)> {
    let per = 2 * (n + m);
    params
        .iter()
        .enumerate()
        .map(|(k, (a, b))| {
            let base = k * per;
            let a2 = CVector::from_fn(n, |i, _| a[i] + Complex64::new(delta[base + 2 * i], delta[base + 2 * i + 1]));
            let off = base + 2 * n;
            let b2 = CVector::from_fn(m, |i, _| b[i] + Complex64::new(delta[off + 2 * i], delta[off + 2 * i + 1]));
            (a2, b2)
        })
        .collect()
}

/// Lawson–Hanson nonnegative least squares `min ‖Ax − b‖, x ≥ 0`.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let cols = a.ncols();
    let mut x = DVector::zeros(cols);
    if cols == 0 {
        return x;
    }
    let tol = 1e-12 * (a.norm() * b.norm()).max(1e-300);
    let mut passive = vec![false; cols];
    for _ in 0..(3 * cols + 10) {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..cols)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..cols).filter(|&k| passive[k]).collect();
            let sub = DMatrix::from_fn(a.nrows(), idx.len(), |r, c| a[(r, idx[c])]);
            let s_sub = sub
                .svd(true, true)
                .solve(b, 1e-14)
                .unwrap_or_else(|_| DVector::zeros(idx.len()));
            if s_sub.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (c, &k) in idx.iter().enumerate() {
                    x[k] = s_sub[c];
                }
                break;
            }
            let mut alpha = 1.0_f64;
            for (c, &k) in idx.iter().enumerate() {
                if s_sub[c] <= 0.0 {
                    let denom = x[k] - s_sub[c];
                    if denom > 0.0 {
                        alpha = alpha.min(x[k] / denom);
                    }
                }
            }
            for (c, &k) in idx.iter().enumerate() {
                x[k] += alpha * (s_sub[c] - x[k]);
                if x[k] <= 1e-15 {
                    x[k] = 0.0;
                    passive[k] = false;
                }
            }
            if idx.iter().all(|&k| !passive[k]) {
                break;
            }
        }
    }
    x
}

/// Reconstructs a Hermitian operator from coordinates; used by tests.
#[doc(hidden)]
pub fn operator_from_coordinates(n: usize, m: usize, coords: &[f64]) -> BipartiteOperator {
    BipartiteOperator::from_matrix_unchecked(n, m, from_hermitian_coordinates(n * m, coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{h_operator, swap_operator, tensor};
    use crate::sampling::{random_density_matrix, random_hermitian, random_product_vector};

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            starts: 30,
            steps: 200,
            seed: 3,
        }
    }

    #[test]
    fn block_positive_min_examples() {
        let (v, _) = block_positive_min(&swap_operator(2), &quick());
        assert!(v.abs() < 1e-9, "{v}");
        let (v, _) = block_positive_min(&BipartiteOperator::identity(2, 2).scale(-1.0), &quick());
        assert!((v + 1.0).abs() < 1e-12);
        let (v, _) = block_positive_min(&h_operator(2), &quick());
        assert!(v.abs() < 1e-9, "{v}");
    }

    #[test]
    fn block_positive_min_bounds_min_eigenvalue() {
        let mut rng = rng_for(21, 0);
        for _ in 0..5 {
            let x = BipartiteOperator::new(2, 3, random_hermitian(&mut rng, 6)).unwrap();
            let (v, trace) = block_positive_min(&x, &quick());
            assert!(v >= x.op().min_eigenvalue() - 1e-12);
            let direct = x.op().expectation(&trace.best_vector.kron());
            assert!((direct - v).abs() < 1e-12);
        }
    }

    #[test]
    fn block_positive_min_is_homogeneous() {
        let mut rng = rng_for(22, 0);
        let x = BipartiteOperator::new(2, 2, random_hermitian(&mut rng, 4)).unwrap();
        let (v1, _) = block_positive_min(&x, &quick());
        let (v3, _) = block_positive_min(&x.scale(3.5), &quick());
        assert!((3.5 * v1 - v3).abs() < 1e-9, "{v1} {v3}");
    }

    #[test]
    fn block_positive_examples() {
        assert!(is_block_positive(&swap_operator(3), 1e-6).is_in());
        assert!(is_block_positive(&BipartiteOperator::identity(2, 2), 1e-6).is_in());
        let v = is_block_positive(&h_operator(2).scale(-1.0), 1e-6);
        assert!(v.is_out());
        let Certificate::Optimizer(trace) = v.certificate else {
            panic!("optimizer certificate expected")
        };
        // Attained when ψ = conj φ, i.e. the product vector is aligned with Ω.
        assert!((trace.best_value + 1.0).abs() < 1e-9);
        let phi = trace.best_vector.left_vector();
        let psi = trace.best_vector.right_vector();
        let overlap: Complex64 = phi.iter().zip(psi.iter()).map(|(a, b)| a * b).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-6);
        let at_basis = h_operator(2)
            .scale(-1.0)
            .op()
            .expectation(&crate::matrix::kron_vec(&basis_vector(2, 0), &basis_vector(2, 0)));
        assert!((at_basis + 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_positive_is_unknown_beyond_certified_size() {
        let v = is_block_positive_with(&swap_operator(5), 1e-6, &quick());
        assert_eq!(v.status, Status::Unknown);
        let v = is_block_positive_with(&h_operator(5).scale(-1.0), 1e-6, &quick());
        assert_eq!(v.status, Status::Out);
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&h_operator(2), 1e-9).is_in());
        let v = is_psd(&swap_operator(2), 1e-9);
        assert!(v.is_out());
        let Certificate::Spectral(c) = v.certificate else { panic!() };
        assert!((c.eigenvalue + 1.0).abs() < 1e-12);
        assert!(is_psd(&BipartiteOperator::zeros(2, 2), 0.0).is_in());
    }

    #[test]
    fn ppt_examples() {
        let v = ppt_check(&h_operator(2).scale(0.5), 1e-9);
        assert!(v.is_out());
        let Certificate::Witness(w) = &v.certificate else { panic!() };
        assert!((w.value + 0.5).abs() < 1e-12);
        assert!(is_block_positive_with(&w.witness, 1e-9, &quick()).is_in());

        assert!(ppt_check(&BipartiteOperator::identity(2, 2).scale(0.25), 1e-9).is_in());
        let mut rng = rng_for(5, 5);
        for _ in 0..5 {
            let r1 = random_density_matrix(&mut rng, 2);
            let r2 = random_density_matrix(&mut rng, 2);
            assert!(ppt_check(&tensor(&r1, &r2), 1e-9).is_in());
        }
        let big = BipartiteOperator::identity(3, 3).scale(1.0 / 9.0);
        assert_eq!(ppt_check(&big, 1e-9).status, Status::Unknown);
    }

    #[test]
    fn ppt_rejects_non_psd_with_witness() {
        let v = ppt_check(&swap_operator(2), 1e-9);
        let Certificate::Witness(w) = &v.certificate else { panic!() };
        assert!(w.value < -1e-9);
        assert!(is_psd(&w.witness, 1e-12).is_in());
    }

    #[test]
    fn witness_value_examples() {
        let v = witness_value(&swap_operator(2), &h_operator(2).scale(0.5)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let mut rng = rng_for(8, 0);
        let t = BipartiteOperator::new(2, 2, random_hermitian(&mut rng, 4)).unwrap();
        let v = witness_value(&BipartiteOperator::identity(2, 2), &t).unwrap();
        assert!((v - t.trace()).abs() < 1e-12);
        for _ in 0..100 {
            let p = random_product_vector(&mut rng, 2, 2).projector();
            assert!(witness_value(&swap_operator(2), &p).unwrap() >= -1e-12);
        }
        assert!(witness_value(&swap_operator(2), &BipartiteOperator::identity(2, 3)).is_err());
    }

    #[test]
    fn decompose_pure_product_uses_one_term() {
        let mut rng = rng_for(12, 0);
        let p = random_product_vector(&mut rng, 2, 3).projector();
        let v = separable_decompose(&p, &DecomposeBudget::default()).unwrap();
        assert!(v.is_in());
        let Certificate::SeparableDecomposition(d) = v.certificate else { panic!() };
        assert_eq!(d.factors.len(), 1);
        assert!(d.residual < 1e-10);
    }

    #[test]
    fn decompose_mixed_product_and_maximally_mixed() {
        let mut rng = rng_for(13, 0);
        let r1 = random_density_matrix(&mut rng, 2);
        let r2 = random_density_matrix(&mut rng, 2);
        let v = separable_decompose(&tensor(&r1, &r2), &DecomposeBudget::default()).unwrap();
        assert!(v.is_in());

        let mixed = BipartiteOperator::identity(2, 2).scale(0.25);
        let v = separable_decompose(&mixed, &DecomposeBudget::default()).unwrap();
        assert!(v.is_in());
        let Certificate::SeparableDecomposition(d) = v.certificate else { panic!() };
        assert!(d.factors.len() <= 4, "{} terms", d.factors.len());
        let rebuilt = d.reconstruct().unwrap();
        assert!(rebuilt.sub(&mixed).unwrap().op().frobenius_norm() <= d.residual + 1e-12);
    }

    #[test]
    fn decompose_random_mixture() {
        let mut rng = rng_for(14, 0);
        for (n, m) in [(2, 2), (2, 3)] {
            let mut x = BipartiteOperator::zeros(n, m);
            let weights = [0.5, 0.3, 0.2];
            for w in weights {
                x = x.add(&random_product_vector(&mut rng, n, m).projector().scale(w)).unwrap();
            }
            let v = separable_decompose(&x, &DecomposeBudget::default()).unwrap();
            assert!(v.is_in(), "{n}x{m}: {:?}", v.certificate);
        }
    }

    #[test]
    fn decompose_never_accepts_entangled_state() {
        let v = separable_decompose(&h_operator(2).scale(0.5), &DecomposeBudget::default()).unwrap();
        assert_eq!(v.status, Status::Unknown);
        assert!(ppt_check(&h_operator(2).scale(0.5), 1e-9).is_out());
    }

    #[test]
    fn decompose_rejects_non_states() {
        assert!(separable_decompose(&swap_operator(2).scale(0.5), &DecomposeBudget::default()).is_err());
        assert!(separable_decompose(&BipartiteOperator::identity(2, 2), &DecomposeBudget::default()).is_err());
    }

    #[test]
    fn nnls_matches_known_solution() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, -1.0, 0.0]);
        let x = nnls(&a, &b);
        // Negative second coordinate is clamped; first solves min (x-1)^2 + x^2.
        assert!((x[0] - 0.5).abs() < 1e-12 && x[1] == 0.0);
    }
}
