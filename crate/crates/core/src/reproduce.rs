//! The end-to-end check list run by `cone-lab reproduce`.
//!
//! Each check exercises one result at desk scale and reports pass/fail with
//! a short anchor describing the statement it validates. `quick` lowers the
//! sample counts and optimiser budgets; tolerances are unchanged.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    riesz_counterexample_check, verify_trace_tensor, verify_trace_tensor_iterated,
    verify_x_separating, MultiMatrixAlgebra, RieszConfig,
};
use crate::cones::{
    block_positive_min, is_block_positive_with, is_psd, ppt_check, separable_decompose,
    witness_value, DecomposeBudget, OptimizerConfig,
};
use crate::kappa::{cb_norm_estimate, kappa_exact, kappa_witness_with, max_norm_of_functional, CbConfig};
use crate::maps::{
    choi, evaluate_rho0_after, jamiolkowski, map_from_choi, normalize_positive_map_with,
    random_positive_map, MatrixMap,
};
use crate::matrix::{h_operator, partial_transpose, swap_operator, BipartiteOperator, HermitianOperator, Side};
use crate::polytopes::{
    affinely_independent, barker_gap, max_tensor, min_tensor, relative_bound, simplex, Polytope,
};
use crate::sampling::{random_density_matrix, random_hermitian, random_product_vector, rng_for};
use crate::verdict::{Certificate, Status};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: String,
    pub anchor: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

struct Check {
    name: &'static str,
    anchor: &'static str,
    run: fn(bool, u64) -> (bool, String),
}

const CHECKS: &[Check] = &[
    Check {
        name: "witness-norm",
        anchor: "trace norm of n⁻¹S⁽ⁿ⁾ equals n",
        run: witness_norm,
    },
    Check {
        name: "kappa-closed-form",
        anchor: "κ(M_n, M_m) = min{n, m}",
        run: kappa_closed_form,
    },
    Check {
        name: "swap-block-positive",
        anchor: "the flip S⁽ᵐ⁾ is an entanglement witness",
        run: swap_block_positive,
    },
    Check {
        name: "entangled-max-state",
        anchor: "H⁽ᵐ⁾/m is PSD but not PPT",
        run: entangled_max_state,
    },
    Check {
        name: "choi-jamiolkowski",
        anchor: "C(Ψ) = (id ⊗ t)(J(Ψ)) and Choi inversion",
        run: choi_jamiolkowski,
    },
    Check {
        name: "normalization",
        anchor: "Ψ(A) = RΦ(A)R + Ψ₁(A) is unital and reproduces the state",
        run: normalization,
    },
    Check {
        name: "simplex-tensor",
        anchor: "Δ_{n−1} ⊗ Δ_{m−1} = Δ_{nm−1}",
        run: simplex_tensor,
    },
    Check {
        name: "dimension-relative-bound",
        anchor: "dim(K₁ ⊗ K₂) = (d₁+1)(d₂+1) − 1 and the max product is relatively bounded",
        run: dimension_relative_bound,
    },
    Check {
        name: "barker-gap",
        anchor: "min = max tensor product iff a factor is a simplex",
        run: barker,
    },
    Check {
        name: "cone-algebra-witness",
        anchor: "X(s,t) = stS is not positive but nonnegative on product states",
        run: cone_algebra_witness,
    },
    Check {
        name: "riesz-failure",
        anchor: "no interpolant for 0, F ≤ E₁₁, E₂₂ in M₂",
        run: riesz,
    },
    Check {
        name: "trace-simplex-tensor",
        anchor: "T(A) ⊗ T(B) = T(A ⊗ B) for multi-matrix algebras",
        run: trace_simplex_tensor,
    },
    Check {
        name: "duality",
        anchor: "separable and block-positive cones are dual",
        run: duality,
    },
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Runs every check; results are ordered by check id regardless of scheduling.
pub fn run_all(quick: bool, seed: u64) -> Vec<CheckOutcome> {
    CHECKS
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let start = Instant::now();
            let (passed, detail) = (c.run)(quick, seed);
            CheckOutcome {
                id: i + 1,
                name: c.name.to_string(),
                anchor: c.anchor.to_string(),
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

fn optimizer(quick: bool, seed: u64) -> OptimizerConfig {
    if quick {
        OptimizerConfig {
            starts: 40,
            steps: 200,
            seed,
        }
    } else {
        OptimizerConfig::default().with_seed(seed)
    }
}

fn witness_norm(_: bool, _: u64) -> (bool, String) {
    let mut worst: f64 = 0.0;
    for n in 2..=6 {
        let t = swap_operator(n).scale(1.0 / n as f64);
        worst = worst.max((max_norm_of_functional(&t) - n as f64).abs());
    }
    (worst < 1e-9, format!("max |‖S/n‖₁ − n| = {worst:.2e} for n = 2..6"))
}

fn kappa_closed_form(quick: bool, seed: u64) -> (bool, String) {
    let cfg = optimizer(quick, seed);
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        let w = kappa_witness_with(n, &cfg);
        worst = worst.max((w.value - kappa_exact(n, n)).abs());
        ok &= w.block_positivity.status != Status::Out;
    }
    ok &= worst < 1e-9;
    let cb = CbConfig {
        starts: if quick { 10 } else { 100 },
        steps: if quick { 100 } else { 300 },
        seed,
    };
    let mut estimates = Vec::new();
    for n in [2, 3] {
        let e = cb_norm_estimate(&MatrixMap::transpose(n), &cb).value;
        ok &= e >= 0.95 * n as f64 && e <= n as f64 + 1e-9;
        estimates.push(e);
    }
    (
        ok,
        format!("witness deviation {worst:.2e}; ‖t₂‖_cb ≈ {:.6}, ‖t₃‖_cb ≈ {:.6}", estimates[0], estimates[1]),
    )
}

fn swap_block_positive(quick: bool, seed: u64) -> (bool, String) {
    let cfg = optimizer(quick, seed);
    let mut ok = true;
    let mut mins = Vec::new();
    for m in [2, 3, 4] {
        let s = swap_operator(m);
        let v = is_block_positive_with(&s, 1e-6, &cfg);
        let (value, _) = block_positive_min(&s, &cfg);
        ok &= v.is_in() && value >= -1e-6;
        mins.push(value);
    }
    let samples = if quick { 1_000 } else { 10_000 };
    let mut rng = rng_for(seed, 100);
    let s2 = swap_operator(2);
    let mut lowest = f64::INFINITY;
    for _ in 0..samples {
        let p = random_product_vector(&mut rng, 2, 2).projector();
        lowest = lowest.min(witness_value(&s2, &p).expect("dims"));
    }
    ok &= lowest >= -1e-9;
    (ok, format!("optimizer minima {mins:?}; lowest sampled ⟨S, ρ₁⊗ρ₂⟩ = {lowest:.2e}"))
}

fn entangled_max_state(_: bool, _: u64) -> (bool, String) {
    let mut ok = true;
    let mut detail = Vec::new();
    for m in [2, 3] {
        let state = h_operator(m).scale(1.0 / m as f64);
        let pt_min = partial_transpose(&state, Side::Right).op().min_eigenvalue();
        ok &= ppt_check(&state, 1e-9).is_out();
        ok &= is_psd(&state, 1e-9).is_in();
        ok &= (pt_min + 1.0 / m as f64).abs() < 1e-9;
        detail.push(format!("m={m}: λmin(Γ) = {pt_min:.12}"));
    }
    (ok, detail.join("; "))
}

fn random_map(seed: u64, k: u64, n: usize, m: usize) -> MatrixMap {
    let mut rng = rng_for(seed, 200 + k);
    let c = random_hermitian(&mut rng, m * n);
    map_from_choi(&BipartiteOperator::new(m, n, c).expect("dims"))
}

fn choi_jamiolkowski(_: bool, seed: u64) -> (bool, String) {
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let psi = random_map(seed, k, 2, 3);
        let c = choi(&psi);
        worst = worst.max(partial_transpose(&jamiolkowski(&psi), Side::Right).max_abs_diff(&c));
        worst = worst.max(map_from_choi(&c).max_abs_diff(&psi));
    }
    (worst < 1e-12, format!("max deviation {worst:.2e} over 50 maps"))
}

fn normalization(quick: bool, seed: u64) -> (bool, String) {
    let maps = if quick { 5 } else { 20 };
    let cfg = optimizer(true, seed);
    let mut rng = rng_for(seed, 300);
    let mut worst_state: f64 = 0.0;
    let mut worst_unit: f64 = 0.0;
    for _ in 0..maps {
        let phi = random_positive_map(&mut rng, 2, 3);
        let out = match normalize_positive_map_with(&phi, &cfg) {
            Ok(o) => o,
            Err(e) => return (false, e.to_string()),
        };
        worst_unit = worst_unit.max(
            out.unital
                .unitality()
                .image_of_identity
                .max_abs_diff(&HermitianOperator::identity(3)),
        );
        for _ in 0..100 {
            let x = BipartiteOperator::new(2, 3, random_hermitian(&mut rng, 6)).expect("dims");
            let lhs = out
                .state
                .apply(&out.unital.apply_left_tensor_identity(&x).expect("dims"))
                .expect("dims");
            let rhs = evaluate_rho0_after(&phi, &x).expect("dims");
            worst_state = worst_state.max((lhs - rhs).abs());
        }
    }
    (
        worst_state < 1e-9 && worst_unit < 1e-9,
        format!("{maps} maps: state deviation {worst_state:.2e}, ‖Ψ(I) − I‖ {worst_unit:.2e}"),
    )
}

fn simplex_tensor(_: bool, _: u64) -> (bool, String) {
    let mut ok = true;
    for (n, m) in [(2, 2), (2, 3), (3, 3)] {
        let t = min_tensor(&simplex(n - 1), &simplex(m - 1));
        ok &= t.vertex_count() == n * m;
        ok &= affinely_independent(t.polytope.vertices());
        ok &= t.polytope.affine_dimension() == n * m - 1;
    }
    (ok, "(2,2), (2,3), (3,3): nm affinely independent vertices".into())
}

fn dimension_relative_bound(_: bool, _: u64) -> (bool, String) {
    let sq = Polytope::square();
    let min = min_tensor(&sq, &sq);
    let dim = min.polytope.affine_dimension();
    let r = max_tensor(&sq, &sq).and_then(|max| relative_bound(&min.polytope, &max.polytope));
    match r {
        Ok(r) => (
            dim == 8 && r > 0.0 && r < 10.0,
            format!("dim = {dim}, r = {r:.6}"),
        ),
        Err(e) => (false, e.to_string()),
    }
}

fn barker(_: bool, _: u64) -> (bool, String) {
    let sq = Polytope::square();
    let margin = match barker_gap(&sq, &sq) {
        Ok(Some(gap)) => match (&gap.min_certificate.certificate, gap.max_certificate.status) {
            (Certificate::SeparatingHyperplane(h), Status::In) => h.margin,
            _ => return (false, "gap point lacks certificates".into()),
        },
        Ok(None) => return (false, "no gap found for the square".into()),
        Err(e) => return (false, e.to_string()),
    };
    let mut ok = margin > 1e-6;
    for k in 0..=2 {
        for other in [simplex(1), simplex(2), sq.clone()] {
            ok &= matches!(barker_gap(&simplex(k), &other), Ok(None));
        }
    }
    (ok, format!("square ⊗ square gap margin {margin:.6}; simplex factors give no gap"))
}

fn cone_algebra_witness(quick: bool, seed: u64) -> (bool, String) {
    let samples = if quick { 10_000 } else { 100_000 };
    match verify_x_separating(2, &[0.0, 0.5, 1.0], samples, seed) {
        Ok(r) => (
            r.passed && r.min_eigenvalue <= -1.0 + 1e-9 && r.min_eigenvalue_at == (1.0, 1.0),
            format!(
                "λmin = {:.12} at {:?}; min over {samples} product samples {:.2e}",
                r.min_eigenvalue, r.min_eigenvalue_at, r.min_sample_value
            ),
        ),
        Err(e) => (false, e.to_string()),
    }
}

fn riesz(quick: bool, _: u64) -> (bool, String) {
    let cfg = if quick {
        RieszConfig {
            step: 0.05,
            ..RieszConfig::default()
        }
    } else {
        RieszConfig::default()
    };
    match riesz_counterexample_check(&cfg) {
        Ok(r) => (
            r.passed,
            format!(
                "{} grid points, {} admissible, max norm {:.2e}",
                r.grid_points, r.admissible, r.max_admissible_norm
            ),
        ),
        Err(e) => (false, e.to_string()),
    }
}

fn trace_simplex_tensor(_: bool, _: u64) -> (bool, String) {
    let list: Vec<MultiMatrixAlgebra> = [vec![1], vec![2], vec![2, 3], vec![2, 2, 2]]
        .into_iter()
        .map(|b| MultiMatrixAlgebra::new(b).expect("valid blocks"))
        .collect();
    let mut ok = true;
    for a in &list {
        for b in &list {
            ok &= verify_trace_tensor(a, b).passed;
        }
    }
    let two = MultiMatrixAlgebra::new(vec![2, 2]).expect("valid blocks");
    let iterated = verify_trace_tensor_iterated(&[two.clone(), two.clone(), two]);
    ok &= iterated.passed && iterated.product_blocks == 8;
    (ok, "16 pairs and the 3-fold product [2,2]⊗[2,2]⊗[2,2]".into())
}

fn duality(quick: bool, seed: u64) -> (bool, String) {
    let per_side = if quick { 20 } else { 100 };
    let budget = DecomposeBudget {
        optimizer: OptimizerConfig {
            seed,
            ..DecomposeBudget::default().optimizer
        },
        ..DecomposeBudget::default()
    };
    let cfg = optimizer(true, seed);
    let mut lowest = f64::INFINITY;
    let mut pairs = 0;
    for (n, m) in [(2, 2), (2, 3)] {
        let mut rng = rng_for(seed, 400 + n as u64 * 10 + m as u64);
        let mut states = Vec::new();
        while states.len() < per_side {
            let mut x = BipartiteOperator::zeros(n, m);
            let w = [0.6, 0.3, 0.1];
            for c in w {
                x = x
                    .add(&random_product_vector(&mut rng, n, m).projector().scale(c))
                    .expect("dims");
            }
            if let Ok(v) = separable_decompose(&x, &budget) {
                if v.is_in() {
                    states.push(x);
                }
            }
        }
        let mut witnesses = Vec::new();
        while witnesses.len() < per_side {
            // Decomposable candidates P + Q^Γ with P, Q positive.
            let p = BipartiteOperator::new(n, m, random_density_matrix(&mut rng, n * m)).expect("dims");
            let q = BipartiteOperator::new(n, m, random_density_matrix(&mut rng, n * m)).expect("dims");
            let candidate = p.scale(0.3).add(&partial_transpose(&q, Side::Right)).expect("dims");
            if is_block_positive_with(&candidate, 1e-9, &cfg).is_in() {
                witnesses.push(candidate);
            }
        }
        for t in &states {
            for w in &witnesses {
                lowest = lowest.min(witness_value(w, t).expect("dims"));
                pairs += 1;
            }
        }
    }
    (lowest >= -1e-9, format!("{pairs} pairings, lowest ⟨T, W⟩ = {lowest:.3e}"))
}
