use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use cone_lab::algebra::{
    entangled_witness_x, riesz_counterexample_check, verify_trace_tensor, verify_x_separating, GridConeElement,
    MultiMatrixAlgebra, RieszConfig,
};
use cone_lab::cones::{
    block_positive_min, is_block_positive_with, is_psd, ppt_check, separable_decompose, witness_value,
    DecomposeBudget, OptimizerConfig,
};
use cone_lab::kappa::{cb_norm_estimate, kappa_exact, max_norm_of_functional, CbConfig};
use cone_lab::lp::{LinearProgram, LpOutcome, Relation, Sense};
use cone_lab::maps::{
    choi, is_positive_map_with, jamiolkowski, map_from_choi, normalize_positive_map_with, random_positive_map,
    random_unital_positive_map, state_from_positive_map_with, MatrixMap,
};
use cone_lab::matrix::{
    h_operator, partial_transpose, rho0_apply, swap_operator, tensor, trace_norm, CMatrix,
};
use cone_lab::polytopes::{
    affinely_independent, barker_gap, functional_norm, max_tensor, max_tensor_membership, min_tensor,
    positive_ray_generators, relative_bound, simplex, Polytope, RayCone, TensorFunctional,
};
use cone_lab::sampling::{random_density_matrix, random_hermitian, random_product_vector, rng_for};
use cone_lab::{BipartiteOperator, Certificate, HermitianOperator, Side, Status};

fn quick() -> OptimizerConfig {
    OptimizerConfig {
        starts: 30,
        steps: 200,
        seed: 5,
    }
}

fn random_bipartite(seed: u64, n: usize, m: usize) -> BipartiteOperator {
    let mut rng = rng_for(seed, 1);
    BipartiteOperator::new(n, m, random_hermitian(&mut rng, n * m)).unwrap()
}

fn random_state(seed: u64, n: usize, m: usize) -> BipartiteOperator {
    let mut rng = rng_for(seed, 2);
    BipartiteOperator::new(n, m, random_density_matrix(&mut rng, n * m)).unwrap()
}

fn random_map(seed: u64, n: usize, m: usize) -> MatrixMap {
    let mut rng = rng_for(seed, 3);
    let c = DMatrix::from_fn(m * m, n * n, |_, _| rand::Rng::random::<f64>(&mut rng) - 0.5);
    MatrixMap::from_coefficients(n, m, c).unwrap()
}

fn separable_mixture(seed: u64, n: usize, m: usize, terms: usize) -> BipartiteOperator {
    let mut rng = rng_for(seed, 4);
    let mut x = BipartiteOperator::zeros(n, m);
    for _ in 0..terms {
        x = x.add(&random_product_vector(&mut rng, n, m).projector().scale(1.0 / terms as f64)).unwrap();
    }
    x
}

fn is_hermitian(a: &CMatrix) -> bool {
    (a - a.adjoint()).iter().all(|z| z.norm() == 0.0)
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3, 1usize..=3)
}

// ---------------------------------------------------------------- matrix

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_norm_is_multiplicative(seed in any::<u64>(), a in 1usize..=4, b in 1usize..=4) {
        let mut rng = rng_for(seed, 0);
        let x = random_hermitian(&mut rng, a);
        let y = random_hermitian(&mut rng, b);
        let lhs = trace_norm(tensor(&x, &y).op());
        prop_assert!((lhs - trace_norm(&x) * trace_norm(&y)).abs() <= 1e-9 * lhs.max(1.0));
    }

    #[test]
    fn partial_transpose_keeps_trace_and_hermiticity(seed in any::<u64>(), (n, m) in dims()) {
        let x = random_bipartite(seed, n, m);
        for side in [Side::Left, Side::Right] {
            let y = partial_transpose(&x, side);
            prop_assert!((y.trace() - x.trace()).abs() <= 1e-12);
            prop_assert!(is_hermitian(y.entries()));
            prop_assert_eq!(partial_transpose(&y, side), x.clone());
        }
    }

    #[test]
    fn rho0_is_scaled_pairing_with_h(seed in any::<u64>(), m in 1usize..=4) {
        let x = random_bipartite(seed, m, m);
        let lhs = rho0_apply(m, &x).unwrap();
        let rhs = x.inner(&h_operator(m)).unwrap() / m as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn operator_json_roundtrip(seed in any::<u64>(), (n, m) in dims()) {
        let x = random_bipartite(seed, n, m);
        let text = serde_json::to_string(&x).unwrap();
        let back: BipartiteOperator = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn swap_spectrum_multiplicities() {
    for m in 1..=5 {
        let ev = swap_operator(m).op().eigenvalues();
        let plus = ev.iter().filter(|&&l| (l - 1.0).abs() < 1e-9).count();
        let minus = ev.iter().filter(|&&l| (l + 1.0).abs() < 1e-9).count();
        assert_eq!((plus, minus), (m * (m + 1) / 2, m * (m - 1) / 2), "m = {m}");
    }
}

#[test]
fn h_is_partial_transpose_of_swap() {
    for m in 1..=6 {
        assert_eq!(partial_transpose(&swap_operator(m), Side::Right), h_operator(m));
    }
}

#[test]
fn non_hermitian_input_is_rejected() {
    let mut a = CMatrix::zeros(2, 2);
    a[(0, 1)] = Complex64::new(1.0, 0.0);
    assert!(HermitianOperator::new(a).is_err());
    assert!(BipartiteOperator::new(2, 3, HermitianOperator::identity(5)).is_err());
}

// ---------------------------------------------------------------- cones

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_minimum_dominates_spectrum(seed in any::<u64>(), (n, m) in (1usize..=3, 2usize..=3)) {
        let x = random_bipartite(seed, n, m);
        let (min, trace) = block_positive_min(&x, &quick());
        prop_assert!(min >= x.op().min_eigenvalue() - 1e-9);
        // The reported vector attains the reported value.
        let v = trace.best_vector.kron();
        prop_assert!((x.op().expectation(&v) - min).abs() <= 1e-9);
    }

    #[test]
    fn product_minimum_scales(seed in any::<u64>(), c in 0.01f64..100.0) {
        let x = random_bipartite(seed, 2, 3);
        let (a, _) = block_positive_min(&x, &quick());
        let (b, _) = block_positive_min(&x.scale(c), &quick());
        prop_assert!((b - c * a).abs() <= 1e-9 * c.max(1.0), "{} vs {}", b, c * a);
    }

    #[test]
    fn psd_implies_block_positive(seed in any::<u64>(), (n, m) in dims()) {
        let x = random_state(seed, n, m);
        prop_assert_eq!(is_psd(&x, 1e-9).status, Status::In);
        prop_assert_eq!(is_block_positive_with(&x, 1e-6, &quick()).status, Status::In);
    }

    #[test]
    fn decomposition_certifies_psd_and_reconstructs(seed in any::<u64>(), terms in 1usize..=6, (n, m) in (2usize..=3, 2usize..=3)) {
        let x = separable_mixture(seed, n, m, terms);
        let budget = DecomposeBudget { optimizer: OptimizerConfig { seed, ..DecomposeBudget::default().optimizer }, ..DecomposeBudget::default() };
        let v = separable_decompose(&x, &budget).unwrap();
        prop_assert_eq!(v.status, Status::In);
        prop_assert_eq!(is_psd(&x, 1e-9).status, Status::In);
        let Certificate::SeparableDecomposition(d) = &v.certificate else { panic!("certificate kind") };
        prop_assert!(d.weights.iter().all(|&w| w >= 0.0));
        prop_assert!(d.reconstruct().unwrap().sub(&x).unwrap().op().frobenius_norm() <= d.residual + 1e-12);
        prop_assert!(d.residual < 1e-7);
    }

    #[test]
    fn ppt_violations_come_with_valid_witnesses(seed in any::<u64>(), (n, m) in (2usize..=3, 2usize..=3)) {
        let x = random_state(seed, n, m);
        let v = ppt_check(&x, 1e-9);
        if v.status == Status::Out {
            let Certificate::Witness(w) = &v.certificate else { panic!("witness expected") };
            prop_assert!(w.value < -1e-9);
            prop_assert!((witness_value(&w.witness, &x).unwrap() - w.value).abs() <= 1e-12);
            prop_assert_eq!(is_block_positive_with(&w.witness, 1e-6, &quick()).status, Status::In);
        }
    }
}

#[test]
fn separable_witness_pairings_are_nonnegative() {
    let cfg = quick();
    let witnesses: Vec<BipartiteOperator> = (0..8)
        .map(|k| {
            let mut rng = rng_for(k, 9);
            let q = BipartiteOperator::new(2, 2, random_density_matrix(&mut rng, 4)).unwrap();
            partial_transpose(&q, Side::Right)
        })
        .filter(|w| is_block_positive_with(w, 1e-9, &cfg).status == Status::In)
        .collect();
    assert!(witnesses.len() >= 4);
    for k in 0..16 {
        let t = separable_mixture(k, 2, 2, 3);
        assert!(separable_decompose(&t, &DecomposeBudget::default()).unwrap().is_in());
        for w in &witnesses {
            assert!(witness_value(w, &t).unwrap() >= -1e-9);
        }
    }
}

// ---------------------------------------------------------------- maps

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn choi_roundtrip_and_jamiolkowski(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let psi = random_map(seed, n, m);
        let c = choi(&psi);
        prop_assert!(map_from_choi(&c).max_abs_diff(&psi) < 1e-12);
        prop_assert!(partial_transpose(&jamiolkowski(&psi), Side::Right).max_abs_diff(&c) < 1e-12);
    }

    #[test]
    fn maps_preserve_hermiticity(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let psi = random_map(seed, n, m);
        let mut rng = rng_for(seed, 8);
        let a = random_hermitian(&mut rng, n);
        let out = psi.apply_matrix(a.entries());
        prop_assert!((&out - out.adjoint()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn unitality_report_uses_normalised_trace(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let psi = random_map(seed, n, m);
        let r = psi.unitality();
        let direct = psi.apply_matrix(&CMatrix::identity(n, n)).trace().re / m as f64;
        prop_assert!((r.normalized_trace_of_image - direct).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn states_from_positive_maps_are_nonnegative_on_separable(seed in any::<u64>(), (n, m) in (2usize..=3, 2usize..=3)) {
        let mut rng = rng_for(seed, 5);
        let phi = random_positive_map(&mut rng, n, m);
        let rho = state_from_positive_map_with(&phi, true, &quick()).unwrap();
        for k in 0..20 {
            let t = separable_mixture(seed.wrapping_add(k), n, m, 2);
            prop_assert!(rho.apply(&t).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn normalised_maps_are_positive_and_unital(seed in any::<u64>(), (n, m) in (2usize..=3, 2usize..=3)) {
        let mut rng = rng_for(seed, 6);
        let phi = random_positive_map(&mut rng, n, m);
        let out = normalize_positive_map_with(&phi, &quick()).unwrap();
        prop_assert!(out.unital.unitality().is_unital);
        prop_assert_eq!(is_positive_map_with(&out.unital, 1e-6, &quick()).status, Status::In);
    }

    #[test]
    fn unital_states_have_bounded_max_norm(seed in any::<u64>(), (n, m) in (2usize..=3, 2usize..=3)) {
        let mut rng = rng_for(seed, 7);
        let phi = random_unital_positive_map(&mut rng, n, m);
        let rho = state_from_positive_map_with(&phi, false, &quick()).unwrap();
        let norm = rho.max_norm();
        prop_assert!(norm >= 1.0 - 1e-9 && norm <= kappa_exact(n, m) + 1e-6, "{}", norm);
        prop_assert!((max_norm_of_functional(&rho.density) - norm).abs() < 1e-12);
    }
}

#[test]
fn complete_positivity_matches_choi() {
    let t2 = MatrixMap::transpose(2);
    assert_eq!(choi(&t2), swap_operator(2));
    assert_eq!(is_psd(&choi(&t2), 1e-9).status, Status::Out);
    assert_eq!(is_positive_map_with(&t2, 1e-6, &quick()).status, Status::In);
    let id = MatrixMap::identity(2);
    assert_eq!(choi(&id), h_operator(2));
    assert_eq!(is_psd(&choi(&id), 1e-9).status, Status::In);
}

// ---------------------------------------------------------------- kappa

#[test]
fn cb_estimates_respect_the_closed_form() {
    let cfg = CbConfig {
        starts: 10,
        steps: 100,
        seed: 0,
    };
    for k in 0..20u64 {
        let (n, m) = (2 + (k % 2) as usize, 2 + ((k / 2) % 2) as usize);
        let mut rng = rng_for(k, 10);
        let phi = random_unital_positive_map(&mut rng, n, m);
        let est = cb_norm_estimate(&phi, &cfg);
        assert!(est.value <= kappa_exact(n, m) + 1e-6, "{k}: {}", est.value);
        assert!(est.value >= 1.0 - 1e-9);
    }
}

#[test]
fn relative_bound_controls_functional_norms() {
    let pairs = [
        (Polytope::square(), Polytope::square()),
        (simplex(1), Polytope::square()),
        (simplex(2), Polytope::square()),
    ];
    for (k1, k2) in &pairs {
        let min = min_tensor(k1, k2);
        let max = max_tensor(k1, k2).unwrap();
        let r = relative_bound(&min.polytope, &max.polytope).unwrap();
        for phi in max.functionals() {
            let norm = functional_norm(&phi, &min).unwrap();
            assert!(norm <= 2.0 * r + 1.0 + 1e-9, "norm {norm} exceeds 2r+1 with r = {r}");
        }
    }
}

// ---------------------------------------------------------------- polytopes

fn random_simplex(seed: u64, d: usize) -> Polytope {
    let mut rng = rng_for(seed, 11);
    let vertices: Vec<Vec<f64>> = (0..=d)
        .map(|_| (0..d).map(|_| rand::Rng::random::<f64>(&mut rng)).collect())
        .collect();
    Polytope::new(d, vertices).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn products_of_independent_vertices_are_independent(seed in any::<u64>(), d1 in 1usize..=3, d2 in 1usize..=3) {
        let k1 = random_simplex(seed, d1);
        let k2 = random_simplex(seed.wrapping_add(1), d2);
        prop_assume!(affinely_independent(k1.vertices()) && affinely_independent(k2.vertices()));
        let t = min_tensor(&k1, &k2);
        prop_assert!(affinely_independent(t.polytope.vertices()));
        prop_assert_eq!(t.polytope.affine_dimension(), (d1 + 1) * (d2 + 1) - 1);
    }

    #[test]
    fn slice_maps_recover_factors(seed in any::<u64>(), d1 in 1usize..=2, d2 in 1usize..=2) {
        let k1 = random_simplex(seed, d1);
        let k2 = random_simplex(seed.wrapping_add(7), d2);
        for v in k1.chart_vertices() {
            for w in k2.chart_vertices() {
                let phi = TensorFunctional::product(&v, &w);
                prop_assert_eq!(phi.left_marginal(), v.clone());
                prop_assert_eq!(phi.right_marginal(), w.clone());
            }
        }
    }
}

#[test]
fn dimension_formula() {
    let sq = Polytope::square();
    let cases = [
        (simplex(1), simplex(1), 3),
        (simplex(1), simplex(2), 5),
        (sq.clone(), simplex(1), 5),
        (sq.clone(), sq.clone(), 8),
    ];
    for (k1, k2, dim) in cases {
        assert_eq!(min_tensor(&k1, &k2).polytope.affine_dimension(), dim);
    }
}

#[test]
fn min_product_lies_in_max_product() {
    let sq = Polytope::square();
    for (k1, k2) in [(sq.clone(), sq.clone()), (simplex(2), sq.clone()), (simplex(1), simplex(2))] {
        for phi in min_tensor(&k1, &k2).functionals() {
            assert!(max_tensor_membership(&phi, &k1, &k2, 1e-9).unwrap().is_in());
        }
    }
}

#[test]
fn simplex_factor_closes_the_gap() {
    let sq = Polytope::square();
    for k in 0..=2 {
        for other in [simplex(1), simplex(2), sq.clone()] {
            assert!(barker_gap(&simplex(k), &other).unwrap().is_none());
        }
    }
    assert!(barker_gap(&sq, &sq).unwrap().is_some());
}

/// Whether `r` lies in the cone generated by `others` (LP feasibility).
fn in_cone(r: &[f64], others: &[&Vec<f64>]) -> bool {
    let mut lp = LinearProgram::new(Sense::Minimize, vec![0.0; others.len()]);
    for i in 0..r.len() {
        lp.constrain(others.iter().map(|o| o[i]).collect(), Relation::Eq, r[i]);
    }
    matches!(lp.solve().unwrap(), LpOutcome::Optimal { .. })
}

#[test]
fn positive_rays_are_nonnegative_and_extreme() {
    let pentagon = Polytope::new(
        2,
        vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![3.0, 1.5], vec![1.0, 3.0], vec![-1.0, 1.5]],
    )
    .unwrap();
    for k in [Polytope::square(), simplex(2), pentagon, random_simplex(3, 3)] {
        let cone = positive_ray_generators(&k).unwrap();
        for r in &cone.rays {
            for v in k.chart_vertices() {
                assert!(RayCone::evaluate(r, &v) >= -1e-10);
            }
        }
        for (i, r) in cone.rays.iter().enumerate() {
            let others: Vec<&Vec<f64>> = cone.rays.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, o)| o).collect();
            assert!(!in_cone(r, &others), "ray {i} is redundant");
        }
    }
}

#[test]
fn polytope_input_validation() {
    assert!(Polytope::new(2, vec![vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
    assert!(Polytope::new(2, vec![]).is_err());
    assert!(TensorFunctional::new(DMatrix::from_element(2, 2, 0.5)).is_err());
}

// ---------------------------------------------------------------- algebra

#[test]
fn trace_simplex_pairs() {
    let list = [vec![1], vec![2], vec![2, 3], vec![1, 1], vec![2, 2, 2]];
    for a in &list {
        for b in &list {
            let r = verify_trace_tensor(&MultiMatrixAlgebra::new(a.clone()).unwrap(), &MultiMatrixAlgebra::new(b.clone()).unwrap());
            assert!(r.passed, "{a:?} ⊗ {b:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn witness_x_is_bilinear(s in 0.0f64..=1.0, t in 0.0f64..=1.0, n in 2usize..=4) {
        let w = entangled_witness_x(n, &[0.0, 0.5, 1.0]).unwrap();
        prop_assert_eq!(w.at(s, t), w.at(1.0, 1.0).scale(s * t));
    }

    #[test]
    fn riesz_passes_across_resolutions(k in 10usize..=40) {
        let cfg = RieszConfig { step: 1.0 / k as f64, threshold: 0.05 };
        prop_assert!(riesz_counterexample_check(&cfg).unwrap().passed);
    }
}

#[test]
fn separable_side_minimum_approaches_zero() {
    let mut prev = f64::INFINITY;
    for samples in [100, 10_000, 100_000] {
        let r = verify_x_separating(2, &[1.0], samples, 4).unwrap();
        assert!(r.min_sample_value >= 0.0);
        assert!(r.min_sample_value <= prev);
        prev = r.min_sample_value;
    }
    assert!(prev < 1e-3, "{prev}");
}

#[test]
fn grid_elements_enforce_scalar_at_zero() {
    let grid = vec![0.0, 0.5, 1.0];
    let ok = vec![HermitianOperator::identity(2).scale(3.0), HermitianOperator::zeros(2), HermitianOperator::identity(2)];
    assert!(GridConeElement::new(2, grid.clone(), ok, true).is_ok());
    let bad = vec![HermitianOperator::diagonal(&[1.0, 2.0]), HermitianOperator::zeros(2), HermitianOperator::identity(2)];
    assert!(GridConeElement::new(2, grid.clone(), bad.clone(), true).is_err());
    assert!(GridConeElement::new(2, grid, bad, false).is_ok());
    let slice = entangled_witness_x(2, &[0.0, 1.0]).unwrap().slice(1.0).unwrap();
    assert!(!slice.is_positive(1e-9));
}
