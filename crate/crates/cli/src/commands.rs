use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use cone_lab::algebra::{
    riesz_counterexample_check, verify_trace_tensor_iterated, verify_x_separating, MultiMatrixAlgebra,
    RieszConfig,
};
use cone_lab::cones::{
    is_block_positive_with, is_psd, ppt_check, separable_decompose, DecomposeBudget, OptimizerConfig,
    OPTIMIZER_TOL, SPECTRAL_TOL,
};
use cone_lab::kappa::{kappa_report, CbConfig};
use cone_lab::maps::{choi, is_positive_map_with, jamiolkowski, MatrixMap};
use cone_lab::matrix::partial_transpose;
use cone_lab::polytopes::{barker_gap, max_tensor, min_tensor, relative_bound, Polytope};
use cone_lab::reproduce::run_all;
use cone_lab::{BipartiteOperator, Certificate, Side, Status, Verdict};

use crate::report::{CliError, Outcome, RunReport};
use crate::{
    Command, ConeKind, KappaArgs, MapArgs, MembershipArgs, PairArgs, PolytopeCommand, RieszArgs,
    TensorArgs, TraceArgs, WitnessArgs,
};

type Parts = (Value, Value, Value, Outcome);

pub fn run(command: &Command, seed: u64) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let (name, (inputs, results, certificates, outcome)) = match command {
        Command::Membership(a) => ("membership", membership(a, seed)?),
        Command::Choi(a) => ("choi", choi_cmd(a)?),
        Command::MapCheck(a) => ("map-check", map_check(a, seed)?),
        Command::Kappa(a) => ("kappa", kappa(a, seed)?),
        Command::Polytope {
            command: PolytopeCommand::Tensor(a),
        } => ("polytope tensor", polytope_tensor(a)?),
        Command::Barker(a) => ("barker", barker(a)?),
        Command::WitnessX(a) => ("witness-x", witness_x(a, seed)?),
        Command::Riesz(a) => ("riesz", riesz(a)?),
        Command::TraceSimplex(a) => ("trace-simplex", trace_simplex(a)?),
        Command::Reproduce(a) => ("reproduce", reproduce(a.quick, seed)),
    };
    Ok(RunReport {
        command: name.to_string(),
        inputs,
        results,
        certificates,
        outcome,
        seed,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serialisable")
}

fn status_outcome(s: Status) -> Outcome {
    match s {
        Status::In => Outcome::In,
        Status::Out => Outcome::Out,
        Status::Unknown => Outcome::Unknown,
    }
}

fn verdict_parts(v: &Verdict) -> (Value, Value, Outcome) {
    (json!({ "status": v.status }), to_value(&v.certificate), status_outcome(v.status))
}

fn membership(a: &MembershipArgs, seed: u64) -> Result<Parts, CliError> {
    let x: BipartiteOperator = read_json(&a.input)?;
    let inputs = json!({
        "cone": format!("{:?}", a.cone).to_lowercase(),
        "input": a.input.display().to_string(),
        "n": x.n(),
        "m": x.m(),
        "tol": a.tol,
        "budget": a.budget,
        "steps": a.steps,
    });
    let verdict = match a.cone {
        ConeKind::Psd => is_psd(&x, a.tol.unwrap_or(SPECTRAL_TOL)),
        ConeKind::Ppt => ppt_check(&x, a.tol.unwrap_or(SPECTRAL_TOL)),
        ConeKind::BlockPositive => {
            let cfg = OptimizerConfig {
                starts: a.budget.unwrap_or(200),
                steps: a.steps.unwrap_or(500),
                seed,
            };
            is_block_positive_with(&x, a.tol.unwrap_or(OPTIMIZER_TOL), &cfg)
        }
        ConeKind::Separable => separable(&x, a, seed)?,
    };
    let (results, certificates, outcome) = verdict_parts(&verdict);
    Ok((inputs, results, certificates, outcome))
}

/// PPT decides when it can; otherwise a decomposition of the trace-normalised
/// operator is attempted and failure is reported as unknown.
fn separable(x: &BipartiteOperator, a: &MembershipArgs, seed: u64) -> Result<Verdict, CliError> {
    let tol = a.tol.unwrap_or(SPECTRAL_TOL);
    let ppt = ppt_check(x, tol);
    let exact = matches!(&ppt.certificate, Certificate::Ppt(c) if c.exact);
    if ppt.is_out() || exact {
        return Ok(ppt);
    }
    let tr = x.trace();
    if tr <= tol {
        // PSD with zero trace: the zero operator.
        return Ok(ppt);
    }
    let defaults = DecomposeBudget::default();
    let budget = DecomposeBudget {
        optimizer: OptimizerConfig {
            starts: a.budget.unwrap_or(defaults.optimizer.starts),
            steps: a.steps.unwrap_or(defaults.optimizer.steps),
            seed,
        },
        ..defaults
    };
    let mut v = separable_decompose(&x.scale(1.0 / tr), &budget)?;
    if let Certificate::SeparableDecomposition(d) = &mut v.certificate {
        d.weights.iter_mut().for_each(|w| *w *= tr);
        d.residual *= tr;
    }
    Ok(v)
}

fn choi_cmd(a: &MapArgs) -> Result<Parts, CliError> {
    let phi: MatrixMap = read_json(&a.map)?;
    let c = choi(&phi);
    let j = jamiolkowski(&phi);
    let deviation = partial_transpose(&j, Side::Right).max_abs_diff(&c);
    let inputs = json!({ "map": a.map.display().to_string(), "n": phi.input_dim(), "m": phi.output_dim() });
    let results = json!({
        "choi": c,
        "jamiolkowski": j,
        "partial_transpose_identity_deviation": deviation,
    });
    let outcome = Outcome::from_pass(deviation <= 1e-12);
    Ok((inputs, results, Value::Null, outcome))
}

fn map_check(a: &MapArgs, seed: u64) -> Result<Parts, CliError> {
    let phi: MatrixMap = read_json(&a.map)?;
    let cfg = OptimizerConfig::default().with_seed(seed);
    let positive = is_positive_map_with(&phi, a.tol, &cfg);
    let cp = is_psd(&choi(&phi), SPECTRAL_TOL);
    let unitality = phi.unitality();
    let inputs = json!({
        "map": a.map.display().to_string(),
        "n": phi.input_dim(),
        "m": phi.output_dim(),
        "tol": a.tol,
    });
    let results = json!({
        "positive": positive.status,
        "completely_positive": cp.status,
        "unital": unitality.is_unital,
        "normalized_trace_of_image": unitality.normalized_trace_of_image,
        "image_of_identity": unitality.image_of_identity,
    });
    let certificates = json!({
        "positive": positive.certificate,
        "completely_positive": cp.certificate,
    });
    Ok((inputs, results, certificates, status_outcome(positive.status)))
}

fn kappa(a: &KappaArgs, seed: u64) -> Result<Parts, CliError> {
    let (n, m) = (a.n as usize, a.m as usize);
    let map: Option<MatrixMap> = a.estimate_cb.as_deref().map(read_json).transpose()?;
    if let Some(p) = &map {
        if p.input_dim() != n || p.output_dim() != m {
            return Err(CliError::Data(format!(
                "map acts M_{} → M_{}, expected M_{n} → M_{m}",
                p.input_dim(),
                p.output_dim()
            )));
        }
    }
    let cfg = CbConfig {
        starts: a.starts,
        steps: a.steps,
        seed,
    };
    let report = kappa_report(n, m, map.as_ref(), &cfg);
    let inputs = json!({
        "n": n,
        "m": m,
        "estimate_cb": a.estimate_cb.as_ref().map(|p| p.display().to_string()),
        "starts": a.starts,
        "steps": a.steps,
    });
    let passed = (report.witness_lower_bound - report.exact).abs() <= 1e-9
        && report.cb_estimate <= report.exact + 1e-9;
    let results = json!({
        "exact": report.exact,
        "witness_lower_bound": report.witness_lower_bound,
        "cb_estimate": report.cb_estimate,
    });
    let certificates = json!({ "witness": report.witness });
    Ok((inputs, results, certificates, Outcome::from_pass(passed)))
}

fn polytope_pair(a: &PairArgs) -> Result<(Polytope, Polytope, Value), CliError> {
    let k1: Polytope = read_json(&a.k1)?;
    let k2: Polytope = read_json(&a.k2)?;
    let inputs = json!({
        "k1": a.k1.display().to_string(),
        "k2": a.k2.display().to_string(),
    });
    Ok((k1, k2, inputs))
}

fn polytope_tensor(a: &TensorArgs) -> Result<Parts, CliError> {
    let (k1, k2, mut inputs) = polytope_pair(&a.pair)?;
    inputs["gap"] = json!(a.gap);
    inputs["relative_bound"] = json!(a.relative_bound);
    let min = min_tensor(&k1, &k2);
    let max = max_tensor(&k1, &k2)?;
    let mut results = json!({
        "shape": [min.rows, min.cols],
        "min": {
            "vertex_count": min.vertex_count(),
            "affine_dimension": min.polytope.affine_dimension(),
            "vertices": min.polytope.vertices(),
        },
        "max": {
            "vertex_count": max.vertex_count(),
            "affine_dimension": max.polytope.affine_dimension(),
            "vertices": max.polytope.vertices(),
        },
    });
    let mut certificates = Value::Null;
    if a.gap {
        let gap = barker_gap(&k1, &k2)?;
        results["gap"] = json!(gap.as_ref().map(|g| &g.functional));
        if let Some(g) = gap {
            certificates = json!({
                "min": g.min_certificate,
                "max": g.max_certificate,
            });
        }
    }
    if a.relative_bound {
        results["relative_bound"] = json!(relative_bound(&min.polytope, &max.polytope)?);
    }
    Ok((inputs, results, certificates, Outcome::Pass))
}

fn barker(a: &PairArgs) -> Result<Parts, CliError> {
    let (k1, k2, inputs) = polytope_pair(a)?;
    let gap = barker_gap(&k1, &k2)?;
    Ok(match gap {
        None => (inputs, json!({ "products_coincide": true, "gap": null }), Value::Null, Outcome::In),
        Some(g) => (
            inputs,
            json!({ "products_coincide": false, "gap": g.functional }),
            json!({ "min": g.min_certificate, "max": g.max_certificate }),
            Outcome::Out,
        ),
    })
}

fn witness_x(a: &WitnessArgs, seed: u64) -> Result<Parts, CliError> {
    let report = verify_x_separating(a.n as usize, &a.grid, a.samples, seed)?;
    let inputs = json!({ "n": a.n, "grid": a.grid, "samples": a.samples });
    let outcome = Outcome::from_pass(report.passed);
    Ok((inputs, to_value(&report), Value::Null, outcome))
}

fn riesz(a: &RieszArgs) -> Result<Parts, CliError> {
    if !(a.step > 0.0 && a.step <= 1.0) || !(a.threshold > 0.0) {
        return Err(CliError::Usage("step must lie in (0, 1] and threshold must be positive".into()));
    }
    let report = riesz_counterexample_check(&RieszConfig {
        step: a.step,
        threshold: a.threshold,
    })?;
    let inputs = json!({ "step": a.step, "threshold": a.threshold });
    let outcome = Outcome::from_pass(report.passed);
    Ok((inputs, to_value(&report), Value::Null, outcome))
}

fn trace_simplex(a: &TraceArgs) -> Result<Parts, CliError> {
    let mut factors = vec![MultiMatrixAlgebra::new(a.a.clone())?, MultiMatrixAlgebra::new(a.b.clone())?];
    for spec in &a.more {
        let blocks = spec
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Usage(format!("--and {spec}: {e}")))?;
        factors.push(MultiMatrixAlgebra::new(blocks)?);
    }
    let report = verify_trace_tensor_iterated(&factors);
    let inputs = json!({ "factors": factors });
    let outcome = Outcome::from_pass(report.passed);
    Ok((inputs, to_value(&report), Value::Null, outcome))
}

fn reproduce(quick: bool, seed: u64) -> Parts {
    let checks = run_all(quick, seed);
    let passed = checks.iter().all(|c| c.passed);
    (
        json!({ "quick": quick }),
        json!({ "checks": checks, "passed": checks.iter().filter(|c| c.passed).count(), "total": checks.len() }),
        Value::Null,
        Outcome::from_pass(passed),
    )
}
