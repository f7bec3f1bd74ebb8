//! Minimal and maximal tensor products of polytopes.
//!
//! A polytope `K` is given by its vertex list. Affine functions on `K` are
//! written `x ↦ a·x + b` in the intrinsic chart of `aff(K)` and stored as
//! coefficient vectors `(a, b)` with the constant slot last. A functional on
//! `A(K₁) ⊗ A(K₂)` is then a `(d₁+1)×(d₂+1)` matrix `M` acting by
//! `f ⊗ g ↦ fᵀ M g`; states have `M[d₁][d₂] = 1`.
//!
//! The minimal tensor product is the convex hull of the rank-one matrices
//! `[v;1][w;1]ᵀ` over vertex pairs. The maximal one is cut out by
//! `rᵀ M s ≥ 0` over extreme rays `r`, `s` of the cones of positive affine
//! functions.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::extreme_rays;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation, Sense};
use crate::verdict::{
    Certificate, ConvexWeights, RayPairCertificate, SeparatingHyperplane, Status, Verdict,
};

const DUPLICATE_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-9;
/// Largest ambient dimension handled by [`positive_ray_generators`].
pub const MAX_RAY_AMBIENT_DIM: usize = 4;
pub const MAX_RAY_VERTICES: usize = 12;
/// Largest coefficient-matrix size `(d₁+1)(d₂+1)` for [`max_tensor`].
pub const MAX_TENSOR_COORDS: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeJson", into = "PolytopeJson")]
pub struct Polytope {
    ambient_dim: usize,
    vertices: Vec<Vec<f64>>,
    /// Ambient coordinates that parametrise `aff(K)` injectively.
    chart: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
}

impl TryFrom<PolytopeJson> for Polytope {
    type Error = Error;

    fn try_from(j: PolytopeJson) -> Result<Self> {
        Polytope::new(j.dim, j.vertices)
    }
}

impl From<Polytope> for PolytopeJson {
    fn from(p: Polytope) -> Self {
        PolytopeJson {
            dim: p.ambient_dim,
            vertices: p.vertices,
        }
    }
}

impl Polytope {
    pub fn new(ambient_dim: usize, vertices: Vec<Vec<f64>>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("polytope needs at least one vertex".into()));
        }
        for v in &vertices {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("non-finite vertex coordinate".into()));
            }
        }
        for (i, a) in vertices.iter().enumerate() {
            for b in &vertices[..i] {
                if distance(a, b) < DUPLICATE_TOL {
                    return Err(Error::InvalidInput(format!("duplicate vertex {a:?}")));
                }
            }
        }
        let chart = choose_chart(&vertices, ambient_dim);
        Ok(Self {
            ambient_dim,
            vertices,
            chart,
        })
    }

    /// `Δₙ`: the unit coordinate vectors of `ℝⁿ⁺¹`.
    pub fn simplex(n: usize) -> Self {
        let vertices = (0..=n)
            .map(|i| (0..=n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(n + 1, vertices).expect("simplex vertices are distinct")
    }

    /// The unit square `[0,1]²`.
    pub fn square() -> Self {
        Self::new(
            2,
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0],
            ],
        )
        .expect("square vertices are distinct")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn affine_dimension(&self) -> usize {
        self.chart.len()
    }

    pub fn chart_coordinates(&self) -> &[usize] {
        &self.chart
    }

    /// Restriction of an ambient point to the chart coordinates.
    pub fn to_chart(&self, x: &[f64]) -> Vec<f64> {
        self.chart.iter().map(|&i| x[i]).collect()
    }

    pub fn chart_vertices(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| self.to_chart(v)).collect()
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn difference_matrix(points: &[Vec<f64>], cols: &[usize]) -> DMatrix<f64> {
    let base = &points[0];
    DMatrix::from_fn(points.len().saturating_sub(1), cols.len(), |r, c| {
        points[r + 1][cols[c]] - base[cols[c]]
    })
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let max = sv.iter().fold(0.0_f64, |a, &b| a.max(b));
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * max.max(1.0)).count()
}

fn choose_chart(points: &[Vec<f64>], d: usize) -> Vec<usize> {
    let target = affine_dimension(points);
    let mut chosen = Vec::new();
    for i in 0..d {
        if chosen.len() == target {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(i);
        if numerical_rank(&difference_matrix(points, &trial)) == trial.len() {
            chosen = trial;
        }
    }
    chosen
}

/// Dimension of the affine hull: the rank of `{v − v₀}`.
pub fn affine_dimension(points: &[Vec<f64>]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let d = points[0].len();
    let cols: Vec<usize> = (0..d).collect();
    numerical_rank(&difference_matrix(points, &cols))
}

pub fn simplex(n: usize) -> Polytope {
    Polytope::simplex(n)
}

/// Extreme rays of the cone of affine functions that are nonnegative on `K`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RayCone {
    /// Length of each ray: chart dimension plus one.
    pub ambient_dim: usize,
    /// Coefficients `(a, b)` of `x ↦ a·x + b`, max-abs normalised.
    pub rays: Vec<Vec<f64>>,
}

impl RayCone {
    /// `a·x + b` for a chart point `x`.
    pub fn evaluate(ray: &[f64], x: &[f64]) -> f64 {
        let k = ray.len() - 1;
        ray[..k].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + ray[k]
    }
}

pub fn positive_ray_generators(k: &Polytope) -> Result<RayCone> {
    if k.ambient_dim > MAX_RAY_AMBIENT_DIM || k.vertices.len() > MAX_RAY_VERTICES {
        return Err(Error::ScaleExceeded(format!(
            "ray enumeration supports ambient dimension ≤ {MAX_RAY_AMBIENT_DIM} and ≤ {MAX_RAY_VERTICES} vertices, got {} and {}",
            k.ambient_dim,
            k.vertices.len()
        )));
    }
    let d = k.affine_dimension() + 1;
    let rows: Vec<Vec<f64>> = k.chart_vertices().into_iter().map(|v| lift(&v)).collect();
    let rays = extreme_rays(&rows, d)?;
    Ok(RayCone {
        ambient_dim: d,
        rays,
    })
}

fn lift(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.push(1.0);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorFunctionalJson", into = "TensorFunctionalJson")]
pub struct TensorFunctional {
    matrix: DMatrix<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorFunctionalJson {
    pub matrix: Vec<Vec<f64>>,
}

impl TryFrom<TensorFunctionalJson> for TensorFunctional {
    type Error = Error;

    fn try_from(j: TensorFunctionalJson) -> Result<Self> {
        let rows = j.matrix.len();
        let cols = j.matrix.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || j.matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("tensor functional must be a nonempty rectangular matrix".into()));
        }
        TensorFunctional::new(DMatrix::from_fn(rows, cols, |r, c| j.matrix[r][c]))
    }
}

impl From<TensorFunctional> for TensorFunctionalJson {
    fn from(t: TensorFunctional) -> Self {
        TensorFunctionalJson {
            matrix: t
                .matrix
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
        }
    }
}

impl TensorFunctional {
    /// Requires the constant-constant entry to be 1 within `1e-12`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (p, q) = matrix.shape();
        let unit = matrix[(p - 1, q - 1)];
        if (unit - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "value on the unit must be 1, found {unit}"
            )));
        }
        Ok(Self { matrix })
    }

    /// The elementary tensor `x₁ ⊗ x₂` of two chart points.
    pub fn product(x1: &[f64], x2: &[f64]) -> Self {
        let a = lift(x1);
        let b = lift(x2);
        Self {
            matrix: DMatrix::from_fn(a.len(), b.len(), |r, c| a[r] * b[c]),
        }
    }

    fn from_flat(p: usize, q: usize, flat: &[f64]) -> Self {
        Self {
            matrix: DMatrix::from_fn(p, q, |r, c| flat[r * q + c]),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }

    /// Row-major entries.
    pub fn flatten(&self) -> Vec<f64> {
        let (p, q) = self.shape();
        (0..p * q).map(|k| self.matrix[(k / q, k % q)]).collect()
    }

    /// `fᵀ M g`.
    pub fn pair(&self, f: &[f64], g: &[f64]) -> f64 {
        let (p, q) = self.shape();
        let mut acc = 0.0;
        for r in 0..p {
            for c in 0..q {
                acc += f[r] * self.matrix[(r, c)] * g[c];
            }
        }
        acc
    }

    /// Chart point `x₁` with `⟨x, f ⊗ u₂⟩ = f(x₁)`.
    pub fn left_marginal(&self) -> Vec<f64> {
        let (p, q) = self.shape();
        (0..p - 1).map(|r| self.matrix[(r, q - 1)]).collect()
    }

    /// Chart point `x₂` with `⟨x, u₁ ⊗ g⟩ = g(x₂)`.
    pub fn right_marginal(&self) -> Vec<f64> {
        let (p, q) = self.shape();
        (0..q - 1).map(|c| self.matrix[(p - 1, c)]).collect()
    }
}

/// A polytope of tensor functionals, with vertices stored row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorPolytope {
    pub rows: usize,
    pub cols: usize,
    pub polytope: Polytope,
}

impl TensorPolytope {
    pub fn functionals(&self) -> Vec<TensorFunctional> {
        self.polytope
            .vertices
            .iter()
            .map(|v| TensorFunctional::from_flat(self.rows, self.cols, v))
            .collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.polytope.vertices.len()
    }
}

fn tensor_shape(k1: &Polytope, k2: &Polytope) -> (usize, usize) {
    (k1.affine_dimension() + 1, k2.affine_dimension() + 1)
}

pub fn min_tensor(k1: &Polytope, k2: &Polytope) -> TensorPolytope {
    let (p, q) = tensor_shape(k1, k2);
    let mut vertices = Vec::new();
    for v in k1.chart_vertices() {
        for w in k2.chart_vertices() {
            vertices.push(TensorFunctional::product(&v, &w).flatten());
        }
    }
    TensorPolytope {
        rows: p,
        cols: q,
        polytope: Polytope::new(p * q, vertices).expect("distinct vertex pairs give distinct products"),
    }
}

fn ray_pair_rows(r1: &RayCone, r2: &RayCone) -> Vec<(usize, usize, Vec<f64>)> {
    let mut out = Vec::new();
    for (i, r) in r1.rays.iter().enumerate() {
        for (j, s) in r2.rays.iter().enumerate() {
            let row = r.iter().flat_map(|a| s.iter().map(move |b| a * b)).collect();
            out.push((i, j, row));
        }
    }
    out
}

/// The maximal tensor product as a polytope, by enumerating the extreme
/// rays of `{M : rᵀ M s ≥ 0}` and normalising them on the unit.
pub fn max_tensor(k1: &Polytope, k2: &Polytope) -> Result<TensorPolytope> {
    let (p, q) = tensor_shape(k1, k2);
    if p * q > MAX_TENSOR_COORDS {
        return Err(Error::ScaleExceeded(format!(
            "maximal tensor product enumeration supports (d₁+1)(d₂+1) ≤ {MAX_TENSOR_COORDS}, got {}",
            p * q
        )));
    }
    let r1 = positive_ray_generators(k1)?;
    let r2 = positive_ray_generators(k2)?;
    let rows: Vec<Vec<f64>> = ray_pair_rows(&r1, &r2).into_iter().map(|(_, _, r)| r).collect();
    let rays = extreme_rays(&rows, p * q)?;
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for ray in rays {
        let unit = ray[p * q - 1];
        if unit <= 1e-12 {
            return Err(Error::InvalidInput("maximal cone ray vanishes on the unit".into()));
        }
        let v: Vec<f64> = ray.iter().map(|x| x / unit).collect();
        if !vertices.iter().any(|w| distance(w, &v) < 1e-9) {
            vertices.push(v);
        }
    }
    Ok(TensorPolytope {
        rows: p,
        cols: q,
        polytope: Polytope::new(p * q, vertices)?,
    })
}

fn check_shape(phi: &TensorFunctional, k1: &Polytope, k2: &Polytope) -> Result<()> {
    let expected = tensor_shape(k1, k2);
    if phi.shape() != expected {
        return Err(Error::DimensionMismatch {
            expected: expected.0 * expected.1,
            found: phi.shape().0 * phi.shape().1,
        });
    }
    Ok(())
}

pub fn max_tensor_membership(
    phi: &TensorFunctional,
    k1: &Polytope,
    k2: &Polytope,
    tol: f64,
) -> Result<Verdict> {
    check_shape(phi, k1, k2)?;
    let r1 = positive_ray_generators(k1)?;
    let r2 = positive_ray_generators(k2)?;
    let mut best: Option<RayPairCertificate> = None;
    for r in &r1.rays {
        for s in &r2.rays {
            let value = phi.pair(r, s);
            if best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(RayPairCertificate {
                    left_ray: r.clone(),
                    right_ray: s.clone(),
                    value,
                });
            }
        }
    }
    let cert = best.expect("ray cones are nonempty");
    let status = if cert.value >= -tol { Status::In } else { Status::Out };
    Ok(Verdict::new(status, Certificate::RayPairs(cert)))
}

pub fn min_tensor_membership(
    phi: &TensorFunctional,
    k1: &Polytope,
    k2: &Polytope,
    tol: f64,
) -> Result<Verdict> {
    check_shape(phi, k1, k2)?;
    let min = min_tensor(k1, k2);
    convex_membership(&phi.flatten(), &min.polytope.vertices, tol)
}

/// Membership of `y` in `conv(vertices)`: minimises the `ℓ₁` residual of a
/// convex combination; `Out` carries a separating hyperplane.
pub(crate) fn convex_membership(y: &[f64], vertices: &[Vec<f64>], tol: f64) -> Result<Verdict> {
    let d = y.len();
    let k = vertices.len();
    // Variables: weights (k), positive and negative residuals (d each).
    let mut objective = vec![0.0; k + 2 * d];
    objective[k..].iter_mut().for_each(|v| *v = 1.0);
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    for i in 0..d {
        let mut row = vec![0.0; k + 2 * d];
        for (j, v) in vertices.iter().enumerate() {
            row[j] = v[i];
        }
        row[k + i] = 1.0;
        row[k + d + i] = -1.0;
        lp.constrain(row, Relation::Eq, y[i]);
    }
    let mut sum = vec![0.0; k + 2 * d];
    sum[..k].iter_mut().for_each(|v| *v = 1.0);
    lp.constrain(sum, Relation::Eq, 1.0);
    let (x, residual) = match lp.solve()? {
        LpOutcome::Optimal { x, objective } => (x, objective),
        other => return Err(Error::Lp(format!("membership LP: {other:?}"))),
    };
    if residual <= tol {
        return Ok(Verdict::new(
            Status::In,
            Certificate::ConvexWeights(ConvexWeights {
                weights: x[..k].to_vec(),
                residual,
            }),
        ));
    }
    let hyperplane = separating_hyperplane(y, vertices)?;
    Ok(Verdict::new(
        Status::Out,
        Certificate::SeparatingHyperplane(hyperplane),
    ))
}

/// Maximises `⟨h, y⟩ − c` subject to `⟨h, v⟩ ≤ c` at every vertex and
/// `|h_i| ≤ 1`. Coordinates that are constant over the vertices and `y`
/// are left out of `h`.
fn separating_hyperplane(y: &[f64], vertices: &[Vec<f64>]) -> Result<SeparatingHyperplane> {
    let d = y.len();
    let active: Vec<usize> = (0..d)
        .filter(|&i| {
            let c = vertices[0][i];
            vertices.iter().any(|v| (v[i] - c).abs() > 1e-12) || (y[i] - c).abs() > 1e-12
        })
        .collect();
    let a = active.len();
    let mut objective: Vec<f64> = active.iter().map(|&i| y[i]).collect();
    objective.push(-1.0);
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for j in 0..=a {
        lp.set_free(j);
    }
    for v in vertices {
        let mut row: Vec<f64> = active.iter().map(|&i| v[i]).collect();
        row.push(-1.0);
        lp.constrain(row, Relation::Le, 0.0);
    }
    for j in 0..a {
        let mut row = vec![0.0; a + 1];
        row[j] = 1.0;
        lp.constrain(row.clone(), Relation::Le, 1.0);
        lp.constrain(row, Relation::Ge, -1.0);
    }
    match lp.solve()? {
        LpOutcome::Optimal { x, objective } => {
            let mut normal = vec![0.0; d];
            for (j, &i) in active.iter().enumerate() {
                normal[i] = x[j];
            }
            Ok(SeparatingHyperplane {
                normal,
                offset: x[a],
                margin: objective,
            })
        }
        other => Err(Error::Lp(format!("separation LP: {other:?}"))),
    }
}

/// A point of the maximal tensor product outside the minimal one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapPoint {
    pub functional: TensorFunctional,
    /// `Out` verdict with a separating hyperplane.
    pub min_certificate: Verdict,
    /// `In` verdict with the smallest ray-pair value.
    pub max_certificate: Verdict,
}

/// Sweeps the vertices of the maximal tensor product and returns the one
/// farthest outside the minimal tensor product (largest separation margin),
/// or `None` when every vertex lies in it, i.e. the two products coincide.
pub fn barker_gap(k1: &Polytope, k2: &Polytope) -> Result<Option<GapPoint>> {
    let max = max_tensor(k1, k2)?;
    let min = min_tensor(k1, k2);
    let candidates = max.functionals();
    let verdicts: Vec<Verdict> = candidates
        .par_iter()
        .map(|phi| convex_membership(&phi.flatten(), &min.polytope.vertices, 1e-9))
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in verdicts.iter().enumerate() {
        if let Certificate::SeparatingHyperplane(h) = &v.certificate {
            if best.is_none_or(|(_, m)| h.margin > m) {
                best = Some((i, h.margin));
            }
        }
    }
    let Some((i, _)) = best else {
        return Ok(None);
    };
    let functional = candidates[i].clone();
    let max_certificate = max_tensor_membership(&functional, k1, k2, 1e-9)?;
    Ok(Some(GapPoint {
        functional,
        min_certificate: verdicts[i].clone(),
        max_certificate,
    }))
}

/// Smallest `r ≥ 0` such that every vertex of `outer` equals
/// `(r+1)x − ry` with `x, y ∈ inner`.
pub fn relative_bound(inner: &Polytope, outer: &Polytope) -> Result<f64> {
    if inner.ambient_dim != outer.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: inner.ambient_dim,
            found: outer.ambient_dim,
        });
    }
    let mut joint = inner.vertices.clone();
    joint.extend(outer.vertices.iter().cloned());
    if affine_dimension(&joint) != inner.affine_dimension() {
        return Err(Error::AffineHullMismatch(format!(
            "outer set spans {} affine dimensions beyond the inner hull of dimension {}",
            affine_dimension(&joint) - inner.affine_dimension(),
            inner.affine_dimension()
        )));
    }
    let verts = inner.chart_vertices();
    let bounds: Vec<f64> = outer
        .vertices
        .par_iter()
        .map(|y| vertex_relative_bound(&verts, &inner.to_chart(y)))
        .collect::<Result<_>>()?;
    Ok(bounds.into_iter().fold(0.0, f64::max))
}

fn vertex_relative_bound(verts: &[Vec<f64>], y: &[f64]) -> Result<f64> {
    let k = verts.len();
    let d = y.len();
    // Variables α (k) and β (k): Σα v − Σβ v = y, Σα − Σβ = 1, minimise Σβ.
    let mut objective = vec![0.0; 2 * k];
    objective[k..].iter_mut().for_each(|v| *v = 1.0);
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    for i in 0..d {
        let mut row = vec![0.0; 2 * k];
        for (j, v) in verts.iter().enumerate() {
            row[j] = v[i];
            row[k + j] = -v[i];
        }
        lp.constrain(row, Relation::Eq, y[i]);
    }
    let mut row = vec![1.0; 2 * k];
    row[k..].iter_mut().for_each(|v| *v = -1.0);
    lp.constrain(row, Relation::Eq, 1.0);
    match lp.solve()? {
        LpOutcome::Optimal { objective, .. } => Ok(objective.max(0.0)),
        other => Err(Error::Lp(format!("relative bound LP: {other:?}"))),
    }
}

/// Norm of `φ` dual to the order-unit norm `sup |F|` over vertex pairs:
/// `max ⟨F, φ⟩` subject to `|⟨F, V⟩| ≤ 1` at every minimal-product vertex.
pub fn functional_norm(phi: &TensorFunctional, min: &TensorPolytope) -> Result<f64> {
    let y = phi.flatten();
    let d = y.len();
    let mut lp = LinearProgram::new(Sense::Maximize, y);
    for j in 0..d {
        lp.set_free(j);
    }
    for v in &min.polytope.vertices {
        lp.constrain(v.clone(), Relation::Le, 1.0);
        lp.constrain(v.clone(), Relation::Ge, -1.0);
    }
    match lp.solve()? {
        LpOutcome::Optimal { objective, .. } => Ok(objective),
        other => Err(Error::Lp(format!("norm LP: {other:?}"))),
    }
}

/// Whether the given points are affinely independent.
pub fn affinely_independent(points: &[Vec<f64>]) -> bool {
    affine_dimension(points) + 1 == points.len()
}
