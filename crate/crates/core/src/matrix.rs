//! Dense Hermitian and bipartite operators.
//!
//! All operators are stored as `DMatrix<Complex64>`. Hermiticity is enforced
//! on ingestion by symmetrising `(A + A*)/2`, after checking that the input
//! deviates from its adjoint by no more than [`HERMITIAN_TOL`] (relative to
//! the largest entry, floored at one).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest tolerated `|A - A*|` entry, relative to `max(1, max |A_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A finite-dimensional self-adjoint complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct HermitianOperator {
    entries: CMatrix,
}

/// Eigenvalues in ascending order with matching unit eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }
}

impl HermitianOperator {
    /// Validates and symmetrises `entries`.
    pub fn new(entries: CMatrix) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let scale = entries.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        let mut deviation = 0.0_f64;
        for i in 0..rows {
            for j in i..rows {
                let d = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                deviation = deviation.max(d);
            }
        }
        if deviation > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(deviation));
        }
        Ok(Self::symmetrized(entries))
    }

    /// Symmetrises without the deviation guard. Only for matrices that are
    /// Hermitian by construction.
    pub(crate) fn symmetrized(entries: CMatrix) -> Self {
        let adj = entries.adjoint();
        Self {
            entries: (entries + adj).unscale(2.0),
        }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::NotSquare {
                rows: d,
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        Self::new(CMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let mut entries = CMatrix::zeros(d, d);
        for (i, &v) in values.iter().enumerate() {
            entries[(i, i)] = Complex64::new(v, 0.0);
        }
        Self { entries }
    }

    /// The rank-one projector `|v⟩⟨v|` (not normalised).
    pub fn projector(v: &CVector) -> Self {
        Self {
            entries: v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            entries: self.entries.scale(c),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries - &other.entries,
        })
    }

    /// Real trace inner product `Tr(B* A) = Tr(B A)`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨v, A v⟩` for an arbitrary (not necessarily unit) vector.
    pub fn expectation(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.entries * v)).re
    }

    pub fn eigen(&self) -> Spectrum {
        let eig = self.entries.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(self.dim(), self.dim(), |i, k| {
            eig.eigenvectors[(i, order[k])]
        });
        Spectrum { values, vectors }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// Schatten 1-norm: sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|l| l.abs()).sum()
    }

    /// Largest absolute eigenvalue.
    pub fn operator_norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |acc, l| acc.max(l.abs()))
    }

    /// Number of eigenvalues whose magnitude exceeds `tol · max |λ|`.
    pub fn rank(&self, tol: f64) -> usize {
        let values = self.eigenvalues();
        let top = values.iter().fold(0.0_f64, |a, l| a.max(l.abs()));
        if top == 0.0 {
            return 0;
        }
        values.iter().filter(|l| l.abs() > tol * top).count()
    }

    /// Applies a real function to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        let spec = self.eigen();
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for (k, &l) in spec.values.iter().enumerate() {
            let v = spec.vectors.column(k);
            out += (v * v.adjoint()).scale(f(l));
        }
        Self::symmetrized(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs_diff(&self.entries, &other.entries)
    }
}

/// A Hermitian operator on `ℂⁿ ⊗ ℂᵐ`, row `(i, k)` stored at `i·m + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct BipartiteOperator {
    n: usize,
    m: usize,
    op: HermitianOperator,
}

impl BipartiteOperator {
    pub fn new(n: usize, m: usize, op: HermitianOperator) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidInput("factor dimensions must be positive".into()));
        }
        check_dim(n * m, op.dim())?;
        Ok(Self { n, m, op })
    }

    pub(crate) fn from_matrix_unchecked(n: usize, m: usize, entries: CMatrix) -> Self {
        debug_assert_eq!(entries.nrows(), n * m);
        Self {
            n,
            m,
            op: HermitianOperator::symmetrized(entries),
        }
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            op: HermitianOperator::identity(n * m),
        }
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            op: HermitianOperator::zeros(n * m),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn entries(&self) -> &CMatrix {
        self.op.entries()
    }

    pub fn index(&self, i: usize, k: usize) -> usize {
        i * self.m + k
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            m: self.m,
            op: self.op.scale(c),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(Self {
            n: self.n,
            m: self.m,
            op: self.op.add(&other.op)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(Self {
            n: self.n,
            m: self.m,
            op: self.op.sub(&other.op)?,
        })
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_dims(other)?;
        self.op.inner(&other.op)
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dims() != other.dims() {
            return f64::INFINITY;
        }
        self.op.max_abs_diff(&other.op)
    }

    pub(crate) fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::InvalidInput(format!(
                "bipartite dimensions differ: {:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(())
    }
}

/// A pure product vector `φ ⊗ ψ` with unit factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductVector {
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
}

impl ProductVector {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(left: Vec<Complex64>, right: Vec<Complex64>) -> Result<Self> {
        for v in [&left, &right] {
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > Self::NORM_TOL {
                return Err(Error::NotNormalized(norm));
            }
        }
        Ok(Self { left, right })
    }

    /// Normalises both factors. Zero factors are rejected.
    pub fn normalized(left: &CVector, right: &CVector) -> Result<Self> {
        let (ln, rn) = (left.norm(), right.norm());
        if ln == 0.0 || rn == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(Self {
            left: left.unscale(ln).iter().copied().collect(),
            right: right.unscale(rn).iter().copied().collect(),
        })
    }

    pub fn left_vector(&self) -> CVector {
        CVector::from_column_slice(&self.left)
    }

    pub fn right_vector(&self) -> CVector {
        CVector::from_column_slice(&self.right)
    }

    pub fn kron(&self) -> CVector {
        kron_vec(&self.left_vector(), &self.right_vector())
    }

    pub fn projector(&self) -> BipartiteOperator {
        BipartiteOperator {
            n: self.left.len(),
            m: self.right.len(),
            op: HermitianOperator::projector(&self.kron()),
        }
    }
}

/// Wire format: `{"dim": d, "entries": [[re, im], ...]}` row-major, plus
/// `"n"` and `"m"` for bipartite operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl OperatorJson {
    fn matrix(&self) -> Result<CMatrix> {
        check_dim(self.dim * self.dim, self.entries.len())?;
        let d = self.dim;
        Ok(CMatrix::from_fn(d, d, |i, j| {
            let [re, im] = self.entries[i * d + j];
            Complex64::new(re, im)
        }))
    }

    fn from_matrix(a: &CMatrix) -> Self {
        let d = a.nrows();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = a[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Self {
            dim: d,
            entries,
            n: None,
            m: None,
        }
    }
}

impl TryFrom<OperatorJson> for HermitianOperator {
    type Error = Error;

    fn try_from(json: OperatorJson) -> Result<Self> {
        HermitianOperator::new(json.matrix()?)
    }
}

impl From<HermitianOperator> for OperatorJson {
    fn from(op: HermitianOperator) -> Self {
        OperatorJson::from_matrix(op.entries())
    }
}

impl TryFrom<OperatorJson> for BipartiteOperator {
    type Error = Error;

    fn try_from(json: OperatorJson) -> Result<Self> {
        let (n, m) = match (json.n, json.m) {
            (Some(n), Some(m)) => (n, m),
            _ => {
                return Err(Error::InvalidInput(
                    "bipartite operator requires \"n\" and \"m\"".into(),
                ))
            }
        };
        let op = HermitianOperator::new(json.matrix()?)?;
        BipartiteOperator::new(n, m, op)
    }
}

impl From<BipartiteOperator> for OperatorJson {
    fn from(x: BipartiteOperator) -> Self {
        let mut json = OperatorJson::from_matrix(x.entries());
        json.n = Some(x.n);
        json.m = Some(x.m);
        json
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let m = b.len();
    CVector::from_fn(a.len() * m, |r, _| a[r / m] * b[r % m])
}

pub fn kron_mat(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Coordinates of a Hermitian `d×d` matrix in the orthonormal basis
/// `{E_ii} ∪ {(E_ij+E_ji)/√2} ∪ {i(E_ij−E_ji)/√2}` (pairs `i<j` in
/// lexicographic order). The map is an isometry for the Frobenius norm.
pub fn hermitian_coordinates(a: &CMatrix) -> Vec<f64> {
    let d = a.nrows();
    let mut out = Vec::with_capacity(d * d);
    out.extend((0..d).map(|i| a[(i, i)].re));
    let pairs = upper_pairs(d);
    out.extend(pairs.iter().map(|&(i, j)| std::f64::consts::SQRT_2 * a[(i, j)].re));
    out.extend(pairs.iter().map(|&(i, j)| std::f64::consts::SQRT_2 * a[(i, j)].im));
    out
}

/// Inverse of [`hermitian_coordinates`].
pub fn from_hermitian_coordinates(d: usize, coords: &[f64]) -> CMatrix {
    assert_eq!(coords.len(), d * d);
    let mut a = CMatrix::zeros(d, d);
    for i in 0..d {
        a[(i, i)] = Complex64::new(coords[i], 0.0);
    }
    let pairs = upper_pairs(d);
    let p = pairs.len();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let z = Complex64::new(coords[d + k], coords[d + p + k]) / std::f64::consts::SQRT_2;
        a[(i, j)] = z;
        a[(j, i)] = z.conj();
    }
    a
}

/// The Hermitian basis element with coordinate index `k`.
pub fn hermitian_basis_element(d: usize, k: usize) -> CMatrix {
    let mut coords = vec![0.0; d * d];
    coords[k] = 1.0;
    from_hermitian_coordinates(d, &coords)
}

fn upper_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .collect()
}

/// Matrix unit `E_ij` of size `d`.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut e = CMatrix::zeros(d, d);
    e[(i, j)] = ONE;
    e
}

/// Kronecker product with the global index convention.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> BipartiteOperator {
    BipartiteOperator {
        n: a.dim(),
        m: b.dim(),
        op: HermitianOperator::symmetrized(a.entries().kronecker(b.entries())),
    }
}

/// Transposes the chosen tensor factor.
pub fn partial_transpose(x: &BipartiteOperator, side: Side) -> BipartiteOperator {
    let (n, m) = x.dims();
    let src = x.entries();
    let out = CMatrix::from_fn(n * m, n * m, |r, c| {
        let (i, k) = (r / m, r % m);
        let (j, l) = (c / m, c % m);
        match side {
            Side::Right => src[(i * m + l, j * m + k)],
            Side::Left => src[(j * m + k, i * m + l)],
        }
    });
    BipartiteOperator {
        n,
        m,
        op: HermitianOperator { entries: out },
    }
}

/// Traces out the chosen factor: `Right` keeps the `n×n` left marginal.
pub fn partial_trace(x: &BipartiteOperator, side: Side) -> HermitianOperator {
    let (n, m) = x.dims();
    let src = x.entries();
    let out = match side {
        Side::Right => CMatrix::from_fn(n, n, |i, j| {
            (0..m).map(|k| src[(i * m + k, j * m + k)]).sum()
        }),
        Side::Left => CMatrix::from_fn(m, m, |k, l| {
            (0..n).map(|i| src[(i * m + k, i * m + l)]).sum()
        }),
    };
    HermitianOperator::symmetrized(out)
}

pub fn trace_norm(a: &HermitianOperator) -> f64 {
    a.trace_norm()
}

pub fn min_eigenvalue(a: &HermitianOperator) -> f64 {
    a.min_eigenvalue()
}

/// The flip `S⁽ᵐ⁾ = Σ E_ij ⊗ E_ji` on `ℂᵐ ⊗ ℂᵐ`.
pub fn swap_operator(m: usize) -> BipartiteOperator {
    let mut s = CMatrix::zeros(m * m, m * m);
    for i in 0..m {
        for j in 0..m {
            s[(i * m + j, j * m + i)] = ONE;
        }
    }
    BipartiteOperator {
        n: m,
        m,
        op: HermitianOperator { entries: s },
    }
}

/// `H⁽ᵐ⁾ = Σ E_ij ⊗ E_ij`, i.e. `m` times the projector onto `m^{-1/2} Σ e_j ⊗ e_j`.
pub fn h_operator(m: usize) -> BipartiteOperator {
    let mut h = CMatrix::zeros(m * m, m * m);
    for i in 0..m {
        for j in 0..m {
            h[(i * m + i, j * m + j)] = ONE;
        }
    }
    BipartiteOperator {
        n: m,
        m,
        op: HermitianOperator { entries: h },
    }
}

/// The maximally entangled unit vector `m^{-1/2} Σ e_j ⊗ e_j`.
pub fn maximally_entangled_vector(m: usize) -> CVector {
    let mut v = CVector::from_element(m * m, ZERO);
    let amp = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
    for j in 0..m {
        v[j * m + j] = amp;
    }
    v
}

/// `ρ₀⁽ᵐ⁾(X) = ⟨Ω, X Ω⟩` for the maximally entangled vector Ω.
pub fn rho0_apply(m: usize, x: &BipartiteOperator) -> Result<f64> {
    if x.dims() != (m, m) {
        return Err(Error::InvalidInput(format!(
            "maximally entangled functional on {m}⊗{m} applied to {:?}",
            x.dims()
        )));
    }
    Ok(x.op().expectation(&maximally_entangled_vector(m)))
}

/// Embeds `S⁽ᵏ⁾` into `ℂⁿ ⊗ ℂᵐ` on the span of the first `k` basis vectors
/// of each factor, `k ≤ min(n, m)`.
pub fn embedded_swap(n: usize, m: usize, k: usize) -> BipartiteOperator {
    assert!(k <= n.min(m));
    let mut s = CMatrix::zeros(n * m, n * m);
    for i in 0..k {
        for j in 0..k {
            s[(i * m + j, j * m + i)] = ONE;
        }
    }
    BipartiteOperator::from_matrix_unchecked(n, m, s)
}
