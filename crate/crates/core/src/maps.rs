//! Linear maps between matrix algebras and their Choi/Jamiolkowski operators.
//!
//! A [`MatrixMap`] from `M_n` to `M_m` is stored by its action on the
//! orthonormal Hermitian basis (see [`hermitian_coordinates`]), i.e. as a real
//! `m²×n²` matrix. Only Hermiticity-preserving maps are representable; they
//! act on arbitrary complex matrices through `A = H₁ + iH₂`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{is_block_positive_with, OptimizerConfig, OPTIMIZER_TOL};
use crate::error::{Error, Result};
use crate::matrix::{
    from_hermitian_coordinates, h_operator, hermitian_basis_element, hermitian_coordinates,
    matrix_unit, rho0_apply, BipartiteOperator, CMatrix, HermitianOperator,
};
use crate::sampling::ginibre;
use crate::verdict::{Status, Verdict};

const UNITAL_TOL: f64 = 1e-9;
const NORMALIZATION_TOL: f64 = 1e-9;
const RANGE_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapJson", into = "MapJson")]
pub struct MatrixMap {
    n: usize,
    m: usize,
    coefficients: DMatrix<f64>,
}

/// JSON form: `coefficients` has `m²` rows of length `n²`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapJson {
    pub n: usize,
    pub m: usize,
    pub coefficients: Vec<Vec<f64>>,
}

impl TryFrom<MapJson> for MatrixMap {
    type Error = Error;

    fn try_from(j: MapJson) -> Result<Self> {
        if j.n == 0 || j.m == 0 {
            return Err(Error::InvalidInput("map dimensions must be positive".into()));
        }
        if j.coefficients.len() != j.m * j.m {
            return Err(Error::DimensionMismatch {
                expected: j.m * j.m,
                found: j.coefficients.len(),
            });
        }
        for row in &j.coefficients {
            if row.len() != j.n * j.n {
                return Err(Error::DimensionMismatch {
                    expected: j.n * j.n,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite coefficient".into()));
            }
        }
        let c = DMatrix::from_fn(j.m * j.m, j.n * j.n, |r, c| j.coefficients[r][c]);
        MatrixMap::from_coefficients(j.n, j.m, c)
    }
}

impl From<MatrixMap> for MapJson {
    fn from(map: MatrixMap) -> Self {
        let coefficients = map
            .coefficients
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        MapJson {
            n: map.n,
            m: map.m,
            coefficients,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitalityReport {
    pub image_of_identity: HermitianOperator,
    pub is_unital: bool,
    /// `m⁻¹ Tr Φ(I_n)`.
    pub normalized_trace_of_image: f64,
}

impl MatrixMap {
    pub fn from_coefficients(n: usize, m: usize, coefficients: DMatrix<f64>) -> Result<Self> {
        if coefficients.shape() != (m * m, n * n) {
            return Err(Error::DimensionMismatch {
                expected: m * m * n * n,
                found: coefficients.len(),
            });
        }
        Ok(Self { n, m, coefficients })
    }

    /// Builds the map from its action on complex `n×n` matrices. `f` must
    /// send Hermitian matrices to Hermitian `m×m` matrices.
    pub fn from_fn(n: usize, m: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let mut coefficients = DMatrix::zeros(m * m, n * n);
        for k in 0..n * n {
            let image = f(&hermitian_basis_element(n, k));
            let coords = hermitian_coordinates(&image);
            coefficients.set_column(k, &DVector::from_vec(coords));
        }
        Self { n, m, coefficients }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            m: n,
            coefficients: DMatrix::identity(n * n, n * n),
        }
    }

    pub fn transpose(n: usize) -> Self {
        Self::from_fn(n, n, |a| a.transpose())
    }

    /// `A ↦ Tr(A)·I − A`.
    pub fn reduction(n: usize) -> Self {
        Self::from_fn(n, n, |a| CMatrix::identity(n, n) * a.trace() - a)
    }

    /// `A ↦ c · n⁻¹Tr(A) · I_m`.
    pub fn trace_times_identity(n: usize, m: usize, c: f64) -> Self {
        Self::from_fn(n, m, |a| {
            CMatrix::identity(m, m) * (a.trace() * Complex64::new(c / n as f64, 0.0))
        })
    }

    /// `A ↦ Σ K A K*`.
    pub fn from_kraus(n: usize, kraus: &[CMatrix]) -> Result<Self> {
        let m = kraus.first().map_or(n, |k| k.nrows());
        for k in kraus {
            if k.shape() != (m, n) {
                return Err(Error::DimensionMismatch {
                    expected: m * n,
                    found: k.len(),
                });
            }
        }
        Ok(Self::from_fn(n, m, |a| {
            kraus
                .iter()
                .fold(CMatrix::zeros(m, m), |acc, k| acc + k * a * k.adjoint())
        }))
    }

    /// Unital positive map `M_n → M_m`: the transpose of the top-left
    /// `k×k` corner (`k = min(n,m)`) plus the normalised trace on the rest.
    pub fn corner_transpose(n: usize, m: usize) -> Self {
        let k = n.min(m);
        Self::from_fn(n, m, |a| {
            let mut out = CMatrix::identity(m, m) * (a.trace() / n as f64);
            for i in 0..k {
                out[(i, i)] = Complex64::new(0.0, 0.0);
            }
            for i in 0..k {
                for j in 0..k {
                    out[(i, j)] = a[(j, i)];
                }
            }
            out
        })
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.m
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coefficients
    }

    pub fn apply(&self, a: &HermitianOperator) -> Result<HermitianOperator> {
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.dim(),
            });
        }
        Ok(HermitianOperator::symmetrized(self.apply_hermitian(a.entries())))
    }

    fn apply_hermitian(&self, a: &CMatrix) -> CMatrix {
        let x = DVector::from_vec(hermitian_coordinates(a));
        let y = &self.coefficients * x;
        from_hermitian_coordinates(self.m, y.as_slice())
    }

    /// Complex-linear extension to arbitrary `n×n` matrices.
    pub fn apply_matrix(&self, a: &CMatrix) -> CMatrix {
        let half = Complex64::new(0.5, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let h1 = (a + a.adjoint()) * half;
        let h2 = (a - a.adjoint()) * (half / i);
        self.apply_hermitian(&h1) + self.apply_hermitian(&h2) * i
    }

    pub fn compose(&self, inner: &MatrixMap) -> Result<Self> {
        if inner.m != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: inner.m,
            });
        }
        Ok(Self {
            n: inner.n,
            m: self.m,
            coefficients: &self.coefficients * &inner.coefficients,
        })
    }

    pub fn add(&self, other: &MatrixMap) -> Result<Self> {
        if (self.n, self.m) != (other.n, other.m) {
            return Err(Error::DimensionMismatch {
                expected: self.n * self.m,
                found: other.n * other.m,
            });
        }
        Ok(Self {
            n: self.n,
            m: self.m,
            coefficients: &self.coefficients + &other.coefficients,
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            m: self.m,
            coefficients: &self.coefficients * c,
        }
    }

    pub fn max_abs_diff(&self, other: &MatrixMap) -> f64 {
        if self.coefficients.shape() != other.coefficients.shape() {
            return f64::INFINITY;
        }
        (&self.coefficients - &other.coefficients).amax()
    }

    /// `(Φ ⊗ id_k)(X)` for `X` on `ℂⁿ ⊗ ℂᵏ`.
    pub fn apply_left_tensor_identity(&self, x: &BipartiteOperator) -> Result<BipartiteOperator> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.n(),
            });
        }
        let (n, k) = x.dims();
        let m = self.m;
        let src = x.entries();
        let mut out = CMatrix::zeros(m * k, m * k);
        for p in 0..k {
            for q in 0..k {
                let block = CMatrix::from_fn(n, n, |a, b| src[(a * k + p, b * k + q)]);
                let image = self.apply_matrix(&block);
                for c in 0..m {
                    for d in 0..m {
                        out[(c * k + p, d * k + q)] = image[(c, d)];
                    }
                }
            }
        }
        BipartiteOperator::new(m, k, HermitianOperator::symmetrized(out))
    }

    pub fn unitality(&self) -> UnitalityReport {
        let image = HermitianOperator::symmetrized(self.apply_hermitian(&CMatrix::identity(self.n, self.n)));
        let is_unital = image.max_abs_diff(&HermitianOperator::identity(self.m)) < UNITAL_TOL;
        let normalized_trace_of_image = image.trace() / self.m as f64;
        UnitalityReport {
            image_of_identity: image,
            is_unital,
            normalized_trace_of_image,
        }
    }
}

/// `(Ψ ⊗ id)(H) = Σ Ψ(E_ij) ⊗ E_ij`, an operator on `ℂᵐ ⊗ ℂⁿ` (output first).
pub fn choi(psi: &MatrixMap) -> BipartiteOperator {
    transform(psi, false)
}

/// `(Ψ ⊗ id)(S) = Σ Ψ(E_ij) ⊗ E_ji`.
pub fn jamiolkowski(psi: &MatrixMap) -> BipartiteOperator {
    transform(psi, true)
}

fn transform(psi: &MatrixMap, flip: bool) -> BipartiteOperator {
    let (n, m) = (psi.n, psi.m);
    let mut out = CMatrix::zeros(m * n, m * n);
    for i in 0..n {
        for j in 0..n {
            let image = psi.apply_matrix(&matrix_unit(n, i, j));
            let (r, c) = if flip { (j, i) } else { (i, j) };
            for a in 0..m {
                for b in 0..m {
                    out[(a * n + r, b * n + c)] = image[(a, b)];
                }
            }
        }
    }
    BipartiteOperator::new(m, n, HermitianOperator::symmetrized(out)).expect("dims")
}

/// Inverse of [`choi`]: for `C` on `ℂᵐ ⊗ ℂⁿ` returns the map `M_n → M_m`.
pub fn map_from_choi(c: &BipartiteOperator) -> MatrixMap {
    let (m, n) = c.dims();
    let src = c.entries();
    MatrixMap::from_fn(n, m, |a| {
        CMatrix::from_fn(m, m, |p, q| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    acc += a[(i, j)] * src[(p * n + i, q * n + j)];
                }
            }
            acc
        })
    })
}

/// Hilbert-space adjoint for the trace pairing; the coefficient transpose.
pub fn adjoint_map(psi: &MatrixMap) -> MatrixMap {
    MatrixMap {
        n: psi.m,
        m: psi.n,
        coefficients: psi.coefficients.transpose(),
    }
}

pub fn is_positive_map(psi: &MatrixMap, tol: f64) -> Verdict {
    is_positive_map_with(psi, tol, &OptimizerConfig::default())
}

pub fn is_positive_map_with(psi: &MatrixMap, tol: f64, cfg: &OptimizerConfig) -> Verdict {
    is_block_positive_with(&jamiolkowski(psi), tol, cfg)
}

/// A linear functional `X ↦ Tr(X·density)` on bipartite operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BipartiteFunctional {
    pub density: BipartiteOperator,
}

impl BipartiteFunctional {
    pub fn apply(&self, x: &BipartiteOperator) -> Result<f64> {
        self.density.inner(x)
    }

    pub fn max_norm(&self) -> f64 {
        self.density.op().trace_norm()
    }
}

/// The functional `X ↦ ρ₀⁽ᵐ⁾((Φ ⊗ id_m)(X))` on `M_n ⊗ M_m`.
///
/// With `normalized = true`, `m⁻¹ Tr Φ(I)` must equal 1; otherwise `Φ` is
/// rescaled to satisfy it. Positivity is checked by the block-positivity
/// oracle and a found violation is an error.
pub fn state_from_positive_map(phi: &MatrixMap, normalized: bool) -> Result<BipartiteFunctional> {
    state_from_positive_map_with(phi, normalized, &OptimizerConfig::default())
}

pub fn state_from_positive_map_with(
    phi: &MatrixMap,
    normalized: bool,
    cfg: &OptimizerConfig,
) -> Result<BipartiteFunctional> {
    let phi = checked_normalization(phi, normalized)?;
    check_positive(&phi, cfg)?;
    Ok(BipartiteFunctional {
        density: state_density(&phi),
    })
}

fn state_density(phi: &MatrixMap) -> BipartiteOperator {
    choi(&adjoint_map(phi)).scale(1.0 / phi.m as f64)
}

fn checked_normalization(phi: &MatrixMap, normalized: bool) -> Result<MatrixMap> {
    let t = phi.unitality().normalized_trace_of_image;
    if normalized {
        if (t - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::MapPrecondition(format!(
                "normalised trace of the image of the identity is {t}, expected 1"
            )));
        }
        Ok(phi.clone())
    } else {
        if t <= NORMALIZATION_TOL {
            return Err(Error::MapPrecondition(format!(
                "image of the identity has normalised trace {t}"
            )));
        }
        Ok(phi.scale(1.0 / t))
    }
}

fn check_positive(phi: &MatrixMap, cfg: &OptimizerConfig) -> Result<()> {
    let v = is_positive_map_with(phi, OPTIMIZER_TOL, cfg);
    if v.status == Status::Out {
        return Err(Error::MapPrecondition("map is not positive".into()));
    }
    Ok(())
}

/// Output of [`normalize_positive_map`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalizedMap {
    /// Unital positive map.
    pub unital: MatrixMap,
    /// Functional on `M_m ⊗ M_m` with `state ∘ (unital ⊗ id) = ρ₀ ∘ (Φ ⊗ id)`.
    pub state: BipartiteFunctional,
    pub range_projection: HermitianOperator,
}

/// Rewrites `ρ₀ ∘ (Φ ⊗ id)` as `ρ ∘ (Ψ ⊗ id)` with `Ψ` unital.
///
/// With `D = Φ(I)`, `P` its range projection and `R` the inverse square root
/// of `D` on the range, `Ψ(A) = RΦ(A)R + A₁₁(I − P)` and
/// `ρ(X) = ρ₀((D^½ ⊗ I) X (D^½ ⊗ I))`.
pub fn normalize_positive_map(phi: &MatrixMap) -> Result<NormalizedMap> {
    normalize_positive_map_with(phi, &OptimizerConfig::default())
}

pub fn normalize_positive_map_with(phi: &MatrixMap, cfg: &OptimizerConfig) -> Result<NormalizedMap> {
    let phi = checked_normalization(phi, true)?;
    check_positive(&phi, cfg)?;
    let m = phi.m;
    let d = phi.unitality().image_of_identity;
    let p = d.map_spectrum(|x| if x > RANGE_CUTOFF { 1.0 } else { 0.0 });
    let r = d.map_spectrum(|x| if x > RANGE_CUTOFF { 1.0 / x.sqrt() } else { 0.0 });
    let sqrt_d = d.map_spectrum(|x| if x > RANGE_CUTOFF { x.sqrt() } else { 0.0 });
    let complement = CMatrix::identity(m, m) - p.entries();
    let (rm, phi_ref) = (r.entries().clone(), &phi);
    let unital = MatrixMap::from_fn(phi.n, m, |a| {
        &rm * phi_ref.apply_matrix(a) * &rm + &complement * a[(0, 0)]
    });
    let lift = sqrt_d.entries().kronecker(&CMatrix::identity(m, m));
    let h = h_operator(m);
    let density = HermitianOperator::symmetrized((&lift * h.entries() * &lift).unscale(m as f64));
    Ok(NormalizedMap {
        unital,
        state: BipartiteFunctional {
            density: BipartiteOperator::new(m, m, density)?,
        },
        range_projection: p,
    })
}

/// `ρ₀⁽ᵐ⁾ ∘ (Φ ⊗ id_m)` evaluated directly, without forming a density.
pub fn evaluate_rho0_after(phi: &MatrixMap, x: &BipartiteOperator) -> Result<f64> {
    rho0_apply(phi.m, &phi.apply_left_tensor_identity(x)?)
}

/// Random positive map `A ↦ Σ K A K* + Σ L Aᵀ L*` (decomposable), scaled so
/// that `m⁻¹ Tr Φ(I) = 1`.
pub fn random_positive_map<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> MatrixMap {
    let kraus: Vec<CMatrix> = (0..2).map(|_| ginibre(rng, m, n)).collect();
    let co_kraus: Vec<CMatrix> = (0..2).map(|_| ginibre(rng, m, n)).collect();
    let raw = MatrixMap::from_fn(n, m, |a| {
        let at = a.transpose();
        let mut out = CMatrix::zeros(m, m);
        for k in &kraus {
            out += k * a * k.adjoint();
        }
        for l in &co_kraus {
            out += l * &at * l.adjoint();
        }
        out
    });
    let t = raw.unitality().normalized_trace_of_image;
    raw.scale(1.0 / t)
}

/// Random unital positive map `D^{-½} Φ D^{-½}` with `Φ` from
/// [`random_positive_map`] and `D = Φ(I)` (invertible almost surely).
pub fn random_unital_positive_map<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> MatrixMap {
    let phi = random_positive_map(rng, n, m);
    let d = phi.unitality().image_of_identity;
    let r = d.map_spectrum(|x| 1.0 / x.sqrt()).into_matrix();
    MatrixMap::from_fn(n, m, |a| &r * phi.apply_matrix(a) * &r)
}
