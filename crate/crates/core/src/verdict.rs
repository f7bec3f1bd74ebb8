//! Membership verdicts and the certificates that back them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::matrix::{BipartiteOperator, ProductVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    In,
    Out,
    Unknown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub certificate: Certificate,
}

impl Verdict {
    pub fn new(status: Status, certificate: Certificate) -> Self {
        Self {
            status,
            certificate,
        }
    }

    pub fn is_in(&self) -> bool {
        self.status == Status::In
    }

    pub fn is_out(&self) -> bool {
        self.status == Status::Out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    SeparableDecomposition(SeparableDecomposition),
    Witness(WitnessCertificate),
    Spectral(SpectralCertificate),
    Optimizer(OptimizerTrace),
    Ppt(PptCertificate),
    ConvexWeights(ConvexWeights),
    SeparatingHyperplane(SeparatingHyperplane),
    RayPairs(RayPairCertificate),
}

/// `Σ weights[k] · |factors[k]⟩⟨factors[k]|` reproduces the input up to
/// `residual` in Frobenius norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparableDecomposition {
    pub weights: Vec<f64>,
    pub factors: Vec<ProductVector>,
    pub residual: f64,
}

impl SeparableDecomposition {
    pub fn reconstruct(&self) -> Option<BipartiteOperator> {
        let first = self.factors.first()?;
        let (n, m) = (first.left.len(), first.right.len());
        let mut acc = BipartiteOperator::zeros(n, m);
        for (w, f) in self.weights.iter().zip(&self.factors) {
            acc = acc.add(&f.projector().scale(*w)).ok()?;
        }
        Some(acc)
    }
}

/// A block-positive `witness` with `value = ⟨input, witness⟩`. A negative
/// value certifies that the input is not separable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub witness: BipartiteOperator,
    pub value: f64,
}

/// The extremal eigenpair that decided a spectral test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralCertificate {
    pub eigenvalue: f64,
    pub eigenvector: Vec<Complex64>,
}

/// Record of a multistart search over product vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub best_value: f64,
    pub best_vector: ProductVector,
    pub best_start: usize,
    pub seed: u64,
    pub starts: usize,
    pub steps: usize,
    pub grid_points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PptCertificate {
    pub min_eigenvalue: f64,
    pub min_partial_transpose_eigenvalue: f64,
    /// True when PPT is known to characterise separability at these dimensions.
    pub exact: bool,
}

/// Convex weights over a vertex list reproducing a point up to `residual`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexWeights {
    pub weights: Vec<f64>,
    pub residual: f64,
}

/// `⟨normal, v⟩ ≤ offset` for every vertex `v` of the polytope while
/// `⟨normal, x⟩ = offset + margin` at the rejected point `x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparatingHyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub margin: f64,
}

/// The extreme-ray pair attaining the smallest value `rᵀ Φ s`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RayPairCertificate {
    pub left_ray: Vec<f64>,
    pub right_ray: Vec<f64>,
    pub value: f64,
}
