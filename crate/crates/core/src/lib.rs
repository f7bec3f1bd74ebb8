//! Finite-dimensional tensor products of cones and state spaces.
//!
//! The crate is organised around the three nested cones that live inside
//! `M_n ⊗ M_m`:
//!
//! ```text
//! separable (M_n⁺ ⊗ M_m⁺)  ⊆  PSD ((M_n ⊗ M_m)⁺)  ⊆  block-positive (M_n⁺ ⊗̂ M_m⁺)
//! ```
//!
//! together with the polytope analogue (minimal and maximal tensor products
//! of compact convex sets given by vertex lists), the positive-map calculus
//! relating block-positive operators to positive maps, and a handful of
//! explicit constructions on small C*-algebras.
//!
//! Every membership oracle returns a [`Verdict`] carrying a certificate that
//! can be checked independently of the code path that produced it.
//!
//! Index convention: for a bipartite operator on `ℂⁿ ⊗ ℂᵐ` the basis vector
//! `e_i ⊗ e_k` has index `i·m + k` (the first factor is the outer index).

pub mod algebra;
pub mod cones;
mod dd;
pub mod error;
pub mod kappa;
pub mod lp;
pub mod maps;
pub mod matrix;
pub mod polytopes;
pub mod reproduce;
pub mod sampling;
pub mod verdict;

pub use error::{Error, Result};
pub use matrix::{BipartiteOperator, HermitianOperator, ProductVector, Side};
pub use verdict::{Certificate, Status, Verdict};
