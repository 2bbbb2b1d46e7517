//! Graded modules over `Q[c_1..c_k]` with generators in degree -2.
//!
//! Cohomology `H^{2i}` sits in degree `-2i` and homology `H_{2i}` in `+2i`.
//! A homomorphism of degree `n` sends `M_d` to `N_{d+n}`.

pub mod homological;
pub mod linalg;
pub mod module;
pub mod poly;

pub use homological::{
    ext_over_poly, ext_via_matlis, graded_dual, hom_dims, hom_into_dual, koszul_complex, ExtTable, FreeResolution,
    GradedMap,
};
pub use linalg::{q, QMat, Q};
pub use module::{Extent, FpModule, GradedModule, Multiplicative};
pub use poly::{Poly, PolyRing};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("window insufficient (window {window}): {detail}")]
    WindowInsufficient { window: i64, detail: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed module: {0}")]
    Malformed(String),
    #[error("ring mismatch: {0} vs {1} generators")]
    RingMismatch(usize, usize),
}

#[cfg(test)]
mod tests;
