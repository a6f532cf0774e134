//! Tricomi confluent hypergeometric function, weighted Hankel determinants
//! and the total-positivity classification of the Beta-Gamma product kernel.
//!
//! Modules are layered bottom-up: [`specialfn`] and [`quad`] provide the
//! numerics, [`linalg`] the determinant engine, and the remaining modules
//! build the determinant families, kernels, distribution algebra and
//! inequality checks on top of them.

pub mod betagamma;
pub mod error;
pub mod hankel;
pub mod linalg;
pub mod quad;
pub mod report;
pub mod specialfn;
pub mod staircase;
pub mod tpkernel;
pub mod turan;

pub use error::{Error, Result};
