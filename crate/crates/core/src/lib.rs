//! Landau–de Gennes Q-tensor energies for nematic liquid crystals: tensor
//! algebra, elastic and bulk densities, coercivity audits and a
//! finite-difference relaxation solver.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bulk;
pub mod densities;
pub mod error;
pub mod qtensor;
pub mod sampling;
pub mod solver;

pub use error::{Error, Result};
pub use qtensor::{Coords5, EigenSystem, MaterialConstants, QTensor};
