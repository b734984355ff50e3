//! A desk-scale laboratory for arithmetic over the Gaussian integers and the
//! prime geodesic theorem on the Picard-type orbifold PSL₂(Z[i])\H³.

// Range checks are written as `!(x > 0.0)` on purpose: the negation also
// rejects NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characters;
pub mod error;
pub mod exponents;
pub mod gaussian;
pub mod geodesics;
pub mod kloosterman;
pub mod lfunctions;
pub mod numeric;
pub mod par;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use gaussian::GaussianInt;
