//! Linear instability of radial vortices in the plane.

// `!(x > 0.0)` is the NaN-rejecting form used throughout the checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod greens;
pub mod homotopy;
pub mod grid;
pub mod mesh;
pub mod ode;
pub mod oracle;
pub mod physical;
pub mod par;
pub mod poly;
pub mod profile;
pub mod quad;
pub mod shooting;
pub mod sturm;

pub use error::{Error, Result};
