// Negated comparisons like `!(b > 0.0)` are used on purpose: they reject NaN
// along with the out-of-range values, which `b <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerical toolkit for the limit cycles of the Josephson equation.
//!
//! The equation is studied in two charts: a Liénard system on the cylinder
//! (phase space for contractible, first-kind cycles) and an Abel equation on
//! the circle (second-kind cycles winding once around). The crate locates and
//! classifies both kinds, probes stability at zero and at infinity, estimates
//! the saddle-connection bifurcation curves, and counts cycles across
//! parameter space.

pub mod abel;
pub mod census;
pub mod error;
pub mod fit;
pub mod integrate;
pub mod planar;
pub mod roots;

pub use abel::{Params, SignRegion};
pub use error::{Error, Result};
pub use integrate::IntegratorConfig;
