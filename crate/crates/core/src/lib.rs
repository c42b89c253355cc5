//! Logarithmic singular formal-series solutions `u ~ a(x) t^l log t` of
//! nonlinear PDEs `∂_t^m u = f(t, x, (∂_t^j ∂_x^α u))`.
//!
//! Pipeline: [`parser`] → [`analysis`] → [`leading`] → [`fuchsian`] →
//! [`majorant`]. Everything is exact arithmetic over Gaussian rationals.

pub mod analysis;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod fuchsian;
pub mod index;
pub mod leading;
pub mod majorant;
pub mod parser;
pub mod scalar;
pub mod series;
pub mod wave;
pub mod xpoly;

pub use error::{Error, Result};
pub use index::{DerivIndex, MuIndex};
pub use parser::{parse_equation, PDESpec};
pub use scalar::{Scalar, Q};
pub use series::{LogSeries, TOrder};
pub use xpoly::{XOrder, XPoly};
