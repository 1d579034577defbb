//! Statistics of rational points on curves `y^l = P(x)` over `F_p`: window
//! counts and their residues mod `m`, restricted rectangles, character sums,
//! and the random-walk model they are compared against.

pub mod charsum;
pub mod cli;
pub mod curvewin;
pub mod error;
pub mod ffield;
pub mod polyff;
pub mod report;
pub mod rwalk;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use ffield::{Character, FieldSpec};
pub use polyff::Poly;
pub use scalar::Scalar;

/// Exact scalar used for proportions and discrepancies.
pub type Rational = num_rational::BigRational;

/// Floating scalar used for bounds, magnitudes and simulations.
pub type Real = f64;
