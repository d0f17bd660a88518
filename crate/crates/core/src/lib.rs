pub mod bruhat;
pub mod calibration;
pub mod chevalley;
pub mod construct;
pub mod diffpoly;
pub mod fixture;
pub mod gauge;
pub mod error;
pub mod linalg;
pub mod liouville_expr;
pub mod matrix;
pub mod rootsys;
pub mod scalar;
pub mod symgroup;

pub use diffpoly::{DiffPoly, JetVar, Monomial};
pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
