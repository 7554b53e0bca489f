//! Exact construction of Keane's minimal, non-uniquely-ergodic 4-interval
//! exchanges, certified enclosures of their two ergodic measures, and the
//! finite-depth dimension and recurrence diagnostics built on them.
//!
//! Every point, length and measure bound is an exact rational. The only
//! non-rational step is the evaluation of logarithm quotients in
//! [`certlog`], which carries explicit outward-rounded error bounds.

pub mod certlog;
pub mod dimension;
pub mod error;
pub mod iet;
pub mod keane;
pub mod measure;
pub mod num;
pub mod oracle;
pub mod recurrence;

pub use error::{KeaneError, Result};
