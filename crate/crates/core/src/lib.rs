// Guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod bvp;
pub mod error;
pub mod pompeiu;
pub mod quadrature;
pub mod report;
pub mod search;
pub mod shapes;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
