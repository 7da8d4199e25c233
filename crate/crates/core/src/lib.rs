// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::excessive_precision)]

pub mod error;
pub mod numerics;
pub mod specfun;
pub mod profile;
pub mod rayleigh;
pub mod langer;
pub mod dispersion;
pub mod oracle;
pub mod modes;
pub mod selfcheck;
pub mod cli;

pub use error::{Error, Result};
pub use numerics::C64;
