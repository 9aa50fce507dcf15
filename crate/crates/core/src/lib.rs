//! Hitting times, spectra, boundary classification and strong stationary
//! times for birth-death processes on the nonnegative integers.

// `!(x > 0.0)` guards are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod duality;
pub mod error;
pub mod gallery;
pub mod hitting;
pub mod numeric;
pub mod rates;
pub mod separation;
pub mod simulate;
pub mod spectral;

pub use error::{Error, Result};
pub use rates::{BirthDeathRates, RateSpec};
