//! Lagged linear links between labour-force change, inflation and
//! unemployment.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only numerics:
//!
//! * [`series`]: period-indexed series and the transforms used everywhere
//!   else (growth rates, differences, trailing moving averages, cumulative
//!   sums, lag shifts, alignment).
//! * [`regress`]: least squares and the Newey–West long-run variance.
//! * [`unitroot`]: ADF, DF-GLS and Phillips–Perron tests with embedded
//!   critical values.
//! * [`cointegration`]: residual-based Engle–Granger battery and the Johansen
//!   trace test.
//! * [`lagmodel`]: piecewise lagged-linear models, the generalized
//!   three-coefficient model and the cumulative-curve calibrator.
//! * [`evaluate`]: R², RMSFE, naive benchmark and relative cumulative error.
//! * [`forecast`]: projections from labour-force scenario paths.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cointegration;
pub mod critical;
mod error;
pub mod evaluate;
pub mod forecast;
pub mod lagmodel;
pub mod linalg;
pub mod optimize;
pub mod regress;
pub mod series;
pub mod unitroot;

pub use error::{Error, Result};
pub use series::{Frequency, Period, Series};
