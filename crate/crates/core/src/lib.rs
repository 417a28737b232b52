//! CDS calibration to bid and ask upfront quotes.
//!
//! Risk-neutral hazard rates and per-tenor implied-liquidity parameters are
//! implied jointly by pricing each contract's deferred cashflows with
//! distorted (Choquet) expectations. A classical mid-quote bootstrap and
//! plain risk-neutral pricing are provided alongside.

pub mod calibrator;
pub mod choquet;
pub mod cli;
pub mod curves;
pub mod daycount;
pub mod distortion;
pub mod error;
pub mod io;
pub mod normal;
pub mod pricer;
pub mod schedule;
pub mod solver;

pub use error::{CdsError, Result};
