//! Pricing engine for joint term structures of dividends and interest rates
//! driven by polynomial jump-diffusion factors.

pub mod calibration;
pub mod cli;
pub mod error;
pub mod ljd;
pub mod maxent;
pub mod mc;
pub mod poly;
pub mod pricing;
pub mod seasonality;

pub use error::{Error, Result};
