//! Closed-form prices of linear instruments: dividend futures and forwards,
//! zero-coupon bonds, swaps, the short rate, the fundamental stock price and
//! its duration.

mod schedule;
mod term_structures;

pub use schedule::SwapSchedule;
pub use term_structures::{PricingModel, StockCoordinates};
