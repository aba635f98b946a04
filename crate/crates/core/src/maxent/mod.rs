//! Maximum-entropy densities from a finite set of moments and the option
//! prices they imply.

mod density;
mod io;
mod payoff;
pub mod quadrature;

pub use density::{fit_maxent, potential, standardize_moments, MaxEntDensity, MomentSet, Support, MAX_ORDER};
pub use io::{density_to_text, lambdas_from_text, moments_from_text, moments_to_text};
pub use payoff::{
    payoff_moments, price_from_moments, price_option, stock_option_variable, swaption_variable, OptionKind,
    PayoffMoments, PayoffSpec, PriceResult, Transform,
};
