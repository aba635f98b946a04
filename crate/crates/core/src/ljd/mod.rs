//! Linear jump-diffusion factor models: parameters, validation, the
//! polynomial generator and the four-factor parameterization.

mod four_factor;
mod generator;
mod jumps;
mod spec;
mod text;

pub use four_factor::FourFactorParams;
pub use generator::{build_accrual_generator, build_generator};
pub use jumps::{JumpDistribution, JumpLaw};
pub use spec::{
    beta_lower_bound, ensure_valid, g2_eigenvalues_closed_form, g2_eigenvalues_numeric,
    g2_max_real_eigenvalue, validate_spec, ModelSpec, Violation,
};
pub use text::{spec_from_text, spec_to_text};
