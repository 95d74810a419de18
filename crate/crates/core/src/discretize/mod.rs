//! Discretizations of the channel: Euler-Maruyama paths, fine-grid
//! reference solutions, the strong-error study, and the Girsanov exponents.

mod em;
mod exponents;
mod strong;

pub use em::{simulate_em, simulate_reference, step_drift_integral, EmPath, DEFAULT_REF_FACTOR};
pub use exponents::{exponent_a1, exponent_a2, exponent_a3, ExponentKind, GirsanovExponent};
pub use strong::{fit_strong_rate, strong_error_study, StrongErrorRow};

pub(crate) use em::em_values;
pub(crate) use exponents::step_log_likelihood;
