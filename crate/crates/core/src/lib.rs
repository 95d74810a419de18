//! Simulation laboratory for continuous-time white Gaussian channels with
//! feedback, in the Brownian-motion formulation
//!
//! ```text
//! Y(t) = ∫₀ᵗ g(s, M, Y₀ˢ) ds + B(t),   0 ≤ t ≤ T
//! ```
//!
//! The crate discretizes the channel (sampling and Euler-Maruyama), computes
//! the Girsanov exponents that give the discretized channel its density, and
//! estimates mutual information two independent ways: a density-ratio
//! plug-in over the finite message alphabet and the causal MMSE formula.
//!
//! Units: time in seconds, information in nats throughout.
//!
//! Module map:
//!
//! | module | contents |
//! |--------|----------|
//! | [`grid`], [`brownian`], [`path`] | time grids, seeded Brownian paths, bridge refinement, sup-norm |
//! | [`message`], [`drift`], [`channel`] | message prior, drift functionals, condition probes, power audit |
//! | [`discretize`] | Euler-Maruyama, reference solutions, strong-error study, Girsanov exponents |
//! | [`info`] | posterior weights, MI estimators, bound chain, capacity formulas |
//! | [`coding`] | Schalkwijk-Kailath style feedback code and error-rate curves |

pub mod brownian;
pub mod channel;
pub mod coding;
pub mod discretize;
pub mod drift;
pub mod error;
pub mod grid;
pub mod info;
pub mod mc;
pub mod message;
pub mod path;
pub mod rng;
pub mod stats;

pub use brownian::BrownianPath;
pub use channel::{ChannelSpec, ConditionReport};
pub use drift::{ChannelDrift, Drift};
pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use mc::{McConfig, Reduction};
pub use message::{Message, Symbol};
pub use path::{PathPrefix, SamplePath};
pub use stats::Estimate;
