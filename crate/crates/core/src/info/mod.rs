//! Mutual information of the discretized channel, upper bounds, and the
//! band-limited capacity formulas.

mod capacity;
mod estimators;
mod posterior;
pub mod quadrature;

pub use capacity::{bpsk_awgn_oracle, capacity_band, BPSK_SNR1_GOLDEN};
pub use estimators::{
    mi_bound_chain, mi_cmmse, mi_convergence_study, mi_plugin, BoundChain, MiConvergenceRow, MiEstimate, MiMethod,
};
pub use posterior::{posterior_weights, PosteriorWeights};
