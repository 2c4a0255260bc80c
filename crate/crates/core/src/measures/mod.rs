//! Finite-alphabet probability types and the scalar information measures.
//!
//! | Function | Quantity | Unit |
//! |----------|----------|------|
//! | [`shannon_entropy`] | `H(X)` | bits |
//! | [`conditional_entropy`] | `H(X\|Z)` | bits |
//! | [`mutual_information`] | `I(X;Z)` | bits |
//! | [`total_variation`] | `½ Σ \|p − q\|` | - |
//! | [`kl_divergence`] | `D(p‖q)` | nats (`_bits` variant) |
//! | [`renyi_divergence`] | `D_α(p‖q)` | nats (`_bits` variant) |
//! | [`tsallis_divergence`] | `T_α(p‖q)` | - |
//! | [`d_infinity`] | `D_∞(p‖q)` | bits |
//! | [`sibson_mi`] | `I_α(X;Y)` | bits |
//! | [`renyi_entropy`] | `H_α(X)` | bits |
//! | [`cond_renyi_entropy`] | `H̃_α(X\|Z)` | bits |
//!
//! Joint pmfs put X on rows and the conditioning variable on columns.

mod divergence;
mod entropy;
mod types;

pub(crate) use divergence::raw;
pub use divergence::{
    d_infinity, d_infinity_nats, kl_divergence, kl_divergence_bits, renyi_divergence,
    renyi_divergence_bits, sibson_mi, total_variation, tsallis_divergence,
};
pub use entropy::{
    cond_renyi_entropy, conditional_entropy, is_singleton, mutual_information, renyi_entropy,
    shannon_entropy, SINGLETON_TOL,
};
pub use types::{AlphaOrder, Channel, JointPmf, Pmf, LOAD_TOL, NORM_TOL, ONE_TOL};
