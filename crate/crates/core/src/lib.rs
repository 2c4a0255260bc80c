//! Output statistics of random binning under Tsallis, Rényi and `D_∞`
//! criteria, with wiretap secrecy rates and a small wiretap coding
//! simulator.
//!
//! - [`measures`]: pmfs, channels, entropies and divergences.
//! - [`binning`]: random binning maps and exact / Monte-Carlo averages of
//!   the binning divergence.
//! - [`typicality`]: ε-typical sets, tilted laws and the stochastic-encoder
//!   kernel.
//! - [`rates`]: rate thresholds, secrecy rates and the `R′_α` optimizer.
//! - [`wiretap`]: two-index binning codes, MAP decoding and exact leakage.
//! - [`cli`]: the batch front-end behind the `osrb-lab` binary.
//!
//! Entropies and rates are in bits. See the crate README for the seeding
//! scheme and the file formats.

pub mod binning;
pub mod cli;
pub mod error;
pub mod measures;
pub mod numeric;
pub mod rates;
pub mod seed;
pub mod typicality;
pub mod wiretap;

pub use error::{Error, Result};
pub use measures::{AlphaOrder, Channel, JointPmf, Pmf};
