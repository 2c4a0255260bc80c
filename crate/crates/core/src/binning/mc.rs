//! Monte-Carlo estimation of `E_B` over blocklength-`n` binnings and the
//! OSRB sweep driver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::measures::{AlphaOrder, JointPmf};
use crate::numeric::{bins_for_rate, tree_sum};
use crate::seed::{derive_seed, rng_from_seed};

use super::exact::expected_tsallis_exact_iid;
use super::{binning_divergence_flat, induced_flat};

/// Largest sequence alphabet `|X|^n` (and product table `|X|^n |Z|^n`)
/// the simulator will enumerate.
pub const SEQUENCE_GUARD: f64 = (1u64 << 24) as f64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub m: u64,
    pub trials: usize,
}

fn guard(what: &'static str, value: f64, limit: f64) -> Result<()> {
    if value > limit {
        return Err(Error::Guard { what, value, limit });
    }
    Ok(())
}

/// Estimates `E_B[divergence]` for `n` i.i.d. copies of the one-shot joint
/// `j`, binned into `M = ⌈2^{nR}⌉` bins, from `trials` independent
/// binnings.
///
/// Trial `t` uses the binning seeded by `derive_seed(seed, "trial", t)`.
/// Per-trial values are reduced with a fixed pairwise tree, so the result
/// does not depend on the thread count.
pub fn expected_divergence_mc(
    j: &JointPmf,
    n: usize,
    rate: f64,
    a: AlphaOrder,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::invalid_arg("trials", "must be >= 1"));
    }
    if n == 0 {
        return Err(Error::invalid_arg("n", "must be >= 1"));
    }
    let items = (j.rows() as f64).powi(n as i32);
    guard("|X|^n sequences", items, SEQUENCE_GUARD)?;
    let cols = (j.cols() as f64).powi(n as i32);
    guard("|X|^n |Z|^n table cells", items * cols, SEQUENCE_GUARD)?;
    let m = bins_for_rate(n, rate);
    guard("M |Z|^n induced cells", m as f64 * cols, SEQUENCE_GUARD)?;

    let jn = j.product(n);
    let pz = jn.col_marginal();
    let (rows, cols) = (jn.rows(), jn.cols());
    let values: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(derive_seed(seed, "trial", t));
            let assign: Vec<u64> = (0..rows).map(|_| rng.gen_range(1..=m)).collect();
            let induced = induced_flat(&assign, m, jn.probs(), cols);
            binning_divergence_flat(&induced, pz.probs(), m, a)
        })
        .collect();
    let k = values.len() as f64;
    let mean = tree_sum(&values) / k;
    let stderr = if values.len() > 1 {
        let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
        (tree_sum(&sq) / (k - 1.0)).sqrt() / k.sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        stderr,
        m,
        trials,
    })
}

/// How an OSRB sweep evaluates `E_B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OsrbMode {
    /// Partition formula, integer orders 2..=5.
    Exact,
    /// Sampled binnings.
    Mc,
}

/// One row of an OSRB sweep; CSV column order is the field order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OsrbRecord {
    pub n: usize,
    pub rate: f64,
    pub alpha: AlphaOrder,
    pub m: u64,
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl OsrbRecord {
    pub const HEADER: [&'static str; 8] = ["n", "rate", "alpha", "m", "trials", "mean", "stderr", "seed"];
}

/// Evaluates `E_B` at each blocklength in `ns`. In MC mode the seed for
/// blocklength `n` is `derive_seed(seed, "osrb", n)`.
pub fn osrb_sweep(
    j: &JointPmf,
    ns: &[usize],
    rate: f64,
    a: AlphaOrder,
    mode: OsrbMode,
    trials: usize,
    seed: u64,
) -> Result<Vec<OsrbRecord>> {
    ns.iter()
        .map(|&n| {
            let m = bins_for_rate(n, rate);
            match mode {
                OsrbMode::Exact => {
                    let alpha = match a {
                        AlphaOrder::Finite(v) if v.fract() == 0.0 && (2.0..=5.0).contains(&v) => v as u32,
                        _ => {
                            return Err(Error::UnsupportedOrder {
                                op: "exact osrb sweep",
                                alpha: a.to_string(),
                            })
                        }
                    };
                    Ok(OsrbRecord {
                        n,
                        rate,
                        alpha: a,
                        m,
                        trials: 0,
                        mean: expected_tsallis_exact_iid(j, n, m, alpha)?,
                        stderr: 0.0,
                        seed,
                    })
                }
                OsrbMode::Mc => {
                    let est = expected_divergence_mc(j, n, rate, a, trials, derive_seed(seed, "osrb", n as u64))?;
                    Ok(OsrbRecord {
                        n,
                        rate,
                        alpha: a,
                        m: est.m,
                        trials,
                        mean: est.mean,
                        stderr: est.stderr,
                        seed,
                    })
                }
            }
        })
        .collect()
}
