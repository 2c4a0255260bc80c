//! Binning-rate thresholds and wiretap secrecy rates.
//!
//! Every function returns a [`RateReport`] holding the headline value in
//! bits together with the sub-terms it was assembled from. Negative rates
//! are reported as computed and flagged.

mod rprime;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{
    cond_renyi_entropy, conditional_entropy, mutual_information, raw, shannon_entropy, AlphaOrder,
    Channel, JointPmf, Pmf,
};
use crate::numeric::{ksum, nats_to_bits};

pub use rprime::{
    r_prime, r_prime_grid_oracle, r_prime_objective, OptimizerSettings, OptimizerTrace, RPrime,
    TiltChannel, RPRIME_ALPHABET_GUARD,
};

pub const FLAG_NEGATIVE: &str = "no positive secure rate";
pub const FLAG_NEG_INF: &str = "support violation: threshold is -inf";
pub const FLAG_POS_INF: &str = "support violation: threshold is +inf";
pub const FLAG_NOT_CONVERGED: &str = "optimizer did not converge; best value reported";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Encoder {
    IidDeterministic,
    TypicalDeterministic,
    Stochastic,
}

impl std::fmt::Display for Encoder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Encoder::IidDeterministic => "IID_DETERMINISTIC",
            Encoder::TypicalDeterministic => "TYPICAL_DETERMINISTIC",
            Encoder::Stochastic => "STOCHASTIC",
        })
    }
}

/// A rate with its named components (bits).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub alpha: AlphaOrder,
    pub encoder: Encoder,
    pub threshold_bits: f64,
    pub components: BTreeMap<String, f64>,
    pub optimizer_trace: Option<OptimizerTrace>,
    pub flags: Vec<String>,
}

impl RateReport {
    fn new(alpha: AlphaOrder, encoder: Encoder, threshold_bits: f64, components: &[(&str, f64)]) -> Self {
        let mut flags = Vec::new();
        if threshold_bits == f64::NEG_INFINITY {
            flags.push(FLAG_NEG_INF.to_string());
        } else if threshold_bits == f64::INFINITY {
            flags.push(FLAG_POS_INF.to_string());
        }
        RateReport {
            alpha,
            encoder,
            threshold_bits,
            components: components.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            optimizer_trace: None,
            flags,
        }
    }

    fn flag_negative(mut self) -> Self {
        if self.threshold_bits < 0.0 {
            self.flags.push(FLAG_NEGATIVE.to_string());
        }
        self
    }

    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.get(name).copied()
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("rate report serializes")
    }
}

/// Binning threshold for i.i.d. sources, rows X and columns Z.
///
/// `H̃_α(X|Z)` for `α > 1` and at infinity, `H(X|Z)` for `α ≤ 1`.
pub fn osrb_threshold_iid(j: &JointPmf, a: AlphaOrder) -> RateReport {
    let (name, v) = match a {
        AlphaOrder::Finite(al) if al > 1.0 => ("H_alpha(X|Z)", cond_renyi_entropy(j, a)),
        AlphaOrder::Infinity => ("H_inf(X|Z)", cond_renyi_entropy(j, a)),
        _ => ("H(X|Z)", conditional_entropy(j)),
    };
    RateReport::new(a, Encoder::IidDeterministic, v, &[(name, v)])
}

/// `Σ_x p(x) D_α(p(z|x) ‖ p(z))` in bits; `D_∞` at infinity, KL at one.
fn average_divergence(p: &Pmf, ch: &Channel, a: AlphaOrder) -> Result<f64> {
    let pz = ch.output(p)?;
    let terms = (0..p.len())
        .filter(|&x| p.probs()[x] > 0.0)
        .map(|x| p.probs()[x] * raw::renyi_order(ch.row(x), pz.probs(), a));
    Ok(nats_to_bits(ksum(terms)))
}

fn require_above_one(op: &'static str, a: AlphaOrder) -> Result<()> {
    if a.above_one() {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder {
            op,
            alpha: a.to_string(),
        })
    }
}

/// Binning threshold for typical-set sources: `H(X) − Σ_x p(x) D_α(p(z|x) ‖ p(z))`.
pub fn osrb_threshold_typical(p: &Pmf, ch: &Channel, a: AlphaOrder) -> Result<RateReport> {
    require_above_one("osrb_threshold_typical", a)?;
    let hx = shannon_entropy(p);
    let d = average_divergence(p, ch, a)?;
    Ok(RateReport::new(
        a,
        Encoder::TypicalDeterministic,
        hx - d,
        &[("H(X)", hx), ("E_x[D_alpha(p(z|x)||p(z))]", d)],
    ))
}

fn with_trace(mut r: RateReport, rp: &RPrime) -> RateReport {
    if !rp.trace.converged {
        r.flags.push(FLAG_NOT_CONVERGED.to_string());
    }
    r.optimizer_trace = Some(rp.trace.clone());
    r
}

/// Threshold for a stochastic encoder: `H(U) − R′_α`.
pub fn osrb_threshold_stochastic(
    p_u: &Pmf,
    ch_xu: &Channel,
    ch_zx: &Channel,
    a: AlphaOrder,
    opt: &OptimizerSettings,
) -> Result<RateReport> {
    let rp = r_prime(p_u, ch_xu, ch_zx, a, opt)?;
    let hu = shannon_entropy(p_u);
    let r = RateReport::new(
        a,
        Encoder::Stochastic,
        hu - rp.value_bits,
        &[("H(U)", hu), ("R'_alpha", rp.value_bits), ("I(U;Z)", rp.feasible_bits)],
    );
    Ok(with_trace(r, &rp))
}

/// Channel input for a secrecy-rate computation.
#[derive(Clone, Debug)]
pub enum EncoderInput {
    /// Deterministic encoder with input law `p(x)`.
    Deterministic(Pmf),
    /// Stochastic encoder with auxiliary law `p(u)` and prefix channel `p(x|u)`.
    Stochastic { p_u: Pmf, ch_xu: Channel },
}

fn check_pair(main: &Channel, eve: &Channel) -> Result<()> {
    if main.in_labels() != eve.in_labels() {
        return Err(Error::AlphabetMismatch("main and eavesdropper inputs differ".into()));
    }
    Ok(())
}

fn mi_through(p: &Pmf, ch: &Channel) -> Result<f64> {
    Ok(mutual_information(&JointPmf::from_input_and_channel(p, ch)?))
}

fn cond_through(p: &Pmf, ch: &Channel) -> Result<f64> {
    Ok(conditional_entropy(&JointPmf::from_input_and_channel(p, ch)?.transpose()))
}

/// Achievable secrecy rate under the `T_α` (or `D_∞`) leakage criterion.
///
/// Deterministic encoders: `I(X;Y) − Σ_x p(x) D_α(p(z|x) ‖ p(z))` for
/// `α > 1` and infinity, `I(X;Y) − I(X;Z)` at one and `H(X|Z) − H(X|Y)`
/// below one. Stochastic encoders: `I(U;Y) − R′_α` for `α > 1` and infinity,
/// with `|U| ≤ |X| + 1`.
pub fn secrecy_rate(
    main: &Channel,
    eve: &Channel,
    input: &EncoderInput,
    a: AlphaOrder,
    opt: &OptimizerSettings,
) -> Result<RateReport> {
    check_pair(main, eve)?;
    match input {
        EncoderInput::Deterministic(p) => {
            let enc = Encoder::TypicalDeterministic;
            let ixy = mi_through(p, main)?;
            let r = match a {
                AlphaOrder::One => {
                    let ixz = mi_through(p, eve)?;
                    RateReport::new(a, enc, ixy - ixz, &[("I(X;Y)", ixy), ("I(X;Z)", ixz)])
                }
                AlphaOrder::Finite(al) if al < 1.0 => {
                    let hxz = cond_through(p, eve)?;
                    let hxy = cond_through(p, main)?;
                    RateReport::new(a, enc, hxz - hxy, &[("H(X|Z)", hxz), ("H(X|Y)", hxy)])
                }
                _ => {
                    let d = average_divergence(p, eve, a)?;
                    RateReport::new(
                        a,
                        enc,
                        ixy - d,
                        &[("I(X;Y)", ixy), ("E_x[D_alpha(p(z|x)||p(z))]", d)],
                    )
                }
            };
            Ok(r.flag_negative())
        }
        EncoderInput::Stochastic { p_u, ch_xu } => {
            require_above_one("stochastic secrecy_rate", a)?;
            if p_u.len() > main.inputs() + 1 {
                return Err(Error::invalid_arg(
                    "p_u",
                    format!("|U| = {} exceeds |X| + 1 = {}", p_u.len(), main.inputs() + 1),
                ));
            }
            let rp = r_prime(p_u, ch_xu, eve, a, opt)?;
            let iuy = mi_through(p_u, &ch_xu.compose(main)?)?;
            let r = RateReport::new(
                a,
                Encoder::Stochastic,
                iuy - rp.value_bits,
                &[("I(U;Y)", iuy), ("R'_alpha", rp.value_bits), ("I(U;Z)", rp.feasible_bits)],
            );
            Ok(with_trace(r, &rp).flag_negative())
        }
    }
}

/// The weaker i.i.d.-binning secrecy rate `H̃_α(X|Z) − H(X|Y)`, with `j`
/// the joint over (X, Z).
pub fn secrecy_rate_iid_variant(j: &JointPmf, main: &Channel, a: AlphaOrder) -> Result<RateReport> {
    require_above_one("secrecy_rate_iid_variant", a)?;
    let px = j.row_marginal();
    let hxz = cond_renyi_entropy(j, a);
    let hxy = cond_through(&px, main)?;
    let name = if a == AlphaOrder::Infinity {
        "H_inf(X|Z)"
    } else {
        "H_alpha(X|Z)"
    };
    Ok(RateReport::new(a, Encoder::IidDeterministic, hxz - hxy, &[(name, hxz), ("H(X|Y)", hxy)]).flag_negative())
}
