//! Divergences between pmfs on a common alphabet.
//!
//! Rényi and KL values come in nats (the unsuffixed functions) and bits
//! (`_bits`). The Tsallis divergence is log-free. The orderings
//! `T_α ≥ D_α` (α > 1) and `T_α ≤ D_α` (α < 1) hold against the nats form.
//!
//! Support conventions: `p = 0` terms vanish; a term with `p > 0, q = 0`
//! makes `Σ p^α q^{1-α}` infinite for α > 1 and contributes nothing for
//! α < 1.

use crate::error::{Error, Result};
use crate::numeric::{ksum, log_sum_exp, nats_to_bits, xlnx};

use super::types::{AlphaOrder, JointPmf, Pmf};

pub(crate) mod raw {
    use super::*;

    pub fn tv(p: &[f64], q: &[f64]) -> f64 {
        0.5 * ksum(p.iter().zip(q).map(|(a, b)| (a - b).abs()))
    }

    pub fn kl(p: &[f64], q: &[f64]) -> f64 {
        if p == q {
            return 0.0;
        }
        let mut terms = Vec::with_capacity(p.len());
        for (&a, &b) in p.iter().zip(q) {
            if a > 0.0 {
                if b <= 0.0 {
                    return f64::INFINITY;
                }
                terms.push(a * (a / b).ln());
            }
        }
        ksum(terms).max(0.0)
    }

    /// `ln Σ p^α q^{1-α}` in the log domain.
    pub fn log_power_sum(p: &[f64], q: &[f64], alpha: f64) -> f64 {
        log_sum_exp(p.iter().zip(q).filter(|(a, _)| **a > 0.0).map(|(&a, &b)| {
            let lq = if b > 0.0 { b.ln() } else { f64::NEG_INFINITY };
            alpha * a.ln() + (1.0 - alpha) * lq
        }))
    }

    pub fn renyi(p: &[f64], q: &[f64], alpha: f64) -> f64 {
        if p == q {
            return 0.0;
        }
        (log_power_sum(p, q, alpha) / (alpha - 1.0)).max(0.0)
    }

    pub fn tsallis(p: &[f64], q: &[f64], alpha: f64) -> f64 {
        if p == q {
            return 0.0;
        }
        (log_power_sum(p, q, alpha).exp_m1() / (alpha - 1.0)).max(0.0)
    }

    pub fn dinf(p: &[f64], q: &[f64]) -> f64 {
        if p == q {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for (&a, &b) in p.iter().zip(q) {
            if a > 0.0 {
                if b <= 0.0 {
                    return f64::INFINITY;
                }
                best = best.max((a / b).ln());
            }
        }
        best.max(0.0)
    }

    /// Order dispatch on slices. Finite orders give the Rényi value in nats.
    pub fn renyi_order(p: &[f64], q: &[f64], a: AlphaOrder) -> f64 {
        match a {
            AlphaOrder::One => kl(p, q),
            AlphaOrder::Finite(al) => renyi(p, q, al),
            AlphaOrder::Infinity => dinf(p, q),
        }
    }

    pub fn shannon_bits(p: &[f64]) -> f64 {
        nats_to_bits(-ksum(p.iter().map(|&v| xlnx(v)))).max(0.0)
    }
}

pub fn total_variation(p: &Pmf, q: &Pmf) -> Result<f64> {
    p.same_alphabet(q)?;
    Ok(raw::tv(p.probs(), q.probs()))
}

/// KL divergence in nats.
pub fn kl_divergence(p: &Pmf, q: &Pmf) -> Result<f64> {
    p.same_alphabet(q)?;
    Ok(raw::kl(p.probs(), q.probs()))
}

pub fn kl_divergence_bits(p: &Pmf, q: &Pmf) -> Result<f64> {
    kl_divergence(p, q).map(nats_to_bits)
}

/// Rényi divergence in nats; `One` is KL and `Infinity` is `D_∞`.
pub fn renyi_divergence(p: &Pmf, q: &Pmf, a: AlphaOrder) -> Result<f64> {
    p.same_alphabet(q)?;
    Ok(raw::renyi_order(p.probs(), q.probs(), a))
}

pub fn renyi_divergence_bits(p: &Pmf, q: &Pmf, a: AlphaOrder) -> Result<f64> {
    renyi_divergence(p, q, a).map(nats_to_bits)
}

/// Tsallis divergence `(Σ p^α q^{1-α} − 1)/(α − 1)`. At `One` it is KL in
/// nats; `Infinity` is rejected.
pub fn tsallis_divergence(p: &Pmf, q: &Pmf, a: AlphaOrder) -> Result<f64> {
    p.same_alphabet(q)?;
    match a {
        AlphaOrder::One => Ok(raw::kl(p.probs(), q.probs())),
        AlphaOrder::Finite(al) => Ok(raw::tsallis(p.probs(), q.probs(), al)),
        AlphaOrder::Infinity => Err(Error::TsallisAtInfinity),
    }
}

/// `log₂ max_{p(x)>0} p(x)/q(x)`.
pub fn d_infinity(p: &Pmf, q: &Pmf) -> Result<f64> {
    d_infinity_nats(p, q).map(nats_to_bits)
}

pub fn d_infinity_nats(p: &Pmf, q: &Pmf) -> Result<f64> {
    p.same_alphabet(q)?;
    Ok(raw::dinf(p.probs(), q.probs()))
}

/// Sibson's α-mutual information in bits, rows of `j` being the input.
pub fn sibson_mi(j: &JointPmf, a: AlphaOrder) -> Result<f64> {
    let alpha = match a {
        AlphaOrder::Finite(al) => al,
        _ => {
            return Err(Error::UnsupportedOrder {
                op: "sibson_mi",
                alpha: a.to_string(),
            })
        }
    };
    let px = j.row_marginal();
    let inner: Vec<f64> = (0..j.cols())
        .map(|y| {
            let s = log_sum_exp((0..j.rows()).filter(|&x| px.probs()[x] > 0.0 && j.get(x, y) > 0.0).map(|x| {
                let p = px.probs()[x];
                p.ln() + alpha * (j.get(x, y) / p).ln()
            }));
            s / alpha
        })
        .collect();
    let total = log_sum_exp(inner);
    Ok(nats_to_bits(alpha / (alpha - 1.0) * total).max(0.0))
}
