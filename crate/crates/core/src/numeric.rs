//! Small numeric helpers shared by every module.

use std::f64::consts::LN_2;

/// Neumaier-compensated sum.
pub fn ksum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `ln Σ exp(a_i)`, ignoring `-inf` terms. Returns `-inf` for an empty or
/// all-`-inf` input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let v: Vec<f64> = it.into_iter().filter(|a| *a != f64::NEG_INFINITY).collect();
    if v.is_empty() {
        return f64::NEG_INFINITY;
    }
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::INFINITY {
        return f64::INFINITY;
    }
    hi + ksum(v.iter().map(|a| (a - hi).exp())).ln()
}

/// Pairwise summation over a fixed binary tree. The shape depends only on
/// the slice length, so the result is identical however the values were
/// produced.
pub fn tree_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => {
            let (a, b) = v.split_at(n / 2);
            tree_sum(a) + tree_sum(b)
        }
    }
}

pub fn nats_to_bits(x: f64) -> f64 {
    x / LN_2
}

pub fn bits_to_nats(x: f64) -> f64 {
    x * LN_2
}

/// `x ln x` with `0 ln 0 = 0`.
pub(crate) fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `M = ⌈2^{nR}⌉`, never below 1.
pub fn bins_for_rate(n: usize, rate_bits: f64) -> u64 {
    let m = (n as f64 * rate_bits).exp2().ceil();
    if m < 1.0 {
        1
    } else {
        m as u64
    }
}

/// Median of a nonempty slice (mean of the two middle values for even
/// lengths). NaNs sort last.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ksum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16];
        assert_eq!(ksum(v), 1.0);
    }

    #[test]
    fn log_sum_exp_handles_neg_inf() {
        assert_eq!(log_sum_exp([f64::NEG_INFINITY]), f64::NEG_INFINITY);
        let v = log_sum_exp([0.0f64.ln(), 0.5f64.ln(), 0.5f64.ln()]);
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn bins_use_ceiling() {
        assert_eq!(bins_for_rate(4, 0.0), 1);
        assert_eq!(bins_for_rate(2, 0.5), 2);
        assert_eq!(bins_for_rate(3, 1.0), 8);
        assert_eq!(bins_for_rate(10, 0.61), 69);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
