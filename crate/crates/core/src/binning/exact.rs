//! Exact binning averages via set partitions and power sums.
//!
//! For a uniform random binning into `M` bins,
//!
//! ```text
//! E_B[Σ_b P(b|z)^α] = Σ_π M^{1−|π|} Σ_{distinct (x_B)} Π_{B∈π} p(x_B|z)^{|B|}
//! ```
//!
//! where π ranges over set partitions of `[α]` (the tuple index pattern of
//! equal coordinates). The distinct-tuple sums are recovered from power sums
//! `S_k(z) = Σ_x p(x|z)^k` by Möbius inversion on the partition lattice.

use crate::error::{Error, Result};
use crate::measures::{cond_renyi_entropy, AlphaOrder, JointPmf};
use crate::numeric::ksum;

/// Largest integer order supported by [`expected_tsallis_exact`].
pub const MAX_EXACT_ORDER: u32 = 5;

/// `S_k(z) = Σ_x p(x|z)^k` for `k = 1..=max_power`, per column `z`.
#[derive(Clone, Debug)]
pub struct PowerSums {
    max_power: usize,
    weights: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl PowerSums {
    pub fn from_joint(j: &JointPmf, max_power: usize) -> Self {
        let pz = j.col_marginal();
        let values = (0..j.cols())
            .map(|z| match j.x_given_z(z) {
                Some(cond) => (1..=max_power)
                    .map(|k| ksum(cond.iter().map(|p| p.powi(k as i32))))
                    .collect(),
                None => vec![0.0; max_power],
            })
            .collect();
        PowerSums {
            max_power,
            weights: pz.probs().to_vec(),
            values,
        }
    }

    /// Power sums of a single conditional pmf (one column).
    pub fn from_conditional(cond: &[f64], max_power: usize) -> Self {
        let values = vec![(1..=max_power)
            .map(|k| ksum(cond.iter().map(|p| p.powi(k as i32))))
            .collect()];
        PowerSums {
            max_power,
            weights: vec![1.0],
            values,
        }
    }

    pub fn max_power(&self) -> usize {
        self.max_power
    }

    pub fn columns(&self) -> usize {
        self.values.len()
    }

    /// Column weight `p(z)`.
    pub fn weight(&self, z: usize) -> f64 {
        self.weights[z]
    }

    /// `S_k(z)`, `k ≥ 1`.
    pub fn get(&self, z: usize, k: usize) -> f64 {
        self.values[z][k - 1]
    }
}

/// Ordered positive parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::invalid_arg("parts", "composition parts must be positive"));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// All ordered compositions of `alpha` into `ell` positive parts, in
/// lexicographic order.
pub fn compositions(alpha: usize, ell: usize) -> Result<Vec<Composition>> {
    if ell == 0 || ell > alpha {
        return Err(Error::invalid_arg("ell", format!("need 1 <= ell <= alpha, got ell={ell}, alpha={alpha}")));
    }
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if slots == 1 {
            cur.push(left);
            out.push(Composition { parts: cur.clone() });
            cur.pop();
            return;
        }
        for first in 1..=left - (slots - 1) {
            cur.push(first);
            rec(left - first, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(alpha, ell, &mut Vec::with_capacity(ell), &mut out);
    Ok(out)
}

/// `C(n, k)` as f64.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Set partitions of `{0, …, k−1}` as lists of blocks, generated from
/// restricted growth strings.
pub fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; k];
    loop {
        let blocks = rgs.iter().max().unwrap() + 1;
        let mut p = vec![Vec::new(); blocks];
        for (i, &b) in rgs.iter().enumerate() {
            p[b].push(i);
        }
        out.push(p);
        // next restricted growth string
        let mut i = k - 1;
        loop {
            if i == 0 {
                return out;
            }
            let prefix_max = rgs[..i].iter().max().copied().unwrap_or(0);
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for r in rgs.iter_mut().skip(i + 1) {
                    *r = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Möbius weight `μ(0̂, σ) = Π_B (−1)^{|B|−1} (|B|−1)!`.
fn mobius(sigma: &[Vec<usize>]) -> f64 {
    sigma
        .iter()
        .map(|b| {
            let s = b.len();
            let fact: f64 = (1..s).map(|i| i as f64).product();
            if s % 2 == 1 {
                fact
            } else {
                -fact
            }
        })
        .product()
}

/// Sum over pairwise-distinct tuples `(x_1, …, x_ℓ)` of `Π p(x_i|z)^{a_i}`,
/// where `a` is the composition.
pub fn distinct_tuple_sum(ps: &PowerSums, c: &Composition, z: usize) -> Result<f64> {
    if c.total() > ps.max_power() {
        return Err(Error::invalid_arg(
            "power_sums",
            format!("table holds powers up to {}, composition needs {}", ps.max_power(), c.total()),
        ));
    }
    distinct_sum_with(c.parts(), |sizes| sizes.iter().map(|&k| ps.get(z, k)).product())
}

/// Möbius inversion over set partitions of the parts. `eval(sizes)` returns
/// the unconstrained sum `Π_j S_{sizes_j}` (or its expectation).
fn distinct_sum_with(parts: &[usize], eval: impl Fn(&[usize]) -> f64) -> Result<f64> {
    let terms = set_partitions(parts.len()).into_iter().map(|sigma| {
        let merged: Vec<usize> = sigma.iter().map(|b| b.iter().map(|&i| parts[i]).sum()).collect();
        mobius(&sigma) * eval(&merged)
    });
    Ok(ksum(terms))
}

fn check_order(alpha: u32) -> Result<()> {
    if !(2..=MAX_EXACT_ORDER).contains(&alpha) {
        return Err(Error::UnsupportedOrder {
            op: "expected_tsallis_exact",
            alpha: alpha.to_string(),
        });
    }
    Ok(())
}

fn check_bins(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid_arg("m", "need at least one bin"));
    }
    Ok(())
}

/// `E_π-weighted` moment: `Σ_π M^{α−|π|} · D_π`, with `D_π` supplied by
/// `distinct(block sizes)`.
fn partition_moment(alpha: usize, m: u64, distinct: impl Fn(&[usize]) -> Result<f64>) -> Result<f64> {
    let mf = m as f64;
    let mut terms = Vec::new();
    for pi in set_partitions(alpha) {
        let sizes: Vec<usize> = pi.iter().map(|b| b.len()).collect();
        let weight = mf.powi((alpha - sizes.len()) as i32);
        terms.push(weight * distinct(&sizes)?);
    }
    Ok(ksum(terms))
}

/// Exact `E_B[T_α(P(b,z) ‖ p^U(b) p(z))]` for integer `α ∈ {2,…,5}`
/// over a uniform binning of the rows of `j` into `m` bins.
pub fn expected_tsallis_exact(j: &JointPmf, m: u64, alpha: u32) -> Result<f64> {
    check_order(alpha)?;
    check_bins(m)?;
    let a = alpha as usize;
    let ps = PowerSums::from_joint(j, a);
    let mut per_z = Vec::with_capacity(ps.columns());
    for z in 0..ps.columns() {
        let w = ps.weight(z);
        if w <= 0.0 {
            continue;
        }
        let mom = partition_moment(a, m, |sizes| {
            distinct_tuple_sum(&ps, &Composition::new(sizes.to_vec())?, z)
        })?;
        per_z.push(w * mom);
    }
    Ok(((ksum(per_z) - 1.0) / (a as f64 - 1.0)).max(0.0))
}

/// Same quantity for `n` i.i.d. copies of the one-shot joint `j`, without
/// building the product alphabet: every power-sum product factorizes over
/// coordinates, so `E_{z^n}[Π_j S_{k_j}(z^n)] = (Σ_z p(z) Π_j S_{k_j}(z))^n`.
pub fn expected_tsallis_exact_iid(j: &JointPmf, n: usize, m: u64, alpha: u32) -> Result<f64> {
    check_order(alpha)?;
    check_bins(m)?;
    let a = alpha as usize;
    let ps = PowerSums::from_joint(j, a);
    let one_shot = |sizes: &[usize]| -> f64 {
        ksum((0..ps.columns()).map(|z| ps.weight(z) * sizes.iter().map(|&k| ps.get(z, k)).product::<f64>()))
    };
    let mom = partition_moment(a, m, |sizes| {
        distinct_sum_with(sizes, |merged| one_shot(merged).powi(n as i32))
    })?;
    Ok(((mom - 1.0) / (a as f64 - 1.0)).max(0.0))
}

/// `(M − 1) · 2^{−H̃₂(X|Z)}`: the closed form of the α = 2 average.
pub fn tsallis2_closed_form(j: &JointPmf, m: u64) -> f64 {
    let h2 = cond_renyi_entropy(j, AlphaOrder::Finite(2.0));
    (m as f64 - 1.0) * (-h2).exp2()
}
