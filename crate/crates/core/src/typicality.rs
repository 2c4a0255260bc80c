//! Strongly ε-typical sets and their tilted laws.
//!
//! A sequence `x^n` is ε-typical for `p` when `|N(x)/n − p(x)| < ε` for every
//! symbol and it has positive i.i.d. probability. The tilted law restricts
//! the i.i.d. law to the set and renormalizes. Sequences are identified by
//! their mixed-radix index, first symbol most significant.
//!
//! The strict inequality is tested as `|N(x) − n p(x)| < n ε − 1e−9` so that
//! ties that are exact in rational arithmetic stay excluded under rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Channel, JointPmf, Pmf};
use crate::numeric::log_sum_exp;

/// Largest product alphabet enumerated when building a typical set.
pub const TYPICAL_GUARD: f64 = (1u64 << 24) as f64;
const TIE_TOL: f64 = 1e-9;

/// Digits of `index` in base `k`, most significant first.
pub fn sequence_digits(index: u64, k: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0usize; n];
    let mut rest = index;
    for slot in d.iter_mut().rev() {
        *slot = (rest % k as u64) as usize;
        rest /= k as u64;
    }
    d
}

/// Inverse of [`sequence_digits`].
pub fn sequence_index(digits: &[usize], k: usize) -> u64 {
    digits.iter().fold(0u64, |acc, &d| acc * k as u64 + d as u64)
}

/// Law of the channel output `z^n` given input digits, as a vector over the
/// `|Z|^n` output indices.
pub fn sequence_output_law(ch: &Channel, input: &[usize]) -> Vec<f64> {
    let mut v = vec![1.0];
    for &x in input {
        let row = ch.row(x);
        v = v.iter().flat_map(|a| row.iter().map(move |w| a * w)).collect();
    }
    v
}

fn within(count: usize, n: usize, p: f64, tol: f64) -> bool {
    (count as f64 - n as f64 * p).abs() < n as f64 * tol - TIE_TOL
}

fn check_guard(alphabet: usize, n: usize) -> Result<()> {
    let size = (alphabet as f64).powi(n as i32);
    if size > TYPICAL_GUARD {
        return Err(Error::Guard {
            what: "sequences to enumerate",
            value: size,
            limit: TYPICAL_GUARD,
        });
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid_arg("eps", format!("must be a positive number, got {eps}")));
    }
    Ok(())
}

/// Iterates every index in `0..k^n` with its digits and symbol counts.
fn for_each_sequence(k: usize, n: usize, mut f: impl FnMut(u64, &[usize], &[usize])) {
    let mut digits = vec![0usize; n];
    let mut counts = vec![0usize; k];
    counts[0] = n;
    let total = (k as u64).pow(n as u32);
    for index in 0..total {
        f(index, &digits, &counts);
        for pos in (0..n).rev() {
            counts[digits[pos]] -= 1;
            if digits[pos] + 1 < k {
                digits[pos] += 1;
                counts[digits[pos]] += 1;
                break;
            }
            digits[pos] = 0;
            counts[0] += 1;
        }
    }
}

/// ε-typical sequences of `base` at blocklength `n` with their tilted
/// log-probabilities (nats).
#[derive(Clone, Debug)]
pub struct TypicalSet {
    base: Pmf,
    n: usize,
    eps: f64,
    members: Vec<u64>,
    log_probs: Vec<f64>,
    log_mass: f64,
}

#[derive(Serialize, Deserialize)]
struct TypicalSetDoc {
    base: serde_json::Value,
    n: usize,
    eps: f64,
    members: Vec<u64>,
}

pub fn typical_set(p: &Pmf, n: usize, eps: f64) -> Result<TypicalSet> {
    check_eps(eps)?;
    check_guard(p.len(), n)?;
    let probs = p.probs();
    let mut members = Vec::new();
    let mut iid = Vec::new();
    for_each_sequence(p.len(), n, |index, _, counts| {
        let ok = counts.iter().enumerate().all(|(x, &c)| {
            (c == 0 || probs[x] > 0.0) && within(c, n, probs[x], eps)
        });
        if ok {
            members.push(index);
            iid.push(
                counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(x, &c)| c as f64 * probs[x].ln())
                    .sum::<f64>(),
            );
        }
    });
    if members.is_empty() {
        return Err(Error::EmptyTypicalSet { n, eps });
    }
    let log_mass = log_sum_exp(iid.iter().copied());
    let log_probs = iid.iter().map(|l| l - log_mass).collect();
    Ok(TypicalSet {
        base: p.clone(),
        n,
        eps,
        members,
        log_probs,
        log_mass,
    })
}

impl TypicalSet {
    pub fn base(&self) -> &Pmf {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Member indices in increasing order.
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    /// Tilted log-probabilities (nats), aligned with [`members`](Self::members).
    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// i.i.d. probability of the set, `1 − δ_n`.
    pub fn mass(&self) -> f64 {
        self.log_mass.exp()
    }

    pub fn position(&self, seq: u64) -> Option<usize> {
        self.members.binary_search(&seq).ok()
    }

    pub fn digits(&self, position: usize) -> Vec<usize> {
        sequence_digits(self.members[position], self.base.len(), self.n)
    }

    pub fn to_json_string(&self) -> String {
        let doc = TypicalSetDoc {
            base: serde_json::to_value(&self.base).expect("pmf serializes"),
            n: self.n,
            eps: self.eps,
            members: self.members.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("typical set serializes")
    }

    /// Rebuilds from the base pmf and checks the stored member list.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let json_err = |source| Error::Json {
            path: "<string>".into(),
            source,
        };
        let doc: TypicalSetDoc = serde_json::from_str(text).map_err(json_err)?;
        let base = Pmf::from_json_str(&doc.base.to_string())?;
        let ts = typical_set(&base, doc.n, doc.eps)?;
        if ts.members != doc.members {
            return Err(Error::invalid_arg("members", "stored members disagree with the typical set"));
        }
        Ok(ts)
    }
}

/// `ln p̃(x^n)`; errors for non-members.
pub fn tilted_log_prob(ts: &TypicalSet, seq: u64) -> Result<f64> {
    ts.position(seq)
        .map(|i| ts.log_probs[i])
        .ok_or(Error::NotMember(seq))
}

/// Jointly typical `(u^n, x^n)` pairs for a joint `p(u, x)` (rows U).
///
/// `u^n` must be ε-typical for `p_U` and `x^n` must satisfy the 2ε joint
/// frequency bound given `u^n`. `u^n` with an empty conditional set are
/// dropped before the `u`-normalization.
#[derive(Clone, Debug)]
pub struct JointTypicalSet {
    base: JointPmf,
    n: usize,
    eps: f64,
    members: Vec<(u64, u64)>,
    log_probs: Vec<f64>,
    u_seqs: Vec<u64>,
    u_log_probs: Vec<f64>,
    x_log_cond: Vec<f64>,
    u_ranges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct JointTypicalSetDoc {
    base: serde_json::Value,
    n: usize,
    eps: f64,
    members: Vec<(u64, u64)>,
}

pub fn joint_typical_set(j: &JointPmf, n: usize, eps: f64) -> Result<JointTypicalSet> {
    check_eps(eps)?;
    let (ku, kx) = (j.rows(), j.cols());
    check_guard(ku * kx, n)?;
    let pu = j.row_marginal();
    let x_given_u = j.z_given_x();

    let mut typical_u = Vec::new();
    for_each_sequence(ku, n, |index, digits, counts| {
        let ok = counts
            .iter()
            .enumerate()
            .all(|(u, &c)| (c == 0 || pu.probs()[u] > 0.0) && within(c, n, pu.probs()[u], eps));
        if ok {
            let lp: f64 = digits.iter().map(|&u| pu.probs()[u].ln()).sum();
            typical_u.push((index, digits.to_vec(), lp));
        }
    });

    let mut members = Vec::new();
    let mut x_log_cond = Vec::new();
    let mut u_seqs = Vec::new();
    let mut u_iid = Vec::new();
    let mut u_ranges = Vec::new();
    let mut pair_counts = vec![0usize; ku * kx];
    for (u_index, u_digits, u_lp) in typical_u {
        let start = members.len();
        let mut cond = Vec::new();
        for_each_sequence(kx, n, |x_index, x_digits, _| {
            pair_counts.iter_mut().for_each(|c| *c = 0);
            let mut lp = 0.0;
            for (&u, &x) in u_digits.iter().zip(x_digits) {
                pair_counts[u * kx + x] += 1;
                lp += x_given_u.get(u, x).ln();
            }
            if lp == f64::NEG_INFINITY {
                return;
            }
            let ok = (0..ku * kx).all(|c| within(pair_counts[c], n, j.probs()[c], 2.0 * eps));
            if ok {
                members.push((u_index, x_index));
                cond.push(lp);
            }
        });
        if cond.is_empty() {
            continue;
        }
        let norm = log_sum_exp(cond.iter().copied());
        x_log_cond.extend(cond.iter().map(|l| l - norm));
        u_seqs.push(u_index);
        u_iid.push(u_lp);
        u_ranges.push((start, members.len()));
    }
    if members.is_empty() {
        return Err(Error::EmptyTypicalSet { n, eps });
    }
    let u_norm = log_sum_exp(u_iid.iter().copied());
    let u_log_probs: Vec<f64> = u_iid.iter().map(|l| l - u_norm).collect();
    let mut log_probs = vec![0.0; members.len()];
    for (k, &(s, e)) in u_ranges.iter().enumerate() {
        for i in s..e {
            log_probs[i] = u_log_probs[k] + x_log_cond[i];
        }
    }
    Ok(JointTypicalSet {
        base: j.clone(),
        n,
        eps,
        members,
        log_probs,
        u_seqs,
        u_log_probs,
        x_log_cond,
        u_ranges,
    })
}

impl JointTypicalSet {
    pub fn base(&self) -> &JointPmf {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `(u^n, x^n)` index pairs grouped by `u^n`, both increasing.
    pub fn members(&self) -> &[(u64, u64)] {
        &self.members
    }

    /// Tilted joint log-probabilities (nats).
    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Distinct `u^n` carrying at least one member, increasing.
    pub fn u_sequences(&self) -> &[u64] {
        &self.u_seqs
    }

    /// `ln p̃(u^n)` aligned with [`u_sequences`](Self::u_sequences).
    pub fn u_log_probs(&self) -> &[f64] {
        &self.u_log_probs
    }

    pub fn u_position(&self, u_seq: u64) -> Option<usize> {
        self.u_seqs.binary_search(&u_seq).ok()
    }

    /// `(x^n, ln p̃(x^n|u^n))` for the `u^n` at position `k`.
    pub fn conditional(&self, k: usize) -> impl Iterator<Item = (u64, f64)> + '_ {
        let (s, e) = self.u_ranges[k];
        (s..e).map(move |i| (self.members[i].1, self.x_log_cond[i]))
    }

    pub fn to_json_string(&self) -> String {
        let base: serde_json::Value =
            serde_json::from_str(&self.base.to_json_string()).expect("joint serializes");
        let doc = JointTypicalSetDoc {
            base,
            n: self.n,
            eps: self.eps,
            members: self.members.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("joint typical set serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json_err = |source| Error::Json {
            path: "<string>".into(),
            source,
        };
        let doc: JointTypicalSetDoc = serde_json::from_str(text).map_err(json_err)?;
        let base = JointPmf::from_json_str(&doc.base.to_string())?;
        let jts = joint_typical_set(&base, doc.n, doc.eps)?;
        if jts.members != doc.members {
            return Err(Error::invalid_arg("members", "stored members disagree with the typical set"));
        }
        Ok(jts)
    }
}

/// `S(z^n, u^n) = Σ_{x^n ∈ T(X|u^n)} p̃(x^n|u^n) Π p(z_i|x_i)`.
pub fn s_kernel(jts: &JointTypicalSet, ch: &Channel, u_seq: u64, z_seq: u64) -> Result<f64> {
    let k = jts.u_position(u_seq).ok_or(Error::NotMember(u_seq))?;
    check_channel(jts, ch)?;
    let n = jts.n();
    let z = sequence_digits(z_seq, ch.outputs(), n);
    let kx = jts.base().cols();
    let terms = jts.conditional(k).map(|(x_seq, lc)| {
        let x = sequence_digits(x_seq, kx, n);
        let w: f64 = x.iter().zip(&z).map(|(&xi, &zi)| ch.get(xi, zi)).product();
        lc.exp() * w
    });
    Ok(crate::numeric::ksum(terms))
}

/// `S(·, u^n)` over all `|Z|^n` outputs for the `u^n` at position `k`.
pub fn s_kernel_vector(jts: &JointTypicalSet, ch: &Channel, k: usize) -> Result<Vec<f64>> {
    check_channel(jts, ch)?;
    let n = jts.n();
    let kx = jts.base().cols();
    let mut acc = vec![0.0; ch.outputs().pow(n as u32)];
    for (x_seq, lc) in jts.conditional(k) {
        let w = lc.exp();
        let law = sequence_output_law(ch, &sequence_digits(x_seq, kx, n));
        acc.iter_mut().zip(law).for_each(|(a, l)| *a += w * l);
    }
    Ok(acc)
}

fn check_channel(jts: &JointTypicalSet, ch: &Channel) -> Result<()> {
    if ch.in_labels() != jts.base().col_labels() {
        return Err(Error::AlphabetMismatch("channel inputs vs X alphabet of the joint".into()));
    }
    Ok(())
}
