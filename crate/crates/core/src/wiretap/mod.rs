//! Desk-scale wiretap codes built by two-index random binning.
//!
//! Source sequences (typical `x^n` for a deterministic encoder, typical
//! `u^n` for a stochastic one) receive independent uniform labels
//! `(m, f) ∈ [M1] × [M2]`. Given the public index `f`, the message `m` is
//! sent by drawing a bin member from the tilted law restricted to bin
//! `(m, f)`; the receiver decodes by MAP among members labelled `f`.
//! Leakage and error probability are computed exactly by enumerating
//! channel outputs.

mod sweep;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::binning::binning_divergence_flat;
use crate::error::{Error, Result};
use crate::measures::{AlphaOrder, Channel, Pmf};
use crate::numeric::{bins_for_rate, ksum};
use crate::seed::{derive_seed, rng_from_seed, Rng};
use crate::typicality::{
    joint_typical_set, sequence_digits, sequence_output_law, typical_set, JointTypicalSet, TypicalSet,
};

pub use sweep::{sweep_experiment, Experiment, ExperimentConfig, ExperimentRecord, EncoderKind};

/// Largest source member count or channel output alphabet `|Y|^n`, `|Z|^n`.
pub const WIRETAP_GUARD: f64 = (1u64 << 20) as f64;
/// Fraction of empty `(m, f)` bins above which a code is resampled.
pub const EMPTY_BIN_LIMIT: f64 = 0.05;
/// Sampling attempts before the code with the fewest empty bins is kept.
pub const MAX_ATTEMPTS: usize = 20;
/// Relative margin a candidate needs to displace the current MAP choice.
const MAP_TIE_TOL: f64 = 1e-12;

/// The sequence alphabet that is binned.
#[derive(Clone, Debug)]
pub enum CodeSource {
    Deterministic(TypicalSet),
    /// Binning acts on `u^n`; `x^n` is drawn from `p̃(x^n|u^n)`.
    Stochastic(JointTypicalSet),
}

impl CodeSource {
    pub fn deterministic(p_x: &Pmf, n: usize, eps: f64) -> Result<Self> {
        Ok(CodeSource::Deterministic(typical_set(p_x, n, eps)?))
    }

    pub fn stochastic(p_u: &Pmf, ch_xu: &Channel, n: usize, eps: f64) -> Result<Self> {
        let j = crate::measures::JointPmf::from_input_and_channel(p_u, ch_xu)?;
        Ok(CodeSource::Stochastic(joint_typical_set(&j, n, eps)?))
    }

    pub fn n(&self) -> usize {
        match self {
            CodeSource::Deterministic(t) => t.n(),
            CodeSource::Stochastic(j) => j.n(),
        }
    }

    /// Number of binned items.
    pub fn items(&self) -> usize {
        match self {
            CodeSource::Deterministic(t) => t.len(),
            CodeSource::Stochastic(j) => j.u_sequences().len(),
        }
    }

    /// Sequence index of item `i`.
    pub fn item(&self, i: usize) -> u64 {
        match self {
            CodeSource::Deterministic(t) => t.members()[i],
            CodeSource::Stochastic(j) => j.u_sequences()[i],
        }
    }

    /// Tilted log-probability of item `i` (nats).
    pub fn item_log_prob(&self, i: usize) -> f64 {
        match self {
            CodeSource::Deterministic(t) => t.log_probs()[i],
            CodeSource::Stochastic(j) => j.u_log_probs()[i],
        }
    }

    /// Channel-input alphabet size `|X|`.
    pub fn input_alphabet(&self) -> usize {
        match self {
            CodeSource::Deterministic(t) => t.base().len(),
            CodeSource::Stochastic(j) => j.base().cols(),
        }
    }

    /// Single-letter law of the channel input.
    pub fn input_marginal(&self) -> Pmf {
        match self {
            CodeSource::Deterministic(t) => t.base().clone(),
            CodeSource::Stochastic(j) => j.base().col_marginal(),
        }
    }

    /// Law of the `ch` output over all `|out|^n` sequences given item `i`.
    pub fn output_law(&self, i: usize, ch: &Channel) -> Result<Vec<f64>> {
        if ch.inputs() != self.input_alphabet() {
            return Err(Error::AlphabetMismatch("channel inputs vs source alphabet".into()));
        }
        match self {
            CodeSource::Deterministic(t) => Ok(sequence_output_law(ch, &t.digits(i))),
            CodeSource::Stochastic(j) => crate::typicality::s_kernel_vector(j, ch, i),
        }
    }
}

fn output_guard(ch: &Channel, n: usize) -> Result<usize> {
    let size = (ch.outputs() as f64).powi(n as i32);
    if size > WIRETAP_GUARD {
        return Err(Error::Guard {
            what: "channel output sequences",
            value: size,
            limit: WIRETAP_GUARD,
        });
    }
    Ok(size as usize)
}

/// A two-index random binning of a code source.
#[derive(Clone, Debug)]
pub struct WiretapCode {
    n: usize,
    r1: f64,
    r2: f64,
    m1: u64,
    m2: u64,
    seed: u64,
    source: CodeSource,
    labels: Vec<(u64, u64)>,
    by_f: Vec<Vec<usize>>,
}

/// Labels every source item with independent uniform `(m, f)` drawn from
/// the stream seeded by `seed`.
pub fn build_code(source: CodeSource, r1: f64, r2: f64, seed: u64) -> Result<WiretapCode> {
    for (field, r) in [("r1", r1), ("r2", r2)] {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::invalid_arg(field, format!("rate must be finite and >= 0, got {r}")));
        }
    }
    let items = source.items();
    if items as f64 > WIRETAP_GUARD {
        return Err(Error::Guard {
            what: "source members",
            value: items as f64,
            limit: WIRETAP_GUARD,
        });
    }
    let n = source.n();
    let (m1, m2) = (bins_for_rate(n, r1), bins_for_rate(n, r2));
    let mut rng = rng_from_seed(seed);
    let labels: Vec<(u64, u64)> = (0..items).map(|_| (rng.gen_range(1..=m1), rng.gen_range(1..=m2))).collect();
    let mut by_f = vec![Vec::new(); m2 as usize];
    for (i, &(_, f)) in labels.iter().enumerate() {
        by_f[f as usize - 1].push(i);
    }
    Ok(WiretapCode {
        n,
        r1,
        r2,
        m1,
        m2,
        seed,
        source,
        labels,
        by_f,
    })
}

/// [`build_code`] under the empty-bin policy: attempt 0 uses `seed`,
/// attempt `k` uses `derive_seed(seed, "attempt", k)`. The first attempt
/// with at most [`EMPTY_BIN_LIMIT`] empty bins is returned; otherwise the
/// attempt with the fewest empty bins (lowest index on ties). The second
/// value counts discarded attempts.
pub fn build_code_with_policy(source: CodeSource, r1: f64, r2: f64, seed: u64) -> Result<(WiretapCode, usize)> {
    let mut best: Option<(WiretapCode, usize)> = None;
    for k in 0..MAX_ATTEMPTS {
        let s = if k == 0 { seed } else { derive_seed(seed, "attempt", k as u64) };
        let code = build_code(source.clone(), r1, r2, s)?;
        let empty = code.empty_bins();
        if empty as f64 <= EMPTY_BIN_LIMIT * (code.m1 * code.m2) as f64 {
            return Ok((code, k));
        }
        if best.as_ref().map_or(true, |(_, e)| empty < *e) {
            best = Some((code, empty));
        }
    }
    Ok((best.expect("at least one attempt").0, MAX_ATTEMPTS))
}

/// Output of [`encode`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Codeword {
    /// `u^n` index for stochastic codes.
    pub u: Option<u64>,
    pub x: u64,
}

/// Output of [`decode`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub m: u64,
    /// Decoded source item (`x^n`, or `u^n` for stochastic codes).
    pub item: u64,
}

impl WiretapCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rates(&self) -> (f64, f64) {
        (self.r1, self.r2)
    }

    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn m2(&self) -> u64 {
        self.m2
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn source(&self) -> &CodeSource {
        &self.source
    }

    /// `(m, f)` per source item.
    pub fn labels(&self) -> &[(u64, u64)] {
        &self.labels
    }

    /// Items labelled `(m, f)`, increasing.
    pub fn bin(&self, m: u64, f: u64) -> Vec<usize> {
        self.members_f(f)
            .iter()
            .copied()
            .filter(|&i| self.labels[i].0 == m)
            .collect()
    }

    fn members_f(&self, f: u64) -> &[usize] {
        if f == 0 || f > self.m2 {
            return &[];
        }
        &self.by_f[f as usize - 1]
    }

    /// Number of `(m, f)` pairs no item carries.
    pub fn empty_bins(&self) -> usize {
        let mut used = vec![false; (self.m1 * self.m2) as usize];
        for &(m, f) in &self.labels {
            used[((m - 1) * self.m2 + f - 1) as usize] = true;
        }
        used.iter().filter(|u| !**u).count()
    }

    /// Tilted mass of each item conditioned on `F = f`.
    fn conditional_f(&self, f: u64) -> Result<(Vec<usize>, Vec<f64>)> {
        let idx = self.members_f(f).to_vec();
        if idx.is_empty() {
            return Err(Error::EmptyF(f));
        }
        let lps: Vec<f64> = idx.iter().map(|&i| self.source.item_log_prob(i)).collect();
        let norm = crate::numeric::log_sum_exp(lps.iter().copied());
        Ok((idx, lps.iter().map(|l| (l - norm).exp()).collect()))
    }

    /// `P(m, f)` over `[M1] × [M2]` under the tilted source law.
    pub fn label_distribution(&self) -> Vec<f64> {
        let mut out = vec![0.0; (self.m1 * self.m2) as usize];
        for (i, &(m, f)) in self.labels.iter().enumerate() {
            out[((m - 1) * self.m2 + f - 1) as usize] += self.source.item_log_prob(i).exp();
        }
        out
    }

    /// Total variation between [`label_distribution`](Self::label_distribution)
    /// and the uniform law on `[M1] × [M2]`.
    pub fn label_tv(&self) -> f64 {
        let u = 1.0 / (self.m1 * self.m2) as f64;
        0.5 * ksum(self.label_distribution().iter().map(|p| (p - u).abs()))
    }
}

/// Draws a codeword for `(m, f)` with a generator seeded by `seed`.
pub fn encode(code: &WiretapCode, m: u64, f: u64, seed: u64) -> Result<Codeword> {
    encode_with(code, m, f, &mut rng_from_seed(seed))
}

fn draw(weights_ln: &[f64], rng: &mut Rng) -> usize {
    let mx = weights_ln.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = weights_ln.iter().map(|l| (l - mx).exp()).collect();
    let total: f64 = w.iter().sum();
    let mut r = rng.gen::<f64>() * total;
    for (k, v) in w.iter().enumerate() {
        if r < *v {
            return k;
        }
        r -= v;
    }
    w.len() - 1
}

/// [`encode`] with a caller-supplied generator.
pub fn encode_with(code: &WiretapCode, m: u64, f: u64, rng: &mut Rng) -> Result<Codeword> {
    let bin = code.bin(m, f);
    if bin.is_empty() {
        return Err(Error::EmptyBin { m, f });
    }
    let lps: Vec<f64> = bin.iter().map(|&i| code.source.item_log_prob(i)).collect();
    let k = bin[draw(&lps, rng)];
    match &code.source {
        CodeSource::Deterministic(t) => Ok(Codeword {
            u: None,
            x: t.members()[k],
        }),
        CodeSource::Stochastic(j) => {
            let cond: Vec<(u64, f64)> = j.conditional(k).collect();
            let lx: Vec<f64> = cond.iter().map(|c| c.1).collect();
            Ok(Codeword {
                u: Some(j.u_sequences()[k]),
                x: cond[draw(&lx, rng)].0,
            })
        }
    }
}

/// Likelihood of output `y_seq` under item `i` through `main`.
fn item_likelihood(code: &WiretapCode, i: usize, main: &Channel, y: &[usize]) -> f64 {
    let n = code.n;
    let kx = code.source.input_alphabet();
    let lik = |x_seq: u64| -> f64 {
        sequence_digits(x_seq, kx, n)
            .iter()
            .zip(y)
            .map(|(&xi, &yi)| main.get(xi, yi))
            .product()
    };
    match &code.source {
        CodeSource::Deterministic(t) => lik(t.members()[i]),
        CodeSource::Stochastic(j) => ksum(j.conditional(i).map(|(x, lc)| lc.exp() * lik(x))),
    }
}

fn map_choice(scores: &[f64]) -> usize {
    let mut best = 0;
    for (k, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] * (1.0 + MAP_TIE_TOL) {
            best = k;
        }
    }
    best
}

/// MAP decoding among items labelled `f`. A candidate replaces the
/// current choice only if its score is larger by a relative `1e−12`, so
/// ties go to the lowest member index.
pub fn decode(code: &WiretapCode, f: u64, y_seq: u64, main: &Channel) -> Result<Decoded> {
    if main.inputs() != code.source.input_alphabet() {
        return Err(Error::AlphabetMismatch("main channel inputs vs source alphabet".into()));
    }
    let idx = code.members_f(f);
    if idx.is_empty() {
        return Err(Error::EmptyF(f));
    }
    let y = sequence_digits(y_seq, main.outputs(), code.n);
    let scores: Vec<f64> = idx
        .iter()
        .map(|&i| code.source.item_log_prob(i).exp() * item_likelihood(code, i, main, &y))
        .collect();
    let k = idx[map_choice(&scores)];
    Ok(Decoded {
        m: code.labels[k].0,
        item: code.source.item(k),
    })
}

/// Exact probability that the decoded message differs from the sent one,
/// given `F = f`, with the source drawn from the tilted law conditioned
/// on `F = f`.
pub fn error_prob(code: &WiretapCode, f: u64, main: &Channel) -> Result<f64> {
    let ny = output_guard(main, code.n)?;
    let (idx, w) = code.conditional_f(f)?;
    let laws: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| code.source.output_law(i, main))
        .collect::<Result<_>>()?;
    let mut errs = Vec::with_capacity(ny);
    let mut scores = vec![0.0; idx.len()];
    for y in 0..ny {
        for k in 0..idx.len() {
            scores[k] = w[k] * laws[k][y];
        }
        let m_hat = code.labels[idx[map_choice(&scores)]].0;
        errs.push(ksum((0..idx.len()).filter(|&k| code.labels[idx[k]].0 != m_hat).map(|k| scores[k])));
    }
    Ok(ksum(errs).clamp(0.0, 1.0))
}

/// Exact leakage given `F = f`: the divergence of `p(m, z^n | f)` from
/// `p^U(m) q(z^n)`, where `q` is the i.i.d. law of the single-letter
/// eavesdropper output. Tsallis for finite orders, KL (nats) at one,
/// `D_∞` (bits) at infinity.
pub fn leakage(code: &WiretapCode, f: u64, eve: &Channel, a: AlphaOrder) -> Result<f64> {
    let nz = output_guard(eve, code.n)?;
    let (idx, w) = code.conditional_f(f)?;
    let mut joint = vec![0.0; code.m1 as usize * nz];
    for (k, &i) in idx.iter().enumerate() {
        let law = code.source.output_law(i, eve)?;
        let m = code.labels[i].0 as usize - 1;
        for (d, l) in joint[m * nz..(m + 1) * nz].iter_mut().zip(law) {
            *d += w[k] * l;
        }
    }
    let q1 = eve.output(&code.source.input_marginal())?;
    let q = q1.product(code.n);
    Ok(binning_divergence_flat(&joint, q.probs(), code.m1, a))
}

/// Leakage and error for one public index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageRecord {
    pub f: u64,
    pub alpha: AlphaOrder,
    pub leakage: f64,
    pub error_prob: f64,
    pub n: usize,
    pub code_seed: u64,
}

/// Evaluates every nonempty `f` and returns the one minimizing
/// `leakage + error_prob` (lowest `f` on ties) with all per-`f` records.
pub fn select_f(
    code: &WiretapCode,
    main: &Channel,
    eve: &Channel,
    a: AlphaOrder,
) -> Result<(u64, Vec<LeakageRecord>)> {
    let mut records = Vec::new();
    for f in 1..=code.m2 {
        if code.members_f(f).is_empty() {
            continue;
        }
        records.push(LeakageRecord {
            f,
            alpha: a,
            leakage: leakage(code, f, eve, a)?,
            error_prob: error_prob(code, f, main)?,
            n: code.n,
            code_seed: code.seed,
        });
    }
    let mut best: Option<&LeakageRecord> = None;
    for r in &records {
        if best.map_or(true, |b| r.leakage + r.error_prob < b.leakage + b.error_prob) {
            best = Some(r);
        }
    }
    let f = best.ok_or_else(|| Error::invalid_arg("code", "every public index is empty"))?.f;
    Ok((f, records))
}
