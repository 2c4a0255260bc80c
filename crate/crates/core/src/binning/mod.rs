//! Random binning maps and the output statistics they induce.
//!
//! A [`BinningMap`] assigns each of `n_items` domain elements an independent
//! uniform label in `1..=M`. Applied to the rows of a joint `p(x, z)` it
//! induces `P(b, z) = Σ_{x: B(x)=b} p(x, z)`, compared against the target
//! `p^U(b) p(z)`.
//!
//! Sequence alphabets use the mixed-radix index of `x^n` with the first
//! symbol most significant, matching [`JointPmf::product`].

mod exact;
mod mc;

use serde::{Deserialize, Serialize};

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::measures::{raw, AlphaOrder, JointPmf};
use crate::numeric::{ksum, nats_to_bits};
use crate::seed::rng_from_seed;

pub use exact::{
    binomial, compositions, distinct_tuple_sum, expected_tsallis_exact, expected_tsallis_exact_iid,
    set_partitions, tsallis2_closed_form, Composition, PowerSums, MAX_EXACT_ORDER,
};
pub use mc::{expected_divergence_mc, osrb_sweep, McEstimate, OsrbMode, OsrbRecord, SEQUENCE_GUARD};

/// Largest number of binnings [`expected_divergence_enum`] will visit.
pub const ENUM_GUARD: f64 = 1e6;

/// A total map from item indices to bin labels `1..=m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BinningDoc")]
pub struct BinningMap {
    n_items: usize,
    m: u64,
    seed: u64,
    assignment: Vec<u64>,
}

#[derive(Deserialize)]
struct BinningDoc {
    n_items: usize,
    m: u64,
    seed: u64,
    assignment: Vec<u64>,
}

impl TryFrom<BinningDoc> for BinningMap {
    type Error = Error;

    fn try_from(d: BinningDoc) -> Result<Self> {
        if d.assignment.len() != d.n_items {
            return Err(Error::invalid_arg("assignment", "length differs from n_items"));
        }
        BinningMap::from_assignment(d.m, d.assignment, d.seed)
    }
}

impl BinningMap {
    /// Wraps an explicit assignment (labels in `1..=m`).
    pub fn from_assignment(m: u64, assignment: Vec<u64>, seed: u64) -> Result<Self> {
        if m == 0 || assignment.is_empty() {
            return Err(Error::invalid_arg("m", "need m >= 1 and at least one item"));
        }
        if let Some(bad) = assignment.iter().find(|b| **b == 0 || **b > m) {
            return Err(Error::invalid_arg("assignment", format!("label {bad} outside 1..={m}")));
        }
        Ok(BinningMap {
            n_items: assignment.len(),
            m,
            seed,
            assignment,
        })
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn assignment(&self) -> &[u64] {
        &self.assignment
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("binning serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            path: "<string>".into(),
            source,
        })
    }
}

/// Independent uniform labels in `1..=m`, drawn from a ChaCha8 stream
/// seeded with `seed`.
pub fn sample_binning(n_items: usize, m: u64, seed: u64) -> Result<BinningMap> {
    if n_items == 0 {
        return Err(Error::invalid_arg("n_items", "must be >= 1"));
    }
    if m == 0 {
        return Err(Error::invalid_arg("m", "must be >= 1"));
    }
    let mut rng = rng_from_seed(seed);
    let assignment = (0..n_items).map(|_| rng.gen_range(1..=m)).collect();
    Ok(BinningMap {
        n_items,
        m,
        seed,
        assignment,
    })
}

/// Row-major `P(b, z)` for 1-based labels.
pub(crate) fn induced_flat(assignment: &[u64], m: u64, probs: &[f64], cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; m as usize * cols];
    for (x, &b) in assignment.iter().enumerate() {
        let row = &probs[x * cols..(x + 1) * cols];
        let dst = &mut out[(b as usize - 1) * cols..b as usize * cols];
        for (d, v) in dst.iter_mut().zip(row) {
            *d += v;
        }
    }
    out
}

/// Divergence of a flattened `P(b, z)` from `p^U(b) p(z)`: Tsallis for
/// finite orders (KL in nats at `One`), `D_∞` in bits at `Infinity`.
pub(crate) fn binning_divergence_flat(induced: &[f64], pz: &[f64], m: u64, a: AlphaOrder) -> f64 {
    let target: Vec<f64> = (0..m as usize)
        .flat_map(|_| pz.iter().map(move |p| p / m as f64))
        .collect();
    match a {
        AlphaOrder::One => raw::kl(induced, &target),
        AlphaOrder::Finite(al) => raw::tsallis(induced, &target, al),
        AlphaOrder::Infinity => nats_to_bits(raw::dinf(induced, &target)),
    }
}

fn check_items(b: &BinningMap, j: &JointPmf) -> Result<()> {
    if b.n_items != j.rows() {
        return Err(Error::AlphabetMismatch(format!(
            "binning covers {} items but the joint has {} rows",
            b.n_items,
            j.rows()
        )));
    }
    Ok(())
}

/// `P(b, z)` over `[M] × Z`.
pub fn induced_joint(b: &BinningMap, j: &JointPmf) -> Result<JointPmf> {
    check_items(b, j)?;
    let probs = induced_flat(&b.assignment, b.m, j.probs(), j.cols());
    let rows = (1..=b.m).map(|i| i.to_string()).collect();
    Ok(JointPmf::from_flat_unchecked(rows, j.col_labels().to_vec(), probs))
}

/// `T_α(P(b,z) ‖ p^U(b) p(z))`, or `D_∞` (bits) at infinite order.
pub fn divergence_for_binning(b: &BinningMap, j: &JointPmf, a: AlphaOrder) -> Result<f64> {
    check_items(b, j)?;
    let induced = induced_flat(&b.assignment, b.m, j.probs(), j.cols());
    Ok(binning_divergence_flat(&induced, j.col_marginal().probs(), b.m, a))
}

/// Exact average of [`divergence_for_binning`] over all `M^{|X|}` maps.
pub fn expected_divergence_enum(j: &JointPmf, m: u64, a: AlphaOrder) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid_arg("m", "must be >= 1"));
    }
    let count = (m as f64).powi(j.rows() as i32);
    if count > ENUM_GUARD {
        return Err(Error::Guard {
            what: "M^|X| binnings",
            value: count,
            limit: ENUM_GUARD,
        });
    }
    let pz = j.col_marginal();
    let mut assign = vec![1u64; j.rows()];
    let mut values = Vec::with_capacity(count as usize);
    loop {
        let induced = induced_flat(&assign, m, j.probs(), j.cols());
        values.push(binning_divergence_flat(&induced, pz.probs(), m, a));
        // odometer over labels
        let mut i = 0;
        loop {
            if i == assign.len() {
                return Ok(ksum(values.iter().copied()) / values.len() as f64);
            }
            if assign[i] < m {
                assign[i] += 1;
                break;
            }
            assign[i] = 1;
            i += 1;
        }
    }
}
