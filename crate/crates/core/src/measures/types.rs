//! Finite-alphabet distributions, channels and the divergence order.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::ksum;

/// Normalization tolerance enforced by the constructors.
pub const NORM_TOL: f64 = 1e-12;
/// Deviation the JSON loaders silently repair by renormalizing.
pub const LOAD_TOL: f64 = 1e-9;
/// Orders closer than this to 1 dispatch to the Shannon/KL branch.
pub const ONE_TOL: f64 = 1e-6;

/// Order of a Rényi/Tsallis quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaOrder {
    One,
    Finite(f64),
    Infinity,
}

impl AlphaOrder {
    /// Accepts any `α > 0` (including `+∞`). Values within [`ONE_TOL`] of 1
    /// become [`AlphaOrder::One`].
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::invalid_arg("alpha", format!("order must be > 0, got {alpha}")));
        }
        if alpha == f64::INFINITY {
            Ok(AlphaOrder::Infinity)
        } else if (alpha - 1.0).abs() < ONE_TOL {
            Ok(AlphaOrder::One)
        } else {
            Ok(AlphaOrder::Finite(alpha))
        }
    }

    /// Numeric value: 1, α, or `+∞`.
    pub fn value(self) -> f64 {
        match self {
            AlphaOrder::One => 1.0,
            AlphaOrder::Finite(a) => a,
            AlphaOrder::Infinity => f64::INFINITY,
        }
    }

    /// True for finite `α > 1` and for `∞`.
    pub fn above_one(self) -> bool {
        self.value() > 1.0
    }
}

impl fmt::Display for AlphaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaOrder::One => write!(f, "1"),
            AlphaOrder::Finite(a) => write!(f, "{a}"),
            AlphaOrder::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for AlphaOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(AlphaOrder::Infinity),
            _ => {
                let a: f64 = t
                    .parse()
                    .map_err(|_| Error::invalid_arg("alpha", format!("cannot parse `{s}`")))?;
                if a.is_infinite() {
                    return Err(Error::invalid_arg("alpha", "write infinity as \"inf\""));
                }
                AlphaOrder::new(a)
            }
        }
    }
}

impl Serialize for AlphaOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AlphaOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(a) => AlphaOrder::new(a).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn default_labels(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

fn check_labels(labels: &[String], what: &str) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what}: empty alphabet")));
    }
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::InvalidDistribution(format!("{what}: duplicate label `{l}`")));
        }
    }
    Ok(())
}

/// Checks entries and total mass. With `repair`, rescales when the sum is
/// within [`LOAD_TOL`] of one.
fn check_mass(probs: &mut [f64], what: &str, repair: bool) -> Result<()> {
    if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!("{what}: entry {bad} is not a probability")));
    }
    let total = ksum(probs.iter().copied());
    let dev = (total - 1.0).abs();
    if dev <= NORM_TOL {
        return Ok(());
    }
    if repair && dev <= LOAD_TOL {
        probs.iter_mut().for_each(|p| *p /= total);
        return Ok(());
    }
    Err(Error::InvalidDistribution(format!("{what}: mass sums to {total}")))
}

/// Labels of the n-fold product alphabet, most significant symbol first.
pub(crate) fn product_labels(labels: &[String], n: usize) -> Vec<String> {
    let sep = if labels.iter().all(|l| l.chars().count() == 1) { "" } else { "," };
    let mut out = vec![String::new()];
    for i in 0..n {
        let mut next = Vec::with_capacity(out.len() * labels.len());
        for prefix in &out {
            for l in labels {
                if i == 0 {
                    next.push(l.clone());
                } else {
                    next.push(format!("{prefix}{sep}{l}"));
                }
            }
        }
        out = next;
    }
    out
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_doc<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| Error::Json {
        path: origin.to_string(),
        source,
    })
}

/// Probability mass function over a labeled finite alphabet.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pmf {
    labels: Vec<String>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct PmfDoc {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        Self::build(labels, probs, false)
    }

    fn build(labels: Vec<String>, mut probs: Vec<f64>, repair: bool) -> Result<Self> {
        check_labels(&labels, "pmf")?;
        if labels.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "pmf: {} labels but {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        check_mass(&mut probs, "pmf", repair)?;
        Ok(Pmf { labels, probs })
    }

    /// Pmf with labels `"0"`, `"1"`, ...
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        Self::new(default_labels(probs.len()), probs)
    }

    /// Rescales nonnegative weights to unit mass.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total = ksum(weights.iter().copied());
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidDistribution("weights must be nonnegative with positive mass".into()));
        }
        Self::from_probs(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(k: usize) -> Self {
        Pmf {
            labels: default_labels(k),
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn point_mass(k: usize, at: usize) -> Self {
        let mut probs = vec![0.0; k];
        probs[at] = 1.0;
        Pmf {
            labels: default_labels(k),
            probs,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().cloned().fold(0.0, f64::max)
    }

    /// Law of `n` i.i.d. draws, indexed mixed-radix with the first symbol
    /// most significant.
    pub fn product(&self, n: usize) -> Pmf {
        let mut probs = vec![1.0];
        for _ in 0..n {
            probs = probs
                .iter()
                .flat_map(|a| self.probs.iter().map(move |b| a * b))
                .collect();
        }
        Pmf {
            labels: product_labels(&self.labels, n),
            probs,
        }
    }

    pub(crate) fn same_alphabet(&self, other: &Pmf) -> Result<()> {
        if self.labels != other.labels {
            return Err(Error::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                self.labels, other.labels
            )));
        }
        Ok(())
    }

    /// Parses `{"labels": [...], "probs": [...]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: PmfDoc = parse_doc(text, "<string>")?;
        Self::build(doc.labels, doc.probs, true)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("pmf serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let doc: PmfDoc = parse_doc(&read_file(path)?, &path.display().to_string())?;
        Self::build(doc.labels, doc.probs, true)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::cli::emit::write_atomic(path.as_ref(), self.to_json_string().as_bytes())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    probs: Vec<Vec<f64>>,
}

fn flatten_rows(rows: Vec<Vec<f64>>, ncols: usize, what: &str) -> Result<Vec<f64>> {
    let mut flat = Vec::with_capacity(rows.len() * ncols);
    for (i, r) in rows.into_iter().enumerate() {
        if r.len() != ncols {
            return Err(Error::InvalidDistribution(format!(
                "{what}: row {i} has {} entries, expected {ncols}",
                r.len()
            )));
        }
        flat.extend(r);
    }
    Ok(flat)
}

/// Joint pmf `p(x, z)`: rows index X, columns index Z.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPmf {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(row_labels: Vec<String>, col_labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(row_labels, col_labels, rows, false)
    }

    fn build(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        rows: Vec<Vec<f64>>,
        repair: bool,
    ) -> Result<Self> {
        check_labels(&row_labels, "joint rows")?;
        check_labels(&col_labels, "joint columns")?;
        if rows.len() != row_labels.len() {
            return Err(Error::InvalidDistribution(format!(
                "joint: {} row labels but {} rows",
                row_labels.len(),
                rows.len()
            )));
        }
        let mut probs = flatten_rows(rows, col_labels.len(), "joint")?;
        check_mass(&mut probs, "joint", repair)?;
        Ok(JointPmf {
            row_labels,
            col_labels,
            probs,
        })
    }

    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        Self::new(default_labels(nr), default_labels(nc), rows)
    }

    /// Normalizes a nonnegative weight matrix.
    pub fn from_weights(rows: &[Vec<f64>]) -> Result<Self> {
        let total = ksum(rows.iter().flatten().copied());
        if !(total > 0.0) {
            return Err(Error::InvalidDistribution("weights have no mass".into()));
        }
        Self::from_matrix(rows.iter().map(|r| r.iter().map(|w| w / total).collect()).collect())
    }

    pub(crate) fn from_flat_unchecked(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        probs: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(probs.len(), row_labels.len() * col_labels.len());
        JointPmf {
            row_labels,
            col_labels,
            probs,
        }
    }

    /// `p(x, z) = p(x) p(z|x)`.
    pub fn from_input_and_channel(p_x: &Pmf, ch: &Channel) -> Result<Self> {
        if p_x.labels() != ch.in_labels() {
            return Err(Error::AlphabetMismatch("input pmf vs channel input alphabet".into()));
        }
        let probs = (0..p_x.len())
            .flat_map(|x| ch.row(x).iter().map(move |w| p_x.probs()[x] * w))
            .collect();
        Ok(Self::from_flat_unchecked(
            ch.in_labels().to_vec(),
            ch.out_labels().to_vec(),
            probs,
        ))
    }

    /// `p(x, z) = p(z) p(x|z)` where `x_given_z` maps Z to X.
    pub fn from_side_info(p_z: &Pmf, x_given_z: &Channel) -> Result<Self> {
        Ok(Self::from_input_and_channel(p_z, x_given_z)?.transpose())
    }

    pub fn independent(p_x: &Pmf, p_z: &Pmf) -> Self {
        let probs = p_x
            .probs()
            .iter()
            .flat_map(|a| p_z.probs().iter().map(move |b| a * b))
            .collect();
        Self::from_flat_unchecked(p_x.labels().to_vec(), p_z.labels().to_vec(), probs)
    }

    pub fn transpose(&self) -> JointPmf {
        let (r, c) = (self.rows(), self.cols());
        let mut probs = vec![0.0; r * c];
        for x in 0..r {
            for z in 0..c {
                probs[z * r + x] = self.probs[x * c + z];
            }
        }
        Self::from_flat_unchecked(self.col_labels.clone(), self.row_labels.clone(), probs)
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// Row-major entries.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, x: usize, z: usize) -> f64 {
        self.probs[x * self.cols() + z]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let c = self.cols();
        &self.probs[x * c..(x + 1) * c]
    }

    /// Marginal of X (rows).
    pub fn row_marginal(&self) -> Pmf {
        let probs = (0..self.rows()).map(|x| ksum(self.row(x).iter().copied())).collect();
        Pmf {
            labels: self.row_labels.clone(),
            probs,
        }
    }

    /// Marginal of Z (columns).
    pub fn col_marginal(&self) -> Pmf {
        let probs = (0..self.cols())
            .map(|z| ksum((0..self.rows()).map(|x| self.get(x, z))))
            .collect();
        Pmf {
            labels: self.col_labels.clone(),
            probs,
        }
    }

    /// `p(·|z)` as a vector over X; `None` when `p(z) = 0`.
    pub fn x_given_z(&self, z: usize) -> Option<Vec<f64>> {
        let pz = ksum((0..self.rows()).map(|x| self.get(x, z)));
        if pz > 0.0 {
            Some((0..self.rows()).map(|x| self.get(x, z) / pz).collect())
        } else {
            None
        }
    }

    /// The channel `p(z|x)` (rows with `p(x) = 0` are set uniform).
    pub fn z_given_x(&self) -> Channel {
        let c = self.cols();
        let mut probs = Vec::with_capacity(self.probs.len());
        for x in 0..self.rows() {
            let px = ksum(self.row(x).iter().copied());
            if px > 0.0 {
                probs.extend(self.row(x).iter().map(|v| v / px));
            } else {
                probs.extend(std::iter::repeat_n(1.0 / c as f64, c));
            }
        }
        Channel::from_flat_unchecked(self.row_labels.clone(), self.col_labels.clone(), probs)
    }

    /// Flattens to a pmf over the product alphabet (row-major).
    pub fn flatten(&self) -> Pmf {
        let labels = self
            .row_labels
            .iter()
            .flat_map(|r| self.col_labels.iter().map(move |c| format!("{r}|{c}")))
            .collect();
        Pmf {
            labels,
            probs: self.probs.clone(),
        }
    }

    /// Joint law of `n` i.i.d. copies of `(X, Z)`, over `(X^n, Z^n)`.
    pub fn product(&self, n: usize) -> JointPmf {
        let (r, c) = (self.rows(), self.cols());
        let mut cur = vec![1.0];
        let (mut cr, mut cc) = (1usize, 1usize);
        for _ in 0..n {
            let (nr, nc) = (cr * r, cc * c);
            let mut next = vec![0.0; nr * nc];
            for a in 0..cr {
                for b in 0..cc {
                    let v = cur[a * cc + b];
                    if v == 0.0 {
                        continue;
                    }
                    for x in 0..r {
                        for z in 0..c {
                            next[(a * r + x) * nc + b * c + z] = v * self.probs[x * c + z];
                        }
                    }
                }
            }
            cur = next;
            cr = nr;
            cc = nc;
        }
        Self::from_flat_unchecked(
            product_labels(&self.row_labels, n),
            product_labels(&self.col_labels, n),
            cur,
        )
    }

    fn doc(&self) -> MatrixDoc {
        MatrixDoc {
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
            probs: (0..self.rows()).map(|x| self.row(x).to_vec()).collect(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let d: MatrixDoc = parse_doc(text, "<string>")?;
        Self::build(d.row_labels, d.col_labels, d.probs, true)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.doc()).expect("joint serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let d: MatrixDoc = parse_doc(&read_file(path)?, &path.display().to_string())?;
        Self::build(d.row_labels, d.col_labels, d.probs, true)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::cli::emit::write_atomic(path.as_ref(), self.to_json_string().as_bytes())
    }
}

/// Row-stochastic conditional `p(out|in)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    in_labels: Vec<String>,
    out_labels: Vec<String>,
    probs: Vec<f64>,
}

impl Channel {
    pub fn new(in_labels: Vec<String>, out_labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(in_labels, out_labels, rows, false)
    }

    fn build(
        in_labels: Vec<String>,
        out_labels: Vec<String>,
        rows: Vec<Vec<f64>>,
        repair: bool,
    ) -> Result<Self> {
        check_labels(&in_labels, "channel inputs")?;
        check_labels(&out_labels, "channel outputs")?;
        if rows.len() != in_labels.len() {
            return Err(Error::InvalidDistribution(format!(
                "channel: {} input labels but {} rows",
                in_labels.len(),
                rows.len()
            )));
        }
        let c = out_labels.len();
        let mut probs = flatten_rows(rows, c, "channel")?;
        for (i, row) in probs.chunks_mut(c).enumerate() {
            check_mass(row, &format!("channel row {i}"), repair)?;
        }
        Ok(Channel {
            in_labels,
            out_labels,
            probs,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        Self::new(default_labels(nr), default_labels(nc), rows)
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::from_rows(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Noiseless channel on `k` symbols.
    pub fn identity(k: usize) -> Self {
        let mut probs = vec![0.0; k * k];
        for i in 0..k {
            probs[i * k + i] = 1.0;
        }
        Self::from_flat_unchecked(default_labels(k), default_labels(k), probs)
    }

    /// Every input produces the same output law.
    pub fn constant(inputs: usize, out: &Pmf) -> Self {
        let probs = (0..inputs).flat_map(|_| out.probs().iter().copied()).collect();
        Self::from_flat_unchecked(default_labels(inputs), out.labels().to_vec(), probs)
    }

    pub(crate) fn from_flat_unchecked(in_labels: Vec<String>, out_labels: Vec<String>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), in_labels.len() * out_labels.len());
        Channel {
            in_labels,
            out_labels,
            probs,
        }
    }

    pub fn inputs(&self) -> usize {
        self.in_labels.len()
    }

    pub fn outputs(&self) -> usize {
        self.out_labels.len()
    }

    pub fn in_labels(&self) -> &[String] {
        &self.in_labels
    }

    pub fn out_labels(&self) -> &[String] {
        &self.out_labels
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let c = self.outputs();
        &self.probs[x * c..(x + 1) * c]
    }

    pub fn get(&self, x: usize, z: usize) -> f64 {
        self.probs[x * self.outputs() + z]
    }

    /// Cascade `self` then `next`.
    pub fn compose(&self, next: &Channel) -> Result<Channel> {
        if self.out_labels != next.in_labels {
            return Err(Error::AlphabetMismatch("cascade: output/input alphabets differ".into()));
        }
        let (a, c) = (self.inputs(), next.outputs());
        let mut probs = vec![0.0; a * c];
        for x in 0..a {
            for z in 0..c {
                probs[x * c + z] = ksum((0..self.outputs()).map(|y| self.get(x, y) * next.get(y, z)));
            }
        }
        Ok(Self::from_flat_unchecked(self.in_labels.clone(), next.out_labels.clone(), probs))
    }

    /// Output law for input law `p`.
    pub fn output(&self, p: &Pmf) -> Result<Pmf> {
        if p.labels() != self.in_labels() {
            return Err(Error::AlphabetMismatch("input pmf vs channel input alphabet".into()));
        }
        let probs = (0..self.outputs())
            .map(|z| ksum((0..self.inputs()).map(|x| p.probs()[x] * self.get(x, z))))
            .collect();
        Ok(Pmf {
            labels: self.out_labels.clone(),
            probs,
        })
    }

    fn doc(&self) -> MatrixDoc {
        MatrixDoc {
            row_labels: self.in_labels.clone(),
            col_labels: self.out_labels.clone(),
            probs: (0..self.inputs()).map(|x| self.row(x).to_vec()).collect(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let d: MatrixDoc = parse_doc(text, "<string>")?;
        Self::build(d.row_labels, d.col_labels, d.probs, true)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.doc()).expect("channel serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let d: MatrixDoc = parse_doc(&read_file(path)?, &path.display().to_string())?;
        Self::build(d.row_labels, d.col_labels, d.probs, true)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::cli::emit::write_atomic(path.as_ref(), self.to_json_string().as_bytes())
    }
}
