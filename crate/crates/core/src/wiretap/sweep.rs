//! Blocklength sweeps over independently sampled wiretap codes.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{AlphaOrder, Channel, Pmf};
use crate::seed::derive_seed;

use super::{build_code_with_policy, select_f, CodeSource};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncoderKind {
    Deterministic,
    Stochastic,
}

impl std::fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EncoderKind::Deterministic => "deterministic",
            EncoderKind::Stochastic => "stochastic",
        })
    }
}

/// Sweep configuration as stored on disk. File paths are resolved
/// relative to the directory holding the config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ns: Vec<usize>,
    pub r1: f64,
    pub r2: f64,
    pub alpha: AlphaOrder,
    pub eps: f64,
    /// Independent codes per blocklength.
    pub codes: usize,
    pub seed: u64,
    pub encoder: EncoderKind,
    /// `p(x)` for deterministic encoders, `p(u)` for stochastic ones.
    pub input: PathBuf,
    /// `p(x|u)`, stochastic encoders only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<PathBuf>,
    pub main: PathBuf,
    pub eve: PathBuf,
}

/// A validated configuration with its distributions loaded.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub ns: Vec<usize>,
    pub r1: f64,
    pub r2: f64,
    pub alpha: AlphaOrder,
    pub eps: f64,
    pub codes: usize,
    pub seed: u64,
    pub input: Pmf,
    pub prefix: Option<Channel>,
    pub main: Channel,
    pub eve: Channel,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            path: "<string>".into(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.display().to_string(),
            source,
        })
    }

    /// Loads the referenced files (relative to `base`) and validates.
    pub fn resolve(&self, base: impl AsRef<Path>) -> Result<Experiment> {
        let base = base.as_ref();
        let at = |p: &Path| base.join(p);
        let prefix = match (self.encoder, &self.prefix) {
            (EncoderKind::Stochastic, Some(p)) => Some(Channel::load(at(p))?),
            (EncoderKind::Stochastic, None) => {
                return Err(Error::invalid_arg("prefix", "stochastic encoders need a p(x|u) file"))
            }
            (EncoderKind::Deterministic, Some(_)) => {
                return Err(Error::invalid_arg("prefix", "only stochastic encoders take a prefix channel"))
            }
            (EncoderKind::Deterministic, None) => None,
        };
        Experiment::new(
            self.ns.clone(),
            self.r1,
            self.r2,
            self.alpha,
            self.eps,
            self.codes,
            self.seed,
            Pmf::load(at(&self.input))?,
            prefix,
            Channel::load(at(&self.main))?,
            Channel::load(at(&self.eve))?,
        )
    }
}

impl Experiment {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        ns: Vec<usize>,
        r1: f64,
        r2: f64,
        alpha: AlphaOrder,
        eps: f64,
        codes: usize,
        seed: u64,
        input: Pmf,
        prefix: Option<Channel>,
        main: Channel,
        eve: Channel,
    ) -> Result<Self> {
        if ns.contains(&0) {
            return Err(Error::invalid_arg("ns", "blocklengths must be >= 1"));
        }
        for (field, r) in [("r1", r1), ("r2", r2)] {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(Error::invalid_arg(field, format!("must be finite and >= 0, got {r}")));
            }
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::invalid_arg("eps", format!("must be > 0, got {eps}")));
        }
        if codes == 0 {
            return Err(Error::invalid_arg("codes", "must be >= 1"));
        }
        let x_labels = match &prefix {
            Some(ch) => {
                if ch.in_labels() != input.labels() {
                    return Err(Error::AlphabetMismatch("input p(u) vs prefix channel inputs".into()));
                }
                ch.out_labels()
            }
            None => input.labels(),
        };
        if main.in_labels() != x_labels {
            return Err(Error::AlphabetMismatch("main channel inputs vs X alphabet".into()));
        }
        if eve.in_labels() != x_labels {
            return Err(Error::AlphabetMismatch("eavesdropper channel inputs vs X alphabet".into()));
        }
        Ok(Experiment {
            ns,
            r1,
            r2,
            alpha,
            eps,
            codes,
            seed,
            input,
            prefix,
            main,
            eve,
        })
    }

    pub fn encoder(&self) -> EncoderKind {
        if self.prefix.is_some() {
            EncoderKind::Stochastic
        } else {
            EncoderKind::Deterministic
        }
    }

    pub fn source(&self, n: usize) -> Result<CodeSource> {
        match &self.prefix {
            Some(ch) => CodeSource::stochastic(&self.input, ch, n, self.eps),
            None => CodeSource::deterministic(&self.input, n, self.eps),
        }
    }

    /// Seed of code `k` at blocklength `n`.
    pub fn code_seed(&self, n: usize, k: usize) -> u64 {
        derive_seed(derive_seed(self.seed, "wiretap", n as u64), "code", k as u64)
    }
}

/// One code of a sweep; CSV column order is the field order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub n: usize,
    pub r1: f64,
    pub r2: f64,
    pub alpha: AlphaOrder,
    pub encoder: EncoderKind,
    pub code_seed: u64,
    pub f_star: u64,
    pub leakage: f64,
    pub error_prob: f64,
    pub discards: usize,
}

impl ExperimentRecord {
    pub const HEADER: [&'static str; 10] = [
        "n",
        "r1",
        "r2",
        "alpha",
        "encoder",
        "code_seed",
        "f_star",
        "leakage",
        "error_prob",
        "discards",
    ];
}

/// Builds `codes` codes per blocklength, selects the best public index of
/// each and records its leakage and error. Codes run in parallel; records
/// come out ordered by `(n, code index)`.
pub fn sweep_experiment(exp: &Experiment) -> Result<Vec<ExperimentRecord>> {
    let mut out = Vec::new();
    for &n in &exp.ns {
        let source = exp.source(n)?;
        let rows: Vec<ExperimentRecord> = (0..exp.codes)
            .into_par_iter()
            .map(|k| {
                let code_seed = exp.code_seed(n, k);
                let (code, discards) = build_code_with_policy(source.clone(), exp.r1, exp.r2, code_seed)?;
                let (f_star, recs) = select_f(&code, &exp.main, &exp.eve, exp.alpha)?;
                let best = recs.iter().find(|r| r.f == f_star).expect("selected record");
                Ok(ExperimentRecord {
                    n,
                    r1: exp.r1,
                    r2: exp.r2,
                    alpha: exp.alpha,
                    encoder: exp.encoder(),
                    code_seed,
                    f_star,
                    leakage: best.leakage,
                    error_prob: best.error_prob,
                    discards,
                })
            })
            .collect::<Result<_>>()?;
        out.extend(rows);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bench(ns: Vec<usize>, codes: usize) -> Experiment {
        Experiment::new(
            ns,
            0.1,
            0.5,
            AlphaOrder::Finite(2.0),
            0.2,
            codes,
            3,
            Pmf::uniform(2),
            None,
            Channel::bsc(0.1).unwrap(),
            Channel::bsc(0.3).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn empty_n_list() {
        assert!(sweep_experiment(&bench(vec![], 4)).unwrap().is_empty());
    }

    #[test]
    fn records_replay() {
        let exp = bench(vec![4, 6], 4);
        let recs = sweep_experiment(&exp).unwrap();
        assert_eq!(recs.len(), 8);
        assert_eq!(recs, sweep_experiment(&exp).unwrap());
        let r = &recs[5];
        let (code, d) = build_code_with_policy(exp.source(r.n).unwrap(), r.r1, r.r2, r.code_seed).unwrap();
        assert_eq!(d, r.discards);
        let (f, _) = select_f(&code, &exp.main, &exp.eve, r.alpha).unwrap();
        assert_eq!(f, r.f_star);
    }

    #[test]
    fn validation_names_fields() {
        let bad = Experiment::new(
            vec![4],
            0.1,
            0.5,
            AlphaOrder::Finite(2.0),
            0.2,
            0,
            3,
            Pmf::uniform(2),
            None,
            Channel::bsc(0.1).unwrap(),
            Channel::bsc(0.3).unwrap(),
        );
        assert!(bad.unwrap_err().to_string().contains("codes"));
        let cfg = r#"{"ns":[4],"r1":0.1,"r2":0.5,"alpha":"inf","eps":0.2,"codes":2,"seed":1,
            "encoder":"deterministic","input":"p.json","main":"m.json","eve":"e.json"}"#;
        let c = ExperimentConfig::from_json_str(cfg).unwrap();
        assert_eq!(c.alpha, AlphaOrder::Infinity);
        assert!(ExperimentConfig::from_json_str(&cfg.replace("\"codes\"", "\"kodes\"")).is_err());
    }
}
