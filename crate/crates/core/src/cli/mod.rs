//! Batch front-end: argument parsing, dispatch and record emission.
//!
//! Exit status is 0 on success, 2 on validation errors (bad flags,
//! missing or malformed files) and 3 when a numeric guard refuses an
//! enumeration. `OSRB_LAB_THREADS` sets the worker count (0 or unset for
//! one per core).

pub mod emit;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::binning::{osrb_sweep, OsrbMode, OsrbRecord};
use crate::error::{Error, Result};
use crate::measures::{self, AlphaOrder, Channel, JointPmf, Pmf};
use crate::rates::{self, EncoderInput, OptimizerSettings, RateReport};
use crate::wiretap::{sweep_experiment, ExperimentConfig, ExperimentRecord};

pub use emit::{csv_float, emit_records, fmt_sig, render_records, write_atomic, CsvRecord, Format};

pub const THREADS_ENV: &str = "OSRB_LAB_THREADS";

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(name = "osrb-lab", version, about = "Random-binning output statistics, secrecy rates and wiretap sweeps")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

/// Output destination shared by all subcommands.
#[derive(Debug, Clone, clap::Args)]
pub struct OutputArgs {
    /// Write records to this file (atomically).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record format; defaults to the `--out` extension, else csv.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.out {
            Some(p) if p.extension().is_some_and(|e| e == "json") => Format::Json,
            _ => Format::Csv,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a divergence or entropy.
    Measure {
        #[arg(long, value_enum)]
        kind: MeasureKind,
        /// First pmf (JSON).
        #[arg(long)]
        p: Option<PathBuf>,
        /// Second pmf (JSON).
        #[arg(long)]
        q: Option<PathBuf>,
        /// Joint pmf (JSON); X on rows.
        #[arg(long)]
        joint: Option<PathBuf>,
        /// Comma-separated orders; `inf` for infinity.
        #[arg(long, value_parser = parse_alpha_list, value_delimiter = ',', default_value = "1")]
        alpha: Vec<AlphaOrder>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep the expected binning divergence over blocklengths.
    Osrb {
        #[arg(long)]
        joint: PathBuf,
        #[arg(long, value_parser = parse_alpha_list, value_delimiter = ',', required = true)]
        alpha: Vec<AlphaOrder>,
        /// Binning rate in bits per symbol.
        #[arg(long)]
        rate: f64,
        /// Blocklengths: `a..b` (inclusive), `a,b,c` or a single value.
        #[arg(long, value_parser = parse_n_range)]
        n: NList,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rate thresholds and secrecy rates.
    Rates {
        #[arg(long, value_enum)]
        kind: RateKind,
        #[arg(long, value_parser = parse_alpha_list, value_delimiter = ',', required = true)]
        alpha: Vec<AlphaOrder>,
        /// Joint pmf over (X, Z) for `osrb-iid` and `secrecy-iid`.
        #[arg(long)]
        joint: Option<PathBuf>,
        /// Input pmf p(x), or p(u) with `--prefix`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Prefix channel p(x|u) for stochastic encoders.
        #[arg(long)]
        prefix: Option<PathBuf>,
        /// Channel p(z|x) for `osrb-typical` and `osrb-stochastic`.
        #[arg(long)]
        channel: Option<PathBuf>,
        /// Legitimate channel p(y|x).
        #[arg(long)]
        main: Option<PathBuf>,
        /// Eavesdropper channel p(z|x).
        #[arg(long)]
        eve: Option<PathBuf>,
        /// Seed for the optimizer's random starts.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a wiretap coding sweep described by a JSON config.
    Wiretap {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    Tsallis,
    Renyi,
    Kl,
    Tv,
    Dinf,
    Sibson,
    Entropy,
    RenyiEntropy,
    CondEntropy,
    CondRenyi,
    Mi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RateKind {
    OsrbIid,
    OsrbTypical,
    OsrbStochastic,
    Secrecy,
    SecrecyIid,
}

/// Blocklength list parsed from `--n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NList(pub Vec<usize>);

fn parse_alpha_list(s: &str) -> std::result::Result<AlphaOrder, String> {
    s.trim().parse::<AlphaOrder>().map_err(|e| e.to_string())
}

/// Parses `a..b` (inclusive), `a,b,c` or `a`.
pub fn parse_n_range(s: &str) -> std::result::Result<NList, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad blocklength `{t}`"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        return Ok(NList((a..=b).collect()));
    }
    s.split(',').map(num).collect::<std::result::Result<_, _>>().map(NList)
}

/// One evaluated measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub kind: MeasureKind,
    pub alpha: AlphaOrder,
    pub value: f64,
}

/// A [`RateReport`] flattened for CSV: components as `name=value` pairs
/// and flags joined by `;`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RateRow(pub RateReport);

impl CsvRecord for MeasureRecord {
    fn header() -> &'static [&'static str] {
        &["kind", "alpha", "value"]
    }

    fn fields(&self) -> Vec<String> {
        let kind = self.kind.to_possible_value().expect("named variant").get_name().to_string();
        vec![kind, self.alpha.to_string(), csv_float(self.value)]
    }
}

impl CsvRecord for OsrbRecord {
    fn header() -> &'static [&'static str] {
        &OsrbRecord::HEADER
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            csv_float(self.rate),
            self.alpha.to_string(),
            self.m.to_string(),
            self.trials.to_string(),
            csv_float(self.mean),
            csv_float(self.stderr),
            self.seed.to_string(),
        ]
    }
}

impl CsvRecord for ExperimentRecord {
    fn header() -> &'static [&'static str] {
        &ExperimentRecord::HEADER
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            csv_float(self.r1),
            csv_float(self.r2),
            self.alpha.to_string(),
            self.encoder.to_string(),
            self.code_seed.to_string(),
            self.f_star.to_string(),
            csv_float(self.leakage),
            csv_float(self.error_prob),
            self.discards.to_string(),
        ]
    }
}

impl CsvRecord for RateRow {
    fn header() -> &'static [&'static str] {
        &["alpha", "encoder", "threshold_bits", "components", "flags"]
    }

    fn fields(&self) -> Vec<String> {
        let r = &self.0;
        let comps: Vec<String> = r.components.iter().map(|(k, v)| format!("{k}={}", csv_float(*v))).collect();
        vec![
            r.alpha.to_string(),
            r.encoder.to_string(),
            csv_float(r.threshold_bits),
            comps.join(";"),
            r.flags.join(";"),
        ]
    }
}

fn need<'a>(field: &str, p: &'a Option<PathBuf>) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| Error::invalid_arg(field, format!("--{field} is required for this kind")))
}

fn measure_value(kind: MeasureKind, a: AlphaOrder, p: Option<&Pmf>, q: Option<&Pmf>, j: Option<&JointPmf>) -> Result<f64> {
    let pq = || -> Result<(&Pmf, &Pmf)> {
        match (p, q) {
            (Some(p), Some(q)) => Ok((p, q)),
            _ => Err(Error::invalid_arg("q", "--p and --q are required for divergences")),
        }
    };
    let jj = || j.ok_or_else(|| Error::invalid_arg("joint", "--joint is required for this kind"));
    let pp = || p.ok_or_else(|| Error::invalid_arg("p", "--p is required for this kind"));
    match kind {
        MeasureKind::Tsallis => pq().and_then(|(p, q)| measures::tsallis_divergence(p, q, a)),
        MeasureKind::Renyi => pq().and_then(|(p, q)| measures::renyi_divergence_bits(p, q, a)),
        MeasureKind::Kl => pq().and_then(|(p, q)| measures::kl_divergence_bits(p, q)),
        MeasureKind::Tv => pq().and_then(|(p, q)| measures::total_variation(p, q)),
        MeasureKind::Dinf => pq().and_then(|(p, q)| measures::d_infinity(p, q)),
        MeasureKind::Sibson => jj().and_then(|j| measures::sibson_mi(j, a)),
        MeasureKind::Entropy => pp().map(measures::shannon_entropy),
        MeasureKind::RenyiEntropy => pp().map(|p| measures::renyi_entropy(p, a)),
        MeasureKind::CondEntropy => jj().map(measures::conditional_entropy),
        MeasureKind::CondRenyi => jj().map(|j| measures::cond_renyi_entropy(j, a)),
        MeasureKind::Mi => jj().map(measures::mutual_information),
    }
}

fn finish<T: CsvRecord>(records: &[T], output: &OutputArgs) -> Result<()> {
    if let Some(path) = &output.out {
        emit_records(records, output.format(), path)?;
    }
    Ok(())
}

/// Executes a parsed command, writing one summary line per record to `out`.
pub fn run_with(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let say = |out: &mut dyn Write, line: String| {
        writeln!(out, "{line}").map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        })
    };
    match &config.command {
        Command::Measure {
            kind,
            p,
            q,
            joint,
            alpha,
            output,
        } => {
            let p = p.as_ref().map(Pmf::load).transpose()?;
            let q = q.as_ref().map(Pmf::load).transpose()?;
            let j = joint.as_ref().map(JointPmf::load).transpose()?;
            let mut recs = Vec::new();
            for &a in alpha {
                let value = measure_value(*kind, a, p.as_ref(), q.as_ref(), j.as_ref())?;
                say(out, fmt_sig(value, 6))?;
                recs.push(MeasureRecord {
                    kind: *kind,
                    alpha: a,
                    value,
                });
            }
            finish(&recs, output)
        }
        Command::Osrb {
            joint,
            alpha,
            rate,
            n,
            mode,
            trials,
            seed,
            output,
        } => {
            if !rate.is_finite() || *rate < 0.0 {
                return Err(Error::invalid_arg("rate", format!("must be finite and >= 0, got {rate}")));
            }
            if *mode == ModeArg::Mc && *trials == 0 {
                return Err(Error::invalid_arg("trials", "must be >= 1"));
            }
            let j = JointPmf::load(joint)?;
            let mode = match mode {
                ModeArg::Exact => OsrbMode::Exact,
                ModeArg::Mc => OsrbMode::Mc,
            };
            let mut recs = Vec::new();
            for &a in alpha {
                recs.extend(osrb_sweep(&j, &n.0, *rate, a, mode, *trials, *seed)?);
            }
            for r in &recs {
                say(
                    out,
                    format!(
                        "n={} alpha={} m={} mean={} stderr={}",
                        r.n,
                        r.alpha,
                        r.m,
                        fmt_sig(r.mean, 6),
                        fmt_sig(r.stderr, 3),
                    ),
                )?;
            }
            finish(&recs, output)
        }
        Command::Rates {
            kind,
            alpha,
            joint,
            input,
            prefix,
            channel,
            main,
            eve,
            seed,
            output,
        } => {
            let opt = OptimizerSettings {
                seed: *seed,
                ..OptimizerSettings::default()
            };
            let mut recs = Vec::new();
            for &a in alpha {
                let report = match kind {
                    RateKind::OsrbIid => rates::osrb_threshold_iid(&JointPmf::load(need("joint", joint)?)?, a),
                    RateKind::OsrbTypical => rates::osrb_threshold_typical(
                        &Pmf::load(need("input", input)?)?,
                        &Channel::load(need("channel", channel)?)?,
                        a,
                    )?,
                    RateKind::OsrbStochastic => rates::osrb_threshold_stochastic(
                        &Pmf::load(need("input", input)?)?,
                        &Channel::load(need("prefix", prefix)?)?,
                        &Channel::load(need("channel", channel)?)?,
                        a,
                        &opt,
                    )?,
                    RateKind::Secrecy => {
                        let p = Pmf::load(need("input", input)?)?;
                        let input = match prefix {
                            Some(path) => EncoderInput::Stochastic {
                                p_u: p,
                                ch_xu: Channel::load(path)?,
                            },
                            None => EncoderInput::Deterministic(p),
                        };
                        rates::secrecy_rate(
                            &Channel::load(need("main", main)?)?,
                            &Channel::load(need("eve", eve)?)?,
                            &input,
                            a,
                            &opt,
                        )?
                    }
                    RateKind::SecrecyIid => rates::secrecy_rate_iid_variant(
                        &JointPmf::load(need("joint", joint)?)?,
                        &Channel::load(need("main", main)?)?,
                        a,
                    )?,
                };
                let comps: Vec<String> = report
                    .components
                    .iter()
                    .map(|(k, v)| format!("{k}={}", fmt_sig(*v, 6)))
                    .collect();
                say(
                    out,
                    format!(
                        "alpha={:<6} {:<22} rate={:<10} {}",
                        report.alpha.to_string(),
                        report.encoder.to_string(),
                        fmt_sig(report.threshold_bits, 6),
                        comps.join(" ")
                    ),
                )?;
                for flag in &report.flags {
                    eprintln!("warning: alpha={}: {flag}", report.alpha);
                }
                recs.push(RateRow(report));
            }
            finish(&recs, output)
        }
        Command::Wiretap { config, output } => {
            let cfg = ExperimentConfig::load(config)?;
            let base = config.parent().unwrap_or(Path::new("."));
            let exp = cfg.resolve(base)?;
            let recs = sweep_experiment(&exp)?;
            for r in &recs {
                say(
                    out,
                    format!(
                        "n={} code_seed={} f*={} leakage={} error={} discards={}",
                        r.n,
                        r.code_seed,
                        r.f_star,
                        fmt_sig(r.leakage, 6),
                        fmt_sig(r.error_prob, 6),
                        r.discards
                    ),
                )?;
            }
            finish(&recs, output)
        }
    }
}

/// Exit status for an error: 3 for guard violations, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_guard() {
        3
    } else {
        2
    }
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(k) => Ok(Some(k)),
            Err(_) => Err(Error::invalid_arg(THREADS_ENV, format!("expected a thread count, got `{v}`"))),
        },
    }
}

/// Runs a command inside a pool sized by `OSRB_LAB_THREADS`, printing
/// errors to stderr. Returns the process exit status.
pub fn run(config: &RunConfig) -> i32 {
    let result = threads_from_env().and_then(|threads| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(k) = threads {
            builder = builder.num_threads(k);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::invalid_arg(THREADS_ENV, e.to_string()))?;
        let stdout = std::io::stdout();
        pool.install(|| run_with(config, &mut stdout.lock()))
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
