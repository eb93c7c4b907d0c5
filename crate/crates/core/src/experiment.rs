//! Monte-Carlo simulation: experiment configuration, trials, sweeps and CSV
//! output.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{generate_traces, substream};
use crate::code::{log2_rll_count, rate, CodewordSampler, DEFAULT_RETRY_LIMIT};
use crate::error::CodeError;
use crate::metrics::{levenshtein, SummaryStats, TrialResult};
use crate::model::{derive_params, isqrt, BitString, CodeParams};
use crate::reconstruct::{reconstruct_coded_bma, reconstruct_ours, sample_rll_sequence};

/// Stream index of the codeword draw within a trial; trace `j` uses index `j`.
const CODEWORD_STREAM: u64 = u64::MAX;

pub const CSV_HEADER: &str = "scheme,n,k,alpha,delta,ell,t,trials,seed,rate,mean_norm_edit,\
stderr_norm_edit,p_e_hat,mean_seg_fail_rate,skipped";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Delimiter + run-length-limited code with block-wise BMA.
    Ours,
    /// Codewords with runs at most `floor(sqrt(n))`, whole-sequence BMA.
    CodedBma,
    /// Uniform codewords, whole-sequence BMA.
    UncodedBma,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ours => "ours",
            Scheme::CodedBma => "coded-bma",
            Scheme::UncodedBma => "uncoded-bma",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ours" => Ok(Scheme::Ours),
            "coded-bma" => Ok(Scheme::CodedBma),
            "uncoded-bma" => Ok(Scheme::UncodedBma),
            other => Err(format!("unknown scheme {other:?}")),
        }
    }
}

/// One simulation point: a scheme, code parameters and a trace count.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub scheme: Scheme,
    pub params: CodeParams,
    pub t: usize,
    /// Channel deletion probability; `params.p` unless overridden.
    pub p: f64,
    pub retry_limit: u64,
    sampler: Option<CodewordSampler>,
}

impl Simulation {
    pub fn new(scheme: Scheme, params: CodeParams, t: usize) -> Result<Self, CodeError> {
        let sampler = match scheme {
            Scheme::Ours => Some(CodewordSampler::new(&params)?),
            _ => None,
        };
        Ok(Self {
            scheme,
            params,
            t,
            p: params.p,
            retry_limit: DEFAULT_RETRY_LIMIT,
            sampler,
        })
    }

    pub fn with_deletion_probability(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_retry_limit(mut self, retry_limit: u64) -> Self {
        self.retry_limit = retry_limit;
        self
    }

    /// Information rate of the scheme's codebook.
    pub fn rate(&self) -> f64 {
        let n = self.params.n;
        match self.scheme {
            Scheme::Ours => rate(&self.params),
            Scheme::CodedBma => log2_rll_count(n, isqrt(n)) / n as f64,
            Scheme::UncodedBma => 1.0,
        }
    }

    /// Draws the trial's codeword from the scheme's codebook.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BitString, CodeError> {
        let n = self.params.n;
        match self.scheme {
            Scheme::Ours => Ok(self.sampler.as_ref().expect("built in new").sample(rng)),
            Scheme::CodedBma => sample_rll_sequence(n, isqrt(n), rng, self.retry_limit),
            Scheme::UncodedBma => Ok(BitString::from_bools((0..n).map(|_| rng.gen::<bool>()))),
        }
    }

    /// One trial, fully determined by `(master_seed, trial_index)`.
    pub fn run_trial(&self, master_seed: u64, trial_index: u64) -> Result<TrialResult, CodeError> {
        let trial_seed = substream(master_seed, trial_index);
        let mut rng = ChaCha8Rng::seed_from_u64(substream(trial_seed, CODEWORD_STREAM));
        let x = self.sample(&mut rng)?;
        let traces = generate_traces(&x, self.p, self.t, trial_seed);
        let (estimate, segmentation_failures) = match self.scheme {
            Scheme::Ours => {
                let rec = reconstruct_ours(&traces, &self.params);
                (rec.estimate, rec.segmentation_failures)
            }
            Scheme::CodedBma | Scheme::UncodedBma => (reconstruct_coded_bma(&traces, self.params.n), 0),
        };
        let edit_distance = levenshtein(x.as_slice(), estimate.as_slice());
        Ok(TrialResult {
            edit_distance,
            exact_match: edit_distance == 0,
            segmentation_failures,
            trace_lengths: traces.iter().map(|y| y.len()).collect(),
        })
    }

    /// Runs trials `0..trials` in parallel; results come back in trial order
    /// with failed samplings counted as skipped.
    pub fn run(&self, trials: usize, master_seed: u64) -> (Vec<TrialResult>, usize) {
        let outcomes: Vec<_> = (0..trials as u64)
            .into_par_iter()
            .map(|i| self.run_trial(master_seed, i))
            .collect();
        let skipped = outcomes.iter().filter(|r| r.is_err()).count();
        (outcomes.into_iter().filter_map(Result::ok).collect(), skipped)
    }

    pub fn summarize(&self, trials: usize, master_seed: u64) -> (SummaryStats, usize) {
        let (results, skipped) = self.run(trials, master_seed);
        (
            SummaryStats::from_trials(&results, self.params.n, self.t, self.rate()),
            skipped,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: bad value {value:?} for {key}")]
    BadValue { line: usize, key: String, value: String },
    #[error("missing required key {0:?}")]
    Missing(&'static str),
}

/// A parameter sweep: the cartesian product of the listed values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub schemes: Vec<Scheme>,
    pub n: Vec<usize>,
    pub k: Vec<f64>,
    pub alpha: Vec<f64>,
    pub delta: Vec<usize>,
    pub t: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub retry_limit: u64,
}

impl ExperimentConfig {
    /// Parses flat `key=value` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        const KEYS: [&str; 9] = [
            "scheme",
            "n",
            "k",
            "alpha",
            "delta",
            "t",
            "trials",
            "seed",
            "retry_limit",
        ];
        let mut values: Vec<Option<(usize, String)>> = vec![None; KEYS.len()];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let key = key.trim();
            let slot = KEYS
                .iter()
                .position(|&k| k == key)
                .ok_or_else(|| ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })?;
            if values[slot].is_some() {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.to_string(),
                });
            }
            values[slot] = Some((line, value.trim().to_string()));
        }

        fn list<T: FromStr>(
            key: &'static str,
            entry: &Option<(usize, String)>,
            default: Option<&str>,
        ) -> Result<Vec<T>, ConfigError> {
            let (line, raw) = match (entry, default) {
                (Some((line, raw)), _) => (*line, raw.as_str()),
                (None, Some(d)) => (0, d),
                (None, None) => return Err(ConfigError::Missing(key)),
            };
            let bad = || ConfigError::BadValue {
                line,
                key: key.to_string(),
                value: raw.to_string(),
            };
            let items = raw
                .split(',')
                .map(|s| s.trim().parse::<T>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            if items.is_empty() {
                return Err(bad());
            }
            Ok(items)
        }
        fn single<T: FromStr>(
            key: &'static str,
            entry: &Option<(usize, String)>,
            default: &str,
        ) -> Result<T, ConfigError> {
            let mut items = list::<T>(key, entry, Some(default))?;
            if items.len() != 1 {
                let (line, value) = entry.clone().unwrap_or_default();
                return Err(ConfigError::BadValue {
                    line,
                    key: key.to_string(),
                    value,
                });
            }
            Ok(items.remove(0))
        }

        let config = Self {
            schemes: list("scheme", &values[0], Some("ours"))?,
            n: list("n", &values[1], None)?,
            k: list("k", &values[2], None)?,
            alpha: list("alpha", &values[3], Some("1"))?,
            delta: list("delta", &values[4], Some("3"))?,
            t: list("t", &values[5], None)?,
            trials: single("trials", &values[6], "1000")?,
            seed: single("seed", &values[7], "0")?,
            retry_limit: single("retry_limit", &values[8], "1000000")?,
        };
        let check = |ok: bool, slot: usize, key: &str| {
            if ok {
                Ok(())
            } else {
                let (line, value) = values[slot].clone().unwrap_or_default();
                Err(ConfigError::BadValue {
                    line,
                    key: key.to_string(),
                    value,
                })
            }
        };
        check(config.trials >= 1, 6, "trials")?;
        check(config.t.iter().all(|&t| t >= 1), 5, "t")?;
        check(config.retry_limit >= 1, 8, "retry_limit")?;
        Ok(config)
    }
}

/// One CSV row. `stats` is `None` for skipped parameter combinations.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub scheme: Scheme,
    pub n: usize,
    pub k: f64,
    pub alpha: f64,
    pub delta: usize,
    pub ell: Option<usize>,
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
    pub stats: Option<SummaryStats>,
    pub skipped: usize,
    /// Why the whole point was skipped.
    pub skip_reason: Option<String>,
}

/// Runs every point of the sweep. Rows are ordered by scheme, then the
/// configured order of `n`, `k`, `alpha`, `delta`, `t`.
pub fn run_experiment(config: &ExperimentConfig) -> Vec<ExperimentRow> {
    let mut rows = Vec::new();
    for &scheme in &config.schemes {
        for &n in &config.n {
            for &k in &config.k {
                for &alpha in &config.alpha {
                    for &delta in &config.delta {
                        for &t in &config.t {
                            rows.push(run_point(config, scheme, n, k, alpha, delta, t));
                        }
                    }
                }
            }
        }
    }
    rows
}

fn run_point(
    config: &ExperimentConfig,
    scheme: Scheme,
    n: usize,
    k: f64,
    alpha: f64,
    delta: usize,
    t: usize,
) -> ExperimentRow {
    let mut row = ExperimentRow {
        scheme,
        n,
        k,
        alpha,
        delta,
        ell: None,
        t,
        trials: config.trials,
        seed: config.seed,
        stats: None,
        skipped: config.trials,
        skip_reason: None,
    };
    let params = match derive_params(n, k, alpha, delta) {
        Ok(p) => p,
        Err(e) => {
            row.skip_reason = Some(e.to_string());
            return row;
        }
    };
    row.ell = Some(params.ell());
    let sim = match Simulation::new(scheme, params, t) {
        Ok(s) => s.with_retry_limit(config.retry_limit),
        Err(e) => {
            row.skip_reason = Some(e.to_string());
            return row;
        }
    };
    let (stats, skipped) = sim.summarize(config.trials, config.seed);
    row.stats = Some(stats);
    row.skipped = skipped;
    row
}

/// `%g`-style formatting with six significant digits.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn format_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},",
            r.scheme,
            r.n,
            format_sig6(r.k),
            format_sig6(r.alpha),
            r.delta,
            r.ell.map(|l| l.to_string()).unwrap_or_default(),
            r.t,
            r.trials,
            r.seed
        );
        match &r.stats {
            Some(s) => {
                let _ = write!(
                    out,
                    "{},{},{},{},{},",
                    format_sig6(s.rate),
                    format_sig6(s.mean_norm_edit),
                    format_sig6(s.stderr_norm_edit),
                    format_sig6(s.p_e_hat),
                    format_sig6(s.mean_seg_fail_rate)
                );
            }
            None => out.push_str(",,,,,"),
        }
        let _ = writeln!(out, "{}", r.skipped);
    }
    out
}
