use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tracecode::code::{redundancy_bounds, DEFAULT_RETRY_LIMIT};
use tracecode::experiment::{format_csv, format_sig6};
use tracecode::lambert::default_p_target;
use tracecode::model::{read_sequences, write_sequences};
use tracecode::{
    delta_star, derive_params, generate_traces, rate, reconstruct_coded_bma, reconstruct_ours, redundancy_d,
    run_experiment, sample_codeword_rejection, select_delta, BitString, CodewordSampler, ExperimentConfig, Scheme,
    Simulation, Trace,
};

#[derive(Parser)]
#[command(name = "tracecode", version, about = "Trace reconstruction code simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct CodeArgs {
    /// Codeword length
    #[arg(long)]
    n: usize,
    /// Deletion probability is k / n^alpha
    #[arg(long)]
    k: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Code parameter; blocks detect up to delta - 1 deletions
    #[arg(long, default_value_t = 3)]
    delta: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print derived code parameters, redundancy, rate and delta*
    Params {
        #[command(flatten)]
        code: CodeArgs,
        /// Target p(n) for delta*; defaults to n^(2 alpha - 1)
        #[arg(long)]
        p_target: Option<f64>,
    },
    /// Emit one codeword
    Sample {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value = "ours")]
        scheme: Scheme,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw by whole-string rejection instead of the exact sampler
        #[arg(long)]
        rejection: bool,
        #[arg(long, default_value_t = DEFAULT_RETRY_LIMIT)]
        retry_limit: u64,
    },
    /// Read a codeword and emit t traces
    Corrupt {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Deletion probability; overrides k / n^alpha
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Input file (stdin if omitted)
        input: Option<PathBuf>,
    },
    /// Read traces and emit the reconstructed codeword
    Reconstruct {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value = "ours")]
        scheme: Scheme,
        input: Option<PathBuf>,
    },
    /// Run a Monte-Carlo sweep from a key=value config and emit CSV
    Experiment {
        config: PathBuf,
        /// Output file (stdout if omitted)
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// Error class deciding the exit code.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn usage<T, E: Into<anyhow::Error>>(r: std::result::Result<T, E>) -> std::result::Result<T, Failure> {
    r.map_err(|e| Failure::Usage(e.into()))
}

fn runtime<T, E: Into<anyhow::Error>>(r: std::result::Result<T, E>) -> std::result::Result<T, Failure> {
    r.map_err(|e| Failure::Runtime(e.into()))
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

fn emit(text: &str) -> Result<()> {
    io::stdout().write_all(text.as_bytes())?;
    Ok(())
}

fn run(command: Command) -> std::result::Result<(), Failure> {
    match command {
        Command::Params { code, p_target } => {
            let params = usage(derive_params(code.n, code.k, code.alpha, code.delta))?;
            let target = p_target.unwrap_or_else(|| default_p_target(code.n, code.alpha));
            let mut out = String::new();
            let l = params.layout;
            out += &format!(
                "n={}\nk={}\nalpha={}\ndelta={}\n",
                params.n, params.k, params.alpha, params.delta
            );
            out += &format!(
                "p={}\nell={}\ndetect_cap={}\n",
                format_sig6(params.p),
                l.ell,
                l.detect_cap
            );
            out += &format!("num_blocks={}\nlast_block_len={}\n", l.num_blocks, l.last_block_len);
            out += &format!("max_run={}\n", params.max_run());
            out += &format!(
                "redundancy={}\nrate={}\n",
                redundancy_d(&params),
                format_sig6(rate(&params))
            );
            let (lo, hi) = redundancy_bounds(&params);
            out += &format!("redundancy_bounds={},{}\n", format_sig6(lo), format_sig6(hi));
            match CodewordSampler::new(&params) {
                Ok(s) => out += &format!("log2_codebook_size={}\n", format_sig6(s.log2_size())),
                Err(_) => out += "log2_codebook_size=empty\n",
            }
            match delta_star(code.n, code.alpha, target) {
                Ok(d) => {
                    out += &format!("p_target={}\ndelta_star={}\n", format_sig6(target), format_sig6(d));
                    out += &format!(
                        "select_delta={}\n",
                        select_delta(code.n, code.alpha, target).unwrap_or(0)
                    );
                }
                Err(e) => out += &format!("delta_star=undefined ({e})\n"),
            }
            runtime(emit(&out))
        }
        Command::Sample {
            code,
            scheme,
            seed,
            rejection,
            retry_limit,
        } => {
            let params = usage(derive_params(code.n, code.k, code.alpha, code.delta))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = if rejection && scheme == Scheme::Ours {
                runtime(sample_codeword_rejection(&params, &mut rng, retry_limit))?
            } else {
                let sim = runtime(Simulation::new(scheme, params, 1))?.with_retry_limit(retry_limit);
                runtime(sim.sample(&mut rng))?
            };
            runtime(emit(&write_sequences([&x])))
        }
        Command::Corrupt {
            k,
            alpha,
            p,
            t,
            seed,
            input,
        } => {
            let text = runtime(read_input(&input))?;
            let seqs = usage(read_sequences(&text))?;
            let Some(x) = seqs.into_iter().find(|s| !s.is_empty()) else {
                return Err(Failure::Usage(anyhow::anyhow!("no codeword in input")));
            };
            let p = match (p, k) {
                (Some(p), _) => p,
                (None, Some(k)) => k / (x.len() as f64).powf(alpha),
                (None, None) => return Err(Failure::Usage(anyhow::anyhow!("give --p or --k"))),
            };
            if !(0.0..1.0).contains(&p) || t == 0 {
                return Err(Failure::Usage(anyhow::anyhow!("need 0 <= p < 1 and t >= 1")));
            }
            let traces = generate_traces(&x, p, t, seed);
            runtime(emit(&write_sequences(traces.iter().map(|y| &y.bits))))
        }
        Command::Reconstruct { code, scheme, input } => {
            let params = usage(derive_params(code.n, code.k, code.alpha, code.delta))?;
            let text = runtime(read_input(&input))?;
            let seqs = usage(read_sequences(&text))?;
            if seqs.is_empty() {
                return Err(Failure::Usage(anyhow::anyhow!("no traces in input")));
            }
            if let Some(long) = seqs.iter().find(|s| s.len() > code.n) {
                return Err(Failure::Usage(anyhow::anyhow!(
                    "trace of length {} is longer than n={}",
                    long.len(),
                    code.n
                )));
            }
            let traces: Vec<Trace> = seqs.into_iter().map(|b| Trace::new(b, code.n)).collect();
            let estimate: BitString = match scheme {
                Scheme::Ours => {
                    let rec = reconstruct_ours(&traces, &params);
                    if rec.segmentation_failures > 0 {
                        eprintln!(
                            "warning: {} trace(s) show more deletions in a block than the delimiters detect",
                            rec.segmentation_failures
                        );
                    }
                    rec.estimate
                }
                _ => reconstruct_coded_bma(&traces, code.n),
            };
            runtime(emit(&write_sequences([&estimate])))
        }
        Command::Experiment { config, output } => {
            let text = usage(fs::read_to_string(&config).with_context(|| format!("reading {}", config.display())))?;
            let cfg = usage(ExperimentConfig::parse(&text))?;
            let rows = run_experiment(&cfg);
            for r in rows.iter().filter(|r| r.skip_reason.is_some()) {
                eprintln!(
                    "skipped {} n={} k={} alpha={} delta={} t={}: {}",
                    r.scheme,
                    r.n,
                    r.k,
                    r.alpha,
                    r.delta,
                    r.t,
                    r.skip_reason.as_deref().unwrap_or_default()
                );
            }
            let csv = format_csv(&rows);
            match output {
                Some(path) => runtime(fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))),
                None => runtime(emit(&csv)),
            }
        }
    }
}
