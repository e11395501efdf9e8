//! Batch experiment driver for the classical-quantum coding laboratory.
//!
//! Subcommands: `capacity`, `hyptest`, `build-code`, `verify`. Each run is
//! deterministic for a fixed seed and configuration; CSV output carries a
//! header row and 12-significant-digit floats so artifacts diff cleanly.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 resource-limit exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cqlab::channel::{load_channel, CqChannel, InputDistribution};
use cqlab::hyptest::test_report;
use cqlab::info::capacity;
use cqlab::packing::build_block_code;
use cqlab::verify::{all_passed, render_report, run_suite, VerifyConfig};
use cqlab::{Error, Limits, Result};

const LIMITS_HELP: &str = "Resource limits default to a maximum dense dimension of 4096 and a \
maximum codeword enumeration of 10^6. Override them with the environment \
variables CQLAB_MAX_DIM and CQLAB_MAX_ENUM, or with --max-dim/--max-enum \
together with the --allow-resource-override acknowledgment flag.";

#[derive(Parser)]
#[command(name = "cqlab", version, about = "Classical-quantum channel coding experiments", after_help = LIMITS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Channel spec file (JSON: dim, alphabet, states, optional p)
    #[arg(long)]
    channel: Option<PathBuf>,
    /// Write the CSV/report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed for randomized components
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Convergence tolerance for iterative solvers
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Display entropic quantities in bits instead of nats
    #[arg(long)]
    bits: bool,
    /// Override the maximum dense dimension (requires --allow-resource-override)
    #[arg(long)]
    max_dim: Option<usize>,
    /// Override the maximum codeword enumeration (requires --allow-resource-override)
    #[arg(long)]
    max_enum: Option<u128>,
    /// Acknowledge that raising resource limits can exhaust memory
    #[arg(long)]
    allow_resource_override: bool,
}

impl CommonOpts {
    fn limits(&self) -> Result<Limits> {
        let mut limits = Limits::from_env();
        if self.max_dim.is_some() || self.max_enum.is_some() {
            if !self.allow_resource_override {
                return Err(Error::ChannelSpec(
                    "--max-dim/--max-enum require --allow-resource-override".into(),
                ));
            }
            if let Some(d) = self.max_dim {
                limits.max_dim = d;
            }
            if let Some(e) = self.max_enum {
                limits.max_enum = e;
            }
        }
        Ok(limits)
    }

    fn require_channel(&self) -> Result<(CqChannel, Option<InputDistribution>)> {
        let path = self.channel.as_ref().ok_or_else(|| {
            Error::ChannelSpec("this command requires --channel <path>".into())
        })?;
        load_channel(path)
    }

    /// Converts an entropic quantity (nats) for display.
    fn ent(&self, nats: f64) -> f64 {
        if self.bits {
            nats / std::f64::consts::LN_2
        } else {
            nats
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

/// Grid of threshold rates: either a comma-separated list or
/// `linspace:start:stop:count`.
fn parse_a_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::ChannelSpec(format!("--a: {msg}"));
    let grid: Vec<f64> = if let Some(rest) = spec.strip_prefix("linspace:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected linspace:start:stop:count".into()));
        }
        let start: f64 = parts[0].parse().map_err(|e| bad(format!("{e}")))?;
        let stop: f64 = parts[1].parse().map_err(|e| bad(format!("{e}")))?;
        let count: usize = parts[2].parse().map_err(|e| bad(format!("{e}")))?;
        if count < 1 {
            return Err(bad("count must be >= 1".into()));
        }
        (0..count)
            .map(|i| {
                if count == 1 {
                    start
                } else {
                    start + (stop - start) * i as f64 / (count - 1) as f64
                }
            })
            .collect()
    } else {
        spec.split(',')
            .map(|tok| tok.trim().parse::<f64>().map_err(|e| bad(format!("'{tok}': {e}"))))
            .collect::<Result<Vec<f64>>>()?
    };
    if grid.is_empty() {
        return Err(bad("empty grid".into()));
    }
    Ok(grid)
}

#[derive(Subcommand)]
enum Command {
    /// Maximize the mutual information over input distributions
    Capacity {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Pinched hypothesis tests between the first two channel states
    Hyptest {
        #[command(flatten)]
        common: CommonOpts,
        /// Smallest block length
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        /// Largest block length
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// Threshold rates: comma list or linspace:start:stop:count
        #[arg(long, default_value = "linspace:0.05:0.25:5")]
        a: String,
        /// Number of s-grid points in [0, 1] for the error-exponent bound
        #[arg(long, default_value_t = 11)]
        s_grid: usize,
    },
    /// Build and verify greedy packing codes over length-n codewords
    BuildCode {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// Threshold rates: comma list or linspace:start:stop:count
        #[arg(long, default_value = "0.2")]
        a: String,
        /// Candidate-slack parameter, a positive real or "auto"
        #[arg(long, default_value = "auto")]
        gamma: String,
        /// Overlap-exponent parameter eta = e^{-n lambda}
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Use the capacity-optimal input distribution instead of the file's p
        #[arg(long)]
        optimal_p: bool,
        /// Write the greedy admission audit trail (one file per row) under
        /// this path prefix
        #[arg(long)]
        audit: Option<PathBuf>,
    },
    /// Run the seeded randomized invariant suite
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        /// Deliberately perturb a decoder element; the suite must fail
        #[arg(long)]
        inject_fault: bool,
    },
}

fn input_distribution(
    ch: &CqChannel,
    from_file: Option<InputDistribution>,
    optimal_p: bool,
    tol: f64,
) -> Result<InputDistribution> {
    if optimal_p {
        return Ok(capacity(ch, tol)?.optimal_p);
    }
    match from_file {
        Some(p) => {
            if p.len() != ch.alphabet_size() {
                return Err(Error::ChannelSpec(format!(
                    "p has {} entries, alphabet has {}",
                    p.len(),
                    ch.alphabet_size()
                )));
            }
            Ok(p)
        }
        None => Ok(InputDistribution::uniform(ch.alphabet_size())),
    }
}

fn cmd_capacity(common: &CommonOpts) -> Result<()> {
    let (ch, _) = common.require_channel()?;
    let result = capacity(&ch, common.tol)?;
    let unit = if common.bits { "bits" } else { "nats" };
    eprintln!(
        "C = {:.11e} {unit} ({:.11e} nats, {:.11e} bits)",
        common.ent(result.capacity),
        result.capacity,
        result.capacity / std::f64::consts::LN_2
    );
    eprintln!(
        "optimal p = [{}]",
        result
            .optimal_p
            .probs()
            .iter()
            .map(|p| format!("{p:.11e}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    eprintln!(
        "gap certificate = {:.11e}, iterations = {}",
        result.gap_certificate, result.iterations
    );
    let mut csv = String::from("capacity,gap_certificate,iterations");
    for sym in ch.alphabet() {
        csv.push_str(&format!(",p_{sym}"));
    }
    csv.push('\n');
    csv.push_str(&format!(
        "{:.11e},{:.11e},{}",
        common.ent(result.capacity),
        result.gap_certificate,
        result.iterations
    ));
    for p in result.optimal_p.probs() {
        csv.push_str(&format!(",{p:.11e}"));
    }
    csv.push('\n');
    common.emit(&csv)
}

fn cmd_hyptest(
    common: &CommonOpts,
    n_min: usize,
    n_max: usize,
    a_spec: &str,
    s_grid: usize,
) -> Result<()> {
    if n_min < 1 || n_max < n_min {
        return Err(Error::ChannelSpec(format!(
            "invalid block range {n_min}..{n_max}"
        )));
    }
    let (ch, _) = common.require_channel()?;
    if ch.alphabet_size() < 2 {
        return Err(Error::ChannelSpec(
            "hyptest needs a channel with at least two states (rho = first, sigma = second)"
                .into(),
        ));
    }
    let limits = common.limits()?;
    let a_grid = parse_a_grid(a_spec)?;
    let rho = ch.state(0);
    let sigma = ch.state(1);
    let mut csv =
        String::from("n,a,alpha,beta,best_s,alpha_bound,beta_bound,alpha_bound_ok,beta_bound_ok\n");
    for n in n_min..=n_max {
        for &a in &a_grid {
            let row = test_report(rho, sigma, n, a, s_grid, &limits)?;
            csv.push_str(&format!(
                "{},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{},{}\n",
                row.n,
                common.ent(row.a),
                row.alpha,
                row.beta,
                row.s_used,
                row.alpha_bound,
                row.beta_bound,
                row.alpha <= row.alpha_bound + 1e-12,
                row.beta <= row.beta_bound + 1e-12,
            ));
        }
    }
    common.emit(&csv)
}

#[allow(clippy::too_many_arguments)]
fn cmd_build_code(
    common: &CommonOpts,
    n_min: usize,
    n_max: usize,
    a_spec: &str,
    gamma_spec: &str,
    lambda: f64,
    optimal_p: bool,
    audit: Option<&PathBuf>,
) -> Result<()> {
    if n_min < 1 || n_max < n_min {
        return Err(Error::ChannelSpec(format!(
            "invalid block range {n_min}..{n_max}"
        )));
    }
    let (ch, p_file) = common.require_channel()?;
    let p = input_distribution(&ch, p_file, optimal_p, common.tol)?;
    let limits = common.limits()?;
    let a_grid = parse_a_grid(a_spec)?;
    let gamma: Option<f64> = match gamma_spec {
        "auto" => None,
        text => Some(text.parse::<f64>().map_err(|e| {
            Error::ChannelSpec(format!("--gamma: '{text}': {e}"))
        })?),
    };
    let mut csv = String::from(
        "n,a,delta_n,gamma_n,eta,m_n,rate,pe,bound3_ok,bound4_ok,sandwich_ok,per_codeword_ok,vacuous\n",
    );
    for n in n_min..=n_max {
        for (ai, &a) in a_grid.iter().enumerate() {
            let (code, report) = build_block_code(&ch, &p, n, a, gamma, lambda, &limits)
                .inspect_err(|_| eprintln!("error at block length n = {n}, a = {a}"))?;
            csv.push_str(&format!(
                "{},{:.11e},{:.11e},{:.11e},{:.11e},{},{:.11e},{:.11e},{},{},{},{},{}\n",
                n,
                common.ent(a),
                report.delta,
                report.gamma,
                report.eta,
                report.m,
                common.ent(report.rate),
                report.pe,
                report.rate_bound_ok,
                report.error_bound_ok,
                report.sandwich_ok,
                report.per_codeword_ok,
                report.vacuous,
            ));
            if let Some(prefix) = audit {
                let path = prefix.with_file_name(format!(
                    "{}_n{}_a{}.tsv",
                    prefix
                        .file_name()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "audit".into()),
                    n,
                    ai
                ));
                fs::write(path, code.audit_lines(&ch))?;
            }
        }
    }
    common.emit(&csv)
}

fn cmd_verify(common: &CommonOpts, inject_fault: bool) -> Result<i32> {
    // a channel file, when given, must at least parse (input validation path)
    if common.channel.is_some() {
        common.require_channel()?;
    }
    let cfg = VerifyConfig {
        seed: common.seed,
        inject_fault,
        limits: common.limits()?,
    };
    let results = run_suite(&cfg)?;
    common.emit(&render_report(&cfg, &results))?;
    Ok(if all_passed(&results) { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Capacity { common } => cmd_capacity(common).map(|()| 0),
        Command::Hyptest {
            common,
            n_min,
            n_max,
            a,
            s_grid,
        } => cmd_hyptest(common, *n_min, *n_max, a, *s_grid).map(|()| 0),
        Command::BuildCode {
            common,
            n_min,
            n_max,
            a,
            gamma,
            lambda,
            optimal_p,
            audit,
        } => cmd_build_code(
            common,
            *n_min,
            *n_max,
            a,
            gamma,
            *lambda,
            *optimal_p,
            audit.as_ref(),
        )
        .map(|()| 0),
        Command::Verify {
            common,
            inject_fault,
        } => cmd_verify(common, *inject_fault),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
