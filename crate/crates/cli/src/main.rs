use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ideal_theta::cli_report::{run, Command, ExitStatus, RunConfig};

#[derive(Parser)]
#[command(name = "ideal-theta", version, about = "Even unimodular ideal lattices and their Hermitian theta coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for an ideal and a totally positive scalar, write the lattice JSON
    Build(Opts),
    /// Re-derive and check every stored invariant of a lattice file
    Verify(Opts),
    /// Theta coefficients (genus 1) or representation numbers (genus n) with the mod-p verdict
    Theta(Opts),
    /// Numerical check of the genus-1 inversion formula
    TransformCheck(Opts),
    /// Build, verify and test a list of (ell, p) pairs
    Sweep(Opts),
    /// Identify a rank-8 lattice with E8
    E8check(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, default_value_t = 1)]
    genus: usize,
    /// Genus-1 coefficient bound (maximal truncation for transform-check)
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, default_value_t = 2)]
    diag_bound: u64,
    #[arg(long, default_value_t = 200)]
    pool_norm: u64,
    #[arg(long, default_value_t = 3)]
    unit_range: u32,
    #[arg(long, default_value_t = 1e-8)]
    precision: f64,
    /// Comma-separated y values for transform-check
    #[arg(long, value_delimiter = ',')]
    y: Option<Vec<f64>>,
    /// Comma-separated ell:p pairs for sweep
    #[arg(long, value_delimiter = ',')]
    pairs: Option<Vec<String>>,
    #[arg(long)]
    threads: Option<usize>,
    /// Run enumeration sequentially
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("pair {s:?} is not of the form ell:p"))?;
    let ell = a.trim().parse().map_err(|_| format!("bad ell in pair {s:?}"))?;
    let p = b.trim().parse().map_err(|_| format!("bad p in pair {s:?}"))?;
    Ok((ell, p))
}

fn config(o: Opts) -> Result<RunConfig, String> {
    let defaults = RunConfig::default();
    let pairs = o.pairs.unwrap_or_default().iter().filter(|s| !s.trim().is_empty()).map(|s| parse_pair(s)).collect::<Result<_, _>>()?;
    Ok(RunConfig {
        ell: o.ell,
        p: o.p,
        genus: o.genus,
        coeff_bound: o.bound,
        diag_bound: o.diag_bound,
        pool_norm: o.pool_norm,
        unit_range: o.unit_range,
        precision: o.precision,
        ys: o.y.unwrap_or(defaults.ys),
        pairs,
        input: o.input,
        out: o.out,
        threads: o.threads,
        exec: if o.sequential { ideal_theta::Exec::Sequential } else { ideal_theta::Exec::Parallel },
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { ExitStatus::Invalid.code() as u8 } else { 0 });
        }
    };
    let (cmd, opts) = match cli.command {
        Cmd::Build(o) => (Command::Build, o),
        Cmd::Verify(o) => (Command::Verify, o),
        Cmd::Theta(o) => (Command::Theta, o),
        Cmd::TransformCheck(o) => (Command::TransformCheck, o),
        Cmd::Sweep(o) => (Command::Sweep, o),
        Cmd::E8check(o) => (Command::E8Check, o),
    };
    let cfg = match config(opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(ExitStatus::Invalid.code() as u8);
        }
    };
    let outcome = run(cmd, &cfg);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.status.code() as u8)
}
