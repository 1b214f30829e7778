mod commands;
mod load;
mod report;

use clap::{Args, Parser, Subcommand};
use hocalc::linalg::Field;
use report::{Format, Report};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Exact computations with operads, their algebras and functor calculus.
#[derive(Parser)]
#[command(name = "hocalc", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy, Debug)]
pub enum Cmd {
    /// Homology of a complex (or of an algebra's underlying complex).
    Homology,
    /// Homology of B(O)(n), or of B(O,X) for an algebra or a trivial algebra on a complex.
    Bar,
    /// Counit B^c B(O) → O at arities up to --arity.
    CobarCheck,
    /// Pushout model of ΣZ against the closed form.
    SuspensionCheck,
    /// Φ into the loop object at t-degrees L and L+1.
    PathobjCheck,
    /// Join X*t (t = --arity, default 2) as a homotopy pushout of the fold.
    Pushout,
    /// Homotopy pullback of 0 → X ← 0 at t-degree L.
    Pullback,
    /// n-th cross-effect at (X, …, X), and the co-cross-effect for chain functors.
    CrossEffect,
    /// n-th derivative by stabilizing cross-effects at the canonical point.
    Derivative,
    /// n-th layer by both routes.
    Layer,
    /// Taylor stage T_n F(X), iterated --iterations times.
    TaylorStage,
    /// Compare ∂_n(F∘G) with (∂F ∘ ∂G)(n); pass --functor twice.
    ChainRule,
    /// Check operad (and algebra) axioms.
    Validate,
}

#[derive(Clone, Copy, Debug)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

fn parse_window(s: &str) -> Result<Window, String> {
    let (a, b) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo: i64 = a.trim().parse().map_err(|_| format!("bad lower bound `{a}`"))?;
    let hi: i64 = b.trim().parse().map_err(|_| format!("bad upper bound `{b}`"))?;
    if lo > hi {
        return Err(format!("empty window {lo}..{hi}"));
    }
    Ok(Window { lo, hi })
}

fn parse_field(s: &str) -> Result<Field, String> {
    hocalc::text::parse_field(s)
}

#[derive(Args, Clone, Debug)]
pub struct Opts {
    /// Operad file, or `builtin:Com:N` / `builtin:Assoc:N`.
    #[arg(long, global = true)]
    pub operad: Option<String>,
    #[arg(long, global = true)]
    pub algebra: Option<PathBuf>,
    #[arg(long, global = true)]
    pub complex: Option<PathBuf>,
    /// Functor expression; `chain-rule` takes two.
    #[arg(long, global = true)]
    pub functor: Vec<String>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub arity: Option<u64>,
    #[arg(long, global = true, default_value = "0..6", value_parser = parse_window)]
    pub window: Window,
    /// Q or Fp (F2, F3, ...); overrides the field named in input files.
    #[arg(long, global = true, value_parser = parse_field)]
    pub field: Option<Field>,
    /// Last suspension index tried before reporting instability.
    #[arg(long = "max-susp", global = true)]
    pub max_susp: Option<i64>,
    /// Polynomial degree cutoff L for path objects.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub tdeg: u64,
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub iterations: u64,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = Report::default();
    if let Err(e) = commands::run(cli.cmd, &cli.opts, &mut report) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let code = if report.failed() { 1 } else { 0 };
    let out = report.render(cli.opts.format, code);
    match &cli.opts.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, out) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{out}"),
    }
    if cli.opts.format == Format::Text {
        eprintln!("time {} ms", start.elapsed().as_millis());
    }
    ExitCode::from(code as u8)
}
