use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eit_cli::{exit, run, CliError, Command, Format, RunConfig};
use eit_core::GateMode;

#[derive(Parser, Debug)]
#[command(
    name = "eit-gate",
    version,
    about = "EIT cross-Kerr phase gate: evaluation, design search and oracle checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    verbose: bool,

    /// Report in the units of the system block instead of |Omega_a_tilde|.
    #[arg(long, global = true)]
    raw: bool,

    /// Target error for `design` (inverse search for the largest gamma_10).
    #[arg(long, global = true)]
    delta: Option<f64>,

    /// gamma_10/|Omega_a_tilde| for `design` (forward optimization).
    #[arg(long = "gamma-10", global = true)]
    gamma_10: Option<f64>,

    /// gamma_40/gamma_20.
    #[arg(long, global = true)]
    suppression: Option<f64>,

    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<GateMode>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Response, closed-form optimum and gate time at the configured parameters.
    Eval,
    /// Optimized gate design for a target error or a given dephasing.
    Design,
    /// Trade-off table over a grid of target errors or dephasing rates.
    Sweep,
    /// Compare the closed-form ground coherence against direct integration.
    CheckOracle,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(format!("unknown format `{s}` (expected csv or json)")),
    }
}

fn parse_mode(s: &str) -> Result<GateMode, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(out) = &cli.out {
        cfg.output.out = Some(out.clone());
    }
    cfg.output.verbose |= cli.verbose;
    cfg.output.raw |= cli.raw;
    if cli.delta.is_some() && cli.gamma_10.is_some() {
        return Err(CliError::Config("--delta and --gamma-10 are mutually exclusive".into()));
    }
    if let Some(d) = cli.delta {
        cfg.design.delta_target = Some(d);
        cfg.design.gamma_10_over_omega_a = None;
    }
    if let Some(g) = cli.gamma_10 {
        cfg.design.gamma_10_over_omega_a = Some(g);
        cfg.design.delta_target = None;
    }
    if let Some(s) = cli.suppression {
        cfg.constraints.suppression = s;
    }
    if let Some(m) = cli.mode {
        cfg.constraints.mode = m;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    if cfg.output.verbose {
        eprintln!("# resolved configuration\n{}", cfg.to_toml()?);
    }
    // Opened before the computation so an unwritable path fails fast.
    let mut sink: Box<dyn Write> = match &cfg.output.out {
        Some(path) => Box::new(
            File::create(path).map_err(|e| CliError::Io(format!("cannot open output {}: {e}", path.display())))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let command = match cli.command {
        Cmd::Eval => Command::Eval,
        Cmd::Design => Command::Design,
        Cmd::Sweep => Command::Sweep,
        Cmd::CheckOracle => Command::CheckOracle,
    };
    let report = run(command, &cfg)?;
    sink.write_all(report.table.render(cfg.output.format).as_bytes())
        .and_then(|_| sink.flush())
        .map_err(|e| CliError::Io(format!("cannot write output: {e}")))?;
    for note in &report.notes {
        eprintln!("{note}");
    }
    report.outcome
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
