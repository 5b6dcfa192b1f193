use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use wsdelay_cli::config::RunConfig;
use wsdelay_cli::run::{run, Context, Verb};
use wsdelay_cli::CliError;

/// Output directory used when neither `--out` nor `[output] dir` is given.
const OUT_ENV: &str = "WSDELAY_OUT";

#[derive(Parser)]
#[command(name = "wsdelay", version, about = "Generalized Wigner-Smith time-delay runs")]
struct Cli {
    #[command(subcommand)]
    verb: Command,

    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Frequency points computed concurrently.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Override the WS-residual threshold.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Port-mode table: cutoff, β, Z and class per frequency.
    Modes,
    /// S, S', Q̃, Q, Q_prop, WS modes and residuals.
    Wsq,
    /// WS delays, spatial shifts, W and optional port-plane profiles.
    Wsmodes,
    /// Composed against monolithic S and Q.
    Cascade,
    /// Residual or cascade error against mode count.
    Convergence,
    /// Threshold checks only; exit status 2 if any fails.
    Verify,
}

impl From<Command> for Verb {
    fn from(c: Command) -> Self {
        match c {
            Command::Modes => Verb::Modes,
            Command::Wsq => Verb::Wsq,
            Command::Wsmodes => Verb::Wsmodes,
            Command::Cascade => Verb::Cascade,
            Command::Convergence => Verb::Convergence,
            Command::Verify => Verb::Verify,
        }
    }
}

fn context(cli: &Cli) -> Result<Context, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut cfg = RunConfig::from_toml(&text)?;
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(CliError::Config(format!("--tol must lie in (0, 1), got {t}")));
        }
        cfg.tolerances.residual = t;
    }
    if cli.jobs == 0 {
        return Err(CliError::Config("--jobs must be positive".into()));
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("wsdelay-out"));
    Ok(Context {
        cfg,
        config_text: text,
        out,
        jobs: cli.jobs,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let verb: Verb = cli.verb.into();
    match context(&cli).and_then(|ctx| run(&ctx, verb)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("{}: thresholds exceeded (see report.json)", verb.name());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
