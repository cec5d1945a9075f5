//! `modelset`: model sets, acceptance domains, deformations and
//! substitution tilings from a JSON config.
//!
//! Exit status: 0 success, 1 domain error, 2 config error, 3 internal error.
//! `MODELSET_THREADS` sets the worker thread count.

mod artifacts;
mod commands;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modelset_core::config::{Mode, RunConfig};
use modelset_core::substitution::Section7Options;
use modelset_core::{Error, ErrorKind, QuadReal, Result};

use artifacts::Artifacts;
use commands::SubstCommand;

#[derive(Parser)]
#[command(name = "modelset", version, about = "Cut-and-project sets, acceptance domains, deformations and substitution tilings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Io {
    /// JSON run configuration.
    #[arg(long, short)]
    config: PathBuf,
    /// Output prefix; files get `.report.json`, `.points.txt` or `.svg` appended.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Scheme diagnostics.
    Scheme {
        #[command(subcommand)]
        action: SchemeAction,
    },
    /// Enumerate the projection set in the configured box.
    Generate(Io),
    /// Acceptance domain of the configured patch.
    Acceptance(Io),
    /// Acceptance domain checked against every point of the sample.
    VerifyAcceptance(Io),
    /// Patch whose acceptance domain lies in the configured target interval.
    Localize(Io),
    /// Reproject the sample with a linear generator.
    Reproject(Io),
    /// Apply the configured deformation generator.
    Deform(Io),
    /// Difference-set report and Meyer verdict.
    Meyer(Io),
    /// Compare a generator on the two limits of a singular offset.
    NonslipProbe(Io),
    /// Split a generator into a linear part and a patch-determined part.
    Decompose(Io),
    /// Substitution tools.
    Subst {
        #[command(subcommand)]
        action: SubstAction,
    },
    /// Reproducible experiments.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
    /// Render a points file or a report as SVG.
    Plot {
        #[arg(long, short)]
        input: PathBuf,
        /// SVG output path.
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SchemeAction {
    Validate(Io),
}

#[derive(Subcommand)]
enum SubstAction {
    Expand {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        letter: Option<String>,
        #[arg(long, default_value_t = 3)]
        n: u32,
    },
    Matrix(Io),
    Eigen(Io),
    Realize(Io),
}

#[derive(Subcommand)]
enum ExperimentAction {
    /// Doubled-Fibonacci deformations: PF-conjugate vs contracting direction.
    Section7 {
        #[arg(long, default_value_t = 20)]
        n_max: u32,
        #[arg(long, default_value = "1/8")]
        eps: String,
        #[arg(long, default_value_t = 3)]
        meyer_from: u32,
        #[arg(long, default_value_t = 8)]
        meyer_to: u32,
        #[arg(long, short)]
        out: PathBuf,
    },
}

fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    RunConfig::from_json(&text)
}

/// Dispatches on the config mode.
fn with_mode(
    io: &Io,
    art: &mut Artifacts,
    exact: fn(&RunConfig, &Path, &mut Artifacts) -> Result<()>,
    float: fn(&RunConfig, &Path, &mut Artifacts) -> Result<()>,
) -> Result<()> {
    let cfg = load(&io.config)?;
    match cfg.mode {
        Mode::Exact => exact(&cfg, &io.out, art),
        Mode::Float => float(&cfg, &io.out, art),
    }
}

macro_rules! modal {
    ($io:expr, $art:expr, $f:ident) => {
        with_mode($io, $art, commands::$f::<QuadReal>, commands::$f::<f64>)
    };
}

fn run(cli: Cli) -> Result<Artifacts> {
    let mut art = Artifacts::default();
    let a = &mut art;
    match &cli.command {
        Command::Scheme { action: SchemeAction::Validate(io) } => modal!(io, a, scheme_validate),
        Command::Generate(io) => modal!(io, a, generate),
        Command::Acceptance(io) => modal!(io, a, acceptance),
        Command::VerifyAcceptance(io) => modal!(io, a, verify),
        Command::Localize(io) => modal!(io, a, localize),
        Command::Reproject(io) => modal!(io, a, reproject_cmd),
        Command::Deform(io) => modal!(io, a, deform),
        Command::Meyer(io) => modal!(io, a, meyer),
        Command::NonslipProbe(io) => modal!(io, a, nonslip),
        Command::Decompose(io) => modal!(io, a, decompose),
        Command::Subst { action } => {
            let (io, cmd) = match action {
                SubstAction::Expand { io, letter, n } => (io, SubstCommand::Expand { letter: letter.clone(), n: *n }),
                SubstAction::Matrix(io) => (io, SubstCommand::Matrix),
                SubstAction::Eigen(io) => (io, SubstCommand::Eigen),
                SubstAction::Realize(io) => (io, SubstCommand::Realize),
            };
            let cfg = load(&io.config)?;
            match cfg.mode {
                Mode::Exact => commands::subst::<QuadReal>(&cfg, &cmd, &io.out, a),
                Mode::Float => commands::subst::<f64>(&cfg, &cmd, &io.out, a),
            }
        }
        Command::Experiment { action: ExperimentAction::Section7 { n_max, eps, meyer_from, meyer_to, out } } => {
            let options =
                Section7Options { n_max: *n_max, eps: eps.clone(), meyer_from: *meyer_from, meyer_to: *meyer_to, ..Default::default() };
            commands::section7(&options, out, a)
        }
        Command::Plot { input, out } => commands::plot(input, out, a),
    }?;
    Ok(art)
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Domain => 1,
        ErrorKind::Config => 2,
        ErrorKind::Internal => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Ok(v) = std::env::var("MODELSET_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: MODELSET_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    let art = match run(cli) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(e.kind()));
        }
    };
    match art.write_all() {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: writing outputs: {e}");
            ExitCode::from(3)
        }
    }
}
