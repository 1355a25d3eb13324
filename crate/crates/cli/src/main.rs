use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use cartan_spectra::verify::FuzzDims;
use cartan_spectra_cli::commands::parse_side;
use cartan_spectra_cli::{cmd_cartan, cmd_fuzz, cmd_spectrum, cmd_validate, cmd_verify, read_problem, CliError, Outcome, Theorem};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cartan-spectra", version, about = "Joint spectra of representations of solvable Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct TolFlags {
    #[arg(long)]
    rank_eps: Option<f64>,
    #[arg(long)]
    match_eps: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the algebra, representation and subalgebras in a problem file.
    Validate {
        path: PathBuf,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// Cartan subalgebra and root decomposition.
    Cartan {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// One spectrum: taylor, slodkowski, split, essential_taylor,
    /// essential_slodkowski or essential_split.
    Spectrum {
        path: PathBuf,
        #[arg(long, default_value = "taylor")]
        kind: String,
        #[arg(long)]
        k: Option<usize>,
        /// delta or pi
        #[arg(long)]
        side: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// Run spectral identity checks on the representation.
    Verify {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        theorem: Theorem,
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        /// Second problem file for the tensor and multiplication checks.
        #[arg(long)]
        with: Option<PathBuf>,
        #[command(flatten)]
        tol: TolFlags,
    },
    /// Check every identity on randomly generated solvable instances.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        max_algebra_dim: usize,
        #[arg(long, default_value_t = 4)]
        max_space_dim: usize,
        #[arg(long)]
        nilpotent_only: bool,
        #[command(flatten)]
        tol: TolFlags,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Validate { path, tol } => cmd_validate(&read_problem(&path)?, tol.rank_eps, tol.match_eps),
        Command::Cartan { path, seed, tol } => cmd_cartan(&read_problem(&path)?, seed, tol.rank_eps, tol.match_eps),
        Command::Spectrum { path, kind, k, side, seed, tol } => {
            let side = side.as_deref().map(parse_side).transpose()?;
            cmd_spectrum(&read_problem(&path)?, &kind, k, side, seed, tol.rank_eps, tol.match_eps)
        }
        Command::Verify { path, theorem, seeds, with, tol } => {
            let with = with.as_deref().map(read_problem).transpose()?;
            cmd_verify(&read_problem(&path)?, theorem, &seeds, with.as_ref(), tol.rank_eps, tol.match_eps)
        }
        Command::Fuzz { seed, count, max_algebra_dim, max_space_dim, nilpotent_only, tol } => {
            let dims = FuzzDims { max_algebra_dim, max_space_dim, nilpotent_only };
            cmd_fuzz(seed, count, dims, tol.rank_eps, tol.match_eps)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(CliError::input(e.render().to_string().trim_end())),
    };
    let outcome = run(cli);
    let err = match outcome {
        Ok(o) => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{}", o.document.to_json());
            o.error
        }
        Err(e) => Some(e),
    };
    match err {
        None => ExitCode::SUCCESS,
        Some(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", serde_json::to_string_pretty(&e.to_json()).expect("errors serialize"));
    ExitCode::from(e.exit_code() as u8)
}
