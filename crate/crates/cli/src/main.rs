//! `npspace`: level tables, N^p-norms, index estimates and property suites
//! for linear maps between concrete operator spaces.

mod commands;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Input errors: unreadable or malformed files, unknown catalog names.
pub const EXIT_PARSE: u8 = 2;
/// A computed invariant failed (inconsistent brackets, failed suite).
pub const EXIT_INVARIANT: u8 = 3;
/// `--strict` was given and the membership verdict is unknown.
pub const EXIT_UNKNOWN: u8 = 4;

#[derive(Parser)]
#[command(
    name = "npspace",
    version,
    about = "Certified amplification norms and N^p-norms of linear maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Suite {
    /// Matrix-norm axioms on M_2, M_3 and random subspaces
    Axioms,
    /// ||phi||_q <= ||phi||_p on every catalog map
    Inclusions,
    /// Level bounds against closed forms and the brute-force oracle
    Bounds,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket ||phi_n|| for n = 1..=N; CSV on stdout, JSON table to --out
    Levels {
        /// Map file, or catalog:<name>
        map: String,
        #[arg(long, default_value_t = 4)]
        max_level: usize,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enclose ||phi||_p and decide membership in N^p
    Npnorm {
        map: String,
        #[arg(long)]
        p: f64,
        /// Truncation level; defaults to max(64, 4 s)
        #[arg(long = "K")]
        k: Option<usize>,
        #[arg(long)]
        max_level: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exit with status 4 when the verdict is unknown
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the index r = inf { p : phi in N^p }
    Index {
        #[arg(required_unless_present = "synthetic", conflicts_with = "synthetic")]
        map: Option<String>,
        /// Fit the sequence n^alpha instead of a map, e.g. "n^1.5"
        #[arg(long)]
        synthetic: Option<String>,
        #[arg(long)]
        max_level: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a property suite; exits 3 on any failure
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV `p,lo,hi` over a grid of p values
    Plotdata {
        map: String,
        /// start:stop:step, e.g. 2.1:4:0.1
        #[arg(long)]
        p_grid: String,
        #[arg(long = "K")]
        k: Option<usize>,
        #[arg(long)]
        max_level: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("NPSPACE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("NPSPACE_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        return Err("NPSPACE_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_PARSE);
    }
    let result = match cli.command {
        Command::Levels {
            map,
            max_level,
            restarts,
            seed,
            out,
        } => commands::levels(&map, max_level, restarts, seed, out.as_deref()),
        Command::Npnorm {
            map,
            p,
            k,
            max_level,
            seed,
            strict,
            out,
        } => commands::npnorm(&map, p, k, max_level, seed, strict, out.as_deref()),
        Command::Index {
            map,
            synthetic,
            max_level,
            seed,
        } => commands::index(map.as_deref(), synthetic.as_deref(), max_level, seed),
        Command::Verify { suite, seed, out } => suites::run(suite, seed, out.as_deref()),
        Command::Plotdata {
            map,
            p_grid,
            k,
            max_level,
            seed,
        } => commands::plotdata(&map, &p_grid, k, max_level, seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
