//! Command-line front end: argument parsing, JSON configuration, seeding
//! and the CSV / JSON / PPM / grid-set emitters.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    ArcArgs, BoxdimArgs, ExtinctionArgs, GalleryArgs, PercolateArgs, SweepArgs, WalksArgs,
};
pub use config::merge_config;

#[derive(Debug, Parser)]
#[command(name = "fracperc", version, about = "Fractal percolation laboratory", args_override_self = true)]
pub struct Cli {
    /// Master seed; recorded in every output file.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Directory for output files (created if missing).
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,

    /// JSON object of command parameters; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for parallel trials (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one construction and report per-level counts.
    Percolate(PercolateArgs),
    /// Left-right crossing frequency over a probability grid.
    Sweep(SweepArgs),
    /// Walk hierarchies in a full tree, or single level-1 walk families.
    Walks(WalksArgs),
    /// Box-counting dimension of a grid-set file.
    Boxdim(BoxdimArgs),
    /// Reference fractals as grid-set files and renders.
    Gallery(GalleryArgs),
    /// Bad set and boundary arc of a basic segment.
    Arc(ArcArgs),
    /// Analytic and Monte-Carlo extinction probability.
    Extinction(ExtinctionArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Percolate(_) => "percolate",
            Command::Sweep(_) => "sweep",
            Command::Walks(_) => "walks",
            Command::Boxdim(_) => "boxdim",
            Command::Gallery(_) => "gallery",
            Command::Arc(_) => "arc",
            Command::Extinction(_) => "extinction",
        }
    }
}

pub const SUBCOMMANDS: [&str; 7] = ["percolate", "sweep", "walks", "boxdim", "gallery", "arc", "extinction"];

/// Failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_CONSTRUCTION: i32 = 4;
pub const EXIT_IO: i32 = 1;

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: msg.into() }
    }

    pub fn io(context: &str, e: std::io::Error) -> Self {
        CliError { code: EXIT_IO, message: format!("{context}: {e}") }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<fracperc::Error> for CliError {
    fn from(e: fracperc::Error) -> Self {
        use fracperc::Error as E;
        let code = match &e {
            E::Usage(_) | E::Parse { .. } | E::EmptySet(_) => EXIT_USAGE,
            E::Resource { .. } => EXIT_RESOURCE,
            E::Construction(_) => EXIT_CONSTRUCTION,
        };
        CliError { code, message: e.to_string() }
    }
}

/// Parse `args` (including the program name), merge any `--config` file and
/// run the command. Returns the lines printed as a summary.
pub fn run<I, T>(args: I) -> Result<Vec<String>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let raw: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let merged = merge_config(raw)?;
    let cli = match Cli::try_parse_from(merged) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Ok(vec![e.to_string()]);
            }
            return Err(CliError::usage(e.to_string()));
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::usage("--threads must be >= 1"));
        }
        // A global pool can only be installed once per process; later calls
        // keep the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    std::fs::create_dir_all(&cli.out_dir).map_err(|e| CliError::io("creating output directory", e))?;
    let ctx = output::Context { seed: cli.seed, out_dir: cli.out_dir.clone(), command: cli.command.name() };
    match &cli.command {
        Command::Percolate(a) => commands::percolate(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Walks(a) => commands::walks(&ctx, a),
        Command::Boxdim(a) => commands::boxdim(&ctx, a),
        Command::Gallery(a) => commands::gallery(&ctx, a),
        Command::Arc(a) => commands::arc(&ctx, a),
        Command::Extinction(a) => commands::extinction(&ctx, a),
    }
}
