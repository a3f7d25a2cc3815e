use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use relfam::Engine;
use relfam_cli::commands::{self, Update};

/// Attribute reducts of covering decision systems.
///
/// Log verbosity is read from RELFAM_LOG (error, warn, info, debug, trace).
#[derive(Parser)]
#[command(name = "relfam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a system document and report its shape.
    Validate { file: PathBuf },
    /// Compute all reducts from scratch.
    Reduce {
        file: PathBuf,
        /// Write the reduction cache here.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Cross-check against definition-level enumeration (at most 16 coverings).
        #[arg(long)]
        verify: bool,
    },
    /// Add or delete one covering using a cache from `reduce` or a previous update.
    #[command(group(ArgGroup::new("change").required(true).args(["add", "del"])))]
    Update {
        file: PathBuf,
        /// Covering document to add.
        #[arg(long)]
        add: Option<PathBuf>,
        /// Name of the covering to delete.
        #[arg(long)]
        del: Option<String>,
        /// Cache for FILE; overwritten with the cache of the updated system.
        #[arg(long)]
        cache: PathBuf,
        /// Write the updated system document here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time incremental updates against batch recomputation; prints CSV.
    Bench {
        config: PathBuf,
        /// Write CSV here instead of standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Turn a CSV table into a system document.
    Coverize {
        csv: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RELFAM_LOG", "warn")).init();
    let cli = Cli::parse();
    let engine = Engine::default();
    let result = match &cli.command {
        Command::Validate { file } => commands::validate(file),
        Command::Reduce { file, cache, verify } => commands::reduce(&engine, file, cache.as_deref(), *verify),
        Command::Update {
            file,
            add,
            del,
            cache,
            out,
        } => {
            let change = match (add, del) {
                (Some(p), _) => Update::Add(p),
                (None, Some(name)) => Update::Delete(name),
                (None, None) => unreachable!("clap enforces one of --add/--del"),
            };
            commands::update(&engine, file, change, cache, out.as_deref())
        }
        Command::Bench { config, out } => commands::bench(&engine, config, out.as_deref()),
        Command::Coverize { csv, spec, out } => commands::coverize_cmd(csv, spec, out),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
