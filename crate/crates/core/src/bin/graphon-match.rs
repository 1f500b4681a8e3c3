use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use graphon_match::harness::{parse_config, read_adjacency, run_and_write};
use graphon_match::matcher::{match_graphs, match_unequal, MatcherConfig, SeedCount};
use graphon_match::rng::stream;
use graphon_match::selftest::run_selftest;
use graphon_match::{Error, Result};

#[derive(Parser)]
#[command(version, about = "Unseeded graph matching for graphon networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation experiment described by a JSON config and write CSV records.
    Run { config: PathBuf },
    /// Match two networks given as .edges or .csv files; prints JSON.
    Match {
        first: PathBuf,
        second: PathBuf,
        /// Number of random seeds (default: automatic)
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the built-in oracle checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(config: PathBuf) -> Result<()> {
    let text = std::fs::read_to_string(&config).map_err(|source| Error::Io {
        path: config.clone(),
        source,
    })?;
    let cfg = parse_config(&text)?;
    let (records, path) = run_and_write(&cfg)?;
    eprintln!("wrote {} records to {}", records.len(), path.display());
    Ok(())
}

fn match_files(first: PathBuf, second: PathBuf, d: Option<usize>, seed: u64) -> Result<()> {
    let a1 = read_adjacency(&first)?;
    let a2 = read_adjacency(&second)?;
    let cfg = MatcherConfig {
        d: d.map_or(SeedCount::Auto, SeedCount::Fixed),
        seed,
        ..Default::default()
    };
    let mut rng = stream(seed, "match");
    let out = if a1.n() == a2.n() {
        let r = match_graphs(&a1, &a2, &cfg, &mut rng)?;
        json!({
            "d": r.d,
            "enumeration_cost": r.enumeration_cost,
            "pairs": r.pairs(),
            "dropped_first": r.dropped.0,
            "dropped_second": r.dropped.1,
        })
    } else {
        let u = match_unequal(&a1, &a2, &cfg, &mut rng)?;
        let r = &u.result;
        json!({
            "d": r.d,
            "enumeration_cost": r.enumeration_cost,
            "pairs": r.pairs(),
            "dropped_first": r.dropped.0,
            "dropped_second": r.dropped.1,
            "larger": u.larger,
            "extension": u.extension,
        })
    };
    println!("{out}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config } => run(config),
        Command::Match {
            first,
            second,
            d,
            seed,
        } => match_files(first, second, d, seed),
        Command::Selftest { seed } => {
            let outcomes = run_selftest(seed);
            for o in &outcomes {
                println!("{}\t{}\t{}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
            if outcomes.iter().all(|o| o.passed) {
                Ok(())
            } else {
                return ExitCode::FAILURE;
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace(['\t', '\n'], " ");
            eprintln!("error\t{}\t{message}", e.kind());
            ExitCode::FAILURE
        }
    }
}
