use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cobweb_cli::commands::{self, PartitionSource};
use cobweb_cli::{BenchmarkSpec, MembershipMode, RunConfig, SigmaArg};

#[derive(Parser)]
#[command(
    name = "cobweb",
    version,
    about = "Incremental conceptual clustering with fuzzy category utility"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a concept hierarchy over a delimited file.
    Fit {
        #[command(flatten)]
        run: RunArgs,
        /// Rerun with the configuration recorded in a manifest.
        #[arg(long, conflicts_with = "input")]
        replay: Option<PathBuf>,
    },
    /// Print the utility table of a partition.
    Score {
        #[command(flatten)]
        run: RunArgs,
        /// Partition file: `id label` per line.
        #[arg(long, required_unless_present = "tree", conflicts_with = "tree")]
        partition: Option<PathBuf>,
        /// Score the root partition of a saved tree instead.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Synthetic blob benchmark for rectangular vs Gaussian membership.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Sidecar declaring attribute kinds: `name nominal v1 v2 ...` or `name numeric`.
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fuzzy")]
    membership: Mode,
    #[arg(long, default_value_t = 4)]
    grid_size: usize,
    /// `cell` or `fixed:<value>`.
    #[arg(long, default_value = "cell")]
    sigma: SigmaArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Place grid centers at `(i - 0.5) * range / d` without the minimum offset.
    #[arg(long)]
    compat_eq7_literal: bool,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Mode {
    Nominal,
    Rect,
    Fuzzy,
}

impl RunArgs {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let input = self
            .input
            .clone()
            .ok_or_else(|| anyhow::anyhow!("--input is required"))?;
        Ok(RunConfig {
            input,
            schema: self.schema.clone(),
            delimiter: self.delimiter,
            membership: match self.membership {
                Mode::Nominal => MembershipMode::Nominal,
                Mode::Rect => MembershipMode::Rect,
                Mode::Fuzzy => MembershipMode::Fuzzy,
            },
            grid_size: self.grid_size,
            sigma: self.sigma,
            seed: self.seed,
            literal_grid: self.compat_eq7_literal,
        })
    }
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 2)]
    blobs: usize,
    #[arg(long, default_value_t = 20)]
    per_blob: usize,
    #[arg(long, default_value_t = 2)]
    dims: usize,
    #[arg(long, default_value_t = 10.0)]
    separation: f64,
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    grid_size: usize,
    #[arg(long, default_value = "cell")]
    sigma: SigmaArg,
    #[arg(long, default_value_t = 100)]
    random_partitions: usize,
    #[arg(long, default_value_t = 1e-6)]
    jitter: f64,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Fit { run, replay } => {
            let outcome = match replay {
                Some(manifest) => commands::replay(&manifest, run.out_dir.as_deref())?,
                None => commands::fit(&run.config()?, run.out_dir.as_deref())?,
            };
            let s = &outcome.summary;
            println!(
                "instances {}  nodes {}  leaves {}  root clusters {}  utility {}",
                s.instances, s.nodes, s.leaves, s.root_clusters, s.utility
            );
        }
        Command::Score {
            run,
            partition,
            tree,
        } => {
            let source = match (partition, tree) {
                (Some(p), _) => PartitionSource::File(p),
                (None, Some(t)) => PartitionSource::Tree(t),
                (None, None) => unreachable!("clap requires one source"),
            };
            let cfg = match (&source, &run.input) {
                (PartitionSource::Tree(_), None) => RunConfig::new(""),
                _ => run.config()?,
            };
            let report = commands::score(&cfg, &source, run.out_dir.as_deref())?;
            print!("{}", report.to_tsv());
        }
        Command::Bench(args) => {
            let spec = BenchmarkSpec {
                blobs: args.blobs,
                per_blob: args.per_blob,
                dims: args.dims,
                separation: args.separation,
                spread: args.spread,
                trials: args.trials,
                seed: args.seed,
                grid_size: args.grid_size,
                sigma: args.sigma,
                random_partitions: args.random_partitions,
                jitter: args.jitter,
            };
            let report = commands::bench(&spec, args.out_dir.as_deref())?;
            print!("{}", report.to_tsv());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
