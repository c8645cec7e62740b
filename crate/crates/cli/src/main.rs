//! `proxemb` command-line tool.
//!
//! Exit status: 0 on success, 1 for usage errors, 2 for bad input data,
//! 3 for numerical failures inside the pipeline.

mod diagnose;
mod embed;
mod evaluate;
mod failure;
mod io;
mod options;
mod sweep;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::failure::{CliResult, Failure, EXIT_USAGE};
use crate::options::ConfigArgs;

#[derive(Debug, Parser)]
#[command(name = "proxemb", version, about = "Proximity-matrix node and graph embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Embed the nodes of one graph.
    NodeEmbed {
        /// Edge list: `u v` or `u v w` per line.
        #[arg(long)]
        graph: PathBuf,
        /// Read a third column as the edge weight.
        #[arg(long)]
        weighted: bool,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean-pooled feature vectors for every graph in a dataset.
    GraphEmbed {
        /// Directory with `index.txt` and graph edge lists.
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        weighted: bool,
        /// Append heat-trace and return-probability baseline columns.
        #[arg(long)]
        baselines: bool,
        /// Walk lengths for the return-probability baseline.
        #[arg(long, default_value_t = 5)]
        retgk_max_k: usize,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score embeddings on node classification, node clustering, or graph
    /// classification.
    Eval(evaluate::EvalArgs),
    /// Run and rank a grid of pipeline designs.
    Sweep(sweep::SweepArgs),
    /// Generate a synthetic graph with planted structural roles.
    Synth(synth::SynthArgs),
    /// Write row-sum, variance, and entropy statistics per operator and filter.
    Diagnose(diagnose::DiagnoseArgs),
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::NodeEmbed {
            graph,
            weighted,
            config,
            out,
        } => embed::node_embed(&graph, weighted, &config.resolve()?, &out),
        Command::GraphEmbed {
            dataset,
            weighted,
            baselines,
            retgk_max_k,
            config,
            out,
        } => {
            if baselines && retgk_max_k == 0 {
                return Err(Failure::usage("--retgk-max-k must be at least 1"));
            }
            let opts = embed::GraphEmbedOptions {
                weighted,
                baselines,
                retgk_max_k,
            };
            embed::graph_embed(&dataset, &config.resolve()?, &opts, &out)
        }
        Command::Eval(args) => evaluate::run(&args),
        Command::Sweep(args) => sweep::run(&args),
        Command::Synth(args) => synth::run(&args),
        Command::Diagnose(args) => diagnose::run(&args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
