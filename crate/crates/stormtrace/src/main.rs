use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use stormtrace::corpus::validate_file;
use stormtrace::fixture;
use stormtrace::pipeline::{run_pipeline, ElectMode, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "stormtrace",
    about = "Detect discussion topics in a post corpus and elect the key posts and authors per topic per time window",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write all outputs to --out-dir
    Run(RunArgs),
    /// Schema-check an input file without running anything
    Validate {
        /// Line-delimited JSON corpus file
        #[arg(long)]
        input: PathBuf,
    },
    /// Write a deterministic synthetic corpus with planted topics
    GenFixture {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output path for the generated posts.jsonl
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Line-delimited JSON corpus file
    #[arg(long)]
    input: PathBuf,
    /// Optional source<TAB>destination redirect map
    #[arg(long)]
    redirect_map: Option<PathBuf>,
    /// Optional stopword file (one word per line; default: bundled English list)
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Window size in days
    #[arg(long, default_value_t = 7)]
    gamma: u32,
    /// Window step in days
    #[arg(long, default_value_t = 1)]
    delta: u32,
    /// Number of LDA topics per window
    #[arg(long, default_value_t = 10)]
    topics: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    lda_iters: usize,
    #[arg(long, default_value_t = 100)]
    lda_burnin: usize,
    /// Elect the top X candidates per topic (mode: top)
    #[arg(long, default_value_t = 1)]
    top_x: usize,
    #[arg(long, value_enum, default_value_t = ElectModeArg::Top)]
    elect_mode: ElectModeArg,
    /// Keep candidates scoring >= theta * max (mode: percent)
    #[arg(long, default_value_t = 0.8)]
    percent_theta: f64,
    /// Keep authors with average boost >= theta * max average
    #[arg(long, default_value_t = 0.8)]
    boost_theta: f64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ElectModeArg {
    Top,
    Percent,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = PipelineConfig {
                input_path: args.input,
                redirect_map_path: args.redirect_map,
                stopwords_path: args.stopwords,
                gamma_days: args.gamma,
                delta_days: args.delta,
                k: args.topics,
                seed: args.seed,
                lda_iters: args.lda_iters,
                lda_burnin: args.lda_burnin,
                top_x: args.top_x,
                elect_mode: match args.elect_mode {
                    ElectModeArg::Top => ElectMode::Top,
                    ElectModeArg::Percent => ElectMode::Percent,
                },
                percent_theta: args.percent_theta,
                boost_theta: args.boost_theta,
                out_dir: args.out_dir.clone(),
            };
            let report = run_pipeline(&cfg)?;
            let elected: usize = report.windows.iter().map(|w| w.key_posts.len()).sum();
            println!(
                "{} windows, {} key posts, {} key authors, {} boost authors, graph {}N/{}E/{}C -> {}",
                report.windows.len(),
                elected,
                report.key_authors.len(),
                report.boost_authors.len(),
                report.graph.nodes,
                report.graph.edges,
                report.graph.components,
                args.out_dir.display()
            );
            Ok(())
        }
        Command::Validate { input } => {
            let count =
                validate_file(&input).with_context(|| format!("validate {}", input.display()))?;
            println!("OK: {count} records");
            Ok(())
        }
        Command::GenFixture { seed, out } => {
            std::fs::write(&out, fixture::generate(seed))
                .with_context(|| format!("write {}", out.display()))?;
            println!("wrote fixture to {}", out.display());
            Ok(())
        }
    }
}
