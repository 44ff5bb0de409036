//! Command-line pipeline: one subcommand per stage plus `all`,
//! `compare-embeddings`, and a seeded `synth-corpus` generator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pubtrends::config::{load_config, PipelineConfig};
use pubtrends::corpus::{self, LoadMode};
use pubtrends::pipeline::{run_compare_embeddings, run_pipeline, Stage};
use pubtrends::synth::{generate, SynthConfig};

#[derive(Parser)]
#[command(
    name = "pubtrends",
    version,
    about = "Publication-corpus analytics: embeddings, clustering, topics, evaluation, and trend exports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// TOML pipeline configuration.
    #[arg(long, short)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate the corpus; write the canonical corpus artifact.
    Ingest {
        #[command(flatten)]
        config: ConfigArg,
        /// Also write the machine-readable summary to this path.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Clean, tokenize, lemmatize, merge phrases, build the vocabulary.
    Preprocess(ConfigArg),
    /// Train the configured embedding and emit document vectors.
    Embed(ConfigArg),
    /// K-means over document vectors (plus optional elbow scan).
    Cluster(ConfigArg),
    /// Per-cluster LDA topics with top words.
    Topics(ConfigArg),
    /// UMass coherence over the fitted topics.
    Evaluate(ConfigArg),
    /// Exact t-SNE 2D coordinates for plotting.
    Tsne(ConfigArg),
    /// Year-by-cluster trend series.
    Trends(ConfigArg),
    /// Run every stage in dependency order.
    All(ConfigArg),
    /// Run tfidf, pubg, and pubw end-to-end and compare coherence and
    /// cluster agreement (MI/NMI/AMI).
    CompareEmbeddings(ConfigArg),
    /// Generate a seeded synthetic corpus with planted topics.
    SynthCorpus(SynthArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    docs: usize,
    #[arg(long, default_value_t = 5)]
    topics: usize,
    #[arg(long, default_value_t = 60)]
    topic_vocab: usize,
    #[arg(long, default_value_t = 40)]
    background_vocab: usize,
    #[arg(long, default_value_t = 40)]
    doc_len: usize,
    /// Rare scrambler words injected into random document pairs.
    #[arg(long, default_value_t = 0)]
    noise_words: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "SYNTH")]
    venue: String,
    #[arg(long, default_value_t = 2000)]
    year_from: i32,
    #[arg(long, default_value_t = 2020)]
    year_to: i32,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("pubtrends: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Ingest { config, summary } => {
            let config = load_config(&config.config)?;
            run_pipeline(&config, &[Stage::Ingest])?;

            // Per-row diagnostics come from the source file with the
            // configured mode, not the normalized artifact.
            let source = corpus::load_corpus(
                &config.corpus.path,
                &config.corpus.columns,
                config.corpus.mode,
            )?;
            for issue in &source.skipped {
                eprintln!("skipped line {}: {}", issue.line, issue.reason);
            }
            for issue in &source.duplicate_dois {
                eprintln!("duplicate doi at line {}: {}", issue.line, issue.reason);
            }
            if !source.empty_abstracts.is_empty() {
                eprintln!(
                    "{} record(s) have empty abstracts and are excluded from analysis stages",
                    source.empty_abstracts.len()
                );
            }

            let path = config.output_dir.join(Stage::Ingest.artifact());
            let report =
                corpus::load_corpus(&path, &corpus::canonical_schema(), LoadMode::Strict)?;
            let stats = corpus::summarize(&report.corpus);
            print!("{}", stats.to_table());
            if let Some(out) = summary {
                std::fs::write(&out, stats.to_kv())?;
                println!("summary written to {}", out.display());
            }
        }
        Command::Preprocess(args) => run_stage(&args, Stage::Preprocess)?,
        Command::Embed(args) => run_stage(&args, Stage::Embed)?,
        Command::Cluster(args) => run_stage(&args, Stage::Cluster)?,
        Command::Topics(args) => run_stage(&args, Stage::Topics)?,
        Command::Evaluate(args) => run_stage(&args, Stage::Evaluate)?,
        Command::Tsne(args) => run_stage(&args, Stage::Tsne)?,
        Command::Trends(args) => run_stage(&args, Stage::Trends)?,
        Command::All(args) => {
            let config = load_config(&args.config)?;
            let manifest = run_pipeline(&config, &Stage::ALL)?;
            report_run(&config, manifest.artifacts.len());
        }
        Command::CompareEmbeddings(args) => {
            let config = load_config(&args.config)?;
            let report = run_compare_embeddings(&config)?;
            println!("overall UMass coherence by embedding:");
            for (embedding, coherence) in &report.coherence_overall {
                println!("  {embedding}\t{coherence:.4}");
            }
            println!("pairwise cluster agreement:");
            for (pair, mi, nmi, ami) in &report.mi_pairs {
                println!("  {pair}\tMI {mi:.4}\tNMI {nmi:.4}\tAMI {ami:.4}");
            }
            println!(
                "report written to {}",
                config.output_dir.join("compare.txt").display()
            );
        }
        Command::SynthCorpus(args) => {
            let synth_config = SynthConfig {
                n_docs: args.docs,
                n_topics: args.topics,
                topic_vocab: args.topic_vocab,
                background_vocab: args.background_vocab,
                doc_len: args.doc_len,
                noise_words: args.noise_words,
                year_range: (args.year_from, args.year_to),
                venue: args.venue,
                seed: args.seed,
                ..SynthConfig::default()
            };
            let synth = generate(&synth_config);
            corpus::write_corpus(&synth.corpus, &args.out)?;
            let stats = corpus::summarize(&synth.corpus);
            println!(
                "wrote {} documents ({} planted topics) to {}",
                stats.publication_count,
                args.topics,
                args.out.display()
            );
        }
    }
    Ok(())
}

fn run_stage(args: &ConfigArg, stage: Stage) -> anyhow::Result<()> {
    let config = load_config(&args.config)?;
    run_pipeline(&config, &[stage])?;
    report_run(&config, 1);
    Ok(())
}

fn report_run(config: &PipelineConfig, stages: usize) {
    println!(
        "{stages} stage artifact(s) written to {} (manifest.kv updated)",
        config.output_dir.display()
    );
}
