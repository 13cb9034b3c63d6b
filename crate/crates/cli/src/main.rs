use std::fs;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use soire::checkpoint::{load_checkpoint, save_checkpoint};
use soire::datagen::{make_dataset, GenConfig, SplitSizes};
use soire::dataset::Dataset;
use soire::diffnet::{train, EpochLog, TrainConfig};
use soire::interpret::interpret;
use soire::matcher::soiretm;
use soire::metrics::{full_report, network_accuracy};
use soire::pipeline::{pipeline, ExperimentConfig, Target};
use soire::{required_bound, Alphabet, Soire};

#[derive(Parser)]
#[command(name = "soire", version, about = "Learn single-occurrence regular expressions with interleaving")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate train, validation and test splits from a target expression.
    Gen(GenArgs),
    /// Print 1 or 0 for each input line, depending on whether it matches.
    Match(MatchArgs),
    /// Train a network and save its best checkpoint.
    Train(TrainArgs),
    /// Turn a checkpoint into an expression by beam search.
    Interpret(InterpretArgs),
    /// Evaluate a checkpoint and an expression on a test split (one CSV row).
    Eval(EvalArgs),
    /// Run the full sweep over noise levels and learning rates.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct TargetArgs {
    /// Target expression, infix or prefix.
    #[arg(long, conflicts_with = "fixture")]
    regex: Option<String>,
    /// Id of a bundled benchmark target (1-30).
    #[arg(long)]
    fixture: Option<usize>,
    /// Alphabet symbols; defaults to the letters a..j.
    #[arg(long)]
    alphabet: Option<String>,
}

impl TargetArgs {
    fn target(&self) -> Result<Target> {
        match (&self.regex, self.fixture) {
            (Some(r), None) => Ok(Target::Regex(r.clone())),
            (None, Some(id)) => Ok(Target::Fixture(id)),
            _ => bail!("give exactly one of --regex or --fixture"),
        }
    }

    fn alphabet(&self) -> Result<Alphabet> {
        Ok(match &self.alphabet {
            Some(text) => Alphabet::parse(text)?,
            None => Alphabet::letters(10)?,
        })
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Positives (and negatives) in the training split.
    #[arg(long, default_value_t = 250)]
    train_size: usize,
    #[arg(long, default_value_t = 50)]
    val_size: usize,
    #[arg(long, default_value_t = 250)]
    test_size: usize,
    #[arg(long, default_value_t = 20)]
    max_len: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MatchArgs {
    #[arg(long)]
    regex: String,
    /// File with one string per line; standard input when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    validation: PathBuf,
    /// Vertices of the encoding; 4|Σ| - 2 when omitted.
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 64)]
    batch_size: usize,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InterpretArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    train: PathBuf,
    #[arg(long, default_value_t = 500)]
    beam: usize,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Expression to evaluate, usually the output of `interpret`.
    #[arg(long)]
    regex: String,
    #[arg(long)]
    test: PathBuf,
    /// Name written in the first CSV column.
    #[arg(long, default_value = "dataset")]
    dataset_id: String,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Print the CSV header first.
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.05, 0.1, 0.15, 0.2])]
    deltas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.05, 0.1, 0.15, 0.2])]
    lrs: Vec<f64>,
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, default_value_t = 500)]
    beam: usize,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 64)]
    batch_size: usize,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    /// Trainings per learning rate, each from a different initialization.
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 250)]
    train_size: usize,
    #[arg(long, default_value_t = 50)]
    val_size: usize,
    #[arg(long, default_value_t = 250)]
    test_size: usize,
    #[arg(long, default_value_t = 20)]
    max_len: usize,
    /// Training time limit per run, in seconds.
    #[arg(long, default_value_t = 5000)]
    time_limit: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(args) => gen(args),
        Command::Match(args) => run_match(args),
        Command::Train(args) => run_train(args),
        Command::Interpret(args) => run_interpret(args),
        Command::Eval(args) => run_eval(args),
        Command::Pipeline(args) => run_pipeline(args),
    }
}

fn gen(args: GenArgs) -> Result<()> {
    let sigma = args.target.alphabet()?;
    let r = args.target.target()?.soire(&sigma)?;
    let config = GenConfig {
        sizes: SplitSizes {
            train: args.train_size,
            validation: args.val_size,
            test: args.test_size,
        },
        delta: args.delta,
        seed: args.seed,
        max_len: args.max_len,
    };
    let splits = make_dataset(&r, &sigma, &config)?;
    splits.save(&args.out)?;
    eprintln!("wrote {} to {}", r, args.out.display());
    Ok(())
}

fn run_match(args: MatchArgs) -> Result<()> {
    let sigma = Alphabet::from_symbols_in(&args.regex)?;
    let r = Soire::parse(&args.regex, &sigma)?;
    let reader: Box<dyn BufRead> = match &args.input {
        Some(path) => Box::new(io::BufReader::new(
            fs::File::open(path).with_context(|| format!("opening {}", path.display()))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for line in reader.lines() {
        let line = line?;
        writeln!(out, "{}", u8::from(soiretm(&r, &line)))?;
    }
    Ok(())
}

fn run_train(args: TrainArgs) -> Result<()> {
    let train_set = Dataset::load(&args.train)?;
    let validation = Dataset::load(&args.validation)?;
    let bound = args.bound.unwrap_or_else(|| required_bound(&train_set.alphabet));
    let config = TrainConfig {
        batch_size: args.batch_size,
        learning_rate: args.lr,
        lambda: args.lambda,
        epochs: args.epochs,
        seed: args.seed,
        time_limit: args.time_limit.map(Duration::from_secs),
        ..TrainConfig::new(bound)
    };
    let outcome = train(&train_set, &validation, &config)?;
    fs::create_dir_all(&args.out)?;
    save_checkpoint(&outcome.best, &args.out.join("checkpoint.txt"))?;
    fs::write(args.out.join("train_log.csv"), EpochLog::to_csv(&outcome.log))?;
    println!(
        "best epoch {} validation accuracy {:.4}{}",
        outcome.best_epoch,
        outcome.best_val_accuracy,
        if outcome.timed_out { " (time limit reached)" } else { "" }
    );
    Ok(())
}

fn run_interpret(args: InterpretArgs) -> Result<()> {
    let theta = load_checkpoint(&args.checkpoint)?;
    let train_set = Dataset::load(&args.train)?;
    let out = interpret(&train_set, &theta, args.beam)?;
    println!("infix {}", out.soire.to_infix());
    println!("prefix {}", out.soire.to_prefix());
    println!("train accuracy {:.4}", out.train_accuracy);
    Ok(())
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let theta = load_checkpoint(&args.checkpoint)?;
    let test = Dataset::load(&args.test)?;
    let r = Soire::parse(&args.regex, theta.alphabet())?;
    let report = full_report(&theta, &r, &test, args.threshold)?;
    let network = network_accuracy(&theta, &test, args.threshold)?;
    if args.header {
        println!("dataset,delta,acc_soire,acc_network,faithfulness");
    }
    println!(
        "{},{},{:.6},{:.6},{:.6}",
        args.dataset_id,
        args.delta,
        report.accuracy,
        network,
        report.faithfulness.unwrap_or(0.0)
    );
    Ok(())
}

fn run_pipeline(args: PipelineArgs) -> Result<()> {
    let sigma = args.target.alphabet()?;
    let config = ExperimentConfig {
        deltas: args.deltas,
        learning_rates: args.lrs,
        bound: args.bound,
        beam: args.beam,
        lambda: args.lambda,
        batch_size: args.batch_size,
        epochs: args.epochs,
        restarts: args.restarts,
        seed: args.seed,
        sizes: SplitSizes {
            train: args.train_size,
            validation: args.val_size,
            test: args.test_size,
        },
        max_len: args.max_len,
        time_limit: Some(Duration::from_secs(args.time_limit)),
        ..ExperimentConfig::new(args.target.target()?, sigma, args.out)
    };
    let report = pipeline(&config)?;
    for run in report.selected_runs() {
        let test = run.test.as_ref();
        println!(
            "delta {} lr {} restart {} soire {} test accuracy {:.4} faithfulness {:.4}",
            run.delta,
            run.learning_rate,
            run.restart,
            run.soire.as_ref().map(|r| r.to_infix()).unwrap_or_default(),
            test.map_or(0.0, |t| t.accuracy),
            test.and_then(|t| t.faithfulness).unwrap_or(0.0),
        );
    }
    for run in &report.runs {
        if let Some(err) = &run.error {
            eprintln!("delta {} lr {}: {}", run.delta, run.learning_rate, err);
        }
    }
    Ok(())
}
