//! Experiment sweeps: generate, train, interpret, evaluate.
//!
//! For each noise level a dataset is generated once, then `restarts` networks
//! are trained per learning rate, each from its own random initialization.
//! The interpreted expression with the best validation accuracy is kept and
//! evaluated on the clean test split. Ties go to the run whose network agrees more often with its expression on the
//! validation split, then to the lower learning rate and the earlier restart.
//!
//! Output layout under the output directory:
//!
//! ```text
//! runs.csv                      one row per (delta, learning rate, restart)
//! results.csv                   one row per delta, the selected run
//! delta-<d>/data/{train,validation,test}.txt
//! delta-<d>/lr-<lr>/checkpoint.txt   (lr-<lr>-r<k>/ with several restarts)
//! delta-<d>/lr-<lr>/train_log.csv
//! delta-<d>/chosen.txt          infix and prefix of the selected expression
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::alphabet::Alphabet;
use crate::checkpoint::save_checkpoint;
use crate::datagen::{make_dataset, GenConfig, SplitSizes, DEFAULT_MAX_LEN};
use crate::dataset::Splits;
use crate::diffnet::{train, EpochLog, TrainConfig};
use crate::encoding::required_bound;
use crate::error::{Error, Result};
use crate::fixtures::fixture;
use crate::interpret::{interpret, DEFAULT_BEAM};
use crate::metrics::{full_report, network_accuracy, EvalReport};
use crate::soire::Soire;

pub const DEFAULT_LEARNING_RATES: [f64; 5] = [0.01, 0.05, 0.1, 0.15, 0.2];
pub const DEFAULT_DELTAS: [f64; 5] = [0.0, 0.05, 0.1, 0.15, 0.2];
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(5000);

/// The ground-truth expression of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Fixture(usize),
    Regex(String),
}

impl Target {
    /// Name used in result files.
    pub fn id(&self) -> String {
        match self {
            Target::Fixture(id) => id.to_string(),
            Target::Regex(text) => text.clone(),
        }
    }

    pub fn soire(&self, sigma: &Alphabet) -> Result<Soire> {
        match self {
            Target::Fixture(id) => fixture(*id)?.soire_over(sigma),
            Target::Regex(text) => Soire::parse(text, sigma),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub target: Target,
    pub alphabet: Alphabet,
    pub deltas: Vec<f64>,
    pub learning_rates: Vec<f64>,
    /// Vertices of the encoding; `4|Σ| − 2` when unset.
    pub bound: Option<usize>,
    pub beam: usize,
    pub lambda: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Trainings per learning rate; restart `k` initializes from `seed + k`.
    pub restarts: usize,
    pub seed: u64,
    pub sizes: SplitSizes,
    pub max_len: usize,
    /// Training time per run.
    pub time_limit: Option<Duration>,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(target: Target, alphabet: Alphabet, out_dir: impl Into<PathBuf>) -> ExperimentConfig {
        ExperimentConfig {
            target,
            alphabet,
            deltas: DEFAULT_DELTAS.to_vec(),
            learning_rates: DEFAULT_LEARNING_RATES.to_vec(),
            bound: None,
            beam: DEFAULT_BEAM,
            lambda: 0.0,
            batch_size: 64,
            epochs: 100,
            restarts: 1,
            seed: 0,
            sizes: SplitSizes::default(),
            max_len: DEFAULT_MAX_LEN,
            time_limit: Some(DEFAULT_TIME_LIMIT),
            out_dir: out_dir.into(),
        }
    }

    pub fn bound(&self) -> usize {
        self.bound.unwrap_or_else(|| required_bound(&self.alphabet))
    }

    pub fn validate(&self) -> Result<()> {
        if self.learning_rates.is_empty() {
            return Err(Error::Config("the learning-rate list is empty".into()));
        }
        if self.deltas.is_empty() {
            return Err(Error::Config("the noise-level list is empty".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("at least one restart is needed".into()));
        }
        if self.beam == 0 {
            return Err(Error::Config("beam width must be at least 1".into()));
        }
        for &d in &self.deltas {
            if !(0.0..1.0).contains(&d) {
                return Err(Error::Config(format!("noise level {d} outside [0, 1)")));
            }
        }
        self.train_config(self.learning_rates[0], 0).validate()
    }

    pub fn train_config(&self, learning_rate: f64, restart: usize) -> TrainConfig {
        TrainConfig {
            bound: self.bound(),
            batch_size: self.batch_size,
            learning_rate,
            lambda: self.lambda,
            epochs: self.epochs,
            seed: self.seed.wrapping_add(restart as u64),
            time_limit: self.time_limit,
            ..TrainConfig::new(self.bound())
        }
    }
}

/// One (noise level, learning rate) run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub delta: f64,
    pub learning_rate: f64,
    pub restart: usize,
    pub soire: Option<Soire>,
    pub val_accuracy: f64,
    /// Agreement of network and expression on the validation split.
    pub val_faithfulness: f64,
    pub best_epoch: usize,
    pub timed_out: bool,
    pub test: Option<EvalReport>,
    pub network_test_accuracy: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub runs: Vec<RunReport>,
    /// Index into `runs` of the selected run per noise level, in order.
    pub selected: Vec<Option<usize>>,
}

impl PipelineReport {
    pub fn selected_runs(&self) -> impl Iterator<Item = &RunReport> {
        self.selected.iter().flatten().map(|&k| &self.runs[k])
    }
}

fn fmt_rate(x: f64) -> String {
    format!("{x}")
}

fn run_one(
    config: &ExperimentConfig,
    data: &Splits,
    (delta, learning_rate, restart): (f64, f64, usize),
    dir: &Path,
) -> Result<RunReport> {
    let train_config = config.train_config(learning_rate, restart);
    let outcome = train(&data.train, &data.validation, &train_config)?;
    fs::create_dir_all(dir)?;
    save_checkpoint(&outcome.best, &dir.join("checkpoint.txt"))?;
    fs::write(dir.join("train_log.csv"), EpochLog::to_csv(&outcome.log))?;
    let chosen = interpret(&data.train, &outcome.best, config.beam)?;
    let val = full_report(&outcome.best, &chosen.soire, &data.validation, train_config.eval_threshold)?;
    let test = full_report(&outcome.best, &chosen.soire, &data.test, train_config.eval_threshold)?;
    let network = network_accuracy(&outcome.best, &data.test, train_config.eval_threshold)?;
    Ok(RunReport {
        delta,
        learning_rate,
        restart,
        soire: Some(chosen.soire),
        val_accuracy: val.accuracy,
        val_faithfulness: val.faithfulness.unwrap_or(0.0),
        best_epoch: outcome.best_epoch,
        timed_out: outcome.timed_out,
        test: Some(test),
        network_test_accuracy: Some(network),
        error: None,
    })
}

fn failed((delta, learning_rate, restart): (f64, f64, usize), err: &Error) -> RunReport {
    RunReport {
        delta,
        learning_rate,
        restart,
        soire: None,
        val_accuracy: 0.0,
        val_faithfulness: 0.0,
        best_epoch: 0,
        timed_out: false,
        test: None,
        network_test_accuracy: None,
        error: Some(err.to_string()),
    }
}

const RUN_HEADER: &str = "dataset,delta,learning_rate,restart,val_acc_soire,val_faithfulness,test_acc_soire,test_acc_network,faithfulness,best_epoch,timed_out,soire,error";

fn run_row(id: &str, run: &RunReport) -> String {
    let f = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
    format!(
        "{},{},{},{},{:.6},{:.6},{},{},{},{},{},{},{}",
        id,
        fmt_rate(run.delta),
        fmt_rate(run.learning_rate),
        run.restart,
        run.val_accuracy,
        run.val_faithfulness,
        f(run.test.as_ref().map(|t| t.accuracy)),
        f(run.network_test_accuracy),
        f(run.test.as_ref().and_then(|t| t.faithfulness)),
        run.best_epoch,
        run.timed_out,
        run.soire.as_ref().map(|r| r.to_infix()).unwrap_or_default(),
        run.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
    )
}

/// Runs the whole sweep, writing every artifact under `config.out_dir`.
/// A failing run is recorded and the sweep continues.
pub fn pipeline(config: &ExperimentConfig) -> Result<PipelineReport> {
    config.validate()?;
    let target = config.target.soire(&config.alphabet)?;
    fs::create_dir_all(&config.out_dir)?;
    let id = config.target.id();
    let mut runs = Vec::new();
    let mut selected = Vec::new();

    for &delta in &config.deltas {
        let delta_dir = config.out_dir.join(format!("delta-{}", fmt_rate(delta)));
        let gen = GenConfig {
            sizes: config.sizes,
            delta,
            seed: config.seed,
            max_len: config.max_len,
        };
        let data = match make_dataset(&target, &config.alphabet, &gen) {
            Ok(d) => d,
            Err(e) => {
                for &lr in &config.learning_rates {
                    for k in 0..config.restarts {
                        runs.push(failed((delta, lr, k), &e));
                    }
                }
                selected.push(None);
                continue;
            }
        };
        data.save(&delta_dir.join("data"))?;

        let first = runs.len();
        for &lr in &config.learning_rates {
            for k in 0..config.restarts {
                let name = if config.restarts == 1 {
                    format!("lr-{}", fmt_rate(lr))
                } else {
                    format!("lr-{}-r{k}", fmt_rate(lr))
                };
                let key = (delta, lr, k);
                let report = run_one(config, &data, key, &delta_dir.join(name)).unwrap_or_else(|e| failed(key, &e));
                runs.push(report);
            }
        }
        let best = (first..runs.len())
            .filter(|&k| runs[k].soire.is_some())
            .min_by(|&a, &b| {
                runs[b]
                    .val_accuracy
                    .total_cmp(&runs[a].val_accuracy)
                    .then(runs[b].val_faithfulness.total_cmp(&runs[a].val_faithfulness))
                    .then(runs[a].learning_rate.total_cmp(&runs[b].learning_rate))
                    .then(runs[a].restart.cmp(&runs[b].restart))
            });
        if let Some(k) = best {
            let r = runs[k].soire.as_ref().unwrap();
            fs::write(delta_dir.join("chosen.txt"), format!("{}\n{}\n", r.to_infix(), r.to_prefix()))?;
        }
        selected.push(best);
    }

    let mut all = format!("{RUN_HEADER}\n");
    for run in &runs {
        writeln!(all, "{}", run_row(&id, run)).unwrap();
    }
    fs::write(config.out_dir.join("runs.csv"), all)?;
    let mut chosen = format!("{RUN_HEADER}\n");
    for run in selected.iter().flatten().map(|&k| &runs[k]) {
        writeln!(chosen, "{}", run_row(&id, run)).unwrap();
    }
    fs::write(config.out_dir.join("results.csv"), chosen)?;
    Ok(PipelineReport { runs, selected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_learning_rates_are_refused() {
        let sigma = Alphabet::parse("ab").unwrap();
        let mut config = ExperimentConfig::new(Target::Regex("ab".into()), sigma, "/nonexistent");
        config.learning_rates.clear();
        assert!(matches!(pipeline(&config), Err(Error::Config(_))));
    }

    #[test]
    fn defaults() {
        let sigma = Alphabet::letters(10).unwrap();
        let config = ExperimentConfig::new(Target::Fixture(1), sigma, "out");
        assert_eq!(config.bound(), 38);
        assert_eq!(config.beam, 500);
        assert_eq!(config.lambda, 0.0);
        assert_eq!(config.restarts, 1);
        assert_eq!(config.batch_size, 64);
        assert_eq!(config.learning_rates, [0.01, 0.05, 0.1, 0.15, 0.2]);
        assert_eq!(config.time_limit, Some(Duration::from_secs(5000)));
    }
}
