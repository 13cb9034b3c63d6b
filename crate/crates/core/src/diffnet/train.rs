use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::encoding::Encoding;
use crate::error::{Error, Result};
use crate::metrics::network_accuracy;

use super::regularize::regularizer_gradient;
use super::{regularizers, ClampMode, Gradient, Network};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    /// Number of vertices `T` of the encoding.
    pub bound: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Weight of the summed regularizers.
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
    pub leaky_slope: f64,
    /// Network predictions `ŷ ≥ eval_threshold` count as positive.
    pub eval_threshold: f64,
    pub time_limit: Option<Duration>,
}

impl TrainConfig {
    pub fn new(bound: usize) -> TrainConfig {
        TrainConfig {
            bound,
            batch_size: 64,
            learning_rate: 0.1,
            lambda: 0.0,
            epochs: 100,
            seed: 0,
            leaky_slope: 0.01,
            eval_threshold: 0.5,
            time_limit: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.bound == 0 {
            return fail("bound must be positive");
        }
        if self.batch_size == 0 {
            return fail("batch size must be at least 1");
        }
        if !(self.lambda >= 0.0) {
            return fail("lambda must be non-negative");
        }
        if !(self.eval_threshold > 0.0 && self.eval_threshold < 1.0) {
            return fail("evaluation threshold must lie strictly between 0 and 1");
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return fail("learning rate must be positive");
        }
        if !(self.leaky_slope >= 0.0 && self.leaky_slope < 1.0) {
            return fail("leaky slope must lie in [0, 1)");
        }
        Ok(())
    }
}

/// Adam with decoupled weight decay over the flat `w ++ u` parameters.
#[derive(Clone, Debug)]
pub struct AdamW {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    step: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamW {
    pub fn new(learning_rate: f64, params: usize) -> AdamW {
        AdamW {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.01,
            step: 0,
            m: vec![0.0; params],
            v: vec![0.0; params],
        }
    }

    pub fn step(&mut self, theta: &mut Encoding, grad: &Gradient) {
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        let nw = theta.w_flat().len();
        let lr = self.learning_rate;
        let mut update = |k: usize, p: &mut f64, g: f64| {
            *p -= lr * self.weight_decay * *p;
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g;
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[k] / c1;
            let v_hat = self.v[k] / c2;
            *p -= lr * m_hat / (v_hat.sqrt() + self.eps);
        };
        for (k, p) in theta.w_flat_mut().iter_mut().enumerate() {
            update(k, p, grad.dw[k]);
        }
        for (k, p) in theta.u_flat_mut().iter_mut().enumerate() {
            update(nw + k, p, grad.du[k]);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_accuracy: f64,
}

impl EpochLog {
    pub fn to_csv(log: &[EpochLog]) -> String {
        let mut out = String::from("epoch,train_loss,val_accuracy\n");
        for e in log {
            writeln!(out, "{},{:.10},{:.6}", e.epoch, e.train_loss, e.val_accuracy).unwrap();
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Parameters with the best validation accuracy (latest on ties).
    pub best: Encoding,
    pub best_epoch: usize,
    pub best_val_accuracy: f64,
    /// Parameters after the last epoch run.
    pub last: Encoding,
    pub log: Vec<EpochLog>,
    pub timed_out: bool,
}

/// Mean loss over `batch` and its gradient, regularizers included.
fn batch_gradient(theta: &Encoding, batch: &[(&str, bool)], mode: ClampMode, lambda: f64) -> Result<(f64, Gradient)> {
    let net = Network::new(theta, mode);
    let parts: Vec<(f64, Gradient)> = batch
        .par_iter()
        .map(|&(s, label)| {
            let mut g = Gradient::zeros(theta);
            let loss = net.loss_gradient(s, label, &mut g)?;
            Ok((loss, g))
        })
        .collect::<Result<_>>()?;
    let mut grad = Gradient::zeros(theta);
    let mut loss = 0.0;
    for (l, g) in &parts {
        loss += l;
        grad.accumulate(g);
    }
    let scale = 1.0 / batch.len() as f64;
    loss *= scale;
    grad.scale(scale);
    net.finish(&mut grad);
    if lambda > 0.0 {
        loss += lambda * regularizers(theta).iter().sum::<f64>();
        regularizer_gradient(theta, lambda, &mut grad);
    }
    Ok((loss, grad))
}

/// Mini-batch AdamW on the squared loss, projecting onto [0, 1] after every
/// step. Deterministic for a given seed.
pub fn train(train_set: &Dataset, validation: &Dataset, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut theta = Encoding::random(&train_set.alphabet, config.bound, &mut rng);
    let mode = ClampMode::Leaky(config.leaky_slope);
    let mut opt = AdamW::new(config.learning_rate, theta.w_flat().len() + theta.u_flat().len());

    let mut best = theta.clone();
    let mut best_epoch = 0;
    let mut best_val_accuracy = network_accuracy(&theta, validation, config.eval_threshold)?;
    let mut log = Vec::new();
    let mut timed_out = false;
    let mut order: Vec<usize> = (0..train_set.len()).collect();

    'epochs: for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(config.batch_size) {
            if config.time_limit.is_some_and(|limit| started.elapsed() >= limit) {
                timed_out = true;
                break 'epochs;
            }
            let batch: Vec<(&str, bool)> = chunk
                .iter()
                .map(|&k| (train_set.samples[k].text.as_str(), train_set.samples[k].label))
                .collect();
            let (loss, grad) = batch_gradient(&theta, &batch, mode, config.lambda)?;
            opt.step(&mut theta, &grad);
            theta.project();
            total += loss;
            batches += 1;
        }
        let val_accuracy = network_accuracy(&theta, validation, config.eval_threshold)?;
        log.push(EpochLog {
            epoch,
            train_loss: if batches == 0 { 0.0 } else { total / batches as f64 },
            val_accuracy,
        });
        if val_accuracy >= best_val_accuracy {
            best_val_accuracy = val_accuracy;
            best_epoch = epoch;
            best = theta.clone();
        }
    }
    Ok(TrainOutcome {
        best,
        best_epoch,
        best_val_accuracy,
        last: theta,
        log,
        timed_out,
    })
}
