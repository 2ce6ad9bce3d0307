//! Contrastive-divergence training with reconstruction-error driven
//! parameter control.
//!
//! Every `check_interval` epochs the reconstruction error `e_t` is measured
//! on a fixed probe subset of the training split and on the validation split.
//! The progress statistic
//!
//! ```text
//! γ = (e_{0.75t} − e_t) / (e_0 − e_t)
//! ```
//!
//! raises momentum, lowers the weight learning rate and finally stops
//! training once it falls below the configured thresholds. Training also stops
//! when the relative gap between training and validation error reaches
//! `overfit_threshold`. Neither rule is applied before `gamma_min_epoch`.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::seq::{index::sample, SliceRandom};
use serde::{Deserialize, Serialize};

use super::{genomes_to_matrix, sample_matrix, Rbm};
use crate::bits::{Genome, RandomSource};
use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub alpha_weights: f64,
    pub alpha_biases: f64,
    pub alpha_weights_reduced: f64,
    pub momentum_initial: f64,
    pub momentum_raised: f64,
    pub weight_cost: f64,
    pub batch_size: usize,
    pub gibbs_steps_cd: usize,
    pub validation_fraction: f64,
    pub check_interval: usize,
    pub gamma_momentum_threshold: f64,
    pub gamma_alpha_threshold: f64,
    pub gamma_stop_threshold: f64,
    pub overfit_threshold: f64,
    /// γ and the overfitting test are only evaluated from this epoch on.
    pub gamma_min_epoch: usize,
    pub error_estimate: ErrorEstimate,
    /// Size cap of the fixed probe subset used for the training error.
    pub probe_size: usize,
    pub max_epochs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha_weights: 0.05,
            alpha_biases: 0.5,
            alpha_weights_reduced: 0.025,
            momentum_initial: 0.5,
            momentum_raised: 0.8,
            weight_cost: 0.0001,
            batch_size: 100,
            gibbs_steps_cd: 1,
            validation_fraction: 0.10,
            check_interval: 2,
            gamma_momentum_threshold: 0.1,
            gamma_alpha_threshold: 0.05,
            gamma_stop_threshold: 0.01,
            overfit_threshold: 0.02,
            gamma_min_epoch: 50,
            error_estimate: ErrorEstimate::MeanField,
            probe_size: 100,
            max_epochs: 5000,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.gamma_momentum_threshold,
            self.gamma_alpha_threshold,
            self.gamma_stop_threshold,
            self.overfit_threshold,
        ];
        if positive.iter().any(|&t| !(t > 0.0)) {
            return Err(invalid("training thresholds must be positive"));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 0.5) {
            return Err(invalid("validation fraction must lie in (0, 0.5)"));
        }
        if self.batch_size == 0 || self.check_interval == 0 || self.gibbs_steps_cd == 0 || self.probe_size == 0 {
            return Err(invalid("batch size, check interval, CD steps and probe size must be positive"));
        }
        Ok(())
    }
}

/// How the reconstruction error driving the schedule is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorEstimate {
    /// Sampled hidden and visible states, as in a CD step.
    Sampled,
    /// Hidden and visible probabilities; deterministic for fixed parameters.
    MeanField,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// γ fell below the stop threshold.
    Converged,
    /// Training and validation errors diverged.
    Overfit,
    MaxEpochs,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckPoint {
    pub epoch: usize,
    pub train_error: f64,
    pub validation_error: Option<f64>,
    pub gamma: Option<f64>,
}

/// Momentum buffers, schedule state and error history of one training session.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainState {
    pub weight_velocity: Array2<f64>,
    pub visible_velocity: Array1<f64>,
    pub hidden_velocity: Array1<f64>,
    pub epoch: usize,
    pub momentum: f64,
    pub alpha_weights: f64,
    pub history: Vec<CheckPoint>,
}

impl TrainState {
    pub fn new(rbm: &Rbm, cfg: &TrainConfig) -> Self {
        TrainState {
            weight_velocity: Array2::zeros(rbm.weights.dim()),
            visible_velocity: Array1::zeros(rbm.n_visible()),
            hidden_velocity: Array1::zeros(rbm.n_hidden()),
            epoch: 0,
            momentum: cfg.momentum_initial,
            alpha_weights: cfg.alpha_weights,
            history: Vec::new(),
        }
    }

    pub fn last_gamma(&self) -> Option<f64> {
        self.history.iter().rev().find_map(|c| c.gamma)
    }

    /// Records the error before the first epoch.
    pub fn record_initial(&mut self, train_error: f64) {
        self.history.push(CheckPoint { epoch: 0, train_error, validation_error: None, gamma: None });
    }

    /// Records a check at `epoch`, applies the one-way schedule changes and
    /// reports whether training should stop.
    pub fn record_check(
        &mut self,
        cfg: &TrainConfig,
        epoch: usize,
        train_error: f64,
        validation_error: f64,
    ) -> Option<StopReason> {
        let gamma = if epoch >= cfg.gamma_min_epoch {
            self.error_at_or_before(0)
                .zip(self.error_at_or_before(epoch * 3 / 4))
                .map(|(e0, e_mid)| reconstruction_decrease(e0, e_mid, train_error))
        } else {
            None
        };
        self.history.push(CheckPoint { epoch, train_error, validation_error: Some(validation_error), gamma });
        let g = gamma?;
        if g < cfg.gamma_momentum_threshold {
            self.momentum = cfg.momentum_raised;
        }
        if g < cfg.gamma_alpha_threshold {
            self.alpha_weights = cfg.alpha_weights_reduced;
        }
        if g < cfg.gamma_stop_threshold {
            return Some(StopReason::Converged);
        }
        if overfit_ratio(train_error, validation_error) >= cfg.overfit_threshold {
            return Some(StopReason::Overfit);
        }
        None
    }

    fn error_at_or_before(&self, epoch: usize) -> Option<f64> {
        self.history.iter().rev().find(|c| c.epoch <= epoch).map(|c| c.train_error)
    }
}

/// γ = (e_mid − e_t) / (e_0 − e_t); a non-positive denominator counts as no
/// progress (γ = 0).
pub fn reconstruction_decrease(e0: f64, e_mid: f64, e_t: f64) -> f64 {
    let denom = e0 - e_t;
    if denom <= 0.0 {
        0.0
    } else {
        (e_mid - e_t) / denom
    }
}

fn overfit_ratio(train_error: f64, validation_error: f64) -> f64 {
    let diff = (train_error - validation_error).abs();
    if validation_error > 0.0 {
        diff / validation_error
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Batch-mean positive and negative phase statistics of one update.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseStats {
    pub positive: Array2<f64>,
    pub negative: Array2<f64>,
}

pub(crate) fn cd_update(
    rbm: &mut Rbm,
    state: &mut TrainState,
    visible: ArrayView2<f64>,
    cfg: &TrainConfig,
    rng: &mut RandomSource,
) -> PhaseStats {
    let rows = visible.nrows() as f64;
    let hidden = sample_matrix(&rbm.hidden_probs_batch(visible), rng);
    let mut hidden_chain = hidden.clone();
    let mut recon = Array2::zeros(visible.raw_dim());
    let mut recon_hidden = Array2::zeros(hidden.raw_dim());
    for step in 0..cfg.gibbs_steps_cd {
        recon = sample_matrix(&rbm.visible_probs_batch(hidden_chain.view()), rng);
        recon_hidden = rbm.hidden_probs_batch(recon.view());
        if step + 1 < cfg.gibbs_steps_cd {
            hidden_chain = sample_matrix(&recon_hidden, rng);
        }
    }

    let mut positive = visible.t().dot(&hidden);
    positive /= rows;
    let mut negative = recon.t().dot(&recon_hidden);
    negative /= rows;

    let visible_grad = (&visible - &recon).mean_axis(Axis(0)).expect("non-empty batch");
    let hidden_grad = (&hidden - &recon_hidden).mean_axis(Axis(0)).expect("non-empty batch");

    let momentum = state.momentum;
    let weight_cost = cfg.weight_cost;
    Zip::from(&mut state.weight_velocity)
        .and(&positive)
        .and(&negative)
        .and(&rbm.weights)
        .for_each(|vel, &p, &n, &w| *vel = momentum * *vel + (p - n - weight_cost * w));
    rbm.weights.scaled_add(state.alpha_weights, &state.weight_velocity);

    state.visible_velocity *= momentum;
    state.visible_velocity += &visible_grad;
    rbm.visible_bias.scaled_add(cfg.alpha_biases, &state.visible_velocity);

    state.hidden_velocity *= momentum;
    state.hidden_velocity += &hidden_grad;
    rbm.hidden_bias.scaled_add(cfg.alpha_biases, &state.hidden_velocity);

    PhaseStats { positive, negative }
}

/// One CD update from a mini-batch: the averaged gradient (plus weight decay
/// on the weights) feeds the momentum buffers, which are then added to the
/// parameters scaled by their learning rates.
pub fn cd1_minibatch_update(
    rbm: &mut Rbm,
    state: &mut TrainState,
    batch: &[Genome],
    cfg: &TrainConfig,
    rng: &mut RandomSource,
) -> Result<PhaseStats> {
    if batch.is_empty() {
        return Err(invalid("mini-batch must not be empty"));
    }
    if state.weight_velocity.dim() != rbm.weights.dim() {
        return Err(invalid("training state does not match model shape"));
    }
    let visible = genomes_to_matrix(batch.iter(), rbm.n_visible())?;
    Ok(cd_update(rbm, state, visible.view(), cfg, rng))
}

pub(crate) fn reconstruction_error_matrix(rbm: &Rbm, visible: ArrayView2<f64>, rng: &mut RandomSource) -> f64 {
    let hidden = sample_matrix(&rbm.hidden_probs_batch(visible), rng);
    let recon = sample_matrix(&rbm.visible_probs_batch(hidden.view()), rng);
    mean_abs_diff(visible, recon.view())
}

pub(crate) fn mean_field_error_matrix(rbm: &Rbm, visible: ArrayView2<f64>) -> f64 {
    let hidden = rbm.hidden_probs_batch(visible);
    let recon = rbm.visible_probs_batch(hidden.view());
    mean_abs_diff(visible, recon.view())
}

fn estimate_error(rbm: &Rbm, visible: ArrayView2<f64>, how: ErrorEstimate, rng: &mut RandomSource) -> f64 {
    match how {
        ErrorEstimate::Sampled => reconstruction_error_matrix(rbm, visible, rng),
        ErrorEstimate::MeanField => mean_field_error_matrix(rbm, visible),
    }
}

fn mean_abs_diff(a: ArrayView2<f64>, b: ArrayView2<f64>) -> f64 {
    let diff: f64 = Zip::from(&a).and(&b).fold(0.0, |acc, &x, &y| acc + (x - y).abs());
    diff / a.len() as f64
}

/// Mean per-bit disagreement between each vector and its one-step Gibbs
/// reconstruction.
pub fn reconstruction_error(rbm: &Rbm, subset: &[Genome], rng: &mut RandomSource) -> Result<f64> {
    if subset.is_empty() {
        return Err(invalid("reconstruction error needs a non-empty subset"));
    }
    let visible = genomes_to_matrix(subset.iter(), rbm.n_visible())?;
    Ok(reconstruction_error_matrix(rbm, visible.view(), rng))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: usize,
    pub stop: StopReason,
    pub history: Vec<CheckPoint>,
    pub final_momentum: f64,
    pub final_alpha_weights: f64,
}

/// Trains `rbm` in place on `data` with mini-batch CD and the adaptive
/// schedule, starting from fresh momentum buffers. Requires at least 20
/// training vectors.
pub fn train(rbm: &mut Rbm, data: &[Genome], cfg: &TrainConfig, rng: &mut RandomSource) -> Result<TrainReport> {
    let mut state = TrainState::new(rbm, cfg);
    train_session(rbm, &mut state, data, cfg, rng)
}

/// Like [`train`], but continues from `state`: velocities, momentum and the
/// weight learning rate carry over, while the epoch counter and error
/// history start afresh.
pub fn train_session(
    rbm: &mut Rbm,
    state: &mut TrainState,
    data: &[Genome],
    cfg: &TrainConfig,
    rng: &mut RandomSource,
) -> Result<TrainReport> {
    cfg.validate()?;
    if data.len() < 20 {
        return Err(invalid(format!("training needs at least 20 vectors, got {}", data.len())));
    }
    let n = rbm.n_visible();
    if let Some(g) = data.iter().find(|g| g.len() != n) {
        return Err(Error::LengthMismatch { expected: n, actual: g.len() });
    }
    if state.weight_velocity.dim() != rbm.weights.dim() || state.hidden_velocity.len() != rbm.n_hidden() {
        return Err(invalid("training state does not match the model shape"));
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(rng);
    let n_val = ((data.len() as f64 * cfg.validation_fraction).round() as usize).max(1);
    let (val_idx, train_idx) = order.split_at(n_val);
    let validation = genomes_to_matrix(val_idx.iter().map(|&i| &data[i]), n)?;
    let train_set = genomes_to_matrix(train_idx.iter().map(|&i| &data[i]), n)?;
    let probe_rows: Vec<usize> = sample(rng, train_set.nrows(), cfg.probe_size.min(train_set.nrows())).into_vec();
    let probe = train_set.select(Axis(0), &probe_rows);
    state.history.clear();
    state.epoch = 0;
    let e0 = estimate_error(rbm, probe.view(), cfg.error_estimate, rng);
    state.record_initial(e0);

    let mut rows: Vec<usize> = (0..train_set.nrows()).collect();
    let mut stop = StopReason::MaxEpochs;
    for epoch in 1..=cfg.max_epochs {
        state.epoch = epoch;
        rows.shuffle(rng);
        for chunk in rows.chunks(cfg.batch_size) {
            let batch = train_set.select(Axis(0), chunk);
            cd_update(rbm, state, batch.view(), cfg, rng);
        }
        if epoch % cfg.check_interval == 0 {
            let e_train = estimate_error(rbm, probe.view(), cfg.error_estimate, rng);
            let e_val = estimate_error(rbm, validation.view(), cfg.error_estimate, rng);
            if let Some(reason) = state.record_check(cfg, epoch, e_train, e_val) {
                stop = reason;
                break;
            }
        }
    }
    Ok(TrainReport {
        epochs: state.epoch,
        stop,
        history: state.history.clone(),
        final_momentum: state.momentum,
        final_alpha_weights: state.alpha_weights,
    })
}
