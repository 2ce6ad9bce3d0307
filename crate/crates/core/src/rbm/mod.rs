//! Restricted Boltzmann machine over binary visible and hidden units.
//!
//! `weights[[i, j]]` connects visible unit `i` to hidden unit `j`. Conditional
//! activations are `P(h_j=1|v) = sigm(b_h[j] + Σ_i w_ij v_i)` and
//! `P(v_i=1|h) = sigm(b_v[i] + Σ_j w_ij h_j)`.

mod exact;
mod train;

pub use exact::{
    exact_distribution, exact_log_likelihood, exact_log_likelihood_gradient, ExactDistribution,
    RbmGradient, MAX_EXACT_UNITS,
};
pub use train::{
    cd1_minibatch_update, reconstruction_decrease, reconstruction_error, train, train_session, CheckPoint,
    ErrorEstimate, StopReason, TrainConfig, TrainReport, TrainState,
};

use std::fmt::Write as _;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand_distr::{Distribution, Normal};

use crate::bits::{Genome, RandomSource};
use crate::error::{invalid, Error, Result};

/// Logistic function. The argument is clamped to ±36, the widest range whose
/// image in `f64` stays strictly inside (0, 1).
#[inline]
pub fn sigm(x: f64) -> f64 {
    1.0 / (1.0 + (-x.clamp(-36.0, 36.0)).exp())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rbm {
    pub weights: Array2<f64>,
    pub visible_bias: Array1<f64>,
    pub hidden_bias: Array1<f64>,
}

impl Rbm {
    pub fn zeros(n: usize, m: usize) -> Self {
        Rbm {
            weights: Array2::zeros((n, m)),
            visible_bias: Array1::zeros(n),
            hidden_bias: Array1::zeros(m),
        }
    }

    pub fn from_parts(weights: Array2<f64>, visible_bias: Array1<f64>, hidden_bias: Array1<f64>) -> Result<Self> {
        let (n, m) = weights.dim();
        if visible_bias.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: visible_bias.len() });
        }
        if hidden_bias.len() != m {
            return Err(Error::LengthMismatch { expected: m, actual: hidden_bias.len() });
        }
        let rbm = Rbm { weights, visible_bias, hidden_bias };
        if !rbm.is_finite() {
            return Err(invalid("RBM parameters must be finite"));
        }
        Ok(rbm)
    }

    /// Fully random model: all parameters i.i.d. normal with the given scale.
    pub fn random(n: usize, m: usize, scale: f64, rng: &mut RandomSource) -> Self {
        let normal = Normal::new(0.0, scale).expect("positive scale");
        Rbm {
            weights: Array2::from_shape_simple_fn((n, m), || normal.sample(rng)),
            visible_bias: Array1::from_shape_simple_fn(n, || normal.sample(rng)),
            hidden_bias: Array1::from_shape_simple_fn(m, || normal.sample(rng)),
        }
    }

    pub fn n_visible(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_hidden(&self) -> usize {
        self.weights.ncols()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.visible_bias).chain(&self.hidden_bias).all(|x| x.is_finite())
    }

    pub(crate) fn hidden_probs_batch(&self, visible: ArrayView2<f64>) -> Array2<f64> {
        let mut act = visible.dot(&self.weights);
        act += &self.hidden_bias;
        act.mapv_inplace(sigm);
        act
    }

    pub(crate) fn visible_probs_batch(&self, hidden: ArrayView2<f64>) -> Array2<f64> {
        let mut act = hidden.dot(&self.weights.t());
        act += &self.visible_bias;
        act.mapv_inplace(sigm);
        act
    }

    /// Text snapshot: `RBM <n> <m>`, visible biases, hidden biases, then the
    /// weights row by row, 17 significant digits throughout.
    pub fn to_snapshot(&self) -> String {
        let mut out = format!("RBM {} {}\n", self.n_visible(), self.n_hidden());
        let mut line = |values: &mut dyn Iterator<Item = &f64>| {
            let row: Vec<String> = values.map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        };
        line(&mut self.visible_bias.iter());
        line(&mut self.hidden_bias.iter());
        for row in self.weights.rows() {
            line(&mut row.iter());
        }
        out
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap_or_default().split_whitespace().collect();
        if header.len() != 3 || header[0] != "RBM" {
            return Err(Error::Parse { line: 1, msg: "expected `RBM <n> <m>` header".into() });
        }
        let dim = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse { line: 1, msg: format!("bad size {s:?}") });
        let (n, m) = (dim(header[1])?, dim(header[2])?);
        let mut row = |lineno: usize, expected: usize| -> Result<Vec<f64>> {
            let line = lines.next().unwrap_or_default();
            let vals = line
                .split_whitespace()
                .map(|s| s.parse::<f64>().map_err(|_| Error::Parse { line: lineno, msg: format!("bad number {s:?}") }))
                .collect::<Result<Vec<f64>>>()?;
            if vals.len() != expected {
                return Err(Error::Parse { line: lineno, msg: format!("expected {expected} values, got {}", vals.len()) });
            }
            Ok(vals)
        };
        let vb = row(2, n)?;
        let hb = row(3, m)?;
        let mut w = Vec::with_capacity(n * m);
        for i in 0..n {
            w.extend(row(4 + i, m)?);
        }
        let weights = Array2::from_shape_vec((n, m), w).map_err(|e| invalid(e.to_string()))?;
        Self::from_parts(weights, Array1::from(vb), Array1::from(hb))
    }
}

pub(crate) fn genomes_to_matrix<'a>(genomes: impl ExactSizeIterator<Item = &'a Genome>, n: usize) -> Result<Array2<f64>> {
    let rows = genomes.len();
    let mut out = Array2::zeros((rows, n));
    for (mut row, g) in out.axis_iter_mut(Axis(0)).zip(genomes) {
        if g.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: g.len() });
        }
        for (dst, &b) in row.iter_mut().zip(g.bits()) {
            *dst = f64::from(b);
        }
    }
    Ok(out)
}

/// Row-major Bernoulli draws, one per matrix entry.
pub(crate) fn sample_matrix(probs: &Array2<f64>, rng: &mut RandomSource) -> Array2<f64> {
    probs.mapv(|p| if rng.uniform() < p { 1.0 } else { 0.0 })
}

/// Fresh model for a training set: m = ⌈n/2⌉ hidden units, visible biases
/// at the clamped log-odds of each bit's frequency, zero hidden biases and
/// N(0, 0.01²) weights.
pub fn init_rbm(n: usize, trainset: &[Genome], rng: &mut RandomSource) -> Result<Rbm> {
    if trainset.is_empty() {
        return Err(invalid("cannot initialise an RBM from an empty training set"));
    }
    if n == 0 {
        return Err(invalid("visible layer must have at least one unit"));
    }
    let m = n.div_ceil(2);
    let count = trainset.len() as f64;
    let lo = 1.0 / (2.0 * count);
    let mut ones = vec![0usize; n];
    for g in trainset {
        if g.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: g.len() });
        }
        for (c, &b) in ones.iter_mut().zip(g.bits()) {
            *c += b as usize;
        }
    }
    let visible_bias = ones
        .iter()
        .map(|&c| {
            let p = (c as f64 / count).clamp(lo, 1.0 - lo);
            (p / (1.0 - p)).ln()
        })
        .collect();
    let normal = Normal::new(0.0, 0.01).expect("valid std");
    Ok(Rbm {
        weights: Array2::from_shape_simple_fn((n, m), || normal.sample(rng)),
        visible_bias,
        hidden_bias: Array1::zeros(m),
    })
}

pub fn hidden_activation_probs(rbm: &Rbm, visible: &[u8]) -> Result<Vec<f64>> {
    if visible.len() != rbm.n_visible() {
        return Err(Error::LengthMismatch { expected: rbm.n_visible(), actual: visible.len() });
    }
    Ok((0..rbm.n_hidden())
        .map(|j| {
            let col = rbm.weights.column(j);
            let act: f64 = visible.iter().zip(col).map(|(&v, w)| f64::from(v) * w).sum();
            sigm(rbm.hidden_bias[j] + act)
        })
        .collect())
}

pub fn visible_activation_probs(rbm: &Rbm, hidden: &[u8]) -> Result<Vec<f64>> {
    if hidden.len() != rbm.n_hidden() {
        return Err(Error::LengthMismatch { expected: rbm.n_hidden(), actual: hidden.len() });
    }
    Ok((0..rbm.n_visible())
        .map(|i| {
            let row = rbm.weights.row(i);
            let act: f64 = hidden.iter().zip(row).map(|(&h, w)| f64::from(h) * w).sum();
            sigm(rbm.visible_bias[i] + act)
        })
        .collect())
}

/// Independent Bernoulli draw per probability.
pub fn bernoulli_sample(probs: &[f64], rng: &mut RandomSource) -> Result<Vec<u8>> {
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(probs.iter().map(|&p| u8::from(rng.uniform() < p)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub gibbs_steps: usize,
    pub count: usize,
}

impl SampleConfig {
    pub fn new(count: usize) -> Self {
        SampleConfig { gibbs_steps: 25, count }
    }
}

/// Runs one Gibbs chain per requested candidate, each started from a parent
/// genome (cycling through `parents`), for `gibbs_steps` full H|V, V|H sweeps.
/// The returned genomes are the final stochastic visible states.
pub fn sample_candidates(rbm: &Rbm, parents: &[Genome], cfg: &SampleConfig, rng: &mut RandomSource) -> Result<Vec<Genome>> {
    if parents.is_empty() {
        return Err(invalid("sampling needs at least one parent to seed the chains"));
    }
    if cfg.gibbs_steps == 0 {
        return Err(invalid("at least one Gibbs step is required"));
    }
    if cfg.count == 0 {
        return Ok(Vec::new());
    }
    let n = rbm.n_visible();
    let mut visible = genomes_to_matrix(parents.iter().cycle().take(cfg.count).collect::<Vec<_>>().into_iter(), n)?;
    for _ in 0..cfg.gibbs_steps {
        let hidden = sample_matrix(&rbm.hidden_probs_batch(visible.view()), rng);
        visible = sample_matrix(&rbm.visible_probs_batch(hidden.view()), rng);
    }
    Ok(visible
        .rows()
        .into_iter()
        .map(|row| Genome::from_vec_unchecked(row.iter().map(|&v| v as u8).collect()))
        .collect())
}
