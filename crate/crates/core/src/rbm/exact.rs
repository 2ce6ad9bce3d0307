//! Exact quantities for small models by enumerating every joint state.
//!
//! Energy `E(v, h) = −b_v·v − b_h·h − vᵀWh`, `P(v, h) ∝ exp(−E)`.

use ndarray::{Array1, Array2};

use super::{hidden_activation_probs, Rbm};
use crate::bits::Genome;
use crate::error::{invalid, Error, Result};

/// Enumeration limit on n + m.
pub const MAX_EXACT_UNITS: usize = 24;

/// Marginal P(v) indexed by the big-endian integer of v.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl ExactDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, genome: &Genome) -> f64 {
        assert_eq!(genome.len(), self.n, "genome length must match visible layer");
        self.probs[genome.to_index() as usize]
    }

    /// Total-variation distance to another distribution over the same index space.
    pub fn total_variation(&self, other: &[f64]) -> f64 {
        assert_eq!(other.len(), self.probs.len());
        0.5 * self.probs.iter().zip(other).map(|(p, q)| (p - q).abs()).sum::<f64>()
    }
}

/// Exact log-likelihood gradient with the same layout as the parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RbmGradient {
    pub weights: Array2<f64>,
    pub visible_bias: Array1<f64>,
    pub hidden_bias: Array1<f64>,
}

impl RbmGradient {
    pub fn max_abs(&self) -> f64 {
        self.weights
            .iter()
            .chain(&self.visible_bias)
            .chain(&self.hidden_bias)
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }
}

fn check_size(rbm: &Rbm) -> Result<()> {
    let units = rbm.n_visible() + rbm.n_hidden();
    if units > MAX_EXACT_UNITS {
        return Err(Error::TooLarge(format!("n + m = {units} exceeds {MAX_EXACT_UNITS}")));
    }
    Ok(())
}

fn unpack(index: usize, len: usize) -> Vec<u8> {
    (0..len).map(|i| ((index >> (len - 1 - i)) & 1) as u8).collect()
}

fn neg_energy(rbm: &Rbm, v: &[u8], h: &[u8]) -> f64 {
    let mut s = 0.0;
    for (i, &vi) in v.iter().enumerate() {
        if vi == 1 {
            s += rbm.visible_bias[i];
            for (j, &hj) in h.iter().enumerate() {
                if hj == 1 {
                    s += rbm.weights[[i, j]];
                }
            }
        }
    }
    for (j, &hj) in h.iter().enumerate() {
        if hj == 1 {
            s += rbm.hidden_bias[j];
        }
    }
    s
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Unnormalised log weights of every joint state, visible index major.
fn joint_log_weights(rbm: &Rbm) -> Vec<f64> {
    let (n, m) = (rbm.n_visible(), rbm.n_hidden());
    let hidden_states: Vec<Vec<u8>> = (0..1usize << m).map(|h| unpack(h, m)).collect();
    let mut out = Vec::with_capacity(1 << (n + m));
    for vi in 0..1usize << n {
        let v = unpack(vi, n);
        out.extend(hidden_states.iter().map(|h| neg_energy(rbm, &v, h)));
    }
    out
}

/// Exact marginal P(v) by summing exp(−E) over all 2^(n+m) joint states.
pub fn exact_distribution(rbm: &Rbm) -> Result<ExactDistribution> {
    check_size(rbm)?;
    let (n, m) = (rbm.n_visible(), rbm.n_hidden());
    let joint = joint_log_weights(rbm);
    let log_z = log_sum_exp(&joint);
    let probs = joint.chunks(1 << m).map(|row| (log_sum_exp(row) - log_z).exp()).collect();
    Ok(ExactDistribution { n, probs })
}

/// Mean log P(v) over `data`.
pub fn exact_log_likelihood(rbm: &Rbm, data: &[Genome]) -> Result<f64> {
    if data.is_empty() {
        return Err(invalid("log-likelihood needs data"));
    }
    let dist = exact_distribution(rbm)?;
    let mut total = 0.0;
    for g in data {
        if g.len() != dist.n {
            return Err(Error::LengthMismatch { expected: dist.n, actual: g.len() });
        }
        total += dist.prob(g).ln();
    }
    Ok(total / data.len() as f64)
}

/// Gradient of the mean log-likelihood: data expectation (hidden units
/// marginalised analytically) minus model expectation (full enumeration).
pub fn exact_log_likelihood_gradient(rbm: &Rbm, data: &[Genome]) -> Result<RbmGradient> {
    check_size(rbm)?;
    if data.is_empty() {
        return Err(invalid("gradient needs data"));
    }
    let (n, m) = (rbm.n_visible(), rbm.n_hidden());
    let mut weights = Array2::<f64>::zeros((n, m));
    let mut visible_bias = Array1::<f64>::zeros(n);
    let mut hidden_bias = Array1::<f64>::zeros(m);

    let scale = 1.0 / data.len() as f64;
    for g in data {
        let ph = hidden_activation_probs(rbm, g.bits())?;
        for i in 0..n {
            let vi = f64::from(g.bits()[i]);
            visible_bias[i] += scale * vi;
            for j in 0..m {
                weights[[i, j]] += scale * vi * ph[j];
            }
        }
        for j in 0..m {
            hidden_bias[j] += scale * ph[j];
        }
    }

    let joint = joint_log_weights(rbm);
    let log_z = log_sum_exp(&joint);
    for (state, lw) in joint.iter().enumerate() {
        let p = (lw - log_z).exp();
        let v = unpack(state >> m, n);
        let h = unpack(state & ((1 << m) - 1), m);
        for i in 0..n {
            if v[i] == 1 {
                visible_bias[i] -= p;
                for j in 0..m {
                    if h[j] == 1 {
                        weights[[i, j]] -= p;
                    }
                }
            }
        }
        for j in 0..m {
            if h[j] == 1 {
                hidden_bias[j] -= p;
            }
        }
    }
    Ok(RbmGradient { weights, visible_bias, hidden_bias })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::RandomSource;
    use ndarray::array;

    #[test]
    fn zero_model_is_uniform() {
        let d = exact_distribution(&Rbm::zeros(4, 3)).unwrap();
        assert!(d.probs().iter().all(|&p| (p - 1.0 / 16.0).abs() < 1e-15));
    }

    #[test]
    fn logistic_identity() {
        let rbm = Rbm::from_parts(array![[0.0]], array![3f64.ln()], array![0.0]).unwrap();
        let d = exact_distribution(&rbm).unwrap();
        assert!((d.prob(&Genome::parse("1").unwrap()) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn normalised() {
        let rbm = Rbm::random(3, 2, 1.5, &mut RandomSource::new(1));
        let sum: f64 = exact_distribution(&rbm).unwrap().probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_large_models() {
        assert!(exact_distribution(&Rbm::zeros(20, 10)).is_err());
        assert!(exact_log_likelihood_gradient(&Rbm::zeros(20, 10), &[Genome::ones(20).unwrap()]).is_err());
    }

    #[test]
    fn zero_model_all_ones_gradient() {
        let g = exact_log_likelihood_gradient(&Rbm::zeros(1, 1), &[Genome::parse("1").unwrap()]).unwrap();
        assert!((g.weights[[0, 0]] - 0.25).abs() < 1e-15);
        assert!((g.visible_bias[0] - 0.5).abs() < 1e-15);
        assert!((g.hidden_bias[0] - 0.0).abs() < 1e-15);
    }

    #[test]
    fn gradient_vanishes_when_data_matches_model() {
        // weight every visible state by its model probability: the data
        // expectation then equals the model expectation
        let rbm = Rbm::random(3, 2, 0.8, &mut RandomSource::new(5));
        let dist = exact_distribution(&rbm).unwrap();
        let (n, m) = (3, 2);
        let mut data_term = Array2::<f64>::zeros((n, m));
        for (idx, &p) in dist.probs().iter().enumerate() {
            let g = Genome::from_index(idx as u64, n).unwrap();
            let grad = exact_log_likelihood_gradient(&rbm, &[g]).unwrap();
            data_term.scaled_add(p, &grad.weights);
        }
        assert!(data_term.iter().all(|x| x.abs() < 1e-9), "{data_term:?}");
    }
}
