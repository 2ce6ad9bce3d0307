//! Oracles shared by the integration tests. Each one recomputes its quantity
//! from first principles without going through the library routine it checks.

#![allow(dead_code)]

use rbmeda::rbm::Rbm;
use rbmeda::{Genome, RandomSource};

/// Bits of `index` as a big-endian 0/1 vector of length `n`.
pub fn bits_of(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect()
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Empirical distribution over the `2^n` states of a sample.
pub fn histogram(samples: &[Genome], n: usize) -> Vec<f64> {
    let mut counts = vec![0.0; 1 << n];
    for s in samples {
        let idx = s.bits().iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        counts[idx] += 1.0;
    }
    counts.iter().map(|c| c / samples.len() as f64).collect()
}

/// −E(v, h) = vᵀWh + b_vᵀv + b_hᵀh.
pub fn neg_energy(rbm: &Rbm, v: &[u8], h: &[u8]) -> f64 {
    let mut e = 0.0;
    for (i, &vi) in v.iter().enumerate() {
        e += rbm.visible_bias[i] * vi as f64;
        for (j, &hj) in h.iter().enumerate() {
            e += rbm.weights[[i, j]] * (vi * hj) as f64;
        }
    }
    for (j, &hj) in h.iter().enumerate() {
        e += rbm.hidden_bias[j] * hj as f64;
    }
    e
}

/// Visible marginal by summing exp(−E) over every joint state.
pub fn brute_visible_marginal(rbm: &Rbm) -> Vec<f64> {
    let (n, m) = (rbm.n_visible(), rbm.n_hidden());
    let unnorm: Vec<f64> = (0..1usize << n)
        .map(|vi| {
            let v = bits_of(vi, n);
            (0..1usize << m).map(|hi| neg_energy(rbm, &v, &bits_of(hi, m)).exp()).sum()
        })
        .collect();
    let z: f64 = unnorm.iter().sum();
    unnorm.iter().map(|u| u / z).collect()
}

/// Mean log-likelihood of `data` under the brute-force marginal.
pub fn brute_log_likelihood(rbm: &Rbm, data: &[Genome]) -> f64 {
    let p = brute_visible_marginal(rbm);
    let idx = |g: &Genome| g.bits().iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    data.iter().map(|g| p[idx(g)].ln()).sum::<f64>() / data.len() as f64
}

/// BIC node term −N·H(x_i | parents) − 2^{|parents|}·log2(N)/2 from raw counts.
pub fn bic_node(rows: &[Vec<u8>], i: usize, parents: &[usize]) -> f64 {
    let n = rows.len() as f64;
    let mut counts = std::collections::HashMap::<(Vec<u8>, u8), f64>::new();
    let mut totals = std::collections::HashMap::<Vec<u8>, f64>::new();
    for r in rows {
        let cfg: Vec<u8> = parents.iter().map(|&p| r[p]).collect();
        *counts.entry((cfg.clone(), r[i])).or_default() += 1.0;
        *totals.entry(cfg).or_default() += 1.0;
    }
    let h: f64 = counts.iter().map(|((cfg, _), &c)| -(c / n) * (c / totals[cfg]).log2()).sum();
    -h * n - (1u64 << parents.len()) as f64 * n.log2() / 2.0
}

fn acyclic(parents: &[Vec<usize>]) -> bool {
    let n = parents.len();
    let mut placed = vec![false; n];
    for _ in 0..n {
        match (0..n).find(|&i| !placed[i] && parents[i].iter().all(|&p| placed[p])) {
            Some(i) => placed[i] = true,
            None => return false,
        }
    }
    true
}

/// Best BIC over every DAG on `n ≤ 4` nodes with in-degree at most `cap`,
/// found by enumerating one parent subset per node.
pub fn best_dag_score(rows: &[Vec<u8>], n: usize, cap: usize) -> f64 {
    assert!(n <= 4);
    let subsets: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|i| {
            let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            (0..1usize << others.len())
                .map(|mask| others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &j)| j).collect::<Vec<_>>())
                .filter(|s| s.len() <= cap)
                .collect()
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut choice = vec![0usize; n];
    loop {
        let parents: Vec<Vec<usize>> = (0..n).map(|i| subsets[i][choice[i]].clone()).collect();
        if acyclic(&parents) {
            let score: f64 = (0..n).map(|i| bic_node(rows, i, &parents[i])).sum();
            best = best.max(score);
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            choice[i] += 1;
            if choice[i] < subsets[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// `rows` of `2·pairs` bits in which bit 2i+1 copies bit 2i and the pairs
/// are independent fair coins.
pub fn duplicated_pairs(pairs: usize, rows: usize, rng: &mut RandomSource) -> Vec<Genome> {
    (0..rows)
        .map(|_| {
            let bits: Vec<u8> = (0..pairs).flat_map(|_| {
                let b = u8::from(rng.bernoulli(0.5));
                [b, b]
            }).collect();
            Genome::new(bits).unwrap()
        })
        .collect()
}

/// Rows drawn from a random 4-node chain-like network, so small datasets
/// carry real dependencies for the structure search.
pub fn small_dependent_rows(n: usize, rows: usize, rng: &mut RandomSource) -> Vec<Vec<u8>> {
    let flip: Vec<f64> = (0..n).map(|_| 0.05 + 0.4 * rng.uniform()).collect();
    (0..rows)
        .map(|_| {
            let mut r = vec![0u8; n];
            r[0] = u8::from(rng.bernoulli(0.5));
            for i in 1..n {
                let src = rng.below(i);
                r[i] = if rng.bernoulli(flip[i]) { 1 - r[src] } else { r[src] };
            }
            r
        })
        .collect()
}
