use std::fmt::Write as _;

use super::score::{bic_from_entropy, entropy_from_counts, ScoredDataset};
use crate::bits::{Genome, RandomSource};
use crate::error::{invalid, Error, Result};

/// Directed acyclic graph over binary variables with optional CPTs.
///
/// `cpts[i][c]` is P(x_i = 1 | parents = c), where `c` is the big-endian
/// integer of the parent values in `parents[i]` order.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesianNetwork {
    parents: Vec<Vec<usize>>,
    cpts: Option<Vec<Vec<f64>>>,
}

impl BayesianNetwork {
    pub fn empty(n: usize) -> Self {
        BayesianNetwork { parents: vec![Vec::new(); n], cpts: None }
    }

    /// Network with explicit structure and tables; validated for shape,
    /// probability range and acyclicity.
    pub fn with_cpts(parents: Vec<Vec<usize>>, cpts: Vec<Vec<f64>>) -> Result<Self> {
        let net = BayesianNetwork { parents, cpts: Some(cpts) };
        net.validate()?;
        Ok(net)
    }

    fn validate(&self) -> Result<()> {
        let n = self.parents.len();
        for (i, ps) in self.parents.iter().enumerate() {
            if ps.iter().any(|&p| p >= n || p == i) {
                return Err(invalid(format!("node {i} has invalid parents {ps:?}")));
            }
        }
        if let Some(cpts) = &self.cpts {
            if cpts.len() != n {
                return Err(invalid("one CPT per node required"));
            }
            for (i, (t, ps)) in cpts.iter().zip(&self.parents).enumerate() {
                if t.len() != 1 << ps.len() {
                    return Err(invalid(format!("CPT of node {i} has {} rows", t.len())));
                }
                if t.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return Err(invalid(format!("CPT of node {i} has a probability outside [0,1]")));
                }
            }
        }
        self.topological_order().map(|_| ())
    }

    pub fn node_count(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn cpts(&self) -> Option<&[Vec<f64>]> {
        self.cpts.as_deref()
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.parents[child].contains(&parent)
    }

    /// Kahn's algorithm, lowest ready index first.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.parents.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut children = vec![Vec::new(); n];
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() != n {
            return Err(Error::Cycle);
        }
        Ok(order)
    }

    /// Exact probability of a genome under the network's CPTs.
    pub fn joint_probability(&self, genome: &Genome) -> Result<f64> {
        let cpts = self.cpts.as_ref().ok_or_else(|| invalid("network has no CPTs"))?;
        if genome.len() != self.node_count() {
            return Err(Error::LengthMismatch { expected: self.node_count(), actual: genome.len() });
        }
        let x = genome.bits();
        Ok(self
            .parents
            .iter()
            .zip(cpts)
            .enumerate()
            .map(|(i, (ps, t))| {
                let p1 = t[config_of(ps, x)];
                if x[i] == 1 {
                    p1
                } else {
                    1.0 - p1
                }
            })
            .product())
    }

    /// Diagnostic dump: `node i <- p1 p2 ...` followed by one line per CPT
    /// row, `  <parent bits> <P(x_i=1)>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, ps) in self.parents.iter().enumerate() {
            write!(out, "node {i} <-").unwrap();
            for p in ps {
                write!(out, " {p}").unwrap();
            }
            out.push('\n');
            if let Some(cpts) = &self.cpts {
                for (c, p) in cpts[i].iter().enumerate() {
                    let bits: String = (0..ps.len()).map(|b| if (c >> (ps.len() - 1 - b)) & 1 == 1 { '1' } else { '0' }).collect();
                    let bits = if bits.is_empty() { "-".to_string() } else { bits };
                    writeln!(out, "  {bits} {p:.6}").unwrap();
                }
            }
        }
        out
    }
}

#[inline]
fn config_of(parents: &[usize], x: &[u8]) -> usize {
    parents.iter().fold(0usize, |acc, &p| (acc << 1) | x[p] as usize)
}

/// BIC of a network: sum of its node terms.
pub fn network_score(data: &ScoredDataset, net: &BayesianNetwork) -> Result<f64> {
    (0..net.node_count()).map(|i| super::bic_node_score(data, i, net.parents(i))).sum()
}

/// Gains of adding each candidate parent to `child`, given its current
/// parents. Entries for the child itself and existing parents are -inf.
fn node_gains(data: &ScoredDataset, child: usize, parents: &[usize], current: f64) -> Vec<f64> {
    let n = data.node_count();
    let rows = data.len();
    let base = data.parent_configs(parents);
    let x = data.column(child);
    let k = parents.len() + 1;
    let mut counts = vec![0u32; 2 << k];
    let mut gains = vec![f64::NEG_INFINITY; n];
    for (cand, gain) in gains.iter_mut().enumerate() {
        if cand == child || parents.contains(&cand) {
            continue;
        }
        counts.iter_mut().for_each(|c| *c = 0);
        for ((&b, &xp), &xc) in base.iter().zip(data.column(cand)).zip(x) {
            counts[(((b as usize) << 1 | xp as usize) << 1) | xc as usize] += 1;
        }
        let score = bic_from_entropy(entropy_from_counts(&counts, rows), k, rows);
        *gain = score - current;
    }
    gains
}

/// Greedy structure search from the empty graph: repeatedly add the legal
/// edge with the largest positive BIC gain. Legal means no cycle and the
/// child stays within `max_indegree`. Ties go to the lowest (child, parent).
pub fn greedy_build_network(data: &ScoredDataset, max_indegree: usize) -> Result<BayesianNetwork> {
    if data.len() < 2 {
        return Err(invalid("structure search needs at least two rows"));
    }
    let n = data.node_count();
    let rows = data.len();
    let mut net = BayesianNetwork::empty(n);
    let mut node_score: Vec<f64> = (0..n)
        .map(|i| {
            let ones = data.column(i).iter().filter(|&&b| b == 1).count() as u32;
            let counts = [rows as u32 - ones, ones];
            bic_from_entropy(entropy_from_counts(&counts, rows), 0, rows)
        })
        .collect();
    let mut gains: Vec<Vec<f64>> = (0..n).map(|c| node_gains(data, c, &[], node_score[c])).collect();
    // reach[a][b]: directed path a -> b exists
    let mut reach = vec![vec![false; n]; n];

    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for child in 0..n {
            if net.parents[child].len() >= max_indegree {
                continue;
            }
            for (parent, &g) in gains[child].iter().enumerate() {
                if g > 0.0 && !reach[child][parent] && best.is_none_or(|(_, _, bg)| g > bg) {
                    best = Some((child, parent, g));
                }
            }
        }
        let Some((child, parent, gain)) = best else { break };
        net.parents[child].push(parent);
        node_score[child] += gain;
        let from: Vec<usize> = (0..n).filter(|&a| a == parent || reach[a][parent]).collect();
        let to: Vec<usize> = (0..n).filter(|&b| b == child || reach[child][b]).collect();
        for &a in &from {
            for &b in &to {
                reach[a][b] = true;
            }
        }
        gains[child] = node_gains(data, child, &net.parents[child], node_score[child]);
    }
    Ok(net)
}

/// Fills CPTs with Laplace-smoothed frequencies (count₁ + 1) / (count + 2).
pub fn estimate_cpts(net: &BayesianNetwork, data: &ScoredDataset) -> Result<BayesianNetwork> {
    if data.node_count() != net.node_count() {
        return Err(Error::LengthMismatch { expected: net.node_count(), actual: data.node_count() });
    }
    let cpts = net
        .parents
        .iter()
        .enumerate()
        .map(|(i, ps)| {
            let configs = data.parent_configs(ps);
            let mut ones = vec![0u32; 1 << ps.len()];
            let mut totals = vec![0u32; 1 << ps.len()];
            for (&c, &x) in configs.iter().zip(data.column(i)) {
                totals[c as usize] += 1;
                ones[c as usize] += u32::from(x);
            }
            ones.iter().zip(&totals).map(|(&o, &t)| (f64::from(o) + 1.0) / (f64::from(t) + 2.0)).collect()
        })
        .collect();
    Ok(BayesianNetwork { parents: net.parents.clone(), cpts: Some(cpts) })
}

/// Ancestral sampling in topological order.
pub fn sample_network(net: &BayesianNetwork, count: usize, rng: &mut RandomSource) -> Result<Vec<Genome>> {
    let cpts = net.cpts.as_ref().ok_or_else(|| invalid("network has no CPTs"))?;
    let order = net.topological_order()?;
    let n = net.node_count();
    let mut out = Vec::with_capacity(count);
    let mut x = vec![0u8; n];
    for _ in 0..count {
        for &i in &order {
            let p = cpts[i][config_of(&net.parents[i], &x)];
            x[i] = u8::from(rng.uniform() < p);
        }
        out.push(Genome::from_vec_unchecked(x.clone()));
    }
    Ok(out)
}
