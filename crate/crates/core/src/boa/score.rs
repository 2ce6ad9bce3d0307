use crate::bits::Genome;
use crate::error::{invalid, Error, Result};

/// Selected genomes stored column-wise for fast counting.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredDataset {
    columns: Vec<Vec<u8>>,
    rows: usize,
}

impl ScoredDataset {
    pub fn new(rows: &[Genome]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| invalid("dataset must contain at least one row"))?;
        let n = first.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); n];
        for g in rows {
            if g.len() != n {
                return Err(Error::LengthMismatch { expected: n, actual: g.len() });
            }
            for (col, &b) in columns.iter_mut().zip(g.bits()) {
                col.push(b);
            }
        }
        Ok(ScoredDataset { columns, rows: rows.len() })
    }

    /// Number of rows, N.
    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn node_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, i: usize) -> &[u8] {
        &self.columns[i]
    }

    /// Big-endian parent configuration of every row.
    pub(crate) fn parent_configs(&self, parents: &[usize]) -> Vec<u32> {
        let mut cfg = vec![0u32; self.rows];
        for &p in parents {
            for (c, &b) in cfg.iter_mut().zip(&self.columns[p]) {
                *c = (*c << 1) | u32::from(b);
            }
        }
        cfg
    }

    fn check(&self, i: usize, parents: &[usize]) -> Result<()> {
        let n = self.node_count();
        if i >= n || parents.iter().any(|&p| p >= n) {
            return Err(invalid("node index out of range"));
        }
        if parents.contains(&i) {
            return Err(invalid(format!("node {i} cannot be its own parent")));
        }
        if parents.len() > 24 {
            return Err(invalid("too many parents"));
        }
        Ok(())
    }
}

/// Entropy in bits of x_i given the parent configuration, from a joint count
/// table laid out as `(config << 1) | x_i`.
pub(crate) fn entropy_from_counts(counts: &[u32], rows: usize) -> f64 {
    let n = rows as f64;
    let mut h = 0.0;
    for pair in counts.chunks_exact(2) {
        let total = pair[0] + pair[1];
        if total == 0 {
            continue;
        }
        for &c in pair {
            if c > 0 {
                let c = f64::from(c);
                h -= (c / n) * (c / f64::from(total)).log2();
            }
        }
    }
    h
}

pub(crate) fn bic_from_entropy(entropy: f64, parent_count: usize, rows: usize) -> f64 {
    let n = rows as f64;
    -entropy * n - (1u64 << parent_count) as f64 * n.log2() / 2.0
}

/// Conditional entropy H(X_i | Π_i) in bits over observed configurations.
pub fn conditional_entropy(data: &ScoredDataset, i: usize, parents: &[usize]) -> Result<f64> {
    data.check(i, parents)?;
    let configs = data.parent_configs(parents);
    let mut counts = vec![0u32; 2 << parents.len()];
    for (c, &x) in configs.iter().zip(data.column(i)) {
        counts[((*c as usize) << 1) | x as usize] += 1;
    }
    Ok(entropy_from_counts(&counts, data.len()))
}

/// Node term of the BIC score: −H·N − 2^{|Π|}·log2(N)/2.
pub fn bic_node_score(data: &ScoredDataset, i: usize, parents: &[usize]) -> Result<f64> {
    let h = conditional_entropy(data, i, parents)?;
    Ok(bic_from_entropy(h, parents.len(), data.len()))
}
