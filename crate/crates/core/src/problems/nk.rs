//! NK landscapes with random neighbourhoods and uniform component tables.
//!
//! Text format (one component per line after the header):
//!
//! ```text
//! NK <N> <k> <seed>
//! <i>: <n_1> ... <n_k> : <t_0> ... <t_{2^(k+1)-1}>
//! ```
//!
//! Table index is the big-endian integer formed by `(x_i, x_{n_1}, ..., x_{n_k})`.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::index::sample;

use crate::bits::{Genome, RandomSource};
use crate::error::{invalid, Error, Result};

use super::Problem;

/// Largest N accepted by [`nk_brute_force_optimum`].
pub const MAX_BRUTE_FORCE_N: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct NkLandscape {
    n: usize,
    k: usize,
    seed: u64,
    neighbors: Vec<Vec<usize>>,
    tables: Vec<Vec<f64>>,
}

impl NkLandscape {
    /// Random instance; a pure function of `(n, k, seed)`.
    pub fn generate(n: usize, k: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("NK landscape needs at least one variable"));
        }
        if k >= n {
            return Err(invalid(format!("epistasis k={k} must be below N={n}")));
        }
        let mut rng = RandomSource::new(seed);
        let mut neighbors = Vec::with_capacity(n);
        let mut tables = Vec::with_capacity(n);
        for i in 0..n {
            let picks = sample(&mut rng, n - 1, k)
                .into_iter()
                .map(|j| if j >= i { j + 1 } else { j })
                .collect();
            neighbors.push(picks);
            tables.push((0..1usize << (k + 1)).map(|_| rng.uniform()).collect());
        }
        Ok(NkLandscape { n, k, seed, neighbors, tables })
    }

    /// Instance from explicit neighbourhoods and tables.
    pub fn from_parts(
        k: usize,
        seed: u64,
        neighbors: Vec<Vec<usize>>,
        tables: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = neighbors.len();
        if n == 0 || tables.len() != n {
            return Err(invalid("neighbour and table counts must match and be non-zero"));
        }
        if k >= n {
            return Err(invalid(format!("epistasis k={k} must be below N={n}")));
        }
        for (i, (nb, t)) in neighbors.iter().zip(&tables).enumerate() {
            if nb.len() != k {
                return Err(invalid(format!("component {i} has {} neighbours, expected {k}", nb.len())));
            }
            let mut seen = nb.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != k || nb.iter().any(|&j| j == i || j >= n) {
                return Err(invalid(format!("component {i} has invalid neighbours {nb:?}")));
            }
            if t.len() != 1 << (k + 1) {
                return Err(invalid(format!("component {i} table has {} entries", t.len())));
            }
            if t.iter().any(|v| !(0.0..1.0).contains(v)) {
                return Err(invalid(format!("component {i} table value outside [0,1)")));
            }
        }
        Ok(NkLandscape { n, k, seed, neighbors, tables })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn neighbors(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.tables
    }

    #[inline]
    fn eval_bits(&self, x: &[u8]) -> f64 {
        let mut total = 0.0;
        for (i, (nb, table)) in self.neighbors.iter().zip(&self.tables).enumerate() {
            let idx = nb.iter().fold(x[i] as usize, |acc, &j| (acc << 1) | x[j] as usize);
            total += table[idx];
        }
        total / self.n as f64
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("NK {} {} {}\n", self.n, self.k, self.seed);
        for (i, (nb, table)) in self.neighbors.iter().zip(&self.tables).enumerate() {
            write!(out, "{i}:").unwrap();
            for j in nb {
                write!(out, " {j}").unwrap();
            }
            out.push_str(" :");
            for v in table {
                // shortest representation that round-trips exactly
                write!(out, " {v:?}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "NK" {
            return Err(Error::Parse { line: 1, msg: format!("bad header {header:?}") });
        }
        let n: usize = parse_field(fields[1], 1)?;
        let k: usize = parse_field(fields[2], 1)?;
        let seed: u64 = parse_field(fields[3], 1)?;
        let mut neighbors = Vec::with_capacity(n);
        let mut tables = Vec::with_capacity(n);
        for (idx, line) in lines {
            let lineno = idx + 1;
            let parts: Vec<&str> = line.splitn(3, ':').collect();
            if parts.len() != 3 {
                return Err(Error::Parse { line: lineno, msg: "expected `i: neighbours : table`".into() });
            }
            let i: usize = parse_field(parts[0].trim(), lineno)?;
            if i != neighbors.len() {
                return Err(Error::Parse { line: lineno, msg: format!("component {i} out of order") });
            }
            neighbors.push(
                parts[1]
                    .split_whitespace()
                    .map(|s| parse_field(s, lineno))
                    .collect::<Result<Vec<usize>>>()?,
            );
            tables.push(
                parts[2]
                    .split_whitespace()
                    .map(|s| parse_field(s, lineno))
                    .collect::<Result<Vec<f64>>>()?,
            );
        }
        if neighbors.len() != n {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {n} components, found {}", neighbors.len()),
            });
        }
        Self::from_parts(k, seed, neighbors, tables)
    }
}

fn parse_field<T: FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("cannot parse {s:?}") })
}

/// Mean of the N component-table lookups.
pub fn nk_fitness(landscape: &NkLandscape, genome: &Genome) -> Result<f64> {
    if genome.len() != landscape.n {
        return Err(Error::LengthMismatch { expected: landscape.n, actual: genome.len() });
    }
    Ok(landscape.eval_bits(genome.bits()))
}

/// Exhaustive argmax over all 2^N genomes. Ties go to the lexicographically
/// smallest genome.
pub fn nk_brute_force_optimum(landscape: &NkLandscape) -> Result<(Genome, f64)> {
    let n = landscape.n;
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::TooLarge(format!("N={n} exceeds {MAX_BRUTE_FORCE_N}")));
    }
    let mut bits = vec![0u8; n];
    let mut best_idx = 0u64;
    let mut best = f64::NEG_INFINITY;
    for idx in 0..1u64 << n {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = ((idx >> (n - 1 - i)) & 1) as u8;
        }
        let f = landscape.eval_bits(&bits);
        if f > best {
            best = f;
            best_idx = idx;
        }
    }
    Ok((Genome::from_index(best_idx, n)?, best))
}

impl Problem for NkLandscape {
    fn len(&self) -> usize {
        self.n
    }

    fn fitness(&self, genome: &Genome) -> f64 {
        debug_assert_eq!(genome.len(), self.n);
        self.eval_bits(genome.bits())
    }

    fn optimum(&self) -> Option<f64> {
        None
    }

    fn name(&self) -> String {
        format!("nk{}-{}-s{}", self.k, self.n, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::onemax_fitness;

    fn onemax_tables(n: usize) -> NkLandscape {
        NkLandscape::from_parts(0, 0, vec![vec![]; n], vec![vec![0.0, 0.999_999]; n]).unwrap()
    }

    #[test]
    fn k_zero_structure() {
        let inst = NkLandscape::generate(5, 0, 1).unwrap();
        assert!(inst.neighbors().iter().all(Vec::is_empty));
        assert!(inst.tables().iter().all(|t| t.len() == 2));
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(NkLandscape::generate(8, 3, 42).unwrap(), NkLandscape::generate(8, 3, 42).unwrap());
        assert_ne!(NkLandscape::generate(8, 3, 42).unwrap(), NkLandscape::generate(8, 3, 43).unwrap());
    }

    #[test]
    fn rejects_k_at_least_n() {
        assert!(NkLandscape::generate(4, 4, 0).is_err());
        assert!(NkLandscape::generate(0, 0, 0).is_err());
    }

    #[test]
    fn neighbours_are_distinct_and_exclude_self() {
        let inst = NkLandscape::generate(12, 5, 77).unwrap();
        for (i, nb) in inst.neighbors().iter().enumerate() {
            let mut s = nb.clone();
            s.sort_unstable();
            s.dedup();
            assert_eq!(s.len(), 5);
            assert!(!nb.contains(&i));
        }
    }

    #[test]
    fn single_lookup() {
        let inst = NkLandscape::from_parts(0, 0, vec![vec![]], vec![vec![0.25, 0.75]]).unwrap();
        assert_eq!(nk_fitness(&inst, &Genome::parse("0").unwrap()).unwrap(), 0.25);
        assert_eq!(nk_fitness(&inst, &Genome::parse("1").unwrap()).unwrap(), 0.75);
    }

    #[test]
    fn k_zero_identity_tables_reduce_to_scaled_onemax() {
        let inst = NkLandscape::from_parts(0, 0, vec![vec![]; 6], vec![vec![0.0, 0.5]; 6]).unwrap();
        for idx in 0..64 {
            let g = Genome::from_index(idx, 6).unwrap();
            let expect = 0.5 * onemax_fitness(&g) / 6.0;
            assert!((nk_fitness(&inst, &g).unwrap() - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_straight_line_evaluator() {
        let inst = NkLandscape::generate(12, 3, 9).unwrap();
        let g = Genome::parse("101100111000").unwrap();
        // independent evaluation: build each component's key bit by bit
        let x = g.bits();
        let mut sum = 0.0;
        for i in 0..12 {
            let nb = &inst.neighbors()[i];
            let mut key = 0usize;
            let vars = [i, nb[0], nb[1], nb[2]];
            for (pos, &v) in vars.iter().enumerate() {
                key += (x[v] as usize) * (1 << (3 - pos));
            }
            sum += inst.tables()[i][key];
        }
        assert!((nk_fitness(&inst, &g).unwrap() - sum / 12.0).abs() < 1e-15);
        assert!(nk_fitness(&inst, &Genome::zeros(11).unwrap()).is_err());
    }

    #[test]
    fn brute_force_on_onemax_tables() {
        let inst = onemax_tables(6);
        let (g, f) = nk_brute_force_optimum(&inst).unwrap();
        assert_eq!(g, Genome::ones(6).unwrap());
        assert!((f - 0.999_999).abs() < 1e-12);
    }

    #[test]
    fn brute_force_matches_reverse_enumeration() {
        let inst = NkLandscape::generate(10, 2, 3).unwrap();
        let (g, f) = nk_brute_force_optimum(&inst).unwrap();
        let mut best = f64::NEG_INFINITY;
        let mut arg = None;
        for idx in (0..1024u64).rev() {
            let cand = Genome::from_index(idx, 10).unwrap();
            let v = nk_fitness(&inst, &cand).unwrap();
            if v >= best {
                best = v;
                arg = Some(cand);
            }
        }
        assert_eq!(f, best);
        assert_eq!(Some(g), arg);
    }

    #[test]
    fn brute_force_guard() {
        let inst = NkLandscape::generate(30, 1, 0).unwrap();
        assert!(matches!(nk_brute_force_optimum(&inst), Err(Error::TooLarge(_))));
    }

    #[test]
    fn k_zero_is_separable() {
        let inst = NkLandscape::generate(8, 0, 5).unwrap();
        for i in 0..8 {
            let mut deltas = Vec::new();
            for idx in 0..256u64 {
                if (idx >> (7 - i)) & 1 == 1 {
                    continue;
                }
                let a = Genome::from_index(idx, 8).unwrap();
                let b = Genome::from_index(idx | 1 << (7 - i), 8).unwrap();
                deltas.push(nk_fitness(&inst, &b).unwrap() - nk_fitness(&inst, &a).unwrap());
            }
            assert!(deltas.iter().all(|d| (d - deltas[0]).abs() < 1e-12));
        }
    }

    #[test]
    fn text_round_trip_is_exact() {
        let inst = NkLandscape::generate(9, 2, u64::MAX - 3).unwrap();
        let back = NkLandscape::parse(&inst.to_text()).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(NkLandscape::parse("").is_err());
        assert!(NkLandscape::parse("NK 2 0 1\n0: : 0.1 0.2\n").is_err());
        assert!(NkLandscape::parse("NK 1 0 1\n0: : 0.1 1.5\n").is_err());
    }
}
