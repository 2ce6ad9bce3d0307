//! Genomes, populations and the seeded random source shared by all modules.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::problems::Problem;

/// Fixed-length binary decision vector. One byte per bit, each 0 or 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Genome(Vec<u8>);

impl Genome {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(invalid("genome length must be at least 1"));
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(invalid(format!("genome bit must be 0 or 1, got {b}")));
        }
        Ok(Genome(bits))
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Result<Self> {
        Self::new(bits.into_iter().map(u8::from).collect())
    }

    /// Parses a string of '0'/'1' characters.
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(invalid(format!("unexpected character {other:?} in genome"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(bits)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0; n])
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// Genome whose bits are the big-endian binary digits of `index`.
    pub fn from_index(index: u64, n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect())
    }

    /// Big-endian integer formed by the bits. Only meaningful for n ≤ 64.
    pub fn to_index(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub(crate) fn from_vec_unchecked(bits: Vec<u8>) -> Self {
        debug_assert!(!bits.is_empty() && bits.iter().all(|&b| b <= 1));
        Genome(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn ones_count(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }
}

impl fmt::Debug for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genome({self})")
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming_distance(a: &Genome, b: &Genome) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), actual: b.len() });
    }
    Ok(a.bits().iter().zip(b.bits()).filter(|(x, y)| x != y).count())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedGenome {
    pub genome: Genome,
    pub fitness: f64,
}

impl EvaluatedGenome {
    pub fn evaluate<P: Problem + ?Sized>(genome: Genome, problem: &P) -> Self {
        let fitness = problem.fitness(&genome);
        EvaluatedGenome { genome, fitness }
    }
}

/// Non-empty ordered collection of evaluated genomes of one length.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    members: Vec<EvaluatedGenome>,
}

impl Population {
    pub fn new(members: Vec<EvaluatedGenome>) -> Result<Self> {
        let first = members.first().ok_or_else(|| invalid("population must not be empty"))?;
        let n = first.genome.len();
        if let Some(m) = members.iter().find(|m| m.genome.len() != n) {
            return Err(Error::LengthMismatch { expected: n, actual: m.genome.len() });
        }
        Ok(Population { members })
    }

    pub fn evaluate<P: Problem + ?Sized>(genomes: Vec<Genome>, problem: &P) -> Result<Self> {
        Self::new(genomes.into_iter().map(|g| EvaluatedGenome::evaluate(g, problem)).collect())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn genome_len(&self) -> usize {
        self.members[0].genome.len()
    }

    pub fn members(&self) -> &[EvaluatedGenome] {
        &self.members
    }

    pub fn into_members(self) -> Vec<EvaluatedGenome> {
        self.members
    }

    pub fn genomes(&self) -> Vec<Genome> {
        self.members.iter().map(|m| m.genome.clone()).collect()
    }

    /// First member with the highest fitness.
    pub fn best(&self) -> &EvaluatedGenome {
        self.members
            .iter()
            .fold(&self.members[0], |best, m| if m.fitness > best.fitness { m } else { best })
    }

    pub fn mean_fitness(&self) -> f64 {
        self.members.iter().map(|m| m.fitness).sum::<f64>() / self.members.len() as f64
    }
}

/// Seeded, reproducible random stream (ChaCha8).
///
/// Child streams for independent runs come from [`RandomSource::derive`],
/// which mixes an index into the root seed with SplitMix64.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child seed for stream `index`; depends only on `(self.seed, index)`.
    pub fn derive_seed(&self, index: u64) -> u64 {
        splitmix64(self.seed ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
    }

    pub fn derive(&self, index: u64) -> RandomSource {
        RandomSource::new(self.derive_seed(index))
    }

    /// Uniform draw from [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn below(&mut self, bound: usize) -> usize {
        self.rng.random_range(0..bound)
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `size` genomes of length `n` with i.i.d. fair bits.
pub fn random_genomes(n: usize, size: usize, rng: &mut RandomSource) -> Result<Vec<Genome>> {
    if n == 0 {
        return Err(invalid("genome length must be at least 1"));
    }
    if size == 0 {
        return Err(invalid("population size must be at least 1"));
    }
    Ok((0..size)
        .map(|_| Genome((0..n).map(|_| u8::from(rng.bernoulli(0.5))).collect()))
        .collect())
}

/// Random initial population, evaluated on `problem`.
pub fn random_population<P: Problem + ?Sized>(
    n: usize,
    size: usize,
    rng: &mut RandomSource,
    problem: &P,
) -> Result<Population> {
    Population::evaluate(random_genomes(n, size, rng)?, problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::OneMax;

    #[test]
    fn random_population_is_reproducible() {
        let p = OneMax::new(4).unwrap();
        let a = random_population(4, 3, &mut RandomSource::new(7), &p).unwrap();
        let b = random_population(4, 3, &mut RandomSource::new(7), &p).unwrap();
        assert_eq!(a.len(), 3);
        assert!(a.members().iter().all(|m| m.genome.len() == 4));
        assert_eq!(a, b);
    }

    #[test]
    fn random_population_rejects_empty() {
        let mut rng = RandomSource::new(1);
        assert!(random_genomes(0, 5, &mut rng).is_err());
        assert!(random_genomes(5, 0, &mut rng).is_err());
    }

    #[test]
    fn single_bit_frequency_within_bound() {
        let g = random_genomes(1, 10_000, &mut RandomSource::new(99)).unwrap();
        let ones = g.iter().map(Genome::ones_count).sum::<usize>() as f64 / 10_000.0;
        assert!((0.47..=0.53).contains(&ones), "{ones}");
    }

    #[test]
    fn bit_frequencies_pass_chi_square() {
        // 10^5 bits, one degree of freedom; critical value at 0.01 is 6.635
        let g = random_genomes(100, 1000, &mut RandomSource::new(2024)).unwrap();
        let ones = g.iter().map(Genome::ones_count).sum::<usize>() as f64;
        let total = 100_000.0;
        let expected = total / 2.0;
        let zeros = total - ones;
        let chi2 = (ones - expected).powi(2) / expected + (zeros - expected).powi(2) / expected;
        assert!(chi2 < 6.635, "chi2 = {chi2}");
    }

    #[test]
    fn hamming_examples() {
        let g = |s| Genome::parse(s).unwrap();
        assert_eq!(hamming_distance(&g("0000"), &g("0000")).unwrap(), 0);
        assert_eq!(hamming_distance(&g("0000"), &g("1111")).unwrap(), 4);
        assert_eq!(hamming_distance(&g("0101"), &g("0110")).unwrap(), 2);
        assert!(hamming_distance(&g("01"), &g("011")).is_err());
    }

    #[test]
    fn identical_seeds_identical_streams() {
        let mut a = RandomSource::new(123);
        let mut b = RandomSource::new(123);
        for _ in 0..1_000_000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn derived_streams_differ_and_repeat() {
        let root = RandomSource::new(5);
        assert_eq!(root.derive_seed(3), root.derive_seed(3));
        assert_ne!(root.derive_seed(3), root.derive_seed(4));
        assert_ne!(root.derive_seed(0), RandomSource::new(6).derive_seed(0));
    }

    #[test]
    fn genome_rejects_non_binary() {
        assert!(Genome::new(vec![0, 2]).is_err());
        assert!(Genome::new(vec![]).is_err());
        assert!(Genome::parse("01x").is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = Genome::from_index(0b1011, 4).unwrap();
        assert_eq!(g.to_string(), "1011");
        assert_eq!(g.to_index(), 11);
    }
}
