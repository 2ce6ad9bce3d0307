use crate::bits::Genome;
use crate::error::{invalid, Error, Result};

use super::Problem;

/// Deceptive trap of order `k` on one block: `k` at all-ones, otherwise
/// `k - (ones + 1)`.
pub fn trap_block_fitness(block: &[u8], k: usize) -> Result<f64> {
    if block.len() != k {
        return Err(Error::LengthMismatch { expected: k, actual: block.len() });
    }
    Ok(trap_value(block))
}

#[inline]
fn trap_value(block: &[u8]) -> f64 {
    let k = block.len();
    let ones: usize = block.iter().map(|&b| b as usize).sum();
    if ones == k {
        k as f64
    } else {
        (k - (ones + 1)) as f64
    }
}

/// Sum of order-`k` traps over consecutive `k`-bit blocks.
pub fn concat_trap_fitness(genome: &Genome, k: usize) -> Result<f64> {
    if k == 0 || genome.len() % k != 0 {
        return Err(invalid(format!(
            "genome length {} is not divisible by trap order {k}",
            genome.len()
        )));
    }
    Ok(genome.bits().chunks_exact(k).map(trap_value).sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcatTrap {
    k: usize,
    blocks: usize,
}

impl ConcatTrap {
    pub fn new(k: usize, blocks: usize) -> Result<Self> {
        if k == 0 || blocks == 0 {
            return Err(invalid("trap order and block count must be at least 1"));
        }
        Ok(ConcatTrap { k, blocks })
    }

    /// Traps of order `k` covering `len` bits.
    pub fn with_len(k: usize, len: usize) -> Result<Self> {
        if k == 0 || len % k != 0 {
            return Err(invalid(format!("length {len} is not divisible by trap order {k}")));
        }
        Self::new(k, len / k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }
}

impl Problem for ConcatTrap {
    fn len(&self) -> usize {
        self.k * self.blocks
    }

    fn fitness(&self, genome: &Genome) -> f64 {
        debug_assert_eq!(genome.len(), self.len());
        genome.bits().chunks_exact(self.k).map(trap_value).sum()
    }

    fn optimum(&self) -> Option<f64> {
        Some((self.k * self.blocks) as f64)
    }

    fn name(&self) -> String {
        format!("trap{}-{}", self.k, self.len())
    }
}
