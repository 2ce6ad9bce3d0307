use crate::bits::Genome;
use crate::error::{invalid, Result};

use super::Problem;

/// Number of ones.
pub fn onemax_fitness(genome: &Genome) -> f64 {
    genome.ones_count() as f64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneMax {
    len: usize,
}

impl OneMax {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(invalid("onemax length must be at least 1"));
        }
        Ok(OneMax { len })
    }
}

impl Problem for OneMax {
    fn len(&self) -> usize {
        self.len
    }

    fn fitness(&self, genome: &Genome) -> f64 {
        debug_assert_eq!(genome.len(), self.len);
        onemax_fitness(genome)
    }

    fn optimum(&self) -> Option<f64> {
        Some(self.len as f64)
    }

    fn name(&self) -> String {
        format!("onemax-{}", self.len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_ones() {
        for (s, f) in [("11111", 5.0), ("00000", 0.0), ("10110", 3.0)] {
            assert_eq!(onemax_fitness(&Genome::parse(s).unwrap()), f);
        }
    }

    #[test]
    fn optimum_is_length() {
        let p = OneMax::new(7).unwrap();
        assert_eq!(p.optimum(), Some(7.0));
        assert_eq!(p.fitness(&Genome::ones(7).unwrap()), 7.0);
        assert!(OneMax::new(0).is_err());
    }
}
