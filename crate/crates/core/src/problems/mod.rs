//! Benchmark fitness functions: onemax, concatenated deceptive traps and NK
//! landscapes.

mod nk;
mod onemax;
mod trap;

pub use nk::{nk_brute_force_optimum, nk_fitness, NkLandscape, MAX_BRUTE_FORCE_N};
pub use onemax::{onemax_fitness, OneMax};
pub use trap::{concat_trap_fitness, trap_block_fitness, ConcatTrap};

use crate::bits::Genome;

/// A fitness oracle over fixed-length bit strings. Higher is better.
///
/// `fitness` assumes `genome.len() == self.len()`; callers validate the
/// length once up front (the engine does so before a run).
pub trait Problem: Send + Sync {
    fn len(&self) -> usize;

    fn fitness(&self, genome: &Genome) -> f64;

    /// Known global optimum, when one is available.
    fn optimum(&self) -> Option<f64>;

    fn name(&self) -> String;
}

/// Closed set of the benchmark problems, convenient for configs and the CLI.
#[derive(Clone, Debug)]
pub enum BenchmarkProblem {
    OneMax(OneMax),
    Trap(ConcatTrap),
    Nk {
        landscape: NkLandscape,
        optimum: Option<f64>,
    },
}

impl BenchmarkProblem {
    /// NK problem whose target is its brute-force optimum (N ≤ 24).
    pub fn nk_with_optimum(landscape: NkLandscape) -> crate::Result<Self> {
        let (_, best) = nk_brute_force_optimum(&landscape)?;
        Ok(BenchmarkProblem::Nk { landscape, optimum: Some(best) })
    }

    pub fn family(&self) -> &'static str {
        match self {
            BenchmarkProblem::OneMax(_) => "onemax",
            BenchmarkProblem::Trap(_) => "trap",
            BenchmarkProblem::Nk { .. } => "nk",
        }
    }

    /// Order parameter: trap order or NK epistasis; 0 for onemax.
    pub fn order(&self) -> usize {
        match self {
            BenchmarkProblem::OneMax(_) => 0,
            BenchmarkProblem::Trap(t) => t.k(),
            BenchmarkProblem::Nk { landscape, .. } => landscape.k(),
        }
    }
}

impl Problem for BenchmarkProblem {
    fn len(&self) -> usize {
        match self {
            BenchmarkProblem::OneMax(p) => p.len(),
            BenchmarkProblem::Trap(p) => p.len(),
            BenchmarkProblem::Nk { landscape, .. } => landscape.len(),
        }
    }

    fn fitness(&self, genome: &Genome) -> f64 {
        match self {
            BenchmarkProblem::OneMax(p) => p.fitness(genome),
            BenchmarkProblem::Trap(p) => p.fitness(genome),
            BenchmarkProblem::Nk { landscape, .. } => landscape.fitness(genome),
        }
    }

    fn optimum(&self) -> Option<f64> {
        match self {
            BenchmarkProblem::OneMax(p) => p.optimum(),
            BenchmarkProblem::Trap(p) => p.optimum(),
            BenchmarkProblem::Nk { optimum, .. } => *optimum,
        }
    }

    fn name(&self) -> String {
        match self {
            BenchmarkProblem::OneMax(p) => p.name(),
            BenchmarkProblem::Trap(p) => p.name(),
            BenchmarkProblem::Nk { landscape, .. } => landscape.name(),
        }
    }
}
