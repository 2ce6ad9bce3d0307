//! Estimation of distribution algorithms driven by a restricted Boltzmann
//! machine (RBM-EDA) or a BIC-scored Bayesian network (BOA), together with
//! onemax, deceptive-trap and NK benchmark problems, population sizing by
//! bisection and scaling-exponent reporting.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod bisection;
pub mod bits;
pub mod boa;
pub mod eda;
pub mod error;
pub mod experiment;
pub mod problems;
pub mod rbm;
pub mod selection;

pub use bits::{hamming_distance, random_population, EvaluatedGenome, Genome, Population, RandomSource};
pub use eda::{run_eda, EdaConfig, ModelKind, RunResult};
pub use error::{Error, Result};
pub use problems::{BenchmarkProblem, ConcatTrap, NkLandscape, OneMax, Problem};
