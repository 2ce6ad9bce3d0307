//! Binary tournament selection without replacement.

use rand::seq::SliceRandom;

use crate::bits::{EvaluatedGenome, Population, RandomSource};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionConfig {
    /// Fraction of the population kept as parents, in (0, 1].
    pub parent_fraction: f64,
}

impl SelectionConfig {
    pub const TOURNAMENT_SIZE: usize = 2;

    pub fn new(parent_fraction: f64) -> Result<Self> {
        if !(parent_fraction > 0.0 && parent_fraction <= 1.0) {
            return Err(invalid(format!("parent fraction {parent_fraction} outside (0, 1]")));
        }
        Ok(SelectionConfig { parent_fraction })
    }

    pub fn parent_count(&self, pop_size: usize) -> usize {
        (self.parent_fraction * pop_size as f64).round() as usize
    }
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { parent_fraction: 0.5 }
    }
}

/// Shuffles the population, pairs consecutive members and keeps each pair's
/// fitter member. One pass yields |pop|/2 winners; further passes (fresh
/// shuffles) run until `parent_fraction · |pop|` parents are collected.
/// Equal fitness is decided by a fair coin.
pub fn tournament_select(
    pop: &Population,
    cfg: &SelectionConfig,
    rng: &mut RandomSource,
) -> Result<Population> {
    let size = pop.len();
    if size < 4 || size % 2 != 0 {
        return Err(invalid(format!("tournament selection needs an even population of at least 4, got {size}")));
    }
    let wanted = cfg.parent_count(size);
    if wanted < 2 {
        return Err(invalid("selection would yield fewer than two parents"));
    }
    let members = pop.members();
    let mut order: Vec<usize> = (0..size).collect();
    let mut selected: Vec<EvaluatedGenome> = Vec::with_capacity(wanted);
    while selected.len() < wanted {
        order.shuffle(rng);
        for pair in order.chunks_exact(2) {
            if selected.len() == wanted {
                break;
            }
            let (a, b) = (&members[pair[0]], &members[pair[1]]);
            let winner = if a.fitness > b.fitness {
                a
            } else if b.fitness > a.fitness {
                b
            } else if rng.bernoulli(0.5) {
                a
            } else {
                b
            };
            selected.push(winner.clone());
        }
    }
    Population::new(selected)
}
