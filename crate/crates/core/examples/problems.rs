//! Fitness of a few genomes on onemax, a concatenated 5-trap and a random
//! NK landscape, plus the NK brute-force optimum.

use rbmeda::problems::{nk_brute_force_optimum, trap_block_fitness};
use rbmeda::{ConcatTrap, Genome, NkLandscape, OneMax, Problem};

fn main() -> rbmeda::Result<()> {
    let onemax = OneMax::new(10)?;
    let trap = ConcatTrap::new(5, 2)?;
    let genomes = ["1111111111", "0000000000", "1111100000", "1011000111"];

    println!("{:<12} {:>7} {:>6}", "genome", "onemax", "trap5");
    for g in genomes {
        let g = Genome::parse(g)?;
        println!("{:<12} {:>7} {:>6}", g.to_string(), onemax.fitness(&g), trap.fitness(&g));
    }
    for ones in 0..=5 {
        let block: Vec<u8> = (0..5).map(|i| u8::from(i < ones)).collect();
        println!("trap block with {ones} ones -> {}", trap_block_fitness(&block, 5)?);
    }

    let nk = NkLandscape::generate(16, 3, 42)?;
    let (best, value) = nk_brute_force_optimum(&nk)?;
    println!("{}: optimum {value:.6} at {best}", nk.name());
    println!("all-zeros scores {:.6}", nk.fitness(&Genome::zeros(16)?));
    Ok(())
}
