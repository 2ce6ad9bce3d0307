//! Binary tournament selection on a random onemax population.

use rbmeda::selection::{tournament_select, SelectionConfig};
use rbmeda::{random_population, OneMax, RandomSource};

fn main() -> rbmeda::Result<()> {
    let mut rng = RandomSource::new(3);
    let problem = OneMax::new(20)?;
    let pop = random_population(20, 200, &mut rng, &problem)?;
    let parents = tournament_select(&pop, &SelectionConfig::default(), &mut rng)?;
    println!("population {} mean {:.2}", pop.len(), pop.mean_fitness());
    println!("parents    {} mean {:.2}", parents.len(), parents.mean_fitness());
    Ok(())
}
