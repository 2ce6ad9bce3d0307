//! Smallest population at which BOA solves onemax in 10 of 10 runs.

use rbmeda::bisection::{bisect_population_size, BisectionSettings, SuccessCriterion};
use rbmeda::problems::BenchmarkProblem;
use rbmeda::{EdaConfig, ModelKind, OneMax, RandomSource};

fn main() -> rbmeda::Result<()> {
    let instances = [BenchmarkProblem::OneMax(OneMax::new(40)?)];
    let res = bisect_population_size(
        &instances,
        &EdaConfig::new(ModelKind::Boa, 16),
        &SuccessCriterion::all_runs(10),
        &BisectionSettings::default(),
        &RandomSource::new(2),
    )?;
    for p in &res.probes {
        let tag = if p.verification { " (verification)" } else { "" };
        println!("pop {:>5}  passed {:<5}  runs {:>2}{tag}", p.population_size, p.passed, p.runs);
    }
    println!("minimal population {} (last failure {:?})", res.population_size, res.lower);
    Ok(())
}
