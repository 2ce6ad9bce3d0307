//! One RBM-EDA run and one BOA run on concatenated traps, with the time
//! spent in each phase. Arguments: trap order, length, population, seed.
//!
//! `cargo run --release --example eda_run -- 4 32 2000 1`

use rbmeda::{run_eda, ConcatTrap, EdaConfig, ModelKind, RandomSource};

fn main() -> rbmeda::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("numeric argument"));
    let k = args.next().unwrap_or(4);
    let len = args.next().unwrap_or(24);
    let pop = args.next().unwrap_or(2000);
    let seed = args.next().unwrap_or(1) as u64;
    let problem = ConcatTrap::with_len(k, len)?;

    for model in [ModelKind::Rbm, ModelKind::Boa] {
        let res = run_eda(&problem, &EdaConfig::new(model, pop), &mut RandomSource::new(seed))?;
        let [select, build, sample, fitness] = res.times.fractions();
        println!(
            "{model}: success {} best {} after {} generations, {} evaluations",
            res.success, res.best.fitness, res.generations, res.evaluations
        );
        println!(
            "     {:.2}s  select {select:.3}  model {build:.3}  sample {sample:.3}  fitness {fitness:.3}",
            res.loop_wall.as_secs_f64()
        );
    }
    Ok(())
}
