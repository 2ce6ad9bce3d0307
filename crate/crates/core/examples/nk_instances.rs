//! Generates an NK landscape, round-trips it through its text format and
//! lets BOA search for the brute-force optimum.

use rbmeda::problems::BenchmarkProblem;
use rbmeda::{run_eda, EdaConfig, ModelKind, NkLandscape, Problem, RandomSource};

fn main() -> rbmeda::Result<()> {
    let nk = NkLandscape::generate(18, 3, 2024)?;
    let text = nk.to_text();
    println!("{}", text.lines().take(3).collect::<Vec<_>>().join("\n"));
    let restored = NkLandscape::parse(&text)?;
    assert_eq!(restored, nk);

    let problem = BenchmarkProblem::nk_with_optimum(restored)?;
    let res = run_eda(&problem, &EdaConfig::new(ModelKind::Boa, 400), &mut RandomSource::new(1))?;
    println!("target {:?}, reached {} (success {})", problem.optimum(), res.best.fitness, res.success);
    Ok(())
}
