//! Exact enumeration of a tiny RBM, compared with a long Gibbs chain.

use rbmeda::rbm::{exact_distribution, sample_candidates, Rbm, SampleConfig};
use rbmeda::{Genome, RandomSource};

fn main() -> rbmeda::Result<()> {
    let mut rng = RandomSource::new(11);
    let rbm = Rbm::random(4, 2, 1.0, &mut rng);
    let exact = exact_distribution(&rbm)?;

    let draws = 200_000;
    let start = vec![Genome::zeros(4)?];
    let samples = sample_candidates(&rbm, &start, &SampleConfig { gibbs_steps: 10, count: draws }, &mut rng)?;
    let mut counts = vec![0.0; 16];
    for s in &samples {
        counts[s.to_index() as usize] += 1.0;
    }
    let empirical: Vec<f64> = counts.iter().map(|c| c / draws as f64).collect();

    println!("state  exact     gibbs");
    for (i, (p, q)) in exact.probs().iter().zip(&empirical).enumerate() {
        println!("{}  {p:.5}  {q:.5}", Genome::from_index(i as u64, 4)?);
    }
    println!("total variation {:.4}", exact.total_variation(&empirical));
    Ok(())
}
