//! Learns a Bayesian network from data with duplicated bit pairs, then
//! samples from it.

use rbmeda::boa::{estimate_cpts, greedy_build_network, network_score, sample_network, ScoredDataset};
use rbmeda::{Genome, RandomSource};

fn main() -> rbmeda::Result<()> {
    let mut rng = RandomSource::new(9);
    let rows: Vec<Genome> = (0..200)
        .map(|_| {
            let pairs: Vec<u8> = (0..4).map(|_| u8::from(rng.bernoulli(0.5))).collect();
            Genome::new(pairs.iter().flat_map(|&b| [b, b]).collect())
        })
        .collect::<rbmeda::Result<_>>()?;

    let data = ScoredDataset::new(&rows)?;
    let net = greedy_build_network(&data, 5)?;
    println!("BIC score {:.3}, {} edges", network_score(&data, &net)?, net.edge_count());
    let net = estimate_cpts(&net, &data)?;
    print!("{}", net.dump());

    for s in sample_network(&net, 5, &mut rng)? {
        println!("sample {s}");
    }
    Ok(())
}
