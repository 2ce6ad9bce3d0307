//! Trains an RBM with CD-1 on noisy copies of two prototypes and prints the
//! reconstruction-error checkpoints that drive the learning schedule.

use rbmeda::rbm::{init_rbm, sample_candidates, train, SampleConfig, TrainConfig};
use rbmeda::{Genome, RandomSource};

fn main() -> rbmeda::Result<()> {
    let mut rng = RandomSource::new(5);
    let prototypes = [Genome::parse("111111000000")?, Genome::parse("000000111111")?];
    let data: Vec<Genome> = (0..400)
        .map(|i| {
            let bits = prototypes[i % 2].bits().iter().map(|&b| if rng.bernoulli(0.05) { 1 - b } else { b });
            Genome::new(bits.collect())
        })
        .collect::<rbmeda::Result<_>>()?;

    let mut rbm = init_rbm(12, &data, &mut rng)?;
    let report = train(&mut rbm, &data, &TrainConfig::default(), &mut rng)?;
    println!("stopped after {} epochs: {:?}", report.epochs, report.stop);
    println!("momentum {} alpha_w {}", report.final_momentum, report.final_alpha_weights);
    for c in report.history.iter().step_by(5) {
        let gamma = c.gamma.map_or_else(|| "-".into(), |g| format!("{g:.4}"));
        println!("epoch {:>4}  train {:.4}  gamma {gamma}", c.epoch, c.train_error);
    }

    let samples = sample_candidates(&rbm, &data[..10], &SampleConfig::new(10), &mut rng)?;
    for s in samples {
        println!("sample {s}");
    }
    Ok(())
}
