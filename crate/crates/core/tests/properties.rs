mod common;

use proptest::prelude::*;

use rbmeda::bisection::{bisect_with, BisectionSettings, Trial};
use rbmeda::boa::{bic_node_score, estimate_cpts, greedy_build_network, network_score, BayesianNetwork, ScoredDataset};
use rbmeda::eda::{run_eda, EdaConfig, ModelKind};
use rbmeda::experiment::{fit_power_law, CellResult, ExperimentSpec, ProblemFamily, ScalingReport, CSV_HEADER};
use rbmeda::problems::{concat_trap_fitness, nk_fitness, trap_block_fitness};
use rbmeda::rbm::{sigm, Rbm};
use rbmeda::selection::{tournament_select, SelectionConfig};
use rbmeda::{random_population, ConcatTrap, Genome, NkLandscape, OneMax, Population, Problem, RandomSource};

fn genome(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Genome> {
    prop::collection::vec(0u8..=1, n).prop_map(|b| Genome::new(b).unwrap())
}

#[test]
fn same_seed_same_million_draws() {
    let mut a = RandomSource::new(0xDEAD_BEEF);
    let mut b = RandomSource::new(0xDEAD_BEEF);
    assert!((0..1_000_000).all(|_| a.uniform().to_bits() == b.uniform().to_bits()));
}

#[test]
fn random_bits_pass_chi_square() {
    let problem = OneMax::new(100).unwrap();
    let pop = random_population(100, 1000, &mut RandomSource::new(17), &problem).unwrap();
    let ones: usize = pop.members().iter().map(|m| m.genome.ones_count()).sum();
    let total = 100_000.0;
    let expected = total / 2.0;
    let chi2 = 2.0 * (ones as f64 - expected).powi(2) / expected;
    // 1 degree of freedom, 0.01 significance
    assert!(chi2 < 6.635, "chi² = {chi2}");
}

#[test]
fn trap_argmax_is_unique_all_ones() {
    let trap = ConcatTrap::new(4, 2).unwrap();
    let scores: Vec<f64> = (0..256).map(|i| trap.fitness(&Genome::from_index(i, 8).unwrap())).collect();
    let best = scores.iter().copied().fold(f64::MIN, f64::max);
    assert_eq!(best, 8.0);
    assert_eq!(scores.iter().filter(|&&s| s == best).count(), 1);
    assert_eq!(scores[255], 8.0);
    assert_eq!(scores[0], 6.0);
}

#[test]
fn separable_nk_has_bitwise_deltas() {
    for seed in 0..5 {
        let nk = NkLandscape::generate(8, 0, seed).unwrap();
        // with k = 0 the change from flipping bit i must not depend on the other bits
        for i in 0..8 {
            let deltas: Vec<f64> = (0..256u64)
                .filter(|x| x >> (7 - i) & 1 == 0)
                .map(|x| {
                    let a = Genome::from_index(x, 8).unwrap();
                    let b = Genome::from_index(x | 1 << (7 - i), 8).unwrap();
                    nk.fitness(&b) - nk.fitness(&a)
                })
                .collect();
            assert!(deltas.iter().all(|d| (d - deltas[0]).abs() < 1e-12));
        }
    }
}

fn distinct_population(n: usize, size: usize, seed: u64) -> Population {
    let mut rng = RandomSource::new(seed);
    let mut seen = std::collections::HashSet::new();
    let mut genomes = Vec::new();
    while genomes.len() < size {
        let idx = (rng.uniform() * (1u64 << n) as f64) as u64;
        if seen.insert(idx) {
            genomes.push(Genome::from_index(idx, n).unwrap());
        }
    }
    Population::evaluate(genomes, &OneMax::new(n).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derived_streams_reproduce(seed in any::<u64>(), index in any::<u64>()) {
        let root = RandomSource::new(seed);
        let mut a = root.derive(index);
        let mut b = RandomSource::new(seed).derive(index);
        for _ in 0..100 {
            prop_assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
    }

    #[test]
    fn hamming_is_a_metric(a in genome(12..=12), b in genome(12..=12), c in genome(12..=12)) {
        let d = |x: &Genome, y: &Genome| rbmeda::hamming_distance(x, y).unwrap();
        prop_assert_eq!(d(&a, &a), 0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
    }

    #[test]
    fn concat_trap_is_sum_of_blocks(k in 1usize..=6, blocks in 1usize..=6, seed in any::<u64>()) {
        let mut rng = RandomSource::new(seed);
        let bits: Vec<u8> = (0..k * blocks).map(|_| u8::from(rng.bernoulli(0.5))).collect();
        let g = Genome::new(bits.clone()).unwrap();
        let expected: f64 = bits.chunks(k).map(|b| {
            let u = b.iter().filter(|&&x| x == 1).count();
            if u == k { k as f64 } else { (k - u - 1) as f64 }
        }).sum();
        prop_assert_eq!(concat_trap_fitness(&g, k).unwrap(), expected);
        let blockwise: f64 = bits.chunks(k).map(|b| trap_block_fitness(b, k).unwrap()).sum();
        prop_assert_eq!(blockwise, expected);
        prop_assert!(expected <= (k * blocks) as f64);
    }

    #[test]
    fn nk_fitness_in_unit_interval(n in 2usize..=12, k in 0usize..=4, seed in any::<u64>(), gseed in any::<u64>()) {
        let k = k.min(n - 1);
        let nk = NkLandscape::generate(n, k, seed).unwrap();
        let mut rng = RandomSource::new(gseed);
        for _ in 0..20 {
            let g = Genome::new((0..n).map(|_| u8::from(rng.bernoulli(0.5))).collect()).unwrap();
            let f = nk_fitness(&nk, &g).unwrap();
            prop_assert!((0.0..1.0).contains(&f));
        }
        for (i, nb) in nk.neighbors().iter().enumerate() {
            prop_assert_eq!(nb.len(), k);
            prop_assert!(!nb.contains(&i));
            let mut sorted = nb.clone();
            sorted.sort_unstable();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), k);
        }
        prop_assert!(nk.tables().iter().all(|t| t.len() == 1 << (k + 1)));
    }

    #[test]
    fn nk_generation_is_pure(n in 2usize..=16, k in 0usize..=3, seed in any::<u64>()) {
        let k = k.min(n - 1);
        prop_assert_eq!(NkLandscape::generate(n, k, seed).unwrap(), NkLandscape::generate(n, k, seed).unwrap());
        let nk = NkLandscape::generate(n, k, seed).unwrap();
        prop_assert_eq!(NkLandscape::parse(&nk.to_text()).unwrap(), nk);
    }

    #[test]
    fn selection_size_best_and_single_use(half in 2usize..=40, seed in any::<u64>()) {
        let pop = distinct_population(12, 2 * half, seed);
        let parents = tournament_select(&pop, &SelectionConfig::default(), &mut RandomSource::new(seed ^ 1)).unwrap();
        prop_assert_eq!(parents.len(), half);
        prop_assert_eq!(parents.best().fitness, pop.best().fitness);
        // one pass: no member can win twice
        let mut winners: Vec<u64> = parents.members().iter().map(|m| m.genome.to_index()).collect();
        winners.sort_unstable();
        winners.dedup();
        prop_assert_eq!(winners.len(), half);
    }

    #[test]
    fn sigmoid_open_interval(x in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
        let s = sigm(x);
        prop_assert!(s > 0.0 && s < 1.0);
    }

    #[test]
    fn activation_probs_are_finite(n in 1usize..=8, m in 1usize..=5, scale in 0.0f64..50.0, seed in any::<u64>()) {
        let mut rng = RandomSource::new(seed);
        let rbm = Rbm::random(n, m, scale, &mut rng);
        let v: Vec<u8> = (0..n).map(|_| u8::from(rng.bernoulli(0.5))).collect();
        let h: Vec<u8> = (0..m).map(|_| u8::from(rng.bernoulli(0.5))).collect();
        let ph = rbmeda::rbm::hidden_activation_probs(&rbm, &v).unwrap();
        let pv = rbmeda::rbm::visible_activation_probs(&rbm, &h).unwrap();
        prop_assert!(ph.iter().chain(&pv).all(|p| *p > 0.0 && *p < 1.0));
    }

    #[test]
    fn bic_decomposes_and_edges_are_local(seed in any::<u64>(), rows in 10usize..=80) {
        let mut rng = RandomSource::new(seed);
        let data: Vec<Vec<u8>> = common::small_dependent_rows(5, rows, &mut rng);
        let genomes: Vec<Genome> = data.iter().map(|r| Genome::new(r.clone()).unwrap()).collect();
        let ds = ScoredDataset::new(&genomes).unwrap();
        // random DAG: parents drawn from lower indices
        let parents: Vec<Vec<usize>> = (0..5).map(|i| (0..i).filter(|_| rng.bernoulli(0.4)).collect()).collect();
        let cpts: Vec<Vec<f64>> = parents.iter().map(|p| vec![0.5; 1 << p.len()]).collect();
        let net = BayesianNetwork::with_cpts(parents.clone(), cpts).unwrap();
        let total = network_score(&ds, &net).unwrap();
        let terms: Vec<f64> = (0..5).map(|i| bic_node_score(&ds, i, &parents[i]).unwrap()).collect();
        prop_assert!((total - terms.iter().sum::<f64>()).abs() < 1e-9);
        for i in 0..5 {
            prop_assert!((terms[i] - common::bic_node(&data, i, &parents[i])).abs() < 1e-9);
        }
        // add 0 -> 4 if absent: only node 4's term may move
        if !parents[4].contains(&0) {
            let mut more = parents.clone();
            more[4].push(0);
            let cpts: Vec<Vec<f64>> = more.iter().map(|p| vec![0.5; 1 << p.len()]).collect();
            let bigger = BayesianNetwork::with_cpts(more.clone(), cpts).unwrap();
            let delta = network_score(&ds, &bigger).unwrap() - total;
            let node_delta = bic_node_score(&ds, 4, &more[4]).unwrap() - terms[4];
            prop_assert!((delta - node_delta).abs() < 1e-9);
        }
    }

    #[test]
    fn greedy_is_acyclic_deterministic_and_smoothed(seed in any::<u64>(), n in 2usize..=10, rows in 4usize..=120, cap in 1usize..=5) {
        let mut rng = RandomSource::new(seed);
        let data: Vec<Genome> = common::small_dependent_rows(n, rows, &mut rng)
            .into_iter().map(|r| Genome::new(r).unwrap()).collect();
        let ds = ScoredDataset::new(&data).unwrap();
        let net = greedy_build_network(&ds, cap).unwrap();
        prop_assert!(net.topological_order().is_ok());
        prop_assert!((0..n).all(|i| net.parents(i).len() <= cap));
        prop_assert_eq!(&net, &greedy_build_network(&ds, cap).unwrap());
        let fitted = estimate_cpts(&net, &ds).unwrap();
        prop_assert!(fitted.cpts().unwrap().iter().flatten().all(|&p| p > 0.0 && p < 1.0));
    }

    #[test]
    fn fit_exponent_is_scale_invariant(exp in -2.0f64..3.0, coef in 0.01f64..100.0, scale in 0.001f64..1000.0, seed in any::<u64>()) {
        let mut rng = RandomSource::new(seed);
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 35.0, 50.0, 80.0].iter()
            .map(|&x: &f64| (x, coef * x.powf(exp) * (1.0 + 0.1 * (rng.uniform() - 0.5))))
            .collect();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x, scale * y)).collect();
        let a = fit_power_law(&pts).unwrap();
        let b = fit_power_law(&scaled).unwrap();
        prop_assert!((a.exponent - b.exponent).abs() < 1e-9);
        prop_assert!((b.coefficient / a.coefficient - scale).abs() < 1e-9 * scale);
        prop_assert!((a.r_squared - b.r_squared).abs() < 1e-9);
    }

    #[test]
    fn bisection_brackets_any_threshold(threshold in 2usize..=12_000, start in 2usize..=64) {
        let settings = BisectionSettings { start, ..BisectionSettings::default() };
        let res = bisect_with(&settings, &RandomSource::new(0), |size, _| Ok(Trial { passed: size >= threshold, runs: Vec::new() })).unwrap();
        let p = res.population_size;
        prop_assert!(p >= threshold);
        prop_assert!(res.verification.passed);
        prop_assert!(res.probes.iter().all(|pr| pr.population_size % 2 == 0 || pr.population_size == start));
        if let Some(lo) = res.lower {
            prop_assert!(lo < threshold);
            prop_assert!((p - lo) as f64 <= (4.0f64).max(0.1 * lo as f64) + 1.0);
        } else {
            prop_assert!(p <= start + 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn eda_invariants(seed in any::<u64>(), half in 4usize..=40, rbm in any::<bool>()) {
        let problem = ConcatTrap::new(3, 4).unwrap();
        let model = if rbm { ModelKind::Rbm } else { ModelKind::Boa };
        let pop = (2 * half).max(model.min_population());
        let mut cfg = EdaConfig::new(model, pop);
        cfg.max_generations = 12;
        let a = run_eda(&problem, &cfg, &mut RandomSource::new(seed)).unwrap();
        prop_assert_eq!(a.evaluations, pop + a.generations * pop / 2);
        prop_assert_eq!(a.final_population.len(), pop);
        prop_assert!(a.trace.windows(2).all(|w| w[1].best_fitness >= w[0].best_fitness));
        let b = run_eda(&problem, &cfg, &mut RandomSource::new(seed)).unwrap();
        prop_assert_eq!(a.evaluations, b.evaluations);
        prop_assert_eq!(&a.best, &b.best);
        prop_assert_eq!(a.final_population.genomes(), b.final_population.genomes());
        let fa: Vec<f64> = a.trace.iter().map(|t| t.mean_fitness).collect();
        let fb: Vec<f64> = b.trace.iter().map(|t| t.mean_fitness).collect();
        prop_assert_eq!(fa, fb);
    }

    #[test]
    fn csv_round_trip(seed in any::<u64>(), cells in 1usize..=6) {
        let mut rng = RandomSource::new(seed);
        let mut report = ScalingReport {
            name: "prop".into(),
            root_seed: seed,
            spec_hash: ExperimentSpec::new("prop", ProblemFamily::OneMax, vec![10, 20, 30], vec![ModelKind::Boa], seed).spec_hash(),
            timing_comparable: true,
            cells: Vec::new(),
            fits: Vec::new(),
            notes: Vec::new(),
        };
        for i in 0..cells {
            let mut c = CellResult::unsolved(ModelKind::Boa, "onemax", 10 * (i + 1), 0);
            if rng.bernoulli(0.7) {
                let v = |rng: &mut RandomSource| rng.uniform() * 1e4;
                c.pop_size = Some(2 * (1 + rng.below(1000)));
                c.runs = 30;
                c.success_rate = 1.0;
                c.mean_evals = Some(v(&mut rng));
                c.sd_evals = Some(v(&mut rng));
                c.t_select_ms = Some(v(&mut rng));
                c.t_model_ms = Some(v(&mut rng));
                c.t_sample_ms = Some(v(&mut rng));
                c.t_fitness_ms = Some(v(&mut rng));
                c.t_total_ms = Some(v(&mut rng));
            }
            report.cells.push(c);
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cells.csv");
        report.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        let provenance = lines.next().unwrap();
        let seed_tag = format!("root_seed={}", seed);
        prop_assert!(provenance.contains(&seed_tag) && provenance.contains(&report.spec_hash));
        prop_assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        prop_assert_eq!(ScalingReport::read_csv(&path).unwrap(), report.cells);
    }
}
