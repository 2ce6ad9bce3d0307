//! The generational EDA loop, generic over the probabilistic model, with
//! per-phase wall-clock accounting.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bits::{random_population, EvaluatedGenome, Genome, Population, RandomSource};
use crate::boa::{estimate_cpts, greedy_build_network, sample_network, BayesianNetwork, ScoredDataset, DEFAULT_MAX_INDEGREE};
use crate::error::{invalid, Error, Result};
use crate::problems::Problem;
use crate::rbm::{init_rbm, sample_candidates, train_session, Rbm, SampleConfig, TrainConfig, TrainReport, TrainState};
use crate::selection::{tournament_select, SelectionConfig};

/// A probabilistic model that can be fitted to parents and sampled.
pub trait ModelBuilder {
    fn build(&mut self, parents: &[Genome], rng: &mut RandomSource) -> Result<()>;

    fn sample(&mut self, parents: &[Genome], count: usize, rng: &mut RandomSource) -> Result<Vec<Genome>>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Rbm,
    Boa,
}

impl ModelKind {
    /// Smallest population whose parent set the model can be built from.
    pub fn min_population(self) -> usize {
        match self {
            // 20 training vectors for a non-degenerate validation split
            ModelKind::Rbm => 40,
            ModelKind::Boa => 4,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            ModelKind::Rbm => "rbm",
            ModelKind::Boa => "boa",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rbm" => Ok(ModelKind::Rbm),
            "boa" => Ok(ModelKind::Boa),
            other => Err(invalid(format!("unknown model kind {other:?}"))),
        }
    }
}

/// RBM fitted to the parents every generation; candidates come from Gibbs
/// chains seeded with the parents. With `warm_start` the machine, its
/// momentum buffers and its learning schedule persist across generations of
/// a run and each generation continues training; otherwise every generation
/// starts from a fresh `init_rbm`.
#[derive(Clone, Debug)]
pub struct RbmModel {
    pub train: TrainConfig,
    pub gibbs_steps: usize,
    pub warm_start: bool,
    rbm: Option<(Rbm, TrainState)>,
    pub last_report: Option<TrainReport>,
}

impl RbmModel {
    pub fn new(train: TrainConfig, gibbs_steps: usize, warm_start: bool) -> Self {
        RbmModel { train, gibbs_steps, warm_start, rbm: None, last_report: None }
    }

    pub fn rbm(&self) -> Option<&Rbm> {
        self.rbm.as_ref().map(|(r, _)| r)
    }
}

impl ModelBuilder for RbmModel {
    fn build(&mut self, parents: &[Genome], rng: &mut RandomSource) -> Result<()> {
        let n = parents.first().ok_or_else(|| invalid("no parents"))?.len();
        let reuse = self.warm_start && self.rbm.as_ref().is_some_and(|(r, _)| r.n_visible() == n);
        if !reuse {
            let rbm = init_rbm(n, parents, rng)?;
            let state = TrainState::new(&rbm, &self.train);
            self.rbm = Some((rbm, state));
        }
        let (rbm, state) = self.rbm.as_mut().expect("model initialised above");
        self.last_report = Some(train_session(rbm, state, parents, &self.train, rng)?);
        Ok(())
    }

    fn sample(&mut self, parents: &[Genome], count: usize, rng: &mut RandomSource) -> Result<Vec<Genome>> {
        let rbm = self.rbm().ok_or_else(|| invalid("sample called before build"))?;
        sample_candidates(rbm, parents, &SampleConfig { gibbs_steps: self.gibbs_steps, count }, rng)
    }
}

/// Bayesian network rebuilt from the empty graph every generation.
#[derive(Clone, Debug)]
pub struct BoaModel {
    pub max_indegree: usize,
    net: Option<BayesianNetwork>,
}

impl BoaModel {
    pub fn new(max_indegree: usize) -> Self {
        BoaModel { max_indegree, net: None }
    }

    pub fn network(&self) -> Option<&BayesianNetwork> {
        self.net.as_ref()
    }
}

impl ModelBuilder for BoaModel {
    fn build(&mut self, parents: &[Genome], _rng: &mut RandomSource) -> Result<()> {
        let data = ScoredDataset::new(parents)?;
        let structure = greedy_build_network(&data, self.max_indegree)?;
        self.net = Some(estimate_cpts(&structure, &data)?);
        Ok(())
    }

    fn sample(&mut self, _parents: &[Genome], count: usize, rng: &mut RandomSource) -> Result<Vec<Genome>> {
        let net = self.net.as_ref().ok_or_else(|| invalid("sample called before build"))?;
        sample_network(net, count, rng)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdaConfig {
    pub model: ModelKind,
    pub population_size: usize,
    pub parent_fraction: f64,
    pub max_generations: usize,
    /// Falls back to the problem's known optimum when unset.
    pub target_fitness: Option<f64>,
    pub stagnation_limit: usize,
    pub rbm_train: TrainConfig,
    pub rbm_gibbs_steps: usize,
    pub rbm_warm_start: bool,
    pub boa_max_indegree: usize,
}

impl EdaConfig {
    pub fn new(model: ModelKind, population_size: usize) -> Self {
        EdaConfig {
            model,
            population_size,
            parent_fraction: 0.5,
            max_generations: 500,
            target_fitness: None,
            stagnation_limit: 100,
            rbm_train: TrainConfig::default(),
            rbm_gibbs_steps: 25,
            rbm_warm_start: true,
            boa_max_indegree: DEFAULT_MAX_INDEGREE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 || self.population_size % 2 != 0 {
            return Err(invalid(format!("population size must be even and at least 4, got {}", self.population_size)));
        }
        if self.max_generations == 0 {
            return Err(invalid("max_generations must be at least 1"));
        }
        SelectionConfig::new(self.parent_fraction)?;
        Ok(())
    }

    pub fn model_builder(&self) -> Box<dyn ModelBuilder> {
        match self.model {
            ModelKind::Rbm => Box::new(RbmModel::new(self.rbm_train.clone(), self.rbm_gibbs_steps, self.rbm_warm_start)),
            ModelKind::Boa => Box::new(BoaModel::new(self.boa_max_indegree)),
        }
    }
}

/// Accumulated wall-clock time per phase.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimes {
    pub selection: Duration,
    pub model: Duration,
    pub sampling: Duration,
    pub fitness: Duration,
}

impl PhaseTimes {
    pub fn total(&self) -> Duration {
        self.selection + self.model + self.sampling + self.fitness
    }

    pub fn add(&mut self, other: &PhaseTimes) {
        self.selection += other.selection;
        self.model += other.model;
        self.sampling += other.sampling;
        self.fitness += other.fitness;
    }

    /// Shares of (selection, model, sampling, fitness) in the phase total.
    pub fn fractions(&self) -> [f64; 4] {
        let parts = [self.selection, self.model, self.sampling, self.fitness].map(|d| d.as_secs_f64());
        let total: f64 = parts.iter().sum();
        if total > 0.0 {
            parts.map(|p| p / total)
        } else {
            [0.0; 4]
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub evaluations: usize,
    pub times: PhaseTimes,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub success: bool,
    pub evaluations: usize,
    pub generations: usize,
    pub times: PhaseTimes,
    /// Wall time of the whole run, initial population included.
    pub loop_wall: Duration,
    pub trace: Vec<GenerationStats>,
    pub best: EvaluatedGenome,
    pub final_population: Population,
}

fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot += start.elapsed();
    out
}

/// Runs the EDA with the model selected by `cfg.model`.
pub fn run_eda<P: Problem + ?Sized>(problem: &P, cfg: &EdaConfig, rng: &mut RandomSource) -> Result<RunResult> {
    let mut model = cfg.model_builder();
    run_eda_with_model(problem, cfg, model.as_mut(), rng)
}

/// Select, build, sample, evaluate and merge until the target is reached,
/// `max_generations` pass, or the best fitness stalls for
/// `stagnation_limit` generations.
pub fn run_eda_with_model<P: Problem + ?Sized>(
    problem: &P,
    cfg: &EdaConfig,
    model: &mut dyn ModelBuilder,
    rng: &mut RandomSource,
) -> Result<RunResult> {
    cfg.validate()?;
    let target = cfg
        .target_fitness
        .or_else(|| problem.optimum())
        .ok_or_else(|| invalid("no target fitness configured and the problem has no known optimum"))?;
    let selection = SelectionConfig::new(cfg.parent_fraction)?;
    let n = problem.len();

    let start = Instant::now();
    let mut times = PhaseTimes::default();
    let mut pop = {
        let mut init_times = PhaseTimes::default();
        let p = timed(&mut init_times.fitness, || random_population(n, cfg.population_size, rng, problem))?;
        times.add(&init_times);
        p
    };
    let mut evaluations = cfg.population_size;
    let mut best = pop.best().clone();
    let mut trace = vec![GenerationStats {
        generation: 0,
        best_fitness: best.fitness,
        mean_fitness: pop.mean_fitness(),
        evaluations,
        times,
    }];
    let mut generation = 0;
    let mut stalled = 0;

    while best.fitness < target && generation < cfg.max_generations && stalled < cfg.stagnation_limit {
        generation += 1;
        let mut gen_times = PhaseTimes::default();
        let parents = timed(&mut gen_times.selection, || tournament_select(&pop, &selection, rng))?;
        let parent_genomes = parents.genomes();
        timed(&mut gen_times.model, || model.build(&parent_genomes, rng))?;
        let count = cfg.population_size - parents.len();
        let candidates = timed(&mut gen_times.sampling, || model.sample(&parent_genomes, count, rng))?;
        if candidates.len() != count {
            return Err(invalid(format!("model produced {} candidates, expected {count}", candidates.len())));
        }
        if let Some(g) = candidates.iter().find(|g| g.len() != n) {
            return Err(Error::LengthMismatch { expected: n, actual: g.len() });
        }
        let evaluated: Vec<EvaluatedGenome> = timed(&mut gen_times.fitness, || {
            candidates.into_iter().map(|g| EvaluatedGenome::evaluate(g, problem)).collect()
        });
        evaluations += evaluated.len();
        let mut members = parents.into_members();
        members.extend(evaluated);
        pop = Population::new(members)?;

        let gen_best = pop.best();
        if gen_best.fitness > best.fitness {
            best = gen_best.clone();
            stalled = 0;
        } else {
            stalled += 1;
        }
        times.add(&gen_times);
        trace.push(GenerationStats {
            generation,
            best_fitness: best.fitness,
            mean_fitness: pop.mean_fitness(),
            evaluations,
            times: gen_times,
        });
    }

    Ok(RunResult {
        success: best.fitness >= target,
        evaluations,
        generations: generation,
        times,
        loop_wall: start.elapsed(),
        trace,
        best,
        final_population: pop,
    })
}

/// Checks that `problem` matches the configured genome length.
pub fn check_problem_len<P: Problem + ?Sized>(problem: &P, expected: usize) -> Result<()> {
    if problem.len() != expected {
        return Err(Error::LengthMismatch { expected, actual: problem.len() });
    }
    Ok(())
}
