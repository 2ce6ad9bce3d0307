//! Population sizing: the smallest population for which a model reliably
//! solves a problem, found by doubling and then bisecting.

use serde::{Deserialize, Serialize};

use crate::bits::RandomSource;
use crate::eda::{run_eda, EdaConfig, PhaseTimes};
use crate::error::{invalid, Error, Result};
use crate::problems::{BenchmarkProblem, Problem};

pub const DEFAULT_START: usize = 16;
pub const DEFAULT_CAP: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionMode {
    /// Every run on a single problem must succeed.
    AllRuns,
    /// Every run on every instance must succeed at one shared size.
    PerInstance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessCriterion {
    pub mode: CriterionMode,
    /// Runs per problem in `AllRuns` mode.
    pub runs_per_trial: usize,
    /// Runs per instance in `PerInstance` mode.
    pub runs_per_instance: usize,
}

impl SuccessCriterion {
    /// 30 successes out of 30 runs.
    pub fn all_runs(runs: usize) -> Self {
        SuccessCriterion { mode: CriterionMode::AllRuns, runs_per_trial: runs, runs_per_instance: 5 }
    }

    /// 5 successes out of 5 runs on each instance.
    pub fn per_instance(runs: usize) -> Self {
        SuccessCriterion { mode: CriterionMode::PerInstance, runs_per_trial: 30, runs_per_instance: runs }
    }

    pub fn runs_per_problem(&self) -> usize {
        match self.mode {
            CriterionMode::AllRuns => self.runs_per_trial,
            CriterionMode::PerInstance => self.runs_per_instance,
        }
    }

    pub fn validate(&self, instances: usize) -> Result<()> {
        if self.runs_per_problem() == 0 {
            return Err(invalid("success criterion needs at least one run"));
        }
        match (self.mode, instances) {
            (_, 0) => Err(invalid("success criterion needs at least one problem")),
            (CriterionMode::AllRuns, 1) | (CriterionMode::PerInstance, _) => Ok(()),
            (CriterionMode::AllRuns, n) => Err(invalid(format!("all_runs mode takes one problem, got {n}"))),
        }
    }
}

impl Default for SuccessCriterion {
    fn default() -> Self {
        SuccessCriterion::all_runs(30)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisectionSettings {
    pub start: usize,
    pub cap: usize,
    /// Stop once `upper - lower <= max(min_resolution, relative_resolution * lower)`.
    pub min_resolution: usize,
    pub relative_resolution: f64,
    /// Abandon a probe at its first failed run.
    pub short_circuit: bool,
    /// Threads running the runs of one probe. Phase times are only
    /// comparable with a single worker.
    pub workers: usize,
}

impl Default for BisectionSettings {
    fn default() -> Self {
        BisectionSettings {
            start: DEFAULT_START,
            cap: DEFAULT_CAP,
            min_resolution: 4,
            relative_resolution: 0.1,
            short_circuit: true,
            workers: 1,
        }
    }
}

impl BisectionSettings {
    fn resolution(&self, lower: usize) -> f64 {
        (self.min_resolution as f64).max(self.relative_resolution * lower as f64)
    }
}

/// Outcome of one EDA run inside a probe.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub instance: usize,
    pub success: bool,
    pub evaluations: usize,
    pub generations: usize,
    pub times: PhaseTimes,
}

/// Outcome of testing one population size against the criterion.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Trial {
    pub passed: bool,
    pub runs: Vec<RunRecord>,
}

impl Trial {
    pub fn evaluations(&self) -> u64 {
        self.runs.iter().map(|r| r.evaluations as u64).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeLog {
    pub population_size: usize,
    pub passed: bool,
    pub runs: usize,
    pub evaluations: u64,
    pub verification: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BisectionResult {
    pub population_size: usize,
    /// Largest failing size seen below the result, if any.
    pub lower: Option<usize>,
    pub evaluations: u64,
    pub probes: Vec<ProbeLog>,
    /// (passing size, failing size at or above it) pairs.
    pub non_monotone: Vec<(usize, usize)>,
    /// The verification trial at `population_size`.
    pub verification: Trial,
}

fn even_up(n: usize) -> usize {
    n + n % 2
}

struct Search<F> {
    probe: F,
    rng: RandomSource,
    count: u64,
    probes: Vec<ProbeLog>,
    non_monotone: Vec<(usize, usize)>,
}

impl<F: FnMut(usize, &mut RandomSource) -> Result<Trial>> Search<F> {
    fn run(&mut self, size: usize, verification: bool) -> Result<Trial> {
        let mut rng = self.rng.derive(self.count);
        self.count += 1;
        let trial = (self.probe)(size, &mut rng)?;
        for p in &self.probes {
            if trial.passed && !p.passed && p.population_size >= size {
                self.non_monotone.push((size, p.population_size));
            }
            if !trial.passed && p.passed && p.population_size <= size {
                self.non_monotone.push((p.population_size, size));
            }
        }
        self.probes.push(ProbeLog {
            population_size: size,
            passed: trial.passed,
            runs: trial.runs.len(),
            evaluations: trial.evaluations(),
            verification,
        });
        Ok(trial)
    }
}

/// Doubles from `settings.start` (the last step clamped to the cap) until
/// `probe` passes, bisects the bracket down to the resolution, then
/// re-checks the upper end with fresh seeds.
/// A failed re-check makes that size the new lower end and the search
/// resumes above it.
pub fn bisect_with<F>(settings: &BisectionSettings, rng: &RandomSource, probe: F) -> Result<BisectionResult>
where
    F: FnMut(usize, &mut RandomSource) -> Result<Trial>,
{
    if settings.start < 2 || settings.cap < settings.start {
        return Err(invalid("bisection needs 2 <= start <= cap"));
    }
    let mut search = Search { probe, rng: rng.clone(), count: 0, probes: Vec::new(), non_monotone: Vec::new() };
    let mut lower: Option<usize> = None;
    let top = settings.cap - settings.cap % 2;
    let mut next = even_up(settings.start).min(top);
    loop {
        let mut upper = loop {
            if search.run(next, false)?.passed {
                break next;
            }
            lower = Some(next);
            if next >= top {
                return Err(Error::Unsolved { cap: settings.cap });
            }
            next = (next * 2).min(top);
        };
        while let Some(lo) = lower {
            if (upper - lo) as f64 <= settings.resolution(lo) {
                break;
            }
            let mid = even_up(lo + (upper - lo) / 2);
            if mid <= lo || mid >= upper {
                break;
            }
            if search.run(mid, false)?.passed {
                upper = mid;
            } else {
                lower = Some(mid);
            }
        }
        let verification = search.run(upper, true)?;
        if verification.passed {
            let evaluations = search.probes.iter().map(|p| p.evaluations).sum();
            return Ok(BisectionResult {
                population_size: upper,
                lower,
                evaluations,
                probes: search.probes,
                non_monotone: search.non_monotone,
                verification,
            });
        }
        lower = Some(upper);
        if upper >= top {
            return Err(Error::Unsolved { cap: settings.cap });
        }
        next = (upper * 2).min(top);
    }
}

/// Runs the criterion's runs at one population size. Run `r` on instance `i`
/// uses seed stream `i * runs + r` of `rng`, so the records do not depend on
/// the worker count.
pub fn run_trial(
    instances: &[BenchmarkProblem],
    base: &EdaConfig,
    criterion: &SuccessCriterion,
    population_size: usize,
    rng: &RandomSource,
    settings: &BisectionSettings,
) -> Result<Trial> {
    criterion.validate(instances.len())?;
    let runs = criterion.runs_per_problem();
    let mut cfg = base.clone();
    cfg.population_size = population_size;
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..instances.len()).flat_map(|i| (0..runs).map(move |r| (i, r))).collect();
    let one = |&(i, r): &(usize, usize)| -> Result<RunRecord> {
        let mut run_rng = rng.derive((i * runs + r) as u64);
        let res = run_eda(&instances[i], &cfg, &mut run_rng)?;
        Ok(RunRecord {
            instance: i,
            success: res.success,
            evaluations: res.evaluations,
            generations: res.generations,
            times: res.times,
        })
    };
    let mut trial = Trial { passed: true, runs: Vec::with_capacity(jobs.len()) };
    for wave in jobs.chunks(settings.workers.max(1)) {
        let records: Vec<Result<RunRecord>> = if wave.len() == 1 {
            vec![one(&wave[0])]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = wave.iter().map(|job| scope.spawn(|| one(job))).collect();
                handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
            })
        };
        for rec in records {
            let rec = rec?;
            let failed = !rec.success;
            trial.runs.push(rec);
            if failed {
                trial.passed = false;
                if settings.short_circuit {
                    return Ok(trial);
                }
            }
        }
    }
    Ok(trial)
}

/// Smallest population (within the resolution) at which `base.model` meets
/// `criterion` on every instance.
pub fn bisect_population_size(
    instances: &[BenchmarkProblem],
    base: &EdaConfig,
    criterion: &SuccessCriterion,
    settings: &BisectionSettings,
    rng: &RandomSource,
) -> Result<BisectionResult> {
    criterion.validate(instances.len())?;
    if let Some(p) = instances.iter().find(|p| p.len() != instances[0].len()) {
        return Err(Error::LengthMismatch { expected: instances[0].len(), actual: p.len() });
    }
    let mut settings = settings.clone();
    settings.start = settings.start.max(base.model.min_population());
    bisect_with(&settings, rng, |size, probe_rng| {
        run_trial(instances, base, criterion, size, probe_rng, &settings)
    })
}
