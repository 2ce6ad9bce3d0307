use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bisection::{bisect_population_size, RunRecord};
use crate::bits::RandomSource;
use crate::eda::{EdaConfig, ModelKind, PhaseTimes};
use crate::error::{Error, Result};

use super::fit::{fit_power_law, PowerLawFit};
use super::spec::ExperimentSpec;

/// Fixed CSV header of the cell table.
pub const CSV_HEADER: [&str; 14] = [
    "model",
    "problem",
    "size",
    "k",
    "pop_size",
    "runs",
    "success_rate",
    "mean_evals",
    "sd_evals",
    "t_select_ms",
    "t_model_ms",
    "t_sample_ms",
    "t_fitness_ms",
    "t_total_ms",
];

/// One (model, size) cell: the bisected population and the statistics of
/// the verification runs at that size. Unsolved cells leave the optional
/// columns empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub model: ModelKind,
    pub problem: String,
    pub size: usize,
    pub k: usize,
    pub pop_size: Option<usize>,
    pub runs: usize,
    pub success_rate: f64,
    pub mean_evals: Option<f64>,
    pub sd_evals: Option<f64>,
    pub t_select_ms: Option<f64>,
    pub t_model_ms: Option<f64>,
    pub t_sample_ms: Option<f64>,
    pub t_fitness_ms: Option<f64>,
    pub t_total_ms: Option<f64>,
}

impl CellResult {
    pub fn solved(&self) -> bool {
        self.pop_size.is_some()
    }

    pub fn unsolved(model: ModelKind, problem: &str, size: usize, k: usize) -> Self {
        CellResult {
            model,
            problem: problem.to_string(),
            size,
            k,
            pop_size: None,
            runs: 0,
            success_rate: 0.0,
            mean_evals: None,
            sd_evals: None,
            t_select_ms: None,
            t_model_ms: None,
            t_sample_ms: None,
            t_fitness_ms: None,
            t_total_ms: None,
        }
    }

    /// Aggregates the verification runs recorded at `pop_size`.
    pub fn from_runs(model: ModelKind, problem: &str, size: usize, k: usize, pop_size: usize, runs: &[RunRecord]) -> Self {
        let n = runs.len() as f64;
        let evals: Vec<f64> = runs.iter().map(|r| r.evaluations as f64).collect();
        let mean = evals.iter().sum::<f64>() / n;
        let sd = if runs.len() > 1 {
            (evals.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let ms = |f: fn(&PhaseTimes) -> f64| Some(runs.iter().map(|r| f(&r.times)).sum::<f64>() / n);
        CellResult {
            model,
            problem: problem.to_string(),
            size,
            k,
            pop_size: Some(pop_size),
            runs: runs.len(),
            success_rate: runs.iter().filter(|r| r.success).count() as f64 / n,
            mean_evals: Some(mean),
            sd_evals: Some(sd),
            t_select_ms: ms(|t| t.selection.as_secs_f64() * 1e3),
            t_model_ms: ms(|t| t.model.as_secs_f64() * 1e3),
            t_sample_ms: ms(|t| t.sampling.as_secs_f64() * 1e3),
            t_fitness_ms: ms(|t| t.fitness.as_secs_f64() * 1e3),
            t_total_ms: ms(|t| t.total().as_secs_f64() * 1e3),
        }
    }

    /// Phase times (selection, model, sampling, fitness) in ms.
    pub fn phase_ms(&self) -> Option<[f64; 4]> {
        Some([self.t_select_ms?, self.t_model_ms?, self.t_sample_ms?, self.t_fitness_ms?])
    }

    /// Phase shares of the phase total; they sum to one.
    pub fn phase_shares(&self) -> Option<[f64; 4]> {
        let ms = self.phase_ms()?;
        let total: f64 = ms.iter().sum();
        (total > 0.0).then(|| ms.map(|m| m / total))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitQuantity {
    Evaluations,
    Time,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub model: ModelKind,
    pub quantity: FitQuantity,
    pub fit: PowerLawFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub name: String,
    pub root_seed: u64,
    pub spec_hash: String,
    /// False when runs were spread over several workers, which makes the
    /// phase times incomparable with single-core timings.
    pub timing_comparable: bool,
    pub cells: Vec<CellResult>,
    pub fits: Vec<FitRow>,
    pub notes: Vec<String>,
}

impl ScalingReport {
    pub fn all_solved(&self) -> bool {
        self.cells.iter().all(CellResult::solved)
    }

    pub fn cell(&self, model: ModelKind, size: usize) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.model == model && c.size == size)
    }

    pub fn fit(&self, model: ModelKind, quantity: FitQuantity) -> Option<&PowerLawFit> {
        self.fits.iter().find(|f| f.model == model && f.quantity == quantity).map(|f| &f.fit)
    }

    /// Recomputes the power-law fits from the solved cells; models with
    /// fewer than three solved sizes get none.
    pub fn refit(&mut self) {
        let mut models: Vec<ModelKind> = self.cells.iter().map(|c| c.model).collect();
        models.sort();
        models.dedup();
        self.fits.clear();
        for model in models {
            for quantity in [FitQuantity::Evaluations, FitQuantity::Time] {
                let points: Vec<(f64, f64)> = self
                    .cells
                    .iter()
                    .filter(|c| c.model == model)
                    .filter_map(|c| {
                        let y = match quantity {
                            FitQuantity::Evaluations => c.mean_evals?,
                            FitQuantity::Time => c.t_total_ms?,
                        };
                        Some((c.size as f64, y))
                    })
                    .collect();
                if let Ok(fit) = fit_power_law(&points) {
                    self.fits.push(FitRow { model, quantity, fit });
                }
            }
        }
    }

    fn provenance(&self) -> String {
        format!("# root_seed={} spec_hash={}", self.root_seed, self.spec_hash)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut file = fs::File::create(path)?;
        writeln!(file, "{}", self.provenance())?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        w.write_record(CSV_HEADER)?;
        for c in &self.cells {
            w.serialize(c)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the cell table back; `#` lines are skipped.
    pub fn read_csv(path: &Path) -> Result<Vec<CellResult>> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != CSV_HEADER {
            return Err(Error::Parse { line: 2, msg: format!("unexpected CSV header {header:?}") });
        }
        r.deserialize().map(|row| row.map_err(Error::from)).collect()
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// Plain-text table of the cells and fits.
    pub fn summary(&self) -> String {
        let mut out = format!("{} (seed {}, spec {})\n", self.name, self.root_seed, &self.spec_hash[..12.min(self.spec_hash.len())]);
        out.push_str("model problem  size  k   pop_size  success  mean_evals    t_total_ms  model_share\n");
        let opt = |v: Option<f64>, prec: usize| v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$}"));
        for c in &self.cells {
            out.push_str(&format!(
                "{:<5} {:<8} {:>4} {:>2} {:>10} {:>8.2} {:>11} {:>13} {:>12}\n",
                c.model,
                c.problem,
                c.size,
                c.k,
                c.pop_size.map_or_else(|| "unsolved".to_string(), |p| p.to_string()),
                c.success_rate,
                opt(c.mean_evals, 1),
                opt(c.t_total_ms, 1),
                opt(c.phase_shares().map(|s| s[1]), 3),
            ));
        }
        for f in &self.fits {
            out.push_str(&format!(
                "fit {:<4} {:<11} exponent {:.3} ± {:.3}  coefficient {:.4e}  R² {:.4}  ({} sizes)\n",
                f.model.to_string(),
                format!("{:?}", f.quantity).to_lowercase(),
                f.fit.exponent,
                f.fit.exponent_stderr,
                f.fit.coefficient,
                f.fit.r_squared,
                f.fit.points
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

/// Paths written by [`run_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub plots: Vec<PathBuf>,
}

/// Seed stream of one (model, size) cell.
fn cell_rng(root_seed: u64, model: ModelKind, size: usize) -> RandomSource {
    let model_index = match model {
        ModelKind::Rbm => 0,
        ModelKind::Boa => 1,
    };
    RandomSource::new(root_seed).derive(size as u64).derive(model_index)
}

/// Bisects and aggregates every (model, size) cell without writing files.
/// Unsolved cells are recorded and the sweep continues.
pub fn run_cells(spec: &ExperimentSpec, mut progress: impl FnMut(&CellResult)) -> Result<ScalingReport> {
    spec.validate()?;
    let mut report = ScalingReport {
        name: spec.name.clone(),
        root_seed: spec.root_seed,
        spec_hash: spec.spec_hash(),
        timing_comparable: spec.bisection.workers <= 1,
        cells: Vec::new(),
        fits: Vec::new(),
        notes: Vec::new(),
    };
    let problem = spec.family.name();
    let k = spec.family.k();
    for &size in &spec.sizes {
        let instances = spec.family.instances(size, spec.root_seed)?;
        for &model in &spec.models {
            let mut cfg = EdaConfig::new(model, spec.bisection.start.max(model.min_population()));
            cfg.max_generations = spec.max_generations;
            cfg.stagnation_limit = spec.stagnation_limit;
            let rng = cell_rng(spec.root_seed, model, size);
            let cell = match bisect_population_size(&instances, &cfg, &spec.criterion, &spec.bisection, &rng) {
                Ok(res) => {
                    for (pass, fail) in &res.non_monotone {
                        report.notes.push(format!("{model} {problem} l={size}: passed at {pass} but failed at {fail}"));
                    }
                    CellResult::from_runs(model, problem, size, k, res.population_size, &res.verification.runs)
                }
                Err(Error::Unsolved { cap }) => {
                    report.notes.push(format!("{model} {problem} l={size}: unsolved below population {cap}"));
                    CellResult::unsolved(model, problem, size, k)
                }
                Err(e) => return Err(e),
            };
            progress(&cell);
            report.cells.push(cell);
        }
    }
    report.refit();
    Ok(report)
}

/// Runs the sweep and writes `cells.csv`, `report.json` and the plot tables
/// into `spec.out_dir`.
pub fn run_experiment(spec: &ExperimentSpec, progress: impl FnMut(&CellResult)) -> Result<(ScalingReport, Artifacts)> {
    let report = run_cells(spec, progress)?;
    let artifacts = write_artifacts(&report, &spec.out_dir)?;
    Ok((report, artifacts))
}

pub fn write_artifacts(report: &ScalingReport, dir: &Path) -> Result<Artifacts> {
    fs::create_dir_all(dir)?;
    let csv = dir.join("cells.csv");
    let json = dir.join("report.json");
    report.write_csv(&csv)?;
    report.write_json(&json)?;
    let plots = emit_plot_data(report, dir)?;
    Ok(Artifacts { csv, json, plots })
}

/// Writes one whitespace-separated table per figure: evaluations and total
/// time against size, and absolute and relative phase breakdowns. Each
/// model is a separate block, so gnuplot can address it with `index`.
pub fn emit_plot_data(report: &ScalingReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut models: Vec<ModelKind> = report.cells.iter().map(|c| c.model).collect();
    models.sort();
    models.dedup();
    let tables: [(&str, &str, fn(&CellResult) -> Option<Vec<f64>>); 4] = [
        ("evaluations.dat", "size mean_evals sd_evals", |c| Some(vec![c.mean_evals?, c.sd_evals?])),
        ("time.dat", "size t_total_ms", |c| Some(vec![c.t_total_ms?])),
        ("phases_abs.dat", "size select_ms model_ms sample_ms fitness_ms", |c| c.phase_ms().map(|a| a.to_vec())),
        ("phases_rel.dat", "size select model sample fitness", |c| c.phase_shares().map(|a| a.to_vec())),
    ];
    let mut paths = Vec::new();
    for (file, columns, row) in tables {
        let mut text = format!("{}\n", report.provenance());
        for (i, model) in models.iter().enumerate() {
            if i > 0 {
                text.push_str("\n\n");
            }
            text.push_str(&format!("# model {model}\n# {columns}\n"));
            for c in report.cells.iter().filter(|c| c.model == *model) {
                if let Some(values) = row(c) {
                    text.push_str(&c.size.to_string());
                    for v in values {
                        text.push_str(&format!(" {v:.9e}"));
                    }
                    text.push('\n');
                }
            }
        }
        let path = dir.join(file);
        fs::write(&path, text)?;
        paths.push(path);
    }
    Ok(paths)
}
