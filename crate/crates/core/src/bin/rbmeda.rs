use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rbmeda::bisection::{bisect_population_size, BisectionSettings, DEFAULT_CAP, DEFAULT_START};
use rbmeda::experiment::{parse_list, run_experiment, write_artifacts, ExperimentSpec, ProblemFamily, ScalingReport};
use rbmeda::problems::{nk_brute_force_optimum, BenchmarkProblem, NkLandscape};
use rbmeda::{run_eda, EdaConfig, Error, ModelKind, Problem, RandomSource};

/// RBM-EDA and BOA on onemax, deceptive traps and NK landscapes.
#[derive(Parser, Debug)]
#[command(name = "rbmeda", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find the smallest reliable population for one model on one problem size.
    Bisect(BisectArgs),
    /// Run the EDA a number of times at a fixed population size.
    Run(RunArgs),
    /// Bisect every (model, size) cell of a grid and write CSV, JSON and plot tables.
    Sweep(SweepArgs),
    /// Print a saved report, optionally refitting and rewriting its artifacts.
    Report(ReportArgs),
    /// Generate NK landscape instance files.
    GenNk(GenNkArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Onemax,
    Trap,
    Nk,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    #[arg(long, value_enum)]
    problem: Family,
    /// Trap order or NK epistasis.
    #[arg(long)]
    k: Option<usize>,
    /// Number of generated NK instances.
    #[arg(long, default_value_t = 25)]
    instances: usize,
    /// NK instance files to use instead of generated ones.
    #[arg(long = "nk-file", value_name = "PATH")]
    nk_files: Vec<PathBuf>,
}

impl ProblemArgs {
    fn family(&self) -> Result<ProblemFamily, String> {
        let k = || self.k.ok_or_else(|| format!("--problem {:?} needs --k", self.problem).to_lowercase());
        Ok(match self.problem {
            Family::Onemax => ProblemFamily::OneMax,
            Family::Trap => ProblemFamily::Trap { k: k()? },
            Family::Nk => ProblemFamily::Nk { k: k()?, instances: self.instances },
        })
    }

    fn problems(&self, size: usize, seed: u64) -> Result<Vec<BenchmarkProblem>, Failure> {
        if !self.nk_files.is_empty() {
            return self
                .nk_files
                .iter()
                .map(|p| Ok(BenchmarkProblem::nk_with_optimum(read_nk(p)?)?))
                .collect();
        }
        Ok(self.family().map_err(Failure::Usage)?.instances(size, seed)?)
    }
}

#[derive(Args, Debug)]
struct EngineArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    max_generations: usize,
    /// Generations without improvement of the best fitness before a run gives up.
    #[arg(long, default_value_t = 100)]
    stagnation_limit: usize,
}

impl EngineArgs {
    fn config(&self, model: ModelKind, population_size: usize) -> EdaConfig {
        let mut cfg = EdaConfig::new(model, population_size);
        cfg.max_generations = self.max_generations;
        cfg.stagnation_limit = self.stagnation_limit;
        cfg
    }
}

#[derive(Args, Debug)]
struct BisectArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Genome length (N for NK).
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    model: ModelKind,
    #[command(flatten)]
    engine: EngineArgs,
    /// Runs per problem instance (default 30, or 5 for NK).
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_START)]
    start: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    model: ModelKind,
    #[arg(long)]
    pop: usize,
    /// Runs per problem instance.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Experiment file with one `[name]` section per sweep; replaces the grid flags.
    #[arg(long, conflicts_with_all = ["problem", "sizes"])]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    problem: Option<Family>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 25)]
    instances: usize,
    /// Comma-separated, strictly increasing.
    #[arg(long)]
    sizes: Option<String>,
    /// Comma-separated model kinds.
    #[arg(long, default_value = "rbm,boa")]
    model: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    start: Option<usize>,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    max_generations: Option<usize>,
    #[arg(long)]
    stagnation_limit: Option<usize>,
    /// More than one worker marks phase timings as not comparable.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// A sweep output directory or its report.json.
    #[arg(long)]
    input: PathBuf,
    /// Recompute the fits and rewrite CSV, JSON and plot tables into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenNkArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    out: PathBuf,
    /// Also report each instance's brute-force optimum.
    #[arg(long)]
    optimum: bool,
}

enum Failure {
    Usage(String),
    Unsolved(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Bisect(a) => bisect(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Report(a) => report(a),
        Command::GenNk(a) => gen_nk(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Unsolved(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn read_nk(path: &Path) -> Result<NkLandscape, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(NkLandscape::parse(&text)?)
}

fn required_size(size: Option<usize>, problem: &ProblemArgs) -> Result<usize, Failure> {
    match (size, problem.nk_files.is_empty()) {
        (Some(s), _) => Ok(s),
        (None, false) => Ok(0),
        (None, true) => Err(Failure::Usage("--size is required".into())),
    }
}

fn bisect(a: BisectArgs) -> Result<(), Failure> {
    let size = required_size(a.size, &a.problem)?;
    let instances = a.problem.problems(size, a.engine.seed)?;
    let family = a.problem.family().map_err(Failure::Usage)?;
    let mut criterion = family.default_criterion();
    if let Some(runs) = a.runs {
        criterion.runs_per_trial = runs;
        criterion.runs_per_instance = runs;
    }
    let settings = BisectionSettings { start: a.start, cap: a.cap, workers: a.workers, ..BisectionSettings::default() };
    let cfg = a.engine.config(a.model, settings.start.max(a.model.min_population()));
    let rng = RandomSource::new(a.engine.seed);
    let res = match bisect_population_size(&instances, &cfg, &criterion, &settings, &rng) {
        Ok(res) => res,
        Err(Error::Unsolved { cap }) => {
            return Err(Failure::Unsolved(format!("{} {family} l={size}: unsolved below population {cap}", a.model)))
        }
        Err(e) => return Err(e.into()),
    };
    for p in &res.probes {
        println!(
            "probe pop={} passed={} runs={} evaluations={}{}",
            p.population_size,
            p.passed,
            p.runs,
            p.evaluations,
            if p.verification { " verification" } else { "" }
        );
    }
    for (pass, fail) in &res.non_monotone {
        println!("non-monotone: passed at {pass}, failed at {fail}");
    }
    let runs = &res.verification.runs;
    let mean = runs.iter().map(|r| r.evaluations as f64).sum::<f64>() / runs.len().max(1) as f64;
    println!(
        "result model={} problem={family} size={} pop={} lower={} mean_evals={mean:.1} total_evals={}",
        a.model,
        instances[0].len(),
        res.population_size,
        res.lower.map_or_else(|| "-".to_string(), |l| l.to_string()),
        res.evaluations
    );
    Ok(())
}

fn run(a: RunArgs) -> Result<(), Failure> {
    let size = required_size(a.size, &a.problem)?;
    if a.runs == 0 {
        return Err(Failure::Usage("--runs must be at least 1".into()));
    }
    let instances = a.problem.problems(size, a.engine.seed)?;
    let cfg = a.engine.config(a.model, a.pop);
    let root = RandomSource::new(a.engine.seed);
    let mut solved = 0;
    for (i, problem) in instances.iter().enumerate() {
        for r in 0..a.runs {
            let res = run_eda(problem, &cfg, &mut root.derive((i * a.runs + r) as u64))?;
            let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
            println!(
                "instance={i} run={r} success={} evaluations={} generations={} best={} t_select_ms={:.2} t_model_ms={:.2} t_sample_ms={:.2} t_fitness_ms={:.2}",
                res.success,
                res.evaluations,
                res.generations,
                res.best.fitness,
                ms(res.times.selection),
                ms(res.times.model),
                ms(res.times.sampling),
                ms(res.times.fitness)
            );
            solved += res.success as usize;
        }
    }
    println!("solved {solved}/{} on {}", instances.len() * a.runs, instances[0].name());
    Ok(())
}

fn sweep_specs(a: &SweepArgs) -> Result<Vec<ExperimentSpec>, Failure> {
    let mut specs = if let Some(path) = &a.config {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        ExperimentSpec::parse_config(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    } else {
        let problem = a.problem.ok_or_else(|| Failure::Usage("--problem or --config is required".into()))?;
        let sizes = a.sizes.as_deref().ok_or_else(|| Failure::Usage("--sizes is required".into()))?;
        let family = ProblemArgs { problem, k: a.k, instances: a.instances, nk_files: Vec::new() }
            .family()
            .map_err(Failure::Usage)?;
        let sizes = parse_list::<usize>(sizes).map_err(|m| Failure::Usage(format!("--sizes: {m}")))?;
        let models = parse_list::<ModelKind>(&a.model).map_err(|m| Failure::Usage(format!("--model: {m}")))?;
        vec![ExperimentSpec::new(&family.to_string(), family, sizes, models, a.seed)]
    };
    for spec in &mut specs {
        if let Some(runs) = a.runs {
            spec.criterion.runs_per_trial = runs;
            spec.criterion.runs_per_instance = runs;
        }
        if let Some(v) = a.start {
            spec.bisection.start = v;
        }
        if let Some(v) = a.cap {
            spec.bisection.cap = v;
        }
        if let Some(v) = a.workers {
            spec.bisection.workers = v;
        }
        if let Some(v) = a.max_generations {
            spec.max_generations = v;
        }
        if let Some(v) = a.stagnation_limit {
            spec.stagnation_limit = v;
        }
        if let Some(out) = &a.out {
            spec.out_dir = if a.config.is_some() { out.join(&spec.name) } else { out.clone() };
        }
        spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(specs)
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let specs = sweep_specs(&a)?;
    let mut unsolved = 0;
    for spec in &specs {
        eprintln!("sweep {} -> {}", spec.name, spec.out_dir.display());
        let (report, artifacts) = run_experiment(spec, |c| {
            eprintln!(
                "cell model={} problem={} size={} pop={} mean_evals={}",
                c.model,
                c.problem,
                c.size,
                c.pop_size.map_or_else(|| "unsolved".to_string(), |p| p.to_string()),
                c.mean_evals.map_or_else(|| "-".to_string(), |e| format!("{e:.1}"))
            )
        })?;
        print!("{}", report.summary());
        println!("wrote {} and {}", artifacts.csv.display(), artifacts.json.display());
        unsolved += report.cells.iter().filter(|c| !c.solved()).count();
    }
    if unsolved > 0 {
        return Err(Failure::Unsolved(format!("{unsolved} cell(s) unsolved")));
    }
    Ok(())
}

fn report(a: ReportArgs) -> Result<(), Failure> {
    let path = if a.input.is_dir() { a.input.join("report.json") } else { a.input.clone() };
    let mut report = ScalingReport::read_json(&path)?;
    if let Some(out) = &a.out {
        report.refit();
        let artifacts = write_artifacts(&report, out)?;
        eprintln!("wrote {} plot tables to {}", artifacts.plots.len(), out.display());
    }
    print!("{}", report.summary());
    Ok(())
}

fn gen_nk(a: GenNkArgs) -> Result<(), Failure> {
    if a.count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    let stream = RandomSource::new(a.seed);
    let single = a.count == 1 && a.out.extension().is_some();
    if !single {
        fs::create_dir_all(&a.out).map_err(Error::from)?;
    }
    for i in 0..a.count as u64 {
        let landscape = NkLandscape::generate(a.n, a.k, if single { a.seed } else { stream.derive_seed(i) })?;
        let path = if single { a.out.clone() } else { a.out.join(format!("nk_n{}_k{}_{i:03}.txt", a.n, a.k)) };
        fs::write(&path, landscape.to_text()).map_err(Error::from)?;
        if a.optimum {
            let (genome, best) = nk_brute_force_optimum(&landscape)?;
            println!("{} optimum={best:?} genome={genome}", path.display());
        } else {
            println!("{}", path.display());
        }
    }
    Ok(())
}
