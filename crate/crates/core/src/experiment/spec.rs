use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bisection::{BisectionSettings, SuccessCriterion};
use crate::bits::RandomSource;
use crate::eda::ModelKind;
use crate::error::{invalid, Error, Result};
use crate::problems::{BenchmarkProblem, ConcatTrap, NkLandscape, OneMax};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ProblemFamily {
    OneMax,
    Trap { k: usize },
    Nk { k: usize, instances: usize },
}

impl ProblemFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemFamily::OneMax => "onemax",
            ProblemFamily::Trap { .. } => "trap",
            ProblemFamily::Nk { .. } => "nk",
        }
    }

    /// Trap order or NK epistasis; 0 for onemax.
    pub fn k(&self) -> usize {
        match *self {
            ProblemFamily::OneMax => 0,
            ProblemFamily::Trap { k } | ProblemFamily::Nk { k, .. } => k,
        }
    }

    /// The problems of one grid cell. NK instance `i` at size `n` is
    /// generated from seed stream (`n`, `i`) of `root_seed` and gets its
    /// brute-force optimum as target.
    pub fn instances(&self, size: usize, root_seed: u64) -> Result<Vec<BenchmarkProblem>> {
        Ok(match *self {
            ProblemFamily::OneMax => vec![BenchmarkProblem::OneMax(OneMax::new(size)?)],
            ProblemFamily::Trap { k } => vec![BenchmarkProblem::Trap(ConcatTrap::with_len(k, size)?)],
            ProblemFamily::Nk { k, instances } => {
                let stream = RandomSource::new(root_seed).derive(size as u64);
                (0..instances as u64)
                    .map(|i| NkLandscape::generate(size, k, stream.derive_seed(i)).and_then(BenchmarkProblem::nk_with_optimum))
                    .collect::<Result<_>>()?
            }
        })
    }

    pub fn default_criterion(&self) -> SuccessCriterion {
        match self {
            ProblemFamily::Nk { .. } => SuccessCriterion::per_instance(5),
            _ => SuccessCriterion::all_runs(30),
        }
    }
}

impl fmt::Display for ProblemFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemFamily::OneMax => write!(f, "onemax"),
            ProblemFamily::Trap { k } => write!(f, "trap{k}"),
            ProblemFamily::Nk { k, instances } => write!(f, "nk{k}x{instances}"),
        }
    }
}

/// One scaling experiment: a problem family over a size grid, the models to
/// compare, and how each cell is sized and run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub family: ProblemFamily,
    pub sizes: Vec<usize>,
    pub models: Vec<ModelKind>,
    pub criterion: SuccessCriterion,
    pub bisection: BisectionSettings,
    pub root_seed: u64,
    pub max_generations: usize,
    pub stagnation_limit: usize,
    pub out_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn new(name: &str, family: ProblemFamily, sizes: Vec<usize>, models: Vec<ModelKind>, root_seed: u64) -> Self {
        ExperimentSpec {
            name: name.to_string(),
            family,
            sizes,
            models,
            criterion: family.default_criterion(),
            bisection: BisectionSettings::default(),
            root_seed,
            max_generations: 500,
            stagnation_limit: 100,
            out_dir: PathBuf::from("results").join(name),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(invalid(format!("experiment {}: empty size grid", self.name)));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!("experiment {}: sizes must be strictly increasing", self.name)));
        }
        if self.models.is_empty() {
            return Err(invalid(format!("experiment {}: no models", self.name)));
        }
        let instances = match self.family {
            ProblemFamily::Nk { instances, .. } => instances,
            _ => 1,
        };
        self.criterion.validate(instances)
    }

    /// Hex SHA-256 of the canonical JSON form of the spec.
    pub fn spec_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        hex::encode(Sha256::digest(&json))
    }

    /// Parses experiments from `key = value` lines grouped under `[name]`
    /// headers. `#` starts a comment.
    ///
    /// ```text
    /// [trap5]
    /// problem = trap
    /// k = 5
    /// sizes = 20, 30, 40
    /// models = rbm, boa
    /// seed = 7
    /// ```
    pub fn parse_config(text: &str) -> Result<Vec<ExperimentSpec>> {
        let mut sections: Vec<(usize, String, Vec<(usize, String, String)>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|n| !n.is_empty())
                    .ok_or_else(|| parse_err(line_no, "malformed section header"))?;
                sections.push((line_no, name.to_string(), Vec::new()));
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| parse_err(line_no, "expected key = value"))?;
            let section = sections.last_mut().ok_or_else(|| parse_err(line_no, "key outside a [section]"))?;
            section.2.push((line_no, key.trim().to_ascii_lowercase(), value.trim().to_string()));
        }
        if sections.is_empty() {
            return Err(parse_err(1, "no [section] found"));
        }
        sections.into_iter().map(|(line, name, entries)| Self::from_section(line, &name, &entries)).collect()
    }

    fn from_section(header_line: usize, name: &str, entries: &[(usize, String, String)]) -> Result<Self> {
        let get = |key: &str| entries.iter().rev().find(|e| e.1 == key);
        let num = |key: &str| -> Result<Option<usize>> {
            get(key).map(|(line, _, v)| v.parse::<usize>().map_err(|_| parse_err(*line, &format!("{key}: expected a count")))).transpose()
        };
        if let Some((line, key, _)) = entries.iter().find(|e| !KNOWN_KEYS.contains(&e.1.as_str())) {
            return Err(parse_err(*line, &format!("unknown key {key:?}")));
        }
        let (pline, _, problem) = get("problem").ok_or_else(|| parse_err(header_line, "missing key \"problem\""))?;
        let family = match problem.to_ascii_lowercase().as_str() {
            "onemax" => ProblemFamily::OneMax,
            "trap" => ProblemFamily::Trap { k: num("k")?.ok_or_else(|| parse_err(*pline, "trap needs k"))? },
            "nk" => ProblemFamily::Nk {
                k: num("k")?.ok_or_else(|| parse_err(*pline, "nk needs k"))?,
                instances: num("instances")?.unwrap_or(25),
            },
            other => return Err(parse_err(*pline, &format!("unknown problem {other:?}"))),
        };
        let (sline, _, sizes) = get("sizes").ok_or_else(|| parse_err(header_line, "missing key \"sizes\""))?;
        let sizes = parse_list::<usize>(sizes).map_err(|m| parse_err(*sline, &m))?;
        let models = match get("models") {
            Some((line, _, v)) => parse_list::<ModelKind>(v).map_err(|m| parse_err(*line, &m))?,
            None => vec![ModelKind::Rbm, ModelKind::Boa],
        };
        let seed = match get("seed") {
            Some((line, _, v)) => v.parse::<u64>().map_err(|_| parse_err(*line, "seed: expected an integer"))?,
            None => 0,
        };
        let mut spec = ExperimentSpec::new(name, family, sizes, models, seed);
        if let Some(runs) = num("runs")? {
            match family {
                ProblemFamily::Nk { .. } => spec.criterion.runs_per_instance = runs,
                _ => spec.criterion.runs_per_trial = runs,
            }
        }
        if let Some(v) = num("start")? {
            spec.bisection.start = v;
        }
        if let Some(v) = num("cap")? {
            spec.bisection.cap = v;
        }
        if let Some(v) = num("workers")? {
            spec.bisection.workers = v;
        }
        if let Some(v) = num("max_generations")? {
            spec.max_generations = v;
        }
        if let Some(v) = num("stagnation_limit")? {
            spec.stagnation_limit = v;
        }
        if let Some((_, _, out)) = get("out") {
            spec.out_dir = PathBuf::from(out);
        }
        spec.validate()?;
        Ok(spec)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "problem",
    "k",
    "instances",
    "sizes",
    "models",
    "seed",
    "runs",
    "start",
    "cap",
    "workers",
    "max_generations",
    "stagnation_limit",
    "out",
];

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse { line, msg: msg.to_string() }
}

/// Comma-separated list, e.g. `20,30,40` or `rbm, boa`.
pub fn parse_list<T: FromStr>(text: &str) -> std::result::Result<Vec<T>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| format!("cannot parse list item {s:?}")))
        .collect::<std::result::Result<Vec<T>, String>>()
        .and_then(|v| if v.is_empty() { Err("empty list".to_string()) } else { Ok(v) })
}
