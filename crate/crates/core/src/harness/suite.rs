//! Batch experiments: every algorithm on every instance, written as CSV.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::generate::{gen_gnp, gen_powerlaw, GenParams};
use crate::error::DcaError;
use crate::lpkit::SolverOptions;
use crate::netmodel::{self, evaluate, io, DefendingStrategy, Instance, ModelError};
use crate::planner::{self, PlannerConfig};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    Greedy,
    GreedyR,
    Ba,
    BaTau,
    Exact,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Greedy,
        Algorithm::GreedyR,
        Algorithm::Ba,
        Algorithm::BaTau,
        Algorithm::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::GreedyR => "greedy-r",
            Algorithm::Ba => "ba",
            Algorithm::BaTau => "ba-tau",
            Algorithm::Exact => "exact",
        }
    }
}

impl FromStr for Algorithm {
    type Err = DcaError;

    fn from_str(s: &str) -> Result<Self, DcaError> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| DcaError::Config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    Gnp { n: usize, p: f64 },
    Powerlaw { n: usize, m: usize, p_tri: f64 },
    Files(Vec<PathBuf>),
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub source: InstanceSource,
    /// Number of generated instances; seeds run from `seed` upwards.
    pub count: usize,
    pub seed: u64,
    pub gen: GenParams,
    pub algorithms: Vec<Algorithm>,
    pub planner: PlannerConfig,
    /// Also record the smallest budget admitting a perfect defence, with and
    /// without transfers.
    pub perfect_budget: bool,
    /// Directory for one strategy file per (instance, algorithm) cell.
    pub strategies_dir: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            source: InstanceSource::Gnp { n: 20, p: 0.1 },
            count: 5,
            seed: 1,
            gen: GenParams::default(),
            algorithms: Algorithm::ALL.to_vec(),
            planner: PlannerConfig {
                epsilons: vec![0.5],
                ..PlannerConfig::default()
            },
            perfect_budget: false,
            strategies_dir: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, DcaError> {
    value
        .parse()
        .map_err(|_| DcaError::Config(format!("bad value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, DcaError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

impl SuiteConfig {
    /// Reads `key = value` lines; `#` starts a comment.
    ///
    /// Keys: `generator` (gnp, powerlaw, files), `n`, `p`, `m`, `p_tri`,
    /// `files`, `count`, `seed`, `k`, `budget_fraction`, `weight_min`,
    /// `weight_max`, `algorithms`, `epsilon` (one value or a comma list),
    /// `tau_points`, `perfect_budget`, `strategies_dir`, `max_nodes`.
    pub fn parse(text: &str) -> Result<Self, DcaError> {
        let mut cfg = SuiteConfig::default();
        let mut generator = "gnp".to_string();
        let (mut n, mut p, mut m, mut p_tri) = (20usize, 0.1f64, 2usize, 0.5f64);
        let mut files = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| {
                    DcaError::Config(format!("line {}: expected key = value", no + 1))
                })?;
            match key {
                "generator" => generator = value.to_string(),
                "n" => n = parse_value(key, value)?,
                "p" => p = parse_value(key, value)?,
                "m" => m = parse_value(key, value)?,
                "p_tri" => p_tri = parse_value(key, value)?,
                "files" => files = parse_list::<PathBuf>(key, value)?,
                "count" => cfg.count = parse_value(key, value)?,
                "seed" => cfg.seed = parse_value(key, value)?,
                "k" => cfg.gen.k = parse_value(key, value)?,
                "budget_fraction" => cfg.gen.budget_fraction = parse_value(key, value)?,
                "weight_min" => cfg.gen.weight.0 = parse_value(key, value)?,
                "weight_max" => cfg.gen.weight.1 = parse_value(key, value)?,
                "algorithms" => cfg.algorithms = parse_list(key, value)?,
                "epsilon" => cfg.planner.epsilons = parse_list(key, value)?,
                "tau_points" => cfg.planner.tau_points = parse_value(key, value)?,
                "perfect_budget" => cfg.perfect_budget = parse_value(key, value)?,
                "strategies_dir" => cfg.strategies_dir = Some(PathBuf::from(value)),
                "max_nodes" => {
                    cfg.planner.solver = SolverOptions {
                        max_nodes: parse_value(key, value)?,
                        ..cfg.planner.solver
                    }
                }
                other => {
                    return Err(DcaError::Config(format!(
                        "line {}: unknown key `{other}`",
                        no + 1
                    )))
                }
            }
        }
        cfg.source = match generator.as_str() {
            "gnp" => InstanceSource::Gnp { n, p },
            "powerlaw" => InstanceSource::Powerlaw { n, m, p_tri },
            "files" => InstanceSource::Files(files),
            other => return Err(DcaError::Config(format!("unknown generator `{other}`"))),
        };
        cfg.planner.validate()?;
        Ok(cfg)
    }

    /// Named instances described by the source.
    pub fn instances(&self) -> Result<Vec<(String, Instance<f64>)>, DcaError> {
        match &self.source {
            InstanceSource::Files(paths) => paths
                .iter()
                .map(|path| {
                    let name = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| path.display().to_string());
                    Ok((name, io::load_instance(path)?))
                })
                .collect(),
            &InstanceSource::Gnp { n, p } => (0..self.count as u64)
                .map(|i| {
                    let seed = self.seed + i;
                    Ok((
                        format!("gnp-{n}-{p}-s{seed}"),
                        gen_gnp(n, p, seed, &self.gen)?,
                    ))
                })
                .collect(),
            &InstanceSource::Powerlaw { n, m, p_tri } => (0..self.count as u64)
                .map(|i| {
                    let seed = self.seed + i;
                    Ok((
                        format!("powerlaw-{n}-{m}-{p_tri}-s{seed}"),
                        gen_powerlaw(n, m, p_tri, seed, &self.gen)?,
                    ))
                })
                .collect(),
        }
    }
}

/// Label used for the perfect-budget rows with transfers.
pub const PERFECT_BUDGET: &str = "perfect-budget";
/// Label used for the perfect-budget rows with transfers disabled.
pub const PERFECT_BUDGET_ISOLATED: &str = "perfect-budget-w0";

#[derive(Debug, Clone)]
pub struct SuiteRow {
    pub instance: String,
    pub algorithm: String,
    /// `None` when the algorithm failed, e.g. hit the node limit.
    pub result: Option<f64>,
    pub runtime_ms: f64,
    pub budget: f64,
    pub strategy: Option<DefendingStrategy<f64>>,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,algorithm,result,runtime_ms,budget\n");
        for row in &self.rows {
            let result = row.result.map(|r| r.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{:.3},{}",
                row.instance, row.algorithm, result, row.runtime_ms, row.budget
            );
        }
        out
    }

    pub fn get(&self, instance: &str, algorithm: &str) -> Option<&SuiteRow> {
        self.rows
            .iter()
            .find(|r| r.instance == instance && r.algorithm == algorithm)
    }
}

/// Runs one algorithm; returns the strategy and its evaluated result.
pub fn run_algorithm(
    inst: &Instance<f64>,
    algorithm: Algorithm,
    cfg: &PlannerConfig,
) -> Result<(DefendingStrategy<f64>, f64), DcaError> {
    let strategy = match algorithm {
        Algorithm::Greedy => planner::greedy(inst),
        Algorithm::GreedyR => planner::greedy_r(inst),
        Algorithm::Ba => planner::ba_grid(inst, cfg)?.0.strategy,
        Algorithm::BaTau => planner::ba_grid(inst, cfg)?.1.strategy,
        Algorithm::Exact => planner::solve_exact_with(inst, cfg)?.strategy,
    };
    let result = evaluate(inst, &strategy)?.defending_result;
    Ok((strategy, result))
}

/// Smallest budget (to within `1e-3` of the total threshold) at which a
/// perfect defence exists, by bisection on `[0, total threshold]`.
pub fn min_perfect_budget<S: Scalar>(
    inst: &Instance<S>,
    cfg: &PlannerConfig,
) -> Result<S, DcaError> {
    let total = inst.total_theta();
    let perfect = |b: S| -> Result<bool, DcaError> {
        let at = inst.with_budget(b)?;
        Ok(matches!(
            planner::perfect_defense_with(&at, cfg)?,
            planner::PerfectDefense::Found(_)
        ))
    };
    if perfect(S::zero())? {
        return Ok(S::zero());
    }
    let (mut lo, mut hi) = (S::zero(), total);
    let precision = S::lit(1e-3) * total;
    while hi - lo > precision {
        let mid = (lo + hi) / S::lit(2.0);
        if perfect(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport, DcaError> {
    cfg.planner.validate()?;
    let instances = cfg.instances()?;
    run_on(&instances, cfg)
}

/// Runs the configured algorithms on the given instances. Rows come out
/// grouped by instance, in configuration order.
pub fn run_on(
    instances: &[(String, Instance<f64>)],
    cfg: &SuiteConfig,
) -> Result<SuiteReport, DcaError> {
    let mut cells: Vec<(usize, Option<Algorithm>, bool)> = Vec::new();
    for i in 0..instances.len() {
        cells.extend(cfg.algorithms.iter().map(|&a| (i, Some(a), false)));
        if cfg.perfect_budget {
            cells.push((i, None, true));
            cells.push((i, None, false));
        }
    }
    let rows: Vec<SuiteRow> = cells
        .par_iter()
        .map(|&(i, algorithm, transfers)| {
            let (name, inst) = &instances[i];
            let row = |label: &str, result, runtime_ms, strategy| SuiteRow {
                instance: name.clone(),
                algorithm: label.to_string(),
                result,
                runtime_ms,
                budget: inst.budget(),
                strategy,
            };
            match algorithm {
                Some(a) => {
                    let (out, ms) = timed(|| run_algorithm(inst, a, &cfg.planner));
                    match out {
                        Ok((s, result)) => Ok(row(a.name(), Some(result), ms, Some(s))),
                        Err(DcaError::SolverLimit { .. }) => Ok(row(a.name(), None, ms, None)),
                        Err(e) => Err(e),
                    }
                }
                None => {
                    let target = if transfers {
                        inst.clone()
                    } else {
                        inst.isolated()
                    };
                    let (out, ms) = timed(|| min_perfect_budget(&target, &cfg.planner));
                    let label = if transfers {
                        PERFECT_BUDGET
                    } else {
                        PERFECT_BUDGET_ISOLATED
                    };
                    Ok(row(label, Some(out?), ms, None))
                }
            }
        })
        .collect::<Result<_, DcaError>>()?;

    if let Some(dir) = &cfg.strategies_dir {
        std::fs::create_dir_all(dir).map_err(|e| ModelError::Io(e.to_string()))?;
        for row in &rows {
            if let Some(s) = &row.strategy {
                let path = dir.join(format!("{}_{}.strategy", row.instance, row.algorithm));
                std::fs::write(&path, io::write_strategy(s))
                    .map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))?;
            }
        }
    }
    Ok(SuiteReport { rows })
}

/// Re-evaluates every strategy in the report against its instance.
pub fn verify_report(
    instances: &[(String, Instance<f64>)],
    report: &SuiteReport,
) -> Result<(), DcaError> {
    for row in &report.rows {
        let (Some(s), Some(result)) = (&row.strategy, row.result) else {
            continue;
        };
        let (_, inst) = instances
            .iter()
            .find(|(name, _)| *name == row.instance)
            .ok_or_else(|| DcaError::Config(format!("unknown instance {}", row.instance)))?;
        let again = netmodel::evaluate(inst, s)?.defending_result;
        if (again - result).abs() > f64::def_tol() {
            return Err(DcaError::Refused(format!(
                "{}/{}: recorded {result}, re-evaluated {again}",
                row.instance, row.algorithm
            )));
        }
    }
    Ok(())
}
