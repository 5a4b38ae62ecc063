use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dca_core::harness::{self, GenParams, SuiteConfig};
use dca_core::lpkit::{self, SolverOptions};
use dca_core::netmodel::{evaluate, io};
use dca_core::planner::{self, PerfectDefense, PlannerConfig};
use dca_core::{realloc, DefendingStrategy, Instance};

#[derive(Parser)]
#[command(
    name = "dca",
    about = "Defending networks against contagious attacks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal response to one attack under a fixed allocation.
    Realloc {
        #[arg(long)]
        instance: PathBuf,
        /// Strategy file whose `alloc` lines give the allocation.
        #[arg(long)]
        alloc: PathBuf,
        #[arg(long)]
        attack: usize,
        /// Also report the relaxation bound.
        #[arg(long)]
        lp_bound: bool,
    },
    /// Exact defence via the full MILP.
    SolveExact {
        #[command(flatten)]
        io: PlanIo,
        #[arg(long)]
        max_nodes: Option<usize>,
        /// Skip scenario pruning and row dominance.
        #[arg(long)]
        no_prune: bool,
        /// Write the MILP in LP format for an external solver.
        #[arg(long)]
        lp_file: Option<PathBuf>,
    },
    /// Strategy losing nothing at the instance budget, if one exists.
    Perfect {
        #[command(flatten)]
        io: PlanIo,
    },
    /// Bi-criteria approximation; without --epsilon, the best over 0.1..0.9.
    Ba {
        #[command(flatten)]
        io: PlanIo,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Also try this many rounding thresholds in (0, epsilon].
        #[arg(long)]
        tau_grid: Option<usize>,
    },
    /// Greedy baseline.
    Greedy {
        #[command(flatten)]
        io: PlanIo,
        /// Move spare resource towards defendable neighbours after each attack.
        #[arg(long)]
        realloc: bool,
    },
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Brute-force optimum for a small instance.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Run a batch experiment described by a `key = value` config file.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct PlanIo {
    #[arg(long)]
    instance: PathBuf,
    /// Strategy output; defaults to `<instance>.<algorithm>.strategy`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenCommon {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Budget as a fraction of the total threshold.
    #[arg(long, default_value_t = 0.5)]
    budget_fraction: f64,
    #[arg(long, default_value_t = 0.3)]
    weight_min: f64,
    #[arg(long, default_value_t = 1.0)]
    weight_max: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl GenCommon {
    fn params(&self) -> GenParams {
        GenParams {
            k: self.k,
            budget_fraction: self.budget_fraction,
            weight: (self.weight_min, self.weight_max),
            ..GenParams::default()
        }
    }
}

#[derive(Subcommand)]
enum GenKind {
    /// Erdős–Rényi G(n, p).
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Power-law graph with tunable clustering.
    Powerlaw {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        p_tri: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Gadget whose exact solution at budget R decides vertex cover of size R.
    Vcgadget {
        /// Vertices of the source graph.
        #[arg(long)]
        n: usize,
        /// Edges as `a-b` pairs separated by commas.
        #[arg(long, default_value = "")]
        edges: String,
        #[arg(long)]
        budget: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct Summary<'a> {
    algorithm: &'a str,
    result: Option<f64>,
    runtime_ms: f64,
    budget: f64,
}

#[derive(Serialize)]
struct Transfer {
    from: usize,
    to: usize,
    amount: f64,
}

#[derive(Serialize)]
struct ReallocReport {
    attack: usize,
    loss: f64,
    null_loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lp_bound: Option<f64>,
    transfers: Vec<Transfer>,
}

fn load(path: &Path) -> Result<Instance> {
    io::load_instance(path).with_context(|| format!("loading {}", path.display()))
}

fn strategy_path(io: &PlanIo, algorithm: &str) -> PathBuf {
    io.out.clone().unwrap_or_else(|| {
        let mut name = io.instance.clone().into_os_string();
        name.push(format!(".{algorithm}.strategy"));
        PathBuf::from(name)
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

/// Writes the strategy (if any) and prints the summary line.
fn report(
    io: &PlanIo,
    inst: &Instance,
    algorithm: &str,
    strategy: Option<&DefendingStrategy>,
    start: Instant,
) -> Result<()> {
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let result = match strategy {
        Some(s) => {
            write_file(&strategy_path(io, algorithm), &io::write_strategy(s))?;
            Some(evaluate(inst, s)?.defending_result)
        }
        None => None,
    };
    print_json(&Summary {
        algorithm,
        result,
        runtime_ms,
        budget: inst.budget(),
    })
}

fn parse_edges(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once('-')
                .with_context(|| format!("edge `{pair}` is not of the form a-b"))?;
            Ok((a.trim().parse()?, b.trim().parse()?))
        })
        .collect()
}

fn emit_instance(inst: &Instance, out: Option<&Path>) -> Result<()> {
    let text = io::write_instance(inst);
    match out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Realloc {
            instance,
            alloc,
            attack,
            lp_bound,
        } => {
            let inst = load(&instance)?;
            let alloc = io::load_strategy(&alloc, inst.n())
                .with_context(|| format!("loading {}", alloc.display()))?
                .allocation;
            alloc.validate(&inst)?;
            let (plan, loss) = realloc::optimal_reallocation(&inst, &alloc, attack)?;
            let lp_bound = if lp_bound {
                Some(realloc::reallocation_lp_bound(&inst, &alloc, attack)?)
            } else {
                None
            };
            print_json(&ReallocReport {
                attack,
                loss,
                null_loss: realloc::null_loss(&inst, &alloc, attack)?,
                lp_bound,
                transfers: plan
                    .transfers
                    .iter()
                    .map(|(&(from, to), &amount)| Transfer { from, to, amount })
                    .collect(),
            })
        }
        Command::SolveExact {
            io,
            max_nodes,
            no_prune,
            lp_file,
        } => {
            let inst = load(&io.instance)?;
            let mut cfg = if no_prune {
                PlannerConfig::unpruned()
            } else {
                PlannerConfig::default()
            };
            if let Some(max_nodes) = max_nodes {
                cfg.solver = SolverOptions {
                    max_nodes,
                    ..cfg.solver
                };
            }
            if let Some(path) = lp_file {
                let program = planner::build_defense_milp(&inst, inst.budget())?;
                write_file(&path, &lpkit::write_lp_format(&program.lp))?;
            }
            let start = Instant::now();
            let sol = planner::solve_exact_with(&inst, &cfg)?;
            report(&io, &inst, "exact", Some(&sol.strategy), start)
        }
        Command::Perfect { io } => {
            let inst = load(&io.instance)?;
            let start = Instant::now();
            let found = planner::perfect_defense(&inst)?;
            let strategy = match &found {
                PerfectDefense::Found(s) => Some(s),
                PerfectDefense::NoPerfectStrategy => None,
            };
            report(&io, &inst, "perfect", strategy, start)
        }
        Command::Ba {
            io,
            epsilon,
            tau_grid,
        } => {
            let inst = load(&io.instance)?;
            let mut cfg = PlannerConfig::default();
            if let Some(eps) = epsilon {
                cfg.epsilons = vec![eps];
            }
            if let Some(points) = tau_grid {
                cfg.tau_points = points;
            }
            cfg.validate()?;
            let start = Instant::now();
            let (plain, with_tau) = match (epsilon, tau_grid) {
                (Some(eps), None) => (planner::ba_epsilon_with(&inst, eps, &cfg)?, None),
                (Some(eps), Some(points)) => {
                    let taus = planner::tau_grid(eps, points);
                    let sol = planner::ba_epsilon_tau_with(&inst, eps, &taus, &cfg)?;
                    (sol.clone(), Some(sol))
                }
                (None, _) => {
                    let (a, b) = planner::ba_grid(&inst, &cfg)?;
                    (a, tau_grid.map(|_| b))
                }
            };
            match with_tau {
                Some(sol) => report(&io, &inst, "ba-tau", Some(&sol.strategy), start),
                None => report(&io, &inst, "ba", Some(&plain.strategy), start),
            }
        }
        Command::Greedy { io, realloc } => {
            let inst = load(&io.instance)?;
            let start = Instant::now();
            let (name, strategy) = if realloc {
                ("greedy-r", planner::greedy_r(&inst))
            } else {
                ("greedy", planner::greedy(&inst))
            };
            report(&io, &inst, name, Some(&strategy), start)
        }
        Command::Gen { kind } => match kind {
            GenKind::Gnp { n, p, common } => {
                let inst = harness::gen_gnp(n, p, common.seed, &common.params())?;
                emit_instance(&inst, common.out.as_deref())
            }
            GenKind::Powerlaw {
                n,
                m,
                p_tri,
                common,
            } => {
                let inst = harness::gen_powerlaw(n, m, p_tri, common.seed, &common.params())?;
                emit_instance(&inst, common.out.as_deref())
            }
            GenKind::Vcgadget {
                n,
                edges,
                budget,
                out,
            } => {
                let edges = parse_edges(&edges)?;
                let inst = harness::gen_vc_gadget(n, &edges, budget)?;
                emit_instance(&inst, out.as_deref())
            }
        },
        Command::Oracle { instance } => {
            let inst = load(&instance)?;
            let start = Instant::now();
            let result = harness::oracle_exact(&inst)?;
            print_json(&Summary {
                algorithm: "oracle",
                result: Some(result),
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
                budget: inst.budget(),
            })
        }
        Command::Suite { config, out } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = SuiteConfig::parse(&text)?;
            let report = harness::run_suite(&cfg)?;
            write_file(&out, &report.to_csv())?;
            if report.rows.iter().any(|r| r.result.is_none()) {
                eprintln!("some cells hit a solver limit; their result column is empty");
            }
            Ok(())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_lists() {
        assert_eq!(parse_edges("0-1, 2-3").unwrap(), vec![(0, 1), (2, 3)]);
        assert!(parse_edges("").unwrap().is_empty());
        assert!(parse_edges("0:1").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
