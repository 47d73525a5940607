//! Requirement matrix over all scenarios and the staffing decision on top
//! of it.
//!
//! Requirements are computed per profession with scenarios ranked by
//! decreasing heuristic upper bound. Once enough scenarios are known, the
//! requirement ranked just after the ones that may stay uncovered is a lower
//! bound on the staffing level; scenarios whose upper bound does not exceed
//! it need no exact solve.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Scenario};
use crate::routing::{cycle_durations, routes_from_table, RouteSet};
use crate::slave::{
    heuristic_upper_bound, solve_slave_from, CoverBound, ResourcePlan, SlaveResult, SlaveStatus,
    SlaveTask,
};

/// Quantile of the confidence bound on coverage, as tabulated.
pub const CONFIDENCE_Z: f64 = 1.66;

/// Smallest sample size for the normal approximation of the coverage ratio.
pub const MIN_CALIBRATION_SCENARIOS: usize = 30;

const RATIO_EPS: f64 = 1e-9;

/// Lower end of the 95% confidence interval of an observed coverage ratio.
pub fn confidence_lower_bound(coverage: f64, scenarios: usize) -> f64 {
    coverage - CONFIDENCE_Z * (coverage * (1.0 - coverage)).sqrt() / (scenarios as f64).sqrt()
}

/// Sample coverage ratio whose confidence lower bound reaches `alpha_star`:
/// the smallest `k / omega_count`, `k >= alpha_star * omega_count`, that
/// satisfies it.
pub fn calibrate_alpha(alpha_star: f64, omega_count: usize) -> Result<f64> {
    if !(alpha_star > 0.0 && alpha_star < 1.0) {
        return Err(Error::Calibration(format!(
            "target coverage {alpha_star} must lie strictly between 0 and 1"
        )));
    }
    if omega_count < MIN_CALIBRATION_SCENARIOS {
        return Err(Error::Calibration(format!(
            "{omega_count} scenarios are too few; at least {MIN_CALIBRATION_SCENARIOS} are needed"
        )));
    }
    let first = (alpha_star * omega_count as f64 - RATIO_EPS).ceil() as usize;
    (first..=omega_count)
        .map(|k| k as f64 / omega_count as f64)
        .find(|&a| confidence_lower_bound(a, omega_count) >= alpha_star - 1e-12)
        .ok_or_else(|| {
            Error::Calibration(format!(
                "no coverage ratio reaches {alpha_star} with {omega_count} scenarios"
            ))
        })
}

/// Scenarios that must be covered for a ratio `alpha`.
pub fn required_count(alpha: f64, scenarios: usize) -> Result<usize> {
    if !(alpha >= 0.0) || alpha > 1.0 + RATIO_EPS {
        return Err(Error::InfeasibleCoverage(alpha));
    }
    Ok(((alpha * scenarios as f64 - RATIO_EPS).ceil().max(0.0) as usize).min(scenarios))
}

/// How a cell of the requirement matrix was obtained.
pub type CellStatus = SlaveStatus;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequirementMatrix {
    pub professions: Vec<String>,
    pub alpha: f64,
    /// Requirement used by the master, after lower-bound truncation.
    pub n_req: Vec<Vec<u32>>,
    /// Proven lower bound per cell.
    pub lb: Vec<Vec<u32>>,
    /// Constructive upper bound per cell.
    pub ub: Vec<Vec<u32>>,
    /// Requirement before the final truncation: solver value for solved
    /// cells, constructive bound for skipped ones.
    pub raw: Vec<Vec<u32>>,
    pub status: Vec<Vec<CellStatus>>,
    /// Solver seconds per cell (0 for skipped cells).
    pub elapsed: Vec<Vec<f64>>,
    /// Final running lower bound per profession.
    pub lb_p: Vec<u32>,
    /// Whether the skipping rule was active.
    pub cut_rule: bool,
    /// Wall-clock seconds spent computing the matrix.
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignments: Option<Vec<Vec<Option<Vec<ResourcePlan>>>>>,
}

impl RequirementMatrix {
    pub fn scenario_count(&self) -> usize {
        self.n_req.first().map_or(0, |r| r.len())
    }

    pub fn profession_count(&self) -> usize {
        self.n_req.len()
    }

    /// Whether every cell was solved to proven optimality.
    pub fn is_exact(&self) -> bool {
        self.status.iter().flatten().all(|&s| s != SlaveStatus::FeasibleTimeout)
    }

    /// Checks `lb <= n_req` everywhere and `n_req <= ub` for cells that were
    /// not lifted to the running lower bound.
    pub fn check(&self) -> std::result::Result<(), String> {
        for p in 0..self.profession_count() {
            for w in 0..self.scenario_count() {
                let (lb, n, ub) = (self.lb[p][w], self.n_req[p][w], self.ub[p][w]);
                if lb > n {
                    return Err(format!("cell ({p},{w}): lb {lb} > n {n}"));
                }
                if n > ub && n != self.lb_p[p] {
                    return Err(format!("cell ({p},{w}): n {n} > ub {ub}"));
                }
                if self.cut_rule && n < self.lb_p[p] {
                    return Err(format!("cell ({p},{w}): n {n} below LB_p {}", self.lb_p[p]));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RequirementOptions {
    /// Per solver call; `None` solves every cell to optimality.
    pub time_limit: Option<Duration>,
    /// Worker threads; 0 uses the rayon default.
    pub threads: usize,
    pub keep_assignments: bool,
    /// Skip exact solves whose upper bound does not exceed the running bound.
    pub cut_rule: bool,
}

impl Default for RequirementOptions {
    fn default() -> Self {
        RequirementOptions {
            time_limit: Some(crate::slave::DEFAULT_TIME_LIMIT),
            threads: 0,
            keep_assignments: false,
            cut_rule: true,
        }
    }
}

/// `rank`-th largest value (1-based) of `values`.
fn rank_desc(values: &[u32], rank: usize) -> u32 {
    let mut v = values.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v[rank - 1]
}

/// One cell after the cutting rule.
#[derive(Debug, Clone, PartialEq)]
pub struct CutCell {
    pub n: u32,
    pub lb: u32,
    pub raw: u32,
    pub status: SlaveStatus,
    pub elapsed: f64,
    /// Solver output; `None` for skipped cells.
    pub result: Option<SlaveResult>,
}

/// Outcome of the cutting rule over one profession, before truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct CutRun {
    pub cells: Vec<CutCell>,
    /// Processing order: decreasing upper bound, then scenario index.
    pub order: Vec<usize>,
    /// Running lower bound after each commit, in processing order.
    pub trace: Vec<u32>,
    pub lb_p: u32,
}

/// Runs the cutting rule over scenarios with upper bounds `ub`, allowing
/// `uncovered` of them to stay uncovered. `solve(w, lb)` answers scenario
/// `w` given the current running bound. Windows of `width` scenarios are
/// solved concurrently but committed in order, so the outcome does not
/// depend on `width` whenever `solve` is exact.
pub fn cutting_rule<F>(ub: &[u32], uncovered: usize, cut_rule: bool, width: usize, solve: F) -> CutRun
where
    F: Fn(usize, u32) -> SlaveResult + Sync,
{
    let omega = ub.len();
    let mut order: Vec<usize> = (0..omega).collect();
    order.sort_by_key(|&w| (std::cmp::Reverse(ub[w]), w));

    let width = width.max(1);
    let mut cells: Vec<Option<CutCell>> = vec![None; omega];
    let mut committed: Vec<u32> = Vec::with_capacity(omega);
    let mut trace = Vec::with_capacity(omega);
    let mut lb_p = 0u32;
    for window in order.chunks(width) {
        // Cells skipped under the current bound stay skipped under any later one.
        let speculative_lb = lb_p;
        let solved: Vec<Option<SlaveResult>> = window
            .par_iter()
            .map(|&w| (!(cut_rule && speculative_lb >= ub[w])).then(|| solve(w, speculative_lb)))
            .collect();
        for (&w, result) in window.iter().zip(solved) {
            let cell = if cut_rule && lb_p >= ub[w] {
                CutCell {
                    n: lb_p,
                    lb: lb_p,
                    raw: ub[w],
                    status: SlaveStatus::LbShortcut,
                    elapsed: 0.0,
                    result: None,
                }
            } else {
                let r = result.expect("solved when the bound was lower");
                let n = r.n.max(lb_p);
                let lb = r.lower_bound.max(lb_p);
                CutCell {
                    n,
                    lb,
                    raw: n,
                    status: if lb >= n {
                        SlaveStatus::Optimal
                    } else {
                        SlaveStatus::FeasibleTimeout
                    },
                    elapsed: r.elapsed,
                    result: Some(r),
                }
            };
            committed.push(cell.n);
            cells[w] = Some(cell);
            if cut_rule && committed.len() > uncovered {
                lb_p = rank_desc(&committed, uncovered + 1);
            }
            trace.push(lb_p);
        }
    }
    if !cut_rule && omega > uncovered {
        lb_p = rank_desc(&committed, uncovered + 1);
    }
    CutRun {
        cells: cells.into_iter().map(|c| c.expect("every cell committed")).collect(),
        order,
        trace,
        lb_p,
    }
}

struct ProfessionRun {
    cells: Vec<CutCell>,
    plans: Vec<Option<Vec<ResourcePlan>>>,
    ub: Vec<u32>,
    lb_p: u32,
}

/// Requirement of every profession in every scenario.
pub fn compute_requirements(
    instance: &Instance,
    scenarios: &[Scenario],
    alpha: f64,
    options: &RequirementOptions,
) -> Result<RequirementMatrix> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    pool.install(|| compute_in_pool(instance, scenarios, alpha, options))
}

fn compute_in_pool(
    instance: &Instance,
    scenarios: &[Scenario],
    alpha: f64,
    options: &RequirementOptions,
) -> Result<RequirementMatrix> {
    let start = Instant::now();
    let omega = scenarios.len();
    let covered = required_count(alpha, omega)?;
    let uncovered = omega - covered;
    // With nothing allowed uncovered the rule would only reproduce the
    // maximum; every cell is solved instead so the matrix stays exact.
    let cut_rule = options.cut_rule && uncovered > 0;
    let table = cycle_durations(&instance.territory);

    let mut runs = Vec::with_capacity(instance.professions.len());
    for p in 0..instance.professions.len() {
        let routes = routes_from_table(instance, p, &table);
        let cover = CoverBound::new(&routes);
        runs.push(profession_requirements(
            instance, scenarios, p, &routes, cover.as_ref(), uncovered, cut_rule, options,
        )?);
    }

    let lb_p: Vec<u32> = runs.iter().map(|r| r.lb_p).collect();
    let mut matrix = RequirementMatrix {
        professions: instance.profession_ids(),
        alpha,
        n_req: Vec::new(),
        lb: Vec::new(),
        ub: Vec::new(),
        raw: Vec::new(),
        status: Vec::new(),
        elapsed: Vec::new(),
        lb_p,
        cut_rule,
        wall_time: 0.0,
        assignments: options.keep_assignments.then(Vec::new),
    };
    for run in runs {
        let floor = if cut_rule { run.lb_p } else { 0 };
        matrix.n_req.push(run.cells.iter().map(|c| c.n.max(floor)).collect());
        matrix.lb.push(run.cells.iter().map(|c| c.lb.max(floor)).collect());
        matrix.raw.push(run.cells.iter().map(|c| c.raw).collect());
        matrix.status.push(run.cells.iter().map(|c| c.status).collect());
        matrix.elapsed.push(run.cells.iter().map(|c| c.elapsed).collect());
        matrix.ub.push(run.ub);
        if let Some(a) = matrix.assignments.as_mut() {
            a.push(run.plans);
        }
    }
    matrix.wall_time = start.elapsed().as_secs_f64();
    Ok(matrix)
}

#[allow(clippy::too_many_arguments)]
fn profession_requirements(
    instance: &Instance,
    scenarios: &[Scenario],
    p: usize,
    routes: &RouteSet,
    cover: Option<&CoverBound>,
    uncovered: usize,
    cut_rule: bool,
    options: &RequirementOptions,
) -> Result<ProfessionRun> {
    let tasks: Vec<SlaveTask> = scenarios
        .iter()
        .map(|s| {
            let t = SlaveTask::new(instance, p, s, routes)?.with_time_limit(options.time_limit);
            Ok(match cover {
                Some(c) => t.with_cover_bound(c),
                None => t,
            })
        })
        .collect::<Result<_>>()?;
    let uppers: Vec<SlaveResult> = tasks
        .par_iter()
        .map(heuristic_upper_bound)
        .collect::<Result<_>>()?;
    let ub: Vec<u32> = uppers.iter().map(|u| u.n).collect();
    let run = cutting_rule(&ub, uncovered, cut_rule, rayon::current_num_threads(), |w, lb| {
        solve_slave_from(&tasks[w].clone().with_lb(lb), uppers[w].clone())
    });
    let plans = run
        .cells
        .iter()
        .zip(uppers)
        .map(|(c, u)| match &c.result {
            Some(r) => r.assignment.clone(),
            None => u.assignment,
        })
        .collect();
    Ok(ProfessionRun {
        cells: run.cells,
        plans,
        ub,
        lb_p: run.lb_p,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaffSolution {
    pub n: Vec<u32>,
    pub cost: u64,
    pub covered: Vec<usize>,
    pub coverage: f64,
    pub confidence_lb: f64,
}

/// Scenarios whose requirement is met for every profession.
pub fn covered_scenarios(matrix: &[Vec<u32>], n: &[u32]) -> Vec<usize> {
    let omega = matrix.first().map_or(0, |r| r.len());
    (0..omega)
        .filter(|&w| matrix.iter().zip(n).all(|(row, &np)| row[w] <= np))
        .collect()
}

pub fn staffing_cost(costs: &[u64], n: &[u32]) -> u64 {
    costs.iter().zip(n).map(|(c, &x)| c * u64::from(x)).sum()
}

/// Builds the solution record of a staffing vector.
pub fn evaluate(matrix: &[Vec<u32>], costs: &[u64], n: Vec<u32>) -> StaffSolution {
    let omega = matrix.first().map_or(0, |r| r.len());
    let covered = covered_scenarios(matrix, &n);
    let coverage = if omega == 0 { 1.0 } else { covered.len() as f64 / omega as f64 };
    StaffSolution {
        cost: staffing_cost(costs, &n),
        confidence_lb: confidence_lower_bound(coverage, omega),
        n,
        covered,
        coverage,
    }
}

struct MasterSearch<'m> {
    matrix: &'m [Vec<u32>],
    costs: &'m [u64],
    candidates: Vec<Vec<u32>>,
    need: usize,
    best: Option<(u64, Vec<u32>)>,
    current: Vec<u32>,
}

impl MasterSearch<'_> {
    fn dfs(&mut self, p: usize, alive: &[usize], cost: u64) {
        if let Some((best, _)) = &self.best {
            if cost > *best {
                return;
            }
        }
        if p == self.matrix.len() {
            let better = match &self.best {
                None => true,
                Some((b, n)) => cost < *b || (cost == *b && self.current < *n),
            };
            if better {
                self.best = Some((cost, self.current.clone()));
            }
            return;
        }
        for ci in 0..self.candidates[p].len() {
            let v = self.candidates[p][ci];
            let next: Vec<usize> = alive.iter().copied().filter(|&w| self.matrix[p][w] <= v).collect();
            if next.len() < self.need {
                continue;
            }
            let c = cost + self.costs[p] * u64::from(v);
            if let Some((best, _)) = &self.best {
                if c > *best {
                    // Candidates ascend, so every later value costs more.
                    break;
                }
            }
            self.current.push(v);
            self.dfs(p + 1, &next, c);
            self.current.pop();
        }
    }
}

/// Cheapest staffing covering at least `need` scenarios of a requirement
/// matrix `[profession][scenario]`; ties go to the lexicographically
/// smallest vector.
pub fn solve_master_count(matrix: &[Vec<u32>], costs: &[u64], need: usize) -> Result<StaffSolution> {
    let omega = matrix.first().map_or(0, |r| r.len());
    if need > omega {
        return Err(Error::InfeasibleCoverage(need as f64 / omega.max(1) as f64));
    }
    if costs.len() != matrix.len() {
        return Err(Error::Invalid("one cost per profession is required".into()));
    }
    let candidates: Vec<Vec<u32>> = matrix
        .iter()
        .map(|row| {
            let mut v: Vec<u32> = row.iter().copied().chain(std::iter::once(0)).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let mut search = MasterSearch {
        matrix,
        costs,
        candidates,
        need,
        best: None,
        current: Vec::new(),
    };
    let all: Vec<usize> = (0..omega).collect();
    search.dfs(0, &all, 0);
    let (_, n) = search.best.expect("covering everything is always possible");
    Ok(evaluate(matrix, costs, n))
}

/// Cheapest staffing covering a ratio `alpha` of the scenarios.
pub fn solve_master(req: &RequirementMatrix, costs: &[u64], alpha: f64) -> Result<StaffSolution> {
    let need = required_count(alpha, req.scenario_count())?;
    solve_master_count(&req.n_req, costs, need)
}

/// Optimal cost of the master problem on the proven cell lower bounds.
pub fn master_lower_bound(req: &RequirementMatrix, costs: &[u64], alpha: f64) -> Result<u64> {
    let need = required_count(alpha, req.scenario_count())?;
    Ok(solve_master_count(&req.lb, costs, need)?.cost)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub n: Vec<u32>,
    pub cost: u64,
    pub coverage: f64,
    /// Set when a cheaper staffing might exist for this coverage because
    /// some requirements are not proven optimal.
    pub approximate: bool,
}

/// Non-dominated (cost, coverage) staffings, by increasing coverage.
pub fn pareto_front(req: &RequirementMatrix, costs: &[u64]) -> Result<Vec<ParetoPoint>> {
    let omega = req.scenario_count();
    let mut points: Vec<ParetoPoint> = Vec::new();
    for k in 1..=omega {
        let sol = solve_master_count(&req.n_req, costs, k)?;
        let bound = solve_master_count(&req.lb, costs, k)?.cost;
        points.push(ParetoPoint {
            approximate: bound < sol.cost,
            n: sol.n,
            cost: sol.cost,
            coverage: sol.coverage,
        });
    }
    Ok(nondominated(points))
}

/// Drops points beaten on both criteria, and duplicates.
pub fn nondominated(mut points: Vec<ParetoPoint>) -> Vec<ParetoPoint> {
    points.sort_by(|a, b| {
        a.cost
            .cmp(&b.cost)
            .then(b.coverage.total_cmp(&a.coverage))
            .then(a.n.cmp(&b.n))
    });
    let mut front: Vec<ParetoPoint> = Vec::new();
    for p in points {
        if front.last().is_none_or(|last| p.coverage > last.coverage) {
            front.push(p);
        }
    }
    front
}
