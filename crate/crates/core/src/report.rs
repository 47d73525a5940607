//! Workload, comparison and performance summaries of a solved run.
//!
//! Workload figures pool minutes over the covered scenarios: travel and idle
//! time are shares of the paid time of the caregivers actually used, days
//! off a share of the staffed headcount-days.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::master::{
    covered_scenarios, master_lower_bound, staffing_cost, RequirementMatrix, StaffSolution,
};
use crate::model::{Instance, Scenario};
use crate::slave::{ResourcePlan, SlaveStatus};

/// How workload percentages are aggregated.
pub const WORKLOAD_AGGREGATION: &str = "pooled minutes over covered scenarios";

/// Minutes of one caregiver's day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceDay {
    pub profession: usize,
    pub scenario: usize,
    /// Route plus intra-sector moves.
    pub travel: u32,
    pub service: u32,
    pub idle: u32,
}

/// Minute accounting of every used caregiver in the covered scenarios.
pub fn resource_days(
    instance: &Instance,
    solution: &StaffSolution,
    req: &RequirementMatrix,
) -> Result<Vec<ResourceDay>> {
    let plans = req
        .assignments
        .as_ref()
        .ok_or(Error::MissingAssignments {
            scenario: solution.covered.first().copied().unwrap_or(0),
        })?;
    let limit = instance.daily_limit;
    let mut days = Vec::new();
    for &w in &solution.covered {
        for (p, row) in plans.iter().enumerate() {
            let plan = row
                .get(w)
                .and_then(|c| c.as_ref())
                .ok_or(Error::MissingAssignments { scenario: w })?;
            for resource in plan.iter().filter(|r| !r.is_idle()) {
                let (travel, service) = split_minutes(instance, p, resource);
                let idle = limit.checked_sub(travel + service).ok_or_else(|| {
                    Error::Invalid(format!(
                        "assignment of scenario {w} exceeds the daily limit for {}",
                        instance.professions[p].id
                    ))
                })?;
                days.push(ResourceDay {
                    profession: p,
                    scenario: w,
                    travel,
                    service,
                    idle,
                });
            }
        }
    }
    Ok(days)
}

fn split_minutes(instance: &Instance, p: usize, plan: &ResourcePlan) -> (u32, u32) {
    let mut travel = plan.duration;
    let mut service = 0;
    for (s, row) in plan.served.iter().enumerate() {
        for (a, &q) in row.iter().enumerate() {
            travel += instance.territory.intra[s] * q;
            service += instance.duration(a, p) * q;
        }
    }
    (travel, service)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadStats {
    pub pct_day_off: f64,
    pub pct_travel: f64,
    pub pct_service: f64,
    pub pct_idle: f64,
    pub staff: u32,
    pub cost: u64,
    pub aggregation: String,
}

pub fn workload_report(
    instance: &Instance,
    scenarios: &[Scenario],
    solution: &StaffSolution,
    req: &RequirementMatrix,
) -> Result<WorkloadStats> {
    if req.scenario_count() != scenarios.len() {
        return Err(Error::Invalid(format!(
            "{} scenarios given for a matrix over {}",
            scenarios.len(),
            req.scenario_count()
        )));
    }
    let days = resource_days(instance, solution, req)?;
    let staff: u32 = solution.n.iter().sum();
    let mut off = 0u64;
    for &w in &solution.covered {
        for (p, &np) in solution.n.iter().enumerate() {
            off += u64::from(np.saturating_sub(req.n_req[p][w]));
        }
    }
    let headcount = u64::from(staff) * solution.covered.len() as u64;
    let paid = days.len() as f64 * f64::from(instance.daily_limit);
    let sum = |f: fn(&ResourceDay) -> u32| days.iter().map(|d| u64::from(f(d))).sum::<u64>() as f64;
    let share = |x: f64| if paid > 0.0 { x / paid } else { 0.0 };
    Ok(WorkloadStats {
        pct_day_off: if headcount > 0 { off as f64 / headcount as f64 } else { 0.0 },
        pct_travel: share(sum(|d| d.travel)),
        pct_service: share(sum(|d| d.service)),
        pct_idle: share(sum(|d| d.idle)),
        staff,
        cost: solution.cost,
        aggregation: WORKLOAD_AGGREGATION.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonStats {
    pub professions: Vec<String>,
    pub inf: Vec<u32>,
    pub sup: Vec<u32>,
    pub n_star: Vec<u32>,
    /// Staffing at the running lower bounds.
    pub n1: Vec<u32>,
    /// Staffing at the largest requirement of any scenario reaching a
    /// running lower bound.
    pub n2: Vec<u32>,
    pub cost_star: u64,
    pub cost_n1: u64,
    pub cost_n2: u64,
    pub coverage_star: f64,
    pub coverage_n1: f64,
    pub coverage_n2: f64,
    /// Share of scenarios covered by `n*` but not `n1`.
    pub star_minus_n1: f64,
    /// Share of scenarios covered by `n2` but not `n*`.
    pub n2_minus_star: f64,
    /// Share of scenarios covered by `n*` but not `n2`.
    pub star_minus_n2: f64,
}

impl ComparisonStats {
    pub fn spread_below(&self) -> u32 {
        self.n_star.iter().zip(&self.inf).map(|(n, i)| n.saturating_sub(*i)).sum()
    }

    pub fn spread_above(&self) -> u32 {
        self.sup.iter().zip(&self.n_star).map(|(s, n)| s.saturating_sub(*n)).sum()
    }
}

/// Compares `solution` with the trivial staffings built from the running
/// lower bounds. Requirements are read before truncation, so skipped cells
/// count at their constructive bound.
pub fn comparison_report(req: &RequirementMatrix, costs: &[u64], solution: &StaffSolution) -> ComparisonStats {
    let raw = &req.raw;
    let omega = req.scenario_count();
    let inf: Vec<u32> = raw.iter().map(|r| r.iter().copied().min().unwrap_or(0)).collect();
    let sup: Vec<u32> = raw.iter().map(|r| r.iter().copied().max().unwrap_or(0)).collect();
    let n1 = req.lb_p.clone();
    let reaching: Vec<usize> = (0..omega)
        .filter(|&w| (0..raw.len()).any(|p| raw[p][w] >= req.lb_p[p]))
        .collect();
    let n2: Vec<u32> = (0..raw.len())
        .map(|p| reaching.iter().map(|&w| raw[p][w]).fold(req.lb_p[p], u32::max))
        .collect();

    let set = |n: &[u32]| covered_scenarios(raw, n).into_iter().collect::<BTreeSet<_>>();
    let (cs, c1, c2) = (set(&solution.n), set(&n1), set(&n2));
    let ratio = |k: usize| if omega == 0 { 0.0 } else { k as f64 / omega as f64 };
    ComparisonStats {
        professions: req.professions.clone(),
        cost_star: staffing_cost(costs, &solution.n),
        cost_n1: staffing_cost(costs, &n1),
        cost_n2: staffing_cost(costs, &n2),
        coverage_star: ratio(cs.len()),
        coverage_n1: ratio(c1.len()),
        coverage_n2: ratio(c2.len()),
        star_minus_n1: ratio(cs.difference(&c1).count()),
        n2_minus_star: ratio(c2.difference(&cs).count()),
        star_minus_n2: ratio(cs.difference(&c2).count()),
        inf,
        sup,
        n_star: solution.n.clone(),
        n1,
        n2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceStats {
    pub cells: usize,
    pub slave_calls: usize,
    pub pct_call_slave: f64,
    pub pct_opt: f64,
    /// Staff gap `n - lb` over calls stopped by the time limit.
    pub avg_gap: f64,
    pub max_gap: u32,
    /// Mean of `(n - lb) / n` over the same calls.
    pub avg_rel_gap: f64,
    pub master_cost: u64,
    pub master_lower_bound: u64,
    pub master_gap: f64,
    pub wall_time: f64,
}

pub fn performance_report(
    req: &RequirementMatrix,
    costs: &[u64],
    solution: &StaffSolution,
    alpha: f64,
) -> Result<PerformanceStats> {
    let cells = req.profession_count() * req.scenario_count();
    let mut calls = 0;
    let mut optimal = 0;
    let mut gaps = Vec::new();
    let mut rel = Vec::new();
    for p in 0..req.profession_count() {
        for w in 0..req.scenario_count() {
            match req.status[p][w] {
                SlaveStatus::LbShortcut => {}
                SlaveStatus::Optimal => {
                    calls += 1;
                    optimal += 1;
                }
                SlaveStatus::FeasibleTimeout => {
                    calls += 1;
                    let (n, lb) = (req.n_req[p][w], req.lb[p][w]);
                    gaps.push(n - lb);
                    rel.push(f64::from(n - lb) / f64::from(n.max(1)));
                }
            }
        }
    }
    let bound = master_lower_bound(req, costs, alpha)?;
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let gaps_f: Vec<f64> = gaps.iter().map(|&g| f64::from(g)).collect();
    Ok(PerformanceStats {
        cells,
        slave_calls: calls,
        pct_call_slave: if cells == 0 { 0.0 } else { calls as f64 / cells as f64 },
        pct_opt: if calls == 0 { 1.0 } else { optimal as f64 / calls as f64 },
        avg_gap: mean(&gaps_f),
        max_gap: gaps.iter().copied().max().unwrap_or(0),
        avg_rel_gap: mean(&rel),
        master_cost: solution.cost,
        master_lower_bound: bound,
        master_gap: if solution.cost == 0 {
            0.0
        } else {
            (solution.cost - bound.min(solution.cost)) as f64 / solution.cost as f64
        },
        wall_time: req.wall_time,
    })
}

/// What `solve` writes: the staffing decision and, optionally, the matrix
/// it was taken from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub label: String,
    pub alpha_star: Option<f64>,
    pub alpha: f64,
    pub professions: Vec<String>,
    pub n: Vec<u32>,
    pub cost: u64,
    pub coverage: f64,
    pub confidence_lb: f64,
    pub covered: Vec<usize>,
    pub master_lower_bound: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<RequirementMatrix>,
}

impl SolveRecord {
    pub fn solution(&self) -> StaffSolution {
        StaffSolution {
            n: self.n.clone(),
            cost: self.cost,
            covered: self.covered.clone(),
            coverage: self.coverage,
            confidence_lb: self.confidence_lb,
        }
    }
}

/// All tables of a run. Workload is absent when assignments were not kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub label: String,
    pub workload: Option<WorkloadStats>,
    pub comparison: ComparisonStats,
    pub performance: PerformanceStats,
}

pub fn run_report(instance: &Instance, scenarios: &[Scenario], record: &SolveRecord) -> Result<RunReport> {
    let req = record
        .matrix
        .as_ref()
        .ok_or_else(|| Error::Invalid("solution has no matrix; re-solve with --dump-matrix".into()))?;
    let solution = record.solution();
    let costs = instance.costs();
    let workload = match workload_report(instance, scenarios, &solution, req) {
        Ok(w) => Some(w),
        Err(Error::MissingAssignments { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(RunReport {
        label: record.label.clone(),
        workload,
        comparison: comparison_report(req, &costs, &solution),
        performance: performance_report(req, &costs, &solution, record.alpha)?,
    })
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

pub fn workload_csv(label: &str, w: &WorkloadStats) -> String {
    csv_string(
        &["instance", "staff", "cost", "% day off", "% travel", "% service", "% idle"],
        vec![vec![
            label.to_string(),
            w.staff.to_string(),
            w.cost.to_string(),
            pct(w.pct_day_off),
            pct(w.pct_travel),
            pct(w.pct_service),
            pct(w.pct_idle),
        ]],
    )
}

pub fn variance_csv(c: &ComparisonStats) -> String {
    let mut rows: Vec<Vec<String>> = (0..c.professions.len())
        .map(|p| {
            vec![
                c.professions[p].clone(),
                c.inf[p].to_string(),
                c.n_star[p].to_string(),
                c.sup[p].to_string(),
                c.n_star[p].saturating_sub(c.inf[p]).to_string(),
                c.sup[p].saturating_sub(c.n_star[p]).to_string(),
            ]
        })
        .collect();
    rows.push(vec![
        "total".into(),
        c.inf.iter().sum::<u32>().to_string(),
        c.n_star.iter().sum::<u32>().to_string(),
        c.sup.iter().sum::<u32>().to_string(),
        c.spread_below().to_string(),
        c.spread_above().to_string(),
    ]);
    csv_string(&["profession", "inf", "n*", "sup", "n* - inf", "sup - n*"], rows)
}

pub fn coverage_csv(c: &ComparisonStats) -> String {
    csv_string(
        &["cost n*", "cost n1", "cost n2", "n*", "n1", "n2", "n* \\ n1", "n2 \\ n*"],
        vec![vec![
            c.cost_star.to_string(),
            c.cost_n1.to_string(),
            c.cost_n2.to_string(),
            pct(c.coverage_star),
            pct(c.coverage_n1),
            pct(c.coverage_n2),
            pct(c.star_minus_n1),
            pct(c.n2_minus_star),
        ]],
    )
}

pub fn performance_csv(p: &PerformanceStats) -> String {
    csv_string(
        &["% call slave", "% opt.", "avg gap", "max gap", "% gap", "% master gap", "wall (s)"],
        vec![vec![
            pct(p.pct_call_slave),
            pct(p.pct_opt),
            format!("{:.2}", p.avg_gap),
            p.max_gap.to_string(),
            pct(p.avg_rel_gap),
            pct(p.master_gap),
            format!("{:.1}", p.wall_time),
        ]],
    )
}

/// Named CSV tables of a report, in a fixed order.
pub fn report_tables(report: &RunReport) -> Vec<(&'static str, String)> {
    let mut tables = Vec::new();
    if let Some(w) = &report.workload {
        tables.push(("workload.csv", workload_csv(&report.label, w)));
    }
    tables.push(("variance.csv", variance_csv(&report.comparison)));
    tables.push(("coverage.csv", coverage_csv(&report.comparison)));
    tables.push(("performance.csv", performance_csv(&report.performance)));
    tables
}

pub fn report_json(report: &RunReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}
