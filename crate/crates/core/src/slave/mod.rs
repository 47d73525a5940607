//! Daily requirement of one profession: the fewest caregivers able to serve
//! every demand of a scenario within the working day.
//!
//! Each caregiver follows one route of the [`RouteSet`] and serves demand
//! units only in sectors of that route (or at the depot for remote cares);
//! the route duration plus the service minutes, intra-sector travel
//! included, must fit in the daily limit.

mod bounds;
mod polish;
mod search;

pub use polish::reduce_travel;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Scenario};
use crate::routing::{bit, RouteSet, SectorSet, NO_ROUTE};

pub use bounds::CoverBound;

/// Default per-call time limit.
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(300);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlaveStatus {
    Optimal,
    FeasibleTimeout,
    LbShortcut,
}

/// Work of one caregiver: a route and the units served per `(sector, care)`,
/// sector 0 being the depot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourcePlan {
    pub route: SectorSet,
    pub duration: u32,
    pub served: Vec<Vec<u32>>,
}

impl ResourcePlan {
    pub fn units(&self) -> u32 {
        self.served.iter().flatten().sum()
    }

    pub fn is_idle(&self) -> bool {
        self.units() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlaveResult {
    pub n: u32,
    pub lower_bound: u32,
    pub status: SlaveStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<ResourcePlan>>,
    /// Seconds.
    pub elapsed: f64,
}

/// One `(profession, scenario)` requirement problem.
#[derive(Debug, Clone)]
pub struct SlaveTask<'a> {
    pub profession: usize,
    /// Units per `(sector, care)`; row 0 holds the remotely served demand.
    pub demand: Vec<Vec<u32>>,
    /// Minutes charged per unit: service plus intra-sector travel. Zero when
    /// the profession takes no part in the care.
    pub weight: Vec<Vec<u32>>,
    pub routes: &'a RouteSet,
    pub daily_limit: u32,
    /// Externally known lower bound on the answer.
    pub lb: u32,
    /// `None` runs until proven optimal.
    pub time_limit: Option<Duration>,
    pub(crate) cover: Option<&'a CoverBound>,
}

impl<'a> SlaveTask<'a> {
    /// Builds the task of `profession` for `scenario`, moving the demand of
    /// cares this profession serves remotely to the depot.
    pub fn new(
        instance: &Instance,
        profession: usize,
        scenario: &Scenario,
        routes: &'a RouteSet,
    ) -> Result<Self> {
        scenario.validate(instance)?;
        let sectors = instance.sector_count();
        let cares = instance.cares.len();
        let mut demand = vec![vec![0u32; cares]; sectors + 1];
        let mut weight = vec![vec![0u32; cares]; sectors + 1];
        for a in 0..cares {
            let w = instance.duration(a, profession);
            if instance.is_remote(a, profession) {
                demand[0][a] = (1..=sectors).map(|s| scenario.get(s, a)).sum();
                weight[0][a] = w;
            } else {
                for s in 1..=sectors {
                    demand[s][a] = scenario.get(s, a);
                    weight[s][a] = if w == 0 { 0 } else { w + instance.territory.intra[s] };
                }
            }
        }
        Ok(Self::from_parts(profession, demand, weight, routes, instance.daily_limit))
    }

    pub fn from_parts(
        profession: usize,
        demand: Vec<Vec<u32>>,
        weight: Vec<Vec<u32>>,
        routes: &'a RouteSet,
        daily_limit: u32,
    ) -> Self {
        assert_eq!(demand.len(), routes.sector_count + 1);
        assert_eq!(weight.len(), demand.len());
        SlaveTask {
            profession,
            demand,
            weight,
            routes,
            daily_limit,
            lb: 0,
            time_limit: Some(DEFAULT_TIME_LIMIT),
            cover: None,
        }
    }

    pub fn with_lb(mut self, lb: u32) -> Self {
        self.lb = lb;
        self
    }

    pub fn with_time_limit(mut self, limit: Option<Duration>) -> Self {
        self.time_limit = limit;
        self
    }

    /// Attaches a precomputed multi-route travel bound for this route set.
    pub fn with_cover_bound(mut self, cover: &'a CoverBound) -> Self {
        self.cover = Some(cover);
        self
    }

    pub fn care_count(&self) -> usize {
        self.demand[0].len()
    }

    pub fn sector_count(&self) -> usize {
        self.demand.len() - 1
    }

    /// Units per care, all sectors together.
    pub fn units_per_care(&self) -> Vec<u64> {
        (0..self.care_count())
            .map(|a| self.demand.iter().map(|row| u64::from(row[a])).sum())
            .collect()
    }

    /// Total minutes of service, intra-sector travel included.
    pub fn total_load(&self) -> u64 {
        self.cells().map(|(_, _, w, d)| u64::from(w) * u64::from(d)).sum()
    }

    /// `(sector, care, weight, count)` of every cell that needs this profession.
    pub(crate) fn cells(&self) -> impl Iterator<Item = (usize, usize, u32, u32)> + '_ {
        self.demand.iter().enumerate().flat_map(move |(s, row)| {
            row.iter().enumerate().filter_map(move |(a, &d)| {
                let w = self.weight[s][a];
                (d > 0 && w > 0).then_some((s, a, w, d))
            })
        })
    }

    /// Sectors (not the depot) holding demand for this profession.
    pub fn demand_sectors(&self) -> SectorSet {
        self.cells()
            .filter(|&(s, ..)| s > 0)
            .fold(0, |m, (s, ..)| m | bit(s))
    }

    /// Ceiling of total service minutes over the daily limit.
    pub fn workload_bound(&self) -> u32 {
        let l = u64::from(self.daily_limit);
        self.total_load().div_ceil(l) as u32
    }
}

struct OpenResource {
    mask: SectorSet,
    load: u32,
    served: Vec<Vec<u32>>,
}

impl OpenResource {
    fn new(task: &SlaveTask) -> Self {
        OpenResource {
            mask: 0,
            load: 0,
            served: vec![vec![0; task.care_count()]; task.sector_count() + 1],
        }
    }

    fn fits(&self, task: &SlaveTask, sector: usize, w: u32) -> bool {
        let mask = if sector == 0 { self.mask } else { self.mask | bit(sector) };
        let t = task.routes.cover_duration(mask);
        t != NO_ROUTE && u64::from(t) + u64::from(self.load) + u64::from(w) <= u64::from(task.daily_limit)
    }

    fn close(self, task: &SlaveTask) -> ResourcePlan {
        let route = task.routes.cover(self.mask).expect("feasible open resource");
        ResourcePlan {
            route: route.sectors,
            duration: route.duration,
            served: self.served,
        }
    }
}

/// Constructive upper bound: sectors in ascending index (depot first), cares
/// in declaration order, each unit appended to the current caregiver while
/// its re-priced route and workload fit, otherwise to a fresh caregiver.
pub fn heuristic_upper_bound(task: &SlaveTask) -> Result<SlaveResult> {
    let start = Instant::now();
    let mut done: Vec<ResourcePlan> = Vec::new();
    let mut cur = OpenResource::new(task);
    for s in 0..=task.sector_count() {
        for a in 0..task.care_count() {
            let w = task.weight[s][a];
            if w == 0 {
                continue;
            }
            for _ in 0..task.demand[s][a] {
                if !cur.fits(task, s, w) {
                    if cur.load == 0 {
                        return Err(Error::InfeasibleDemand { sector: s, care: a });
                    }
                    let full = std::mem::replace(&mut cur, OpenResource::new(task));
                    done.push(full.close(task));
                    if !cur.fits(task, s, w) {
                        return Err(Error::InfeasibleDemand { sector: s, care: a });
                    }
                }
                if s > 0 {
                    cur.mask |= bit(s);
                }
                cur.load += w;
                cur.served[s][a] += 1;
            }
        }
    }
    if cur.load > 0 {
        done.push(cur.close(task));
    }
    let n = done.len() as u32;
    Ok(SlaveResult {
        n,
        lower_bound: task.workload_bound().min(n),
        status: SlaveStatus::FeasibleTimeout,
        assignment: Some(reduce_travel(task, done)),
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// Node budget of each quick descent attempt below the incumbent.
const DESCENT_NODE_BUDGET: u64 = 20_000;

/// Exact minimum number of caregivers, or the tightest bounds proven within
/// the time limit. Computes the constructive upper bound first.
pub fn solve_slave(task: &SlaveTask) -> Result<SlaveResult> {
    let upper = heuristic_upper_bound(task)?;
    Ok(solve_slave_from(task, upper))
}

/// [`solve_slave`] starting from an already computed upper bound.
///
/// Resource counts below the incumbent are decided by an exact packing
/// search: a few budgeted attempts descend from the incumbent, then counts
/// are proven infeasible in ascending order from the lower bound. The first
/// feasible count met on the way up is optimal.
pub fn solve_slave_from(task: &SlaveTask, upper: SlaveResult) -> SlaveResult {
    let start = Instant::now();
    let deadline = task.time_limit.map(|d| start + d);
    let mut best = upper.n;
    let mut plan = upper.assignment;
    let mut proven = task.lb.max(task.workload_bound());

    let finish = |n: u32, proven: u32, plan: Option<Vec<ResourcePlan>>| {
        let lower_bound = proven.min(n);
        let plan = plan.map(|p| {
            let mut p = reduce_travel(task, p);
            while (p.len() as u32) < n {
                p.push(ResourcePlan {
                    route: 0,
                    duration: 0,
                    served: vec![vec![0; task.care_count()]; task.sector_count() + 1],
                });
            }
            p
        });
        SlaveResult {
            n,
            lower_bound,
            status: if lower_bound >= n {
                SlaveStatus::Optimal
            } else {
                SlaveStatus::FeasibleTimeout
            },
            assignment: plan,
            elapsed: start.elapsed().as_secs_f64(),
        }
    };

    if proven >= best {
        return finish(proven, proven, plan);
    }

    let mut search = search::PackingSearch::new(task, deadline);
    while proven < best && search.root_infeasible(proven) {
        proven += 1;
    }
    if proven >= best {
        return finish(best, proven, plan);
    }

    // Quick descent: loose counts are usually packed within a few nodes.
    let mut n = best - 1;
    while n >= proven {
        match search.run(n, Some(DESCENT_NODE_BUDGET)) {
            search::Outcome::Feasible(p) => {
                best = n;
                plan = Some(p);
                if n == 0 {
                    break;
                }
                n -= 1;
            }
            search::Outcome::Infeasible => {
                proven = n + 1;
                break;
            }
            search::Outcome::Aborted => break,
        }
    }

    while proven < best {
        if search.root_infeasible(proven) {
            proven += 1;
            continue;
        }
        match search.run(proven, None) {
            search::Outcome::Feasible(p) => {
                best = proven;
                plan = Some(p);
            }
            search::Outcome::Infeasible => proven += 1,
            search::Outcome::Aborted => break,
        }
    }
    finish(best, proven, plan)
}

/// Checks a plan against the task: route durations and daily limit per
/// caregiver, every unit served exactly, units only in visited sectors.
pub fn check_assignment(task: &SlaveTask, plan: &[ResourcePlan]) -> std::result::Result<(), String> {
    let sectors = task.sector_count();
    let cares = task.care_count();
    let mut served = vec![vec![0u32; cares]; sectors + 1];
    for (k, r) in plan.iter().enumerate() {
        let t = task
            .routes
            .duration(r.route)
            .ok_or_else(|| format!("resource {k}: route {:b} not admissible", r.route))?;
        if t != r.duration {
            return Err(format!("resource {k}: duration {} != {t}", r.duration));
        }
        let mut load = u64::from(t);
        for s in 0..=sectors {
            for a in 0..cares {
                let q = r.served[s][a];
                if q == 0 {
                    continue;
                }
                if s > 0 && r.route & bit(s) == 0 {
                    return Err(format!("resource {k}: serves sector {s} off its route"));
                }
                load += u64::from(task.weight[s][a]) * u64::from(q);
                served[s][a] += q;
            }
        }
        if load > u64::from(task.daily_limit) {
            return Err(format!("resource {k}: {load} minutes exceed the daily limit"));
        }
    }
    for s in 0..=sectors {
        for a in 0..cares {
            let need = if task.weight[s][a] == 0 { 0 } else { task.demand[s][a] };
            if served[s][a] != need {
                return Err(format!("cell ({s},{a}): served {} of {need}", served[s][a]));
            }
        }
    }
    Ok(())
}
