//! Exact decision procedure: can `n` caregivers serve every unit?
//!
//! Cells `(sector, care)` are dealt out one at a time; for a cell, the search
//! branches on how many of its units each caregiver takes. Caregivers are
//! interchangeable, so those in identical states receive non-increasing
//! counts, and subproblems already shown infeasible are remembered by their
//! canonical state (next cell, sorted caregiver states).

use std::borrow::Cow;
use std::collections::HashSet;
use std::time::Instant;

use super::bounds::CoverBound;
use super::{ResourcePlan, SlaveTask};
use crate::routing::{bit, SectorSet, NO_ROUTE};

const MEMO_CAPACITY: usize = 400_000;

pub(super) enum Outcome {
    Feasible(Vec<ResourcePlan>),
    Infeasible,
    Aborted,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    sector: usize,
    care: usize,
    weight: u32,
    count: u32,
}

pub(super) struct PackingSearch<'t, 'a> {
    task: &'t SlaveTask<'a>,
    cover: Option<Cow<'t, CoverBound>>,
    cells: Vec<Cell>,
    suffix_load: Vec<u64>,
    /// For each cell index, the load still to place per sector from there on,
    /// with the lightest unit among it.
    remaining: Vec<Vec<(usize, u64, u32)>>,
    /// Lightest unit from each cell index on.
    min_weight: Vec<u32>,
    total_load: u64,
    demand_mask: SectorSet,
    limit: u32,
    deadline: Option<Instant>,

    n: usize,
    mask: Vec<SectorSet>,
    load: Vec<u32>,
    plan: Vec<u32>,
    memo: HashSet<Vec<u64>>,
    nodes: u64,
    budget: Option<u64>,
    aborted: bool,
}

impl<'t, 'a> PackingSearch<'t, 'a> {
    pub(super) fn new(task: &'t SlaveTask<'a>, deadline: Option<Instant>) -> Self {
        let routes = task.routes;
        let mut cells: Vec<Cell> = task
            .cells()
            .map(|(sector, care, weight, count)| Cell {
                sector,
                care,
                weight,
                count,
            })
            .collect();
        // Far sectors first, the depot last; heavy units first within a sector.
        let reach = |s: usize| if s == 0 { 0 } else { routes.cover_duration(bit(s)) };
        cells.sort_by_key(|c| {
            (
                c.sector == 0,
                std::cmp::Reverse(reach(c.sector)),
                c.sector,
                std::cmp::Reverse(c.weight),
                c.care,
            )
        });
        let loads: Vec<u64> = cells.iter().map(|c| u64::from(c.weight) * u64::from(c.count)).collect();
        let mut suffix_load = vec![0u64; cells.len() + 1];
        for i in (0..cells.len()).rev() {
            suffix_load[i] = suffix_load[i + 1] + loads[i];
        }
        let mut remaining = vec![Vec::new(); cells.len() + 1];
        let mut min_weight = vec![u32::MAX; cells.len() + 1];
        for i in (0..cells.len()).rev() {
            let c = cells[i];
            let mut next: Vec<(usize, u64, u32)> = remaining[i + 1].clone();
            match next.iter_mut().find(|e| e.0 == c.sector) {
                Some(entry) => {
                    entry.1 += loads[i];
                    entry.2 = entry.2.min(c.weight);
                }
                None => next.push((c.sector, loads[i], c.weight)),
            }
            remaining[i] = next;
            min_weight[i] = min_weight[i + 1].min(c.weight);
        }
        let cover = match task.cover {
            Some(c) => Some(Cow::Borrowed(c)),
            None => CoverBound::new(routes).map(Cow::Owned),
        };
        PackingSearch {
            task,
            cover,
            cells,
            suffix_load,
            remaining,
            min_weight,
            total_load: task.total_load(),
            demand_mask: task.demand_sectors(),
            limit: task.daily_limit,
            deadline,
            n: 0,
            mask: Vec::new(),
            load: Vec::new(),
            plan: Vec::new(),
            memo: HashSet::new(),
            nodes: 0,
            budget: None,
            aborted: false,
        }
    }

    /// Cheap necessary conditions for `n` caregivers, checked before searching.
    pub(super) fn root_infeasible(&self, n: u32) -> bool {
        let day = u64::from(self.limit);
        let paid = u64::from(n) * day;
        if self.total_load > paid {
            return true;
        }
        if self.total_load > 0 && n == 0 {
            return true;
        }
        if let Some(cover) = &self.cover {
            let travel = cover.min_travel(n, self.demand_mask);
            if travel == NO_ROUTE || u64::from(travel) + self.total_load > paid {
                return true;
            }
        }
        for &(s, need, _) in &self.remaining[0] {
            let t = if s == 0 { 0 } else { self.task.routes.cover_duration(bit(s)) };
            if t == NO_ROUTE || u64::from(n) * (day - u64::from(t).min(day)) < need {
                return true;
            }
        }
        false
    }

    pub(super) fn run(&mut self, n: u32, budget: Option<u64>) -> Outcome {
        if self.root_infeasible(n) {
            return Outcome::Infeasible;
        }
        let n = n as usize;
        self.n = n;
        self.mask = vec![0; n];
        self.load = vec![0; n];
        self.plan = vec![0; self.cells.len() * n];
        self.nodes = 0;
        self.budget = budget;
        self.aborted = false;
        if self.dfs(0) {
            Outcome::Feasible(self.extract())
        } else if self.aborted {
            Outcome::Aborted
        } else {
            Outcome::Infeasible
        }
    }

    fn extract(&self) -> Vec<ResourcePlan> {
        let task = self.task;
        (0..self.n)
            .map(|k| {
                let route = task.routes.cover(self.mask[k]).expect("packed caregiver has a route");
                let mut served = vec![vec![0; task.care_count()]; task.sector_count() + 1];
                for (i, c) in self.cells.iter().enumerate() {
                    served[c.sector][c.care] += self.plan[i * self.n + k];
                }
                ResourcePlan {
                    route: route.sectors,
                    duration: route.duration,
                    served,
                }
            })
            .collect()
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if let Some(b) = self.budget {
            if self.nodes > b {
                self.aborted = true;
            }
        }
        if self.nodes & 1023 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.aborted = true;
                }
            }
        }
        self.aborted
    }

    #[inline]
    fn slack(&self, k: usize, mask: SectorSet) -> u64 {
        let t = self.task.routes.cover_duration(mask);
        if t == NO_ROUTE {
            return 0;
        }
        u64::from(self.limit).saturating_sub(u64::from(t) + u64::from(self.load[k]))
    }

    /// Slack that can still hold work: none when no remaining unit fits.
    #[inline]
    fn usable(&self, k: usize, mask: SectorSet, lightest: u32) -> u64 {
        let s = self.slack(k, mask);
        if s < u64::from(lightest) {
            0
        } else {
            s
        }
    }

    fn capacity_ok(&self, i: usize) -> bool {
        let lightest = self.min_weight[i];
        let total: u64 = (0..self.n).map(|k| self.usable(k, self.mask[k], lightest)).sum();
        if total < self.suffix_load[i] {
            return false;
        }
        self.remaining[i].iter().all(|&(s, need, lightest)| {
            let add = if s == 0 { 0 } else { bit(s) };
            let cap: u64 = (0..self.n).map(|k| self.usable(k, self.mask[k] | add, lightest)).sum();
            cap >= need
        })
    }

    fn key(&self, i: usize) -> Vec<u64> {
        let mut key: Vec<u64> = (0..self.n)
            .map(|k| u64::from(self.mask[k]) << 32 | u64::from(self.load[k]))
            .collect();
        key.sort_unstable();
        key.push(i as u64);
        key
    }

    fn dfs(&mut self, i: usize) -> bool {
        if i == self.cells.len() {
            return true;
        }
        if self.tick() {
            return false;
        }
        let key = self.key(i);
        if self.memo.contains(&key) {
            return false;
        }
        if !self.capacity_ok(i) {
            self.remember(key);
            return false;
        }

        let cell = self.cells[i];
        let add = if cell.sector == 0 { 0 } else { bit(cell.sector) };
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&k| {
            let holds = self.mask[k] & add == add;
            let empty = self.mask[k] == 0 && self.load[k] == 0;
            (!holds, empty, self.mask[k], self.load[k])
        });
        let caps: Vec<u32> = order
            .iter()
            .map(|&k| (self.slack(k, self.mask[k] | add) / u64::from(cell.weight)) as u32)
            .collect();
        let mut suffix = vec![0u32; order.len() + 1];
        for j in (0..order.len()).rev() {
            suffix[j] = suffix[j + 1].saturating_add(caps[j]);
        }
        let same: Vec<bool> = (0..order.len())
            .map(|j| {
                j > 0
                    && self.mask[order[j]] == self.mask[order[j - 1]]
                    && self.load[order[j]] == self.load[order[j - 1]]
            })
            .collect();

        let ok = self.distribute(i, &order, &caps, &suffix, &same, 0, cell.count, u32::MAX);
        if !ok && !self.aborted {
            self.remember(key);
        }
        ok
    }

    fn remember(&mut self, key: Vec<u64>) {
        if self.memo.len() >= MEMO_CAPACITY {
            self.memo.clear();
        }
        self.memo.insert(key);
    }

    #[allow(clippy::too_many_arguments)]
    fn distribute(
        &mut self,
        i: usize,
        order: &[usize],
        caps: &[u32],
        suffix: &[u32],
        same: &[bool],
        j: usize,
        left: u32,
        prev: u32,
    ) -> bool {
        if left == 0 {
            return self.dfs(i + 1);
        }
        if j == order.len() || suffix[j] < left {
            return false;
        }
        let cell = self.cells[i];
        let k = order[j];
        let mut hi = caps[j].min(left);
        if same[j] {
            hi = hi.min(prev);
        }
        let lo = left.saturating_sub(suffix[j + 1]);
        if hi < lo {
            return false;
        }
        let (old_mask, old_load) = (self.mask[k], self.load[k]);
        for x in (lo..=hi).rev() {
            if x > 0 && cell.sector > 0 {
                self.mask[k] = old_mask | bit(cell.sector);
            } else {
                self.mask[k] = old_mask;
            }
            self.load[k] = old_load + x * cell.weight;
            self.plan[i * self.n + k] = x;
            let ok = self.distribute(i, order, caps, suffix, same, j + 1, left - x, x);
            if ok {
                return true;
            }
            self.mask[k] = old_mask;
            self.load[k] = old_load;
            self.plan[i * self.n + k] = 0;
            if self.aborted {
                return false;
            }
        }
        false
    }
}
