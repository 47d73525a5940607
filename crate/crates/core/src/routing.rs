//! Route catalogue: minimal Hamiltonian cycles through the depot over every
//! subset of sectors, filtered per profession.
//!
//! A sector subset is a bitmask where bit `s - 1` stands for sector `s`; the
//! depot belongs to every route implicitly, so mask 0 is the depot-only route
//! of a caregiver working exclusively remotely.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::model::{Instance, Territory};

/// Bitmask of sectors `1..=S`.
pub type SectorSet = u32;

pub const NO_ROUTE: u32 = u32::MAX;
const INF: u32 = u32::MAX / 4;

#[inline]
pub fn bit(sector: usize) -> SectorSet {
    debug_assert!(sector >= 1);
    1 << (sector - 1)
}

/// Sectors (1-based) of a mask, ascending.
pub fn sectors_of(mask: SectorSet) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask >> i & 1 == 1).map(|i| i + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Route {
    pub sectors: SectorSet,
    pub duration: u32,
}

impl Route {
    pub fn covers(&self, sector: usize) -> bool {
        sector == 0 || self.sectors & bit(sector) != 0
    }

    pub fn size(&self) -> u32 {
        self.sectors.count_ones()
    }
}

/// Exact cost of the cheapest cycle from the depot through every sector of
/// `subset` and back. Held-Karp over the subset's own sectors.
pub fn min_cycle_duration(territory: &Territory, subset: SectorSet) -> u32 {
    let members: Vec<usize> = sectors_of(subset).collect();
    let k = members.len();
    if k == 0 {
        return 0;
    }
    let d = &territory.inter;
    let mut dp = vec![INF; (1 << k) * k];
    for (i, &s) in members.iter().enumerate() {
        dp[(1 << i) * k + i] = d[0][s];
    }
    for mask in 1usize..1 << k {
        for last in 0..k {
            let cur = dp[mask * k + last];
            if cur >= INF || mask >> last & 1 == 0 {
                continue;
            }
            for next in 0..k {
                if mask >> next & 1 == 1 {
                    continue;
                }
                let m2 = mask | 1 << next;
                let cand = cur + d[members[last]][members[next]];
                if cand < dp[m2 * k + next] {
                    dp[m2 * k + next] = cand;
                }
            }
        }
    }
    let full = (1 << k) - 1;
    (0..k)
        .map(|last| dp[full * k + last] + d[members[last]][0])
        .min()
        .unwrap()
}

/// A visiting order (sector indices, depot excluded) achieving
/// [`min_cycle_duration`].
pub fn cycle_order(territory: &Territory, subset: SectorSet) -> Vec<usize> {
    let members: Vec<usize> = sectors_of(subset).collect();
    let k = members.len();
    if k == 0 {
        return Vec::new();
    }
    let d = &territory.inter;
    let mut dp = vec![INF; (1 << k) * k];
    let mut parent = vec![usize::MAX; (1 << k) * k];
    for (i, &s) in members.iter().enumerate() {
        dp[(1 << i) * k + i] = d[0][s];
    }
    for mask in 1usize..1 << k {
        for last in 0..k {
            let cur = dp[mask * k + last];
            if cur >= INF || mask >> last & 1 == 0 {
                continue;
            }
            for next in 0..k {
                if mask >> next & 1 == 1 {
                    continue;
                }
                let m2 = mask | 1 << next;
                let cand = cur + d[members[last]][members[next]];
                if cand < dp[m2 * k + next] {
                    dp[m2 * k + next] = cand;
                    parent[m2 * k + next] = last;
                }
            }
        }
    }
    let full = (1usize << k) - 1;
    let mut last = (0..k)
        .min_by_key(|&l| dp[full * k + l] + d[members[l]][0])
        .unwrap();
    let mut mask = full;
    let mut order = Vec::with_capacity(k);
    loop {
        order.push(members[last]);
        let p = parent[mask * k + last];
        mask &= !(1 << last);
        if p == usize::MAX {
            break;
        }
        last = p;
    }
    order.reverse();
    order
}

/// Minimal cycle duration for every subset of sectors, indexed by mask.
///
/// Held-Karp states `(subset, last sector)` are filled layer by layer in
/// order of subset size; each layer is computed in parallel.
pub fn cycle_durations(territory: &Territory) -> Vec<u32> {
    let n = territory.sector_count();
    let d = &territory.inter;
    let size = 1usize << n;
    let mut cycle = vec![0u32; size];
    if n == 0 {
        return cycle;
    }
    // path[mask * n + last]: depot -> all of mask, ending at sector last + 1
    let mut path = vec![INF; size * n];
    for i in 0..n {
        path[(1 << i) * n + i] = d[0][i + 1];
    }
    let mut layers: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for mask in 1..size {
        layers[mask.count_ones() as usize].push(mask);
    }
    for layer in &layers[2..] {
        let rows: Vec<Vec<u32>> = layer
            .par_iter()
            .map(|&mask| {
                let mut row = vec![INF; n];
                for last in 0..n {
                    if mask >> last & 1 == 0 {
                        continue;
                    }
                    let prev = mask & !(1 << last);
                    let mut best = INF;
                    for before in 0..n {
                        if prev >> before & 1 == 0 {
                            continue;
                        }
                        let cand = path[prev * n + before] + d[before + 1][last + 1];
                        best = best.min(cand);
                    }
                    row[last] = best;
                }
                row
            })
            .collect();
        for (&mask, row) in layer.iter().zip(rows) {
            path[mask * n..(mask + 1) * n].copy_from_slice(&row);
        }
    }
    cycle[1..].par_iter_mut().enumerate().for_each(|(i, c)| {
        let mask = i + 1;
        *c = (0..n)
            .filter(|&last| mask >> last & 1 == 1)
            .map(|last| path[mask * n + last] + d[last + 1][0])
            .min()
            .unwrap();
    });
    cycle
}

/// Admissible routes of one profession.
#[derive(Debug, Clone)]
pub struct RouteSet {
    pub profession: usize,
    pub sector_count: usize,
    pub daily_limit: u32,
    /// Sorted by (number of sectors, duration, mask).
    pub routes: Vec<Route>,
    duration_by_mask: Vec<u32>,
    cover_duration: Vec<u32>,
    cover_route: Vec<SectorSet>,
}

impl RouteSet {
    /// Builds a route set from a full table of cycle durations and an
    /// admissibility predicate. The depot-only route is always kept.
    pub fn from_table(
        profession: usize,
        sector_count: usize,
        daily_limit: u32,
        durations: &[u32],
        keep: impl Fn(SectorSet, u32) -> bool,
    ) -> Self {
        let size = 1usize << sector_count;
        assert_eq!(durations.len(), size);
        let mut duration_by_mask = vec![NO_ROUTE; size];
        let mut routes = Vec::new();
        for (mask, &t) in durations.iter().enumerate() {
            let mask = mask as SectorSet;
            if mask == 0 || keep(mask, t) {
                duration_by_mask[mask as usize] = t;
                routes.push(Route {
                    sectors: mask,
                    duration: if mask == 0 { 0 } else { t },
                });
            }
        }
        duration_by_mask[0] = 0;
        routes.sort_by_key(|r| (r.size(), r.duration, r.sectors));

        // Cheapest admissible route containing each subset (superset minimum).
        let mut cover_duration = duration_by_mask.clone();
        let mut cover_route: Vec<SectorSet> = (0..size as SectorSet).collect();
        for b in 0..sector_count {
            for mask in (0..size).rev() {
                if mask >> b & 1 == 0 {
                    let sup = mask | 1 << b;
                    if cover_duration[sup] < cover_duration[mask] {
                        cover_duration[mask] = cover_duration[sup];
                        cover_route[mask] = cover_route[sup];
                    }
                }
            }
        }
        RouteSet {
            profession,
            sector_count,
            daily_limit,
            routes,
            duration_by_mask,
            cover_duration,
            cover_route,
        }
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    pub fn contains(&self, mask: SectorSet) -> bool {
        self.duration_by_mask[mask as usize] != NO_ROUTE
    }

    /// Duration of the route with exactly these sectors, if admissible.
    pub fn duration(&self, mask: SectorSet) -> Option<u32> {
        match self.duration_by_mask[mask as usize] {
            NO_ROUTE => None,
            t => Some(t),
        }
    }

    /// Shortest admissible route visiting at least `mask`.
    pub fn cover(&self, mask: SectorSet) -> Option<Route> {
        match self.cover_duration[mask as usize] {
            NO_ROUTE => None,
            t => Some(Route {
                sectors: self.cover_route[mask as usize],
                duration: t,
            }),
        }
    }

    /// Duration of [`RouteSet::cover`], or [`NO_ROUTE`].
    #[inline]
    pub fn cover_duration(&self, mask: SectorSet) -> u32 {
        self.cover_duration[mask as usize]
    }

    /// Route counts by number of visited sectors.
    pub fn histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.sector_count + 1];
        for r in &self.routes {
            h[r.size() as usize] += 1;
        }
        h
    }
}

/// Shortest service time a profession can spend at a visited sector, or
/// `None` when it never travels (every involved care is remote).
pub fn cheapest_field_service(instance: &Instance, profession: usize) -> Option<u32> {
    (0..instance.cares.len())
        .filter(|&a| !instance.is_remote(a, profession))
        .map(|a| instance.duration(a, profession))
        .filter(|&w| w > 0)
        .min()
}

/// Route set of a profession from a precomputed [`cycle_durations`] table.
///
/// A route is kept when its cycle plus, at each visited sector, the
/// intra-sector time and the profession's cheapest field service fits in the
/// daily limit.
pub fn routes_from_table(instance: &Instance, profession: usize, durations: &[u32]) -> RouteSet {
    let territory = &instance.territory;
    let limit = u64::from(instance.daily_limit);
    let cheapest = cheapest_field_service(instance, profession);
    RouteSet::from_table(
        profession,
        instance.sector_count(),
        instance.daily_limit,
        durations,
        |mask, t| match cheapest {
            None => false,
            Some(w) => {
                let service: u64 = sectors_of(mask)
                    .map(|s| u64::from(territory.intra[s] + w))
                    .sum();
                u64::from(t) + service <= limit
            }
        },
    )
}

/// Enumerates and filters the routes of `profession`.
pub fn enumerate_routes(instance: &Instance, profession: &str) -> Result<RouteSet> {
    let p = instance.profession_index(profession)?;
    let table = cycle_durations(&instance.territory);
    Ok(routes_from_table(instance, p, &table))
}
