use rayon::prelude::*;

use crate::routing::{RouteSet, SectorSet, NO_ROUTE};

/// Least total travel of `k` admissible routes whose union covers a sector
/// set, for every set and every `k` until the table stops improving.
///
/// Since every caregiver's route time and workload share the daily limit,
/// `k` caregivers can only serve a scenario when this travel plus the total
/// service load fits in `k` working days.
#[derive(Debug, Clone)]
pub struct CoverBound {
    levels: Vec<Vec<u32>>,
}

impl CoverBound {
    /// Subset convolutions cost `O(3^S)` per level; beyond this size the
    /// bound is skipped.
    pub const MAX_SECTORS: usize = 16;

    pub fn new(routes: &RouteSet) -> Option<Self> {
        let n = routes.sector_count;
        if n > Self::MAX_SECTORS {
            return None;
        }
        let size = 1usize << n;
        let first: Vec<u32> = (0..size).map(|m| routes.cover_duration(m as SectorSet)).collect();
        let mut levels = vec![first];
        for _ in 1..n.max(1) {
            let prev = levels.last().unwrap();
            let next: Vec<u32> = (0..size)
                .into_par_iter()
                .map(|u| {
                    if u == 0 {
                        return 0;
                    }
                    let mut best = prev[u];
                    let low = u & u.wrapping_neg();
                    let rest = u ^ low;
                    let mut sub = rest;
                    loop {
                        let x = sub | low;
                        let head = routes.cover_duration(x as SectorSet);
                        let tail = prev[u ^ x];
                        if head != NO_ROUTE && tail != NO_ROUTE {
                            best = best.min(head + tail);
                        }
                        if sub == 0 {
                            break;
                        }
                        sub = (sub - 1) & rest;
                    }
                    best
                })
                .collect();
            if &next == prev {
                break;
            }
            levels.push(next);
        }
        Some(CoverBound { levels })
    }

    /// Least travel of `k` routes covering `sectors`, or [`NO_ROUTE`].
    pub fn min_travel(&self, k: u32, sectors: SectorSet) -> u32 {
        if sectors == 0 {
            return 0;
        }
        if k == 0 {
            return NO_ROUTE;
        }
        let level = (k as usize).min(self.levels.len()) - 1;
        self.levels[level][sectors as usize]
    }
}
