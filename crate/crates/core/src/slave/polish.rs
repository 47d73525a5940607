//! Travel clean-up of a plan with a fixed number of caregivers.
//!
//! The requirement only counts caregivers, so a packing may send two of them
//! to the same far sector. Here a caregiver repeatedly hands all its units of
//! one sector to colleagues when that shortens the routes in total; the
//! caregiver count and every unit stay as they are.

use super::{ResourcePlan, SlaveTask};
use crate::routing::{bit, SectorSet, NO_ROUTE};

/// Upper bound on improving moves, to keep the pass cheap.
const MAX_MOVES: usize = 10_000;

struct Worker {
    mask: SectorSet,
    load: u32,
    served: Vec<Vec<u32>>,
}

fn load_of(task: &SlaveTask, served: &[Vec<u32>]) -> u32 {
    served
        .iter()
        .enumerate()
        .flat_map(|(s, row)| row.iter().enumerate().map(move |(a, &q)| task.weight[s][a] * q))
        .sum()
}

fn mask_of(served: &[Vec<u32>]) -> SectorSet {
    served
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, row)| row.iter().any(|&q| q > 0))
        .fold(0, |m, (s, _)| m | bit(s))
}

/// Returns `plan` with each caregiver on the cheapest route through the
/// sectors it serves, after greedy relocations that cut total route time.
pub fn reduce_travel(task: &SlaveTask, plan: Vec<ResourcePlan>) -> Vec<ResourcePlan> {
    let routes = task.routes;
    let limit = task.daily_limit;
    let mut workers: Vec<Worker> = plan
        .into_iter()
        .map(|r| Worker {
            mask: mask_of(&r.served),
            load: load_of(task, &r.served),
            served: r.served,
        })
        .collect();
    let slack_with = |w: &Worker, mask: SectorSet| -> Option<u32> {
        let t = routes.cover_duration(mask);
        (t != NO_ROUTE && t + w.load <= limit).then(|| limit - t - w.load)
    };

    let mut moves = 0;
    let mut improved = true;
    while improved && moves < MAX_MOVES {
        improved = false;
        for k in 0..workers.len() {
            let sectors: Vec<usize> = (1..=task.sector_count()).filter(|&s| workers[k].mask & bit(s) != 0).collect();
            for s in sectors {
                if let Some(transfer) = relocation(task, &workers, k, s, &slack_with) {
                    for (j, a, q) in transfer {
                        workers[k].served[s][a] -= q;
                        workers[k].load -= q * task.weight[s][a];
                        workers[j].served[s][a] += q;
                        workers[j].load += q * task.weight[s][a];
                        workers[j].mask |= bit(s);
                    }
                    workers[k].mask &= !bit(s);
                    improved = true;
                    moves += 1;
                }
            }
        }
    }

    workers
        .into_iter()
        .map(|w| {
            let route = routes.cover(w.mask).expect("served sectors stay coverable");
            ResourcePlan {
                route: route.sectors,
                duration: route.duration,
                served: w.served,
            }
        })
        .collect()
}

/// Units `(receiver, care, count)` that let caregiver `k` leave sector `s`
/// with a net saving, or `None`.
fn relocation(
    task: &SlaveTask,
    workers: &[Worker],
    k: usize,
    s: usize,
    slack_with: &impl Fn(&Worker, SectorSet) -> Option<u32>,
) -> Option<Vec<(usize, usize, u32)>> {
    let routes = task.routes;
    let donor = &workers[k];
    let saving = routes.cover_duration(donor.mask) - routes.cover_duration(donor.mask & !bit(s));
    if saving == 0 {
        return None;
    }
    // Receivers by added route time, then index.
    let mut receivers: Vec<(u32, usize, u32)> = workers
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .filter_map(|(j, w)| {
            let added = routes.cover_duration(w.mask | bit(s));
            if added == NO_ROUTE {
                return None;
            }
            let extra = added - routes.cover_duration(w.mask);
            (extra < saving).then(|| (extra, j, slack_with(w, w.mask | bit(s)).unwrap_or(0)))
        })
        .collect();
    receivers.sort_unstable();

    let mut transfer = Vec::new();
    let mut cost = 0;
    let mut opened = vec![false; workers.len()];
    for (a, &q) in donor.served[s].iter().enumerate() {
        let w = task.weight[s][a];
        let mut left = q;
        for (extra, j, slack) in receivers.iter_mut() {
            if left == 0 {
                break;
            }
            let take = (*slack / w).min(left);
            if take == 0 {
                continue;
            }
            if !opened[*j] {
                opened[*j] = true;
                cost += *extra;
            }
            *slack -= take * w;
            left -= take;
            transfer.push((*j, a, take));
        }
        if left > 0 {
            return None;
        }
    }
    (cost < saving).then_some(transfer)
}
