//! One checker per invariant. Each takes a seed, builds its own case and
//! returns a description of the first violation.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use staffdim::master::{
    calibrate_alpha, compute_requirements, confidence_lower_bound, covered_scenarios, pareto_front,
    required_count, solve_master, solve_master_count, RequirementMatrix, RequirementOptions,
};
use staffdim::model::{instance_to_string, load_instance, parse_instance, save_instance, Instance, Scenario};
use staffdim::report::{
    comparison_report, report_json, report_tables, resource_days, run_report, SolveRecord,
};
use staffdim::routing::{cycle_durations, min_cycle_duration, routes_from_table};
use staffdim::scengen::{
    generate_series, generate_territory, sample_scenarios, DemandPattern, Series, Sparsity, TerritorySpec,
};
use staffdim::slave::{
    heuristic_upper_bound, reduce_travel, solve_slave, CoverBound, ResourcePlan, SlaveStatus, SlaveTask,
};

use super::{master_oracle, master_toy, random_matrix, slave_oracle, slave_toy, tsp_bruteforce};

pub type Check = Result<(), String>;
pub type Checker = (&'static str, fn(u64) -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const SPARSITIES: [Sparsity; 3] = [Sparsity::Rural, Sparsity::Urban, Sparsity::SemiUrban];

fn random_spec(r: &mut ChaCha8Rng, max_divisions: usize) -> TerritorySpec {
    TerritorySpec {
        sparsity: SPARSITIES[r.random_range(0..3)],
        divisions: r.random_range(1..=max_divisions),
        seed: r.random(),
    }
}

fn random_instance(seed: u64, max_divisions: usize) -> Instance {
    let mut r = rng(seed);
    let spec = random_spec(&mut r, max_divisions);
    let series = Series::ALL[r.random_range(0..Series::ALL.len())];
    generate_series(series, generate_territory(&spec), r.random())
}

// ---- model ----

pub fn round_trip(seed: u64) -> Check {
    let instance = random_instance(seed, 12);
    let text = instance_to_string(&instance).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("instance.json");
    std::fs::write(&path, &text).map_err(|e| e.to_string())?;
    let loaded = load_instance(&path).map_err(|e| e.to_string())?;
    let again = dir.path().join("again.json");
    save_instance(&loaded, &again).map_err(|e| e.to_string())?;
    let bytes = std::fs::read_to_string(&again).map_err(|e| e.to_string())?;
    ensure(bytes == text, || "saved file differs from the original".into())?;
    let reparsed = parse_instance(&bytes).map_err(|e| e.to_string())?;
    ensure(reparsed == instance, || "parsed instance differs".into())
}

pub fn service_minutes_additive(seed: u64) -> Check {
    let instance = random_instance(seed, 12);
    let mut r = rng(seed ^ 0x5eed);
    for _ in 0..20 {
        let care = &instance.cares[r.random_range(0..instance.cares.len())];
        let prof = &instance.professions[r.random_range(0..instance.professions.len())];
        let sector = r.random_range(1..=instance.sector_count());
        let got = instance
            .effective_service_minutes(&care.id, &prof.id, sector)
            .map_err(|e| e.to_string())?;
        ensure(got - instance.territory.intra[sector] == care.duration(&prof.id), || {
            format!("{} / {} at sector {sector}: {got}", care.id, prof.id)
        })?;
    }
    Ok(())
}

// ---- scengen ----

pub fn generation_deterministic(seed: u64) -> Check {
    let mut r = rng(seed);
    let spec = random_spec(&mut r, 15);
    let draw = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let instance = generate_series(Series::S4, generate_territory(&spec), seed);
            let scenarios = sample_scenarios(&instance, seed, 20);
            (instance, scenarios)
        })
    };
    let (a, b) = (draw(1), draw(3));
    ensure(a.0 == b.0, || "territory differs across thread counts".into())?;
    ensure(a.1 == b.1, || "scenario stream differs across thread counts".into())?;
    ensure(draw(1).1 == a.1, || "scenario stream differs across runs".into())
}

pub fn intra_below_inter(seed: u64) -> Check {
    let mut r = rng(seed);
    let t = generate_territory(&random_spec(&mut r, 15));
    for s in 1..=t.sector_count() {
        let nearest = (0..=t.sector_count()).filter(|&o| o != s).map(|o| t.inter[s][o]).min().unwrap();
        ensure(t.intra[s] < nearest, || format!("sector {s}: intra {} vs nearest {nearest}", t.intra[s]))?;
    }
    Ok(())
}

/// p-value of the pooled (sector, care) counts of 10^4 units.
pub fn chi_square_p_value(seed: u64) -> f64 {
    let mut r = rng(seed);
    let sectors = r.random_range(2..=6);
    let spec = TerritorySpec {
        sparsity: Sparsity::Urban,
        divisions: sectors,
        seed,
    };
    let mut instance = generate_series(Series::S1_1, generate_territory(&spec), seed);
    let raw: Vec<f64> = (0..sectors).map(|_| r.random_range(1.0..3.0)).collect();
    let sum: f64 = raw.iter().sum();
    let spatial: Vec<f64> = raw.iter().map(|x| x / sum).collect();
    let epi: Vec<f64> = instance.cares.iter().map(|c| c.frequency).collect();
    instance.pattern = DemandPattern::stable(100, spatial.clone(), epi.clone());
    let scenarios = sample_scenarios(&instance, seed, 100);
    let total: f64 = scenarios.iter().map(|s| s.total() as f64).sum();
    let mut stat = 0.0;
    for s in 0..sectors {
        for (a, rho) in epi.iter().enumerate() {
            let observed: f64 = scenarios.iter().map(|sc| f64::from(sc.demands[s][a])).sum();
            let expected = total * spatial[s] * rho;
            stat += (observed - expected).powi(2) / expected;
        }
    }
    let df = (sectors * epi.len() - 1) as f64;
    ChiSquared::new(df).unwrap().sf(stat)
}

pub fn chi_square(seed: u64) -> Check {
    let p = chi_square_p_value(seed);
    ensure(p > 0.001, || format!("p-value {p}"))
}

// ---- routing ----

pub fn cycle_monotone(seed: u64) -> Check {
    let mut r = rng(seed);
    let t = generate_territory(&random_spec(&mut r, 12));
    let s = t.sector_count();
    let table = cycle_durations(&t);
    for _ in 0..50 {
        let mask: u32 = r.random_range(0..1u32 << s);
        let extra = r.random_range(1..=s);
        let bigger = mask | 1 << (extra - 1);
        ensure(table[bigger as usize] >= table[mask as usize], || {
            format!("adding sector {extra} to {mask:b} shortened the tour")
        })?;
        ensure(table[mask as usize] == min_cycle_duration(&t, mask), || {
            format!("table and single query disagree on {mask:b}")
        })?;
    }
    Ok(())
}

pub fn routes_below_limit(seed: u64) -> Check {
    let mut r = rng(seed);
    let mut instance = random_instance(seed, 10);
    instance.daily_limit = r.random_range(150..=600);
    let table = cycle_durations(&instance.territory);
    for p in 0..instance.professions.len() {
        let routes = routes_from_table(&instance, p, &table);
        for route in &routes.routes {
            ensure(route.duration < instance.daily_limit, || {
                format!("route {:b} lasts {} with L = {}", route.sectors, route.duration, instance.daily_limit)
            })?;
        }
    }
    Ok(())
}

pub fn dp_matches_bruteforce(seed: u64) -> Check {
    let mut r = rng(seed);
    let t = generate_territory(&random_spec(&mut r, 9));
    let s = t.sector_count();
    let table = cycle_durations(&t);
    for mask in 0u32..1 << s {
        if mask.count_ones() > 7 {
            continue;
        }
        let brute = tsp_bruteforce(&t, mask);
        ensure(table[mask as usize] == brute, || {
            format!("subset {mask:b}: dp {} brute {brute}", table[mask as usize])
        })?;
    }
    Ok(())
}

// ---- slave ----

fn exact(instance: &Instance, scenario: &Scenario) -> Result<Option<(u32, u32, u32)>, String> {
    let routes = staffdim::routing::enumerate_routes(instance, &instance.professions[0].id).map_err(|e| e.to_string())?;
    let task = SlaveTask::new(instance, 0, scenario, &routes)
        .map_err(|e| e.to_string())?
        .with_time_limit(None);
    let upper = match heuristic_upper_bound(&task) {
        Ok(u) => u.n,
        Err(_) => return Ok(None),
    };
    let solved = solve_slave(&task).map_err(|e| e.to_string())?;
    if solved.status != SlaveStatus::Optimal {
        return Err("unlimited solve not optimal".into());
    }
    Ok(Some((solved.n, upper, task.workload_bound())))
}

pub fn monotone_in_demand(seed: u64) -> Check {
    let (instance, scenario) = slave_toy(seed);
    let Some((n, ..)) = exact(&instance, &scenario)? else { return Ok(()) };
    let mut r = rng(seed ^ 0xadd);
    let mut more = scenario.clone();
    let s = r.random_range(0..more.demands.len());
    let a = r.random_range(0..instance.cares.len());
    more.demands[s][a] += 1;
    let Some((n2, ..)) = exact(&instance, &more)? else { return Ok(()) };
    ensure(n2 >= n, || format!("adding a unit at ({}, {a}) lowered {n} to {n2}", s + 1))
}

pub fn bounds_sandwich(seed: u64) -> Check {
    let (instance, scenario) = slave_toy(seed);
    let Some((n, upper, workload)) = exact(&instance, &scenario)? else { return Ok(()) };
    ensure(workload <= n, || format!("workload bound {workload} above optimum {n}"))?;
    ensure(n <= upper, || format!("optimum {n} above heuristic {upper}"))?;
    if let Some(truth) = slave_oracle(&instance, 0, &scenario) {
        ensure(truth == n, || format!("optimum {n}, oracle {truth}"))?;
    }
    Ok(())
}

/// Replays a plan without the library's checker.
pub fn replay(instance: &Instance, p: usize, scenario: &Scenario, plan: &[staffdim::slave::ResourcePlan]) -> Check {
    let id = &instance.professions[p].id;
    let s_count = instance.sector_count();
    let mut served = vec![vec![0u32; instance.cares.len()]; s_count + 1];
    for (k, r) in plan.iter().enumerate() {
        ensure(r.duration == tsp_bruteforce(&instance.territory, r.route), || {
            format!("resource {k}: duration {} is not the tour of {:b}", r.duration, r.route)
        })?;
        let mut used = r.duration;
        for (s, row) in r.served.iter().enumerate() {
            for (a, &q) in row.iter().enumerate() {
                if q == 0 {
                    continue;
                }
                let care = &instance.cares[a];
                if s == 0 {
                    ensure(care.is_remote(id), || format!("resource {k} serves field care {a} at the depot"))?;
                } else {
                    ensure(!care.is_remote(id), || format!("resource {k} travels for remote care {a}"))?;
                    ensure(r.route >> (s - 1) & 1 == 1, || format!("resource {k} serves unvisited sector {s}"))?;
                }
                used += (care.duration(id) + instance.territory.intra[s]) * q;
                served[s][a] += q;
            }
        }
        ensure(used <= instance.daily_limit, || format!("resource {k} works {used} minutes"))?;
    }
    for (a, care) in instance.cares.iter().enumerate() {
        if care.duration(id) == 0 {
            continue;
        }
        let want_depot: u32 = if care.is_remote(id) { (1..=s_count).map(|s| scenario.get(s, a)).sum() } else { 0 };
        ensure(served[0][a] == want_depot, || format!("care {a}: {} remote units served", served[0][a]))?;
        for s in 1..=s_count {
            let want = if care.is_remote(id) { 0 } else { scenario.get(s, a) };
            ensure(served[s][a] == want, || format!("cell ({s}, {a}): {} of {want} served", served[s][a]))?;
        }
    }
    Ok(())
}

pub fn assignment_replays(seed: u64) -> Check {
    let (instance, scenario) = slave_toy(seed);
    let routes = staffdim::routing::enumerate_routes(&instance, "x").map_err(|e| e.to_string())?;
    let task = SlaveTask::new(&instance, 0, &scenario, &routes).map_err(|e| e.to_string())?.with_time_limit(None);
    let Ok(upper) = heuristic_upper_bound(&task) else { return Ok(()) };
    replay(&instance, 0, &scenario, upper.assignment.as_deref().unwrap_or_default())
        .map_err(|e| format!("heuristic: {e}"))?;
    let solved = solve_slave(&task).map_err(|e| e.to_string())?;
    let plan = solved.assignment.as_deref().unwrap_or_default();
    ensure(plan.len() as u32 == solved.n, || format!("{} plans for n = {}", plan.len(), solved.n))?;
    replay(&instance, 0, &scenario, plan).map_err(|e| format!("exact: {e}"))
}

pub fn optimal_is_stable(seed: u64) -> Check {
    let mut r = rng(seed);
    let spec = TerritorySpec {
        sparsity: SPARSITIES[r.random_range(0..3)],
        divisions: r.random_range(3..=6),
        seed,
    };
    let mut instance = generate_series(Series::S1_1, generate_territory(&spec), seed);
    instance.pattern.total = staffdim::scengen::TotalLaw::Fixed(r.random_range(8..=20));
    let scenario = &sample_scenarios(&instance, seed, 1)[0];
    let table = cycle_durations(&instance.territory);
    let p = r.random_range(0..instance.professions.len());
    let routes = routes_from_table(&instance, p, &table);
    let cover = CoverBound::new(&routes);
    let base = SlaveTask::new(&instance, p, scenario, &routes).map_err(|e| e.to_string())?;
    let base = match &cover {
        Some(c) => base.with_cover_bound(c),
        None => base,
    };
    let quick = solve_slave(&base.clone().with_time_limit(Some(std::time::Duration::from_millis(20))))
        .map_err(|e| e.to_string())?;
    if quick.status != SlaveStatus::Optimal {
        return Ok(());
    }
    let full = solve_slave(&base.with_time_limit(None)).map_err(|e| e.to_string())?;
    ensure(full.n == quick.n, || format!("timed solve {} vs unlimited {}", quick.n, full.n))
}

// ---- master ----

fn exact_options(threads: usize, cut_rule: bool, keep: bool) -> RequirementOptions {
    RequirementOptions {
        time_limit: None,
        threads,
        keep_assignments: keep,
        cut_rule,
    }
}

pub fn truncation_sound(seed: u64) -> Check {
    let (instance, scenarios) = master_toy(seed, 20);
    let alpha = [0.6, 0.75, 0.8, 0.9][(seed % 4) as usize];
    let costs = instance.costs();
    let cut = compute_requirements(&instance, &scenarios, alpha, &exact_options(1, true, false)).map_err(|e| e.to_string())?;
    let full = compute_requirements(&instance, &scenarios, alpha, &exact_options(1, false, false)).map_err(|e| e.to_string())?;
    cut.check()?;
    let a = solve_master(&cut, &costs, alpha).map_err(|e| e.to_string())?;
    let b = solve_master(&full, &costs, alpha).map_err(|e| e.to_string())?;
    ensure(a.cost == b.cost, || format!("truncated optimum {} vs full {}", a.cost, b.cost))?;
    // Shortcut cells never exceed the bound they were lifted to.
    for p in 0..full.profession_count() {
        for w in 0..full.scenario_count() {
            if cut.status[p][w] == SlaveStatus::LbShortcut {
                ensure(full.n_req[p][w] <= cut.lb_p[p], || format!("cell ({p},{w}) skipped above its bound"))?;
            }
        }
    }
    Ok(())
}

pub fn confidence_formula() -> Check {
    let lb = confidence_lower_bound(0.86, 100);
    ensure((lb - 0.8024).abs() <= 1e-4, || format!("{lb}"))?;
    let a = calibrate_alpha(0.8, 100).map_err(|e| e.to_string())?;
    ensure((a - 0.86).abs() < 1e-12, || format!("calibrated {a}"))
}

pub fn master_constraints(seed: u64) -> Check {
    let mut r = rng(seed);
    let p = r.random_range(1..=3);
    let omega = r.random_range(1..=12);
    let matrix = random_matrix(&mut r, p, omega, 6);
    let costs: Vec<u64> = (0..p).map(|_| r.random_range(1..=30)).collect();
    let alpha = r.random_range(0.0..=1.0);
    let need = required_count(alpha, omega).map_err(|e| e.to_string())?;
    let sol = solve_master_count(&matrix, &costs, need).map_err(|e| e.to_string())?;
    for &w in &sol.covered {
        for q in 0..p {
            ensure(matrix[q][w] <= sol.n[q], || format!("scenario {w} listed as covered"))?;
        }
    }
    let direct: Vec<usize> = (0..omega).filter(|&w| (0..p).all(|q| matrix[q][w] <= sol.n[q])).collect();
    ensure(direct == sol.covered, || "covered set incomplete".into())?;
    ensure(sol.covered.len() >= need, || format!("{} covered, {need} needed", sol.covered.len()))?;
    ensure(sol.coverage + 1e-12 >= alpha, || format!("coverage {} below {alpha}", sol.coverage))?;
    let (cost, n) = master_oracle(&matrix, &costs, need);
    ensure((cost, n.clone()) == (sol.cost, sol.n.clone()), || {
        format!("solver {:?} at {}, oracle {n:?} at {cost}", sol.n, sol.cost)
    })
}

pub fn matrix_of(n_req: Vec<Vec<u32>>) -> RequirementMatrix {
    let (p, w) = (n_req.len(), n_req[0].len());
    RequirementMatrix {
        professions: (0..p).map(|i| format!("p{i}")).collect(),
        alpha: 1.0,
        lb: n_req.clone(),
        ub: n_req.clone(),
        raw: n_req.clone(),
        lb_p: n_req.iter().map(|r| *r.iter().max().unwrap()).collect(),
        n_req,
        status: vec![vec![SlaveStatus::Optimal; w]; p],
        elapsed: vec![vec![0.0; w]; p],
        cut_rule: false,
        wall_time: 0.0,
        assignments: None,
    }
}

pub fn pareto_properties(seed: u64) -> Check {
    let mut r = rng(seed);
    let p = r.random_range(1..=3);
    let omega = r.random_range(1..=10);
    let req = matrix_of(random_matrix(&mut r, p, omega, 5));
    let costs: Vec<u64> = (0..p).map(|_| r.random_range(1..=20)).collect();
    let front = pareto_front(&req, &costs).map_err(|e| e.to_string())?;
    for a in &front {
        for b in &front {
            if a == b {
                continue;
            }
            let dominates = b.cost <= a.cost && b.coverage >= a.coverage;
            ensure(!dominates, || format!("{b:?} dominates {a:?}"))?;
        }
        let k = (a.coverage * omega as f64).round() as usize;
        let (best, _) = master_oracle(&req.n_req, &costs, k);
        ensure(best == a.cost, || format!("coverage {k}/{omega}: front cost {} vs optimum {best}", a.cost))?;
        ensure(covered_scenarios(&req.n_req, &a.n).len() == k, || "coverage mismatch".into())?;
    }
    // No optimal level is missing: every nondominated (cost, k) pair appears.
    let mut levels: Vec<(u64, usize)> = (1..=omega).map(|k| (master_oracle(&req.n_req, &costs, k).0, k)).collect();
    levels.sort();
    let mut expected = Vec::new();
    let mut best_k = 0;
    for (cost, k) in levels {
        if k > best_k {
            if let Some(&(c, _)) = expected.last() {
                if c == cost {
                    expected.pop();
                }
            }
            expected.push((cost, k));
            best_k = k;
        }
    }
    let got: Vec<(u64, usize)> = front.iter().map(|p| (p.cost, (p.coverage * omega as f64).round() as usize)).collect();
    ensure(got == expected, || format!("front {got:?}, exhaustive {expected:?}"))
}

pub fn solution_deterministic(seed: u64) -> Check {
    let (instance, scenarios) = master_toy(seed, 12);
    let alpha = 0.75;
    let costs = instance.costs();
    let mut outcomes = Vec::new();
    for threads in [1, 2, 4] {
        let req = compute_requirements(&instance, &scenarios, alpha, &exact_options(threads, true, false)).map_err(|e| e.to_string())?;
        let sol = solve_master(&req, &costs, alpha).map_err(|e| e.to_string())?;
        outcomes.push((req.n_req, req.lb, req.raw, req.status, req.lb_p, sol));
    }
    ensure(outcomes.windows(2).all(|w| w[0] == w[1]), || "outcome depends on the thread count".into())
}

// ---- report ----

fn solved_toy(seed: u64, alpha: f64) -> Result<(Instance, Vec<Scenario>, SolveRecord), String> {
    let (instance, scenarios) = master_toy(seed, 10);
    let costs = instance.costs();
    let req = compute_requirements(&instance, &scenarios, alpha, &exact_options(1, true, true)).map_err(|e| e.to_string())?;
    let sol = solve_master(&req, &costs, alpha).map_err(|e| e.to_string())?;
    let record = SolveRecord {
        label: instance.label.clone(),
        alpha_star: None,
        alpha,
        professions: req.professions.clone(),
        n: sol.n.clone(),
        cost: sol.cost,
        coverage: sol.coverage,
        confidence_lb: sol.confidence_lb,
        covered: sol.covered.clone(),
        master_lower_bound: staffdim::master::master_lower_bound(&req, &costs, alpha).map_err(|e| e.to_string())?,
        matrix: Some(req),
    };
    Ok((instance, scenarios, record))
}

pub fn accounting_identity(seed: u64) -> Check {
    let (instance, scenarios, record) = solved_toy(seed, 0.8)?;
    let req = record.matrix.as_ref().unwrap();
    let days = resource_days(&instance, &record.solution(), req).map_err(|e| e.to_string())?;
    let plans = req.assignments.as_ref().unwrap();
    let mut expected = Vec::new();
    for &w in &record.covered {
        for (p, row) in plans.iter().enumerate() {
            let plan = row[w].as_ref().unwrap();
            replay(&instance, p, &scenarios[w], plan)?;
            let id = &instance.professions[p].id;
            for res in plan.iter().filter(|r| r.served.iter().flatten().any(|&q| q > 0)) {
                let mut travel = res.duration;
                let mut service = 0;
                for (s, cells) in res.served.iter().enumerate() {
                    for (a, &q) in cells.iter().enumerate() {
                        travel += instance.territory.intra[s] * q;
                        service += instance.cares[a].duration(id) * q;
                    }
                }
                let idle = instance.daily_limit - travel - service;
                expected.push((p, w, travel, service, idle));
            }
        }
    }
    let got: Vec<_> = days.iter().map(|d| (d.profession, d.scenario, d.travel, d.service, d.idle)).collect();
    ensure(got == expected, || "per-resource minutes differ from the replay".into())?;
    for d in &days {
        ensure(d.travel + d.service + d.idle == instance.daily_limit, || format!("{d:?}"))?;
    }
    Ok(())
}

pub fn coverage_differences_disjoint(seed: u64) -> Check {
    let mut r = rng(seed);
    let p = r.random_range(1..=3);
    let omega = r.random_range(2..=12);
    let mut req = matrix_of(random_matrix(&mut r, p, omega, 6));
    let uncovered = r.random_range(0..omega);
    for q in 0..p {
        let mut v = req.raw[q].clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        req.lb_p[q] = v[uncovered];
    }
    let costs: Vec<u64> = (0..p).map(|_| r.random_range(1..=20)).collect();
    let sol = solve_master_count(&req.raw, &costs, omega - uncovered).map_err(|e| e.to_string())?;
    let c = comparison_report(&req, &costs, &sol);
    let set = |n: &[u32]| covered_scenarios(&req.raw, n).into_iter().collect::<BTreeSet<_>>();
    let (star, n2) = (set(&c.n_star), set(&c.n2));
    let up: BTreeSet<_> = n2.difference(&star).copied().collect();
    let down: BTreeSet<_> = star.difference(&n2).copied().collect();
    ensure(up.is_disjoint(&down), || "set differences overlap".into())?;
    let ratio = |k: usize| k as f64 / omega as f64;
    ensure(c.n2_minus_star == ratio(up.len()), || "n2 \\ n* share".into())?;
    ensure(c.star_minus_n2 == ratio(down.len()), || "n* \\ n2 share".into())?;
    ensure(c.coverage_n2 >= c.coverage_star, || "n2 covers less than n*".into())
}

pub fn reports_pure(seed: u64) -> Check {
    let (instance, scenarios, record) = solved_toy(seed, 0.7)?;
    let text = serde_json::to_string(&record).map_err(|e| e.to_string())?;
    let reread: SolveRecord = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let a = run_report(&instance, &scenarios, &record).map_err(|e| e.to_string())?;
    let b = run_report(&instance, &scenarios, &reread).map_err(|e| e.to_string())?;
    ensure(report_json(&a).unwrap() == report_json(&b).unwrap(), || "JSON differs".into())?;
    ensure(report_tables(&a) == report_tables(&b), || "CSV differs".into())
}

/// One caregiver per unit is a valid but wasteful plan; the travel pass must
/// keep it valid, keep its size and never lengthen the routes in total.
pub fn travel_reduction_sound(seed: u64) -> Check {
    let mut r = rng(seed);
    let spec = TerritorySpec {
        sparsity: SPARSITIES[r.random_range(0..3)],
        divisions: r.random_range(3..=4),
        seed,
    };
    let mut instance = generate_series(Series::S1_1, generate_territory(&spec), seed);
    instance.pattern.total = staffdim::scengen::TotalLaw::Fixed(r.random_range(5..=25));
    let scenario = &sample_scenarios(&instance, seed, 1)[0];
    let p = r.random_range(0..instance.professions.len());
    let routes = routes_from_table(&instance, p, &cycle_durations(&instance.territory));
    let task = SlaveTask::new(&instance, p, scenario, &routes).map_err(|e| e.to_string())?;
    let mut single = Vec::new();
    for (s, row) in task.demand.iter().enumerate() {
        for (a, &q) in row.iter().enumerate() {
            if task.weight[s][a] == 0 {
                continue;
            }
            let mask = if s == 0 { 0 } else { 1 << (s - 1) };
            let Some(route) = routes.cover(mask) else { return Ok(()) };
            for _ in 0..q {
                let mut served = vec![vec![0; row.len()]; task.demand.len()];
                served[s][a] = 1;
                single.push(ResourcePlan { route: route.sectors, duration: route.duration, served });
            }
        }
    }
    let before: u32 = single.iter().map(|x| x.duration).sum();
    let polished = reduce_travel(&task, single.clone());
    ensure(polished.len() == single.len(), || format!("{} plans became {}", single.len(), polished.len()))?;
    let after: u32 = polished.iter().map(|x| x.duration).sum();
    ensure(after <= before, || format!("route minutes rose from {before} to {after}"))?;
    replay(&instance, p, scenario, &polished)
}

/// Every checker with its name, for sweeps.
pub fn all() -> Vec<Checker> {
    vec![
        ("instance round trip", round_trip),
        ("service minutes additive", service_minutes_additive),
        ("generation deterministic", generation_deterministic),
        ("intra below inter", intra_below_inter),
        ("chi-square fit", chi_square),
        ("cycle monotone", cycle_monotone),
        ("routes below limit", routes_below_limit),
        ("dp equals brute force", dp_matches_bruteforce),
        ("slave monotone in demand", monotone_in_demand),
        ("slave bounds sandwich", bounds_sandwich),
        ("assignments replay", assignment_replays),
        ("optimal status stable", optimal_is_stable),
        ("travel reduction sound", travel_reduction_sound),
        ("truncation sound", truncation_sound),
        ("confidence formula", |_| confidence_formula()),
        ("master constraints", master_constraints),
        ("pareto properties", pareto_properties),
        ("solution deterministic", solution_deterministic),
        ("accounting identity", accounting_identity),
        ("coverage differences disjoint", coverage_differences_disjoint),
        ("reports pure", reports_pure),
    ]
}
