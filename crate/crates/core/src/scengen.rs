//! Territory, demand-pattern and scenario generation for the benchmark
//! series. Everything is driven by a seeded ChaCha stream so identical seeds
//! give identical territories and scenario streams.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{Care, Instance, Profession, Scenario, Territory, DEFAULT_DAILY_LIMIT};

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Stable,
    VolumeVariation,
    GeoVariation,
    TypicalDays,
}

/// Law of the daily number of demands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TotalLaw {
    Fixed(u32),
    /// Uniform integer in `lo..=hi`.
    Uniform { lo: u32, hi: u32 },
    /// Taken from the typical day drawn for the date.
    Typical,
}

/// Law of the spatial distribution `pi` over sectors `1..=S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialLaw {
    Fixed(Vec<f64>),
    /// Sectors are cut into `groups` contiguous blocks; each day one non-empty
    /// block, drawn uniformly, receives `share` of the mass (spread
    /// proportionally to `base`), the rest of the sectors share the remainder.
    Concentrated {
        base: Vec<f64>,
        groups: usize,
        share: f64,
    },
    Typical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalDay {
    pub total: u32,
    pub spatial: Vec<f64>,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

/// Stochastic law of a day of demand: volume, location and care type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandPattern {
    pub kind: PatternKind,
    pub total: TotalLaw,
    pub spatial: SpatialLaw,
    pub epi: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub typical: Vec<TypicalDay>,
}

fn check_distribution(what: &str, v: &[f64], len: usize) -> Result<()> {
    if v.len() != len {
        return Err(invalid(format!("{what} has {} entries, expected {len}", v.len())));
    }
    if v.iter().any(|&x| !(x >= 0.0)) {
        return Err(invalid(format!("{what} has negative entries")));
    }
    if len > 0 {
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(invalid(format!("{what} sums to {sum}, expected 1")));
        }
    }
    Ok(())
}

impl DemandPattern {
    pub fn stable(total: u32, spatial: Vec<f64>, epi: Vec<f64>) -> Self {
        DemandPattern {
            kind: PatternKind::Stable,
            total: TotalLaw::Fixed(total),
            spatial: SpatialLaw::Fixed(spatial),
            epi,
            typical: Vec::new(),
        }
    }

    pub fn validate(&self, sectors: usize, cares: usize) -> Result<()> {
        check_distribution("epi", &self.epi, cares)?;
        if let TotalLaw::Uniform { lo, hi } = self.total {
            if lo > hi {
                return Err(invalid("uniform total has lo > hi"));
            }
        }
        match &self.spatial {
            SpatialLaw::Fixed(pi) => check_distribution("spatial", pi, sectors)?,
            SpatialLaw::Concentrated { base, groups, share } => {
                check_distribution("spatial base", base, sectors)?;
                if *groups == 0 {
                    return Err(invalid("concentration needs at least one group"));
                }
                if !(0.0..=1.0).contains(share) {
                    return Err(invalid("concentration share must lie in [0, 1]"));
                }
            }
            SpatialLaw::Typical => {}
        }
        let typical_total = matches!(self.total, TotalLaw::Typical);
        let typical_spatial = matches!(self.spatial, SpatialLaw::Typical);
        if typical_total || typical_spatial {
            if !(typical_total && typical_spatial) {
                return Err(invalid("typical totals and typical spatial laws go together"));
            }
            if self.typical.is_empty() {
                return Err(invalid("typical-day pattern lists no typical day"));
            }
            for day in &self.typical {
                check_distribution("typical spatial", &day.spatial, sectors)?;
                if !(day.weight > 0.0) {
                    return Err(invalid("typical-day weights must be positive"));
                }
            }
        }
        if sectors == 0 && self.max_total() > 0 {
            return Err(invalid("a territory without sectors cannot receive demand"));
        }
        Ok(())
    }

    fn max_total(&self) -> u32 {
        match self.total {
            TotalLaw::Fixed(d) => d,
            TotalLaw::Uniform { hi, .. } => hi,
            TotalLaw::Typical => self.typical.iter().map(|t| t.total).max().unwrap_or(0),
        }
    }

    /// Draws the total and the spatial distribution of one day.
    pub fn draw_day<R: Rng + ?Sized>(&self, rng: &mut R) -> (u32, Vec<f64>) {
        if let (TotalLaw::Typical, SpatialLaw::Typical) = (&self.total, &self.spatial) {
            let weights: Vec<f64> = self.typical.iter().map(|t| t.weight).collect();
            let pick = WeightedIndex::new(&weights).expect("validated weights");
            let day = &self.typical[pick.sample(rng)];
            return (day.total, day.spatial.clone());
        }
        let total = match self.total {
            TotalLaw::Fixed(d) => d,
            TotalLaw::Uniform { lo, hi } => rng.random_range(lo..=hi),
            TotalLaw::Typical => unreachable!("validated pattern"),
        };
        let spatial = match &self.spatial {
            SpatialLaw::Fixed(pi) => pi.clone(),
            SpatialLaw::Concentrated { base, groups, share } => {
                let blocks: Vec<Vec<usize>> = contiguous_groups(base.len(), *groups)
                    .into_iter()
                    .filter(|g| !g.is_empty())
                    .collect();
                let g = rng.random_range(0..blocks.len());
                concentrate(base, &blocks[g], *share)
            }
            SpatialLaw::Typical => unreachable!("validated pattern"),
        };
        (total, spatial)
    }
}

/// Splits `0..n` into `groups` contiguous blocks of near-equal size.
pub fn contiguous_groups(n: usize, groups: usize) -> Vec<Vec<usize>> {
    (0..groups)
        .map(|g| (g * n / groups..(g + 1) * n / groups).collect())
        .collect()
}

/// Puts `share` of the mass on `group` (0-based sector positions) and the
/// rest on the other sectors, both proportionally to `base`.
pub fn concentrate(base: &[f64], group: &[usize], share: f64) -> Vec<f64> {
    let in_group: Vec<bool> = (0..base.len()).map(|i| group.contains(&i)).collect();
    let inside: f64 = base.iter().zip(&in_group).filter(|(_, &g)| g).map(|(b, _)| b).sum();
    let outside: f64 = base.iter().zip(&in_group).filter(|(_, &g)| !g).map(|(b, _)| b).sum();
    if outside <= 0.0 {
        return base.iter().map(|b| b / inside).collect();
    }
    if inside <= 0.0 {
        return base.iter().map(|b| b / outside).collect();
    }
    let mut v: Vec<f64> = base
        .iter()
        .zip(&in_group)
        .map(|(b, &g)| if g { share * b / inside } else { (1.0 - share) * b / outside })
        .collect();
    // Absorb rounding so the vector sums to 1 exactly enough for validation.
    let sum: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= sum);
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sparsity {
    Rural,
    Urban,
    SemiUrban,
}

impl Sparsity {
    /// Inclusive range of intra-sector travel minutes.
    pub fn intra_range(self) -> (u32, u32) {
        match self {
            Sparsity::Rural => (5, 15),
            Sparsity::Urban | Sparsity::SemiUrban => (5, 10),
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Sparsity::Rural => "RU",
            Sparsity::Urban => "UR",
            Sparsity::SemiUrban => "SU",
        }
    }
}

impl FromStr for Sparsity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "rural" | "ru" => Ok(Sparsity::Rural),
            "urban" | "ur" => Ok(Sparsity::Urban),
            "semi_urban" | "semiurban" | "su" => Ok(Sparsity::SemiUrban),
            _ => Err(invalid(format!("unknown sparsity `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerritorySpec {
    pub sparsity: Sparsity,
    pub divisions: usize,
    pub seed: u64,
}

impl TerritorySpec {
    pub fn code(&self) -> String {
        format!("{}{}", self.sparsity.code(), self.divisions)
    }
}

const OUTER_HALF: f64 = 45.0;
const INNER_HALF: f64 = 30.0;
const PLACEMENT_TRIES: usize = 10_000;

fn round_half_up(x: f64) -> u32 {
    (x + 0.5).floor() as u32
}

fn rounded_distance(a: [f64; 2], b: [f64; 2]) -> u32 {
    round_half_up(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt())
}

/// Random territory of the given sparsity class. Coordinates are centred on
/// the depot; travel minutes are rounded euclidean distances closed under
/// shortest paths so the matrix is metric.
pub fn generate_territory(spec: &TerritorySpec) -> Territory {
    assert!(spec.divisions >= 1, "a territory needs at least one sector");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.divisions + 1;
    let (lo, hi) = spec.sparsity.intra_range();

    let mut intra = vec![0u32; n];
    for s in 1..n {
        intra[s] = rng.random_range(lo..=hi);
    }

    let mut points: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    for s in 1..n {
        let mut candidate = [0.0, 0.0];
        for _ in 0..PLACEMENT_TRIES {
            let half = match spec.sparsity {
                Sparsity::Rural => OUTER_HALF,
                Sparsity::Urban => INNER_HALF,
                Sparsity::SemiUrban => {
                    if rng.random_bool(0.5) {
                        INNER_HALF
                    } else {
                        OUTER_HALF
                    }
                }
            };
            candidate = [rng.random_range(-half..=half), rng.random_range(-half..=half)];
            // Every sector must be farther from the others than it is wide.
            let clear = points
                .iter()
                .enumerate()
                .all(|(o, &q)| rounded_distance(candidate, q) > intra[s].max(intra[o]));
            if clear {
                break;
            }
        }
        points.push(candidate);
    }

    let mut inter = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in 0..i {
            let d = rounded_distance(points[i], points[j]);
            inter[i][j] = d;
            inter[j][i] = d;
        }
    }
    metric_closure(&mut inter);

    for s in 1..n {
        let nearest = (0..n).filter(|&o| o != s).map(|o| inter[s][o]).min().unwrap_or(0);
        intra[s] = intra[s].min(nearest.saturating_sub(1));
    }

    Territory {
        inter,
        intra,
        sector_points: Some(points),
    }
}

/// Floyd-Warshall closure; rounding can break the triangle inequality by one minute.
fn metric_closure(d: &mut [Vec<u32>]) {
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
}

/// Draws one day of demand: a total, then a sector and a care for each demand.
pub fn sample_scenario<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> Scenario {
    let sectors = instance.sector_count();
    let cares = instance.cares.len();
    let mut scenario = Scenario::zeros(sectors, cares);
    let (total, spatial) = instance.pattern.draw_day(rng);
    if sectors == 0 || total == 0 {
        return scenario;
    }
    let where_ = WeightedIndex::new(&spatial).expect("validated spatial distribution");
    let what = WeightedIndex::new(&instance.pattern.epi).expect("validated epi distribution");
    for _ in 0..total {
        let s = where_.sample(rng);
        let a = what.sample(rng);
        scenario.demands[s][a] += 1;
    }
    scenario
}

/// `count` scenarios from a single stream seeded with `seed`.
pub fn sample_scenarios(instance: &Instance, seed: u64, count: usize) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sample_scenario(instance, &mut rng)).collect()
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    S1_1,
    S1_2,
    S2_1,
    S2_2,
    S3,
    S4,
}

impl Series {
    pub const ALL: [Series; 6] = [
        Series::S1_1,
        Series::S1_2,
        Series::S2_1,
        Series::S2_2,
        Series::S3,
        Series::S4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Series::S1_1 => "S1.1",
            Series::S1_2 => "S1.2",
            Series::S2_1 => "S2.1",
            Series::S2_2 => "S2.2",
            Series::S3 => "S3",
            Series::S4 => "S4",
        }
    }

    /// Benchmark instances per series: one per territory, two for S3/S4.
    pub fn instances_per_territory(self) -> usize {
        match self {
            Series::S3 | Series::S4 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Series {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Series::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownSeries(s.to_string()))
    }
}

pub const GEO_GROUPS: usize = 5;
pub const GEO_SHARE: f64 = 0.8;
pub const TYPICAL_TOTALS: [u32; 4] = [45, 55, 65, 75];
pub const TYPICAL_SHARE: f64 = 0.6;

/// The nurse / nurse's aid / physician staff with monthly costs.
pub fn default_professions() -> Vec<Profession> {
    [("nurse", 1200), ("aid", 800), ("physician", 2500)]
        .into_iter()
        .map(|(id, monthly_cost)| Profession {
            id: id.to_string(),
            monthly_cost,
        })
        .collect()
}

/// Four care types with their frequencies and minutes per profession
/// (nurse, aid, physician). None is remote.
pub fn default_cares() -> Vec<Care> {
    let table: [(&str, f64, [u32; 3]); 4] = [
        ("palliative", 0.26, [60, 35, 10]),
        ("complex_bandage", 0.23, [40, 15, 10]),
        ("heavy_nursing", 0.10, [45, 50, 10]),
        ("others", 0.41, [40, 25, 5]),
    ];
    let ids = ["nurse", "aid", "physician"];
    table
        .into_iter()
        .map(|(id, frequency, minutes)| Care {
            id: id.to_string(),
            frequency,
            durations: ids.iter().map(|p| p.to_string()).zip(minutes).collect(),
            remote: ids.iter().map(|p| (p.to_string(), false)).collect::<BTreeMap<_, _>>(),
        })
        .collect()
}

/// Sector positions of the `i`-th contiguous quintile, wrapping around.
fn quintile(sectors: usize, i: usize) -> Vec<usize> {
    let size = sectors.div_ceil(5).max(1);
    let start = i * sectors / 5;
    (0..size.min(sectors)).map(|j| (start + j) % sectors).collect()
}

/// Builds the demand pattern of a benchmark series for `sectors` sectors.
pub fn series_pattern(series: Series, sectors: usize, epi: Vec<f64>) -> DemandPattern {
    let uniform = vec![1.0 / sectors as f64; sectors];
    let common = |kind, total| DemandPattern {
        kind,
        total,
        spatial: SpatialLaw::Fixed(uniform.clone()),
        epi: epi.clone(),
        typical: Vec::new(),
    };
    match series {
        Series::S1_1 => common(PatternKind::Stable, TotalLaw::Fixed(40)),
        Series::S1_2 => common(PatternKind::Stable, TotalLaw::Fixed(50)),
        Series::S2_1 => common(PatternKind::VolumeVariation, TotalLaw::Uniform { lo: 45, hi: 60 }),
        Series::S2_2 => common(PatternKind::VolumeVariation, TotalLaw::Uniform { lo: 30, hi: 60 }),
        Series::S3 => DemandPattern {
            kind: PatternKind::GeoVariation,
            total: TotalLaw::Uniform { lo: 40, hi: 50 },
            spatial: SpatialLaw::Concentrated {
                base: uniform.clone(),
                groups: GEO_GROUPS,
                share: GEO_SHARE,
            },
            epi,
            typical: Vec::new(),
        },
        Series::S4 => DemandPattern {
            kind: PatternKind::TypicalDays,
            total: TotalLaw::Typical,
            spatial: SpatialLaw::Typical,
            epi,
            typical: TYPICAL_TOTALS
                .iter()
                .enumerate()
                .map(|(i, &total)| TypicalDay {
                    total,
                    spatial: concentrate(&uniform, &quintile(sectors, i), TYPICAL_SHARE),
                    weight: 1.0,
                })
                .collect(),
        },
    }
}

/// Benchmark instance of `series` on `territory`, with the default staff and cares.
pub fn generate_series(series: Series, territory: Territory, seed: u64) -> Instance {
    let cares = default_cares();
    let epi = cares.iter().map(|c| c.frequency).collect();
    let pattern = series_pattern(series, territory.sector_count(), epi);
    Instance {
        label: format!("{}/S{}/seed{seed}", series.name(), territory.sector_count()),
        territory,
        professions: default_professions(),
        cares,
        daily_limit: DEFAULT_DAILY_LIMIT,
        pattern,
    }
}

/// One benchmark instance description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkEntry {
    pub series: Series,
    pub territory: TerritorySpec,
    pub seed: u64,
}

/// The 96-instance benchmark grid: two territories per sparsity and division
/// class, one instance per territory for S1/S2 and two for S3/S4.
pub fn benchmark_grid(base_seed: u64) -> Vec<BenchmarkEntry> {
    let mut entries = Vec::new();
    let mut territory_seed = base_seed;
    for sparsity in [Sparsity::Rural, Sparsity::Urban, Sparsity::SemiUrban] {
        for divisions in [10, 15] {
            for _ in 0..2 {
                let territory = TerritorySpec {
                    sparsity,
                    divisions,
                    seed: territory_seed,
                };
                territory_seed += 1;
                for series in Series::ALL {
                    for k in 0..series.instances_per_territory() {
                        entries.push(BenchmarkEntry {
                            series,
                            territory,
                            seed: territory.seed * 100 + k as u64,
                        });
                    }
                }
            }
        }
    }
    entries
}
