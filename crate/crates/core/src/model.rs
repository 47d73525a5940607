//! Problem data: territories, professions, cares, instances and daily
//! demand scenarios, together with the JSON file formats.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scengen::DemandPattern;

/// Largest sector count supported by the subset-indexed route tables.
pub const MAX_SECTORS: usize = 20;

/// Default working day, in minutes.
pub const DEFAULT_DAILY_LIMIT: u32 = 480;

/// Sectors of a territory and the travel times between them.
///
/// Index 0 of both `inter` and `intra` is the care structure building (the
/// depot). Sectors proper are `1..=sector_count()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Territory {
    pub inter: Vec<Vec<u32>>,
    pub intra: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector_points: Option<Vec<[f64; 2]>>,
}

impl Territory {
    pub fn sector_count(&self) -> usize {
        self.inter.len().saturating_sub(1)
    }

    /// Round-trip time between the depot and `sector`.
    pub fn depot_leg(&self, sector: usize) -> u32 {
        self.inter[0][sector]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.inter.len();
        if n == 0 {
            return Err(invalid("inter must contain at least the depot row"));
        }
        if n - 1 > MAX_SECTORS {
            return Err(invalid(format!(
                "sector count {} exceeds the supported maximum {MAX_SECTORS}",
                n - 1
            )));
        }
        if self.inter.iter().any(|row| row.len() != n) {
            return Err(invalid("inter not square"));
        }
        if self.intra.len() != n {
            return Err(invalid("intra length differs from inter dimension"));
        }
        if let Some(points) = &self.sector_points {
            if points.len() != n {
                return Err(invalid("sector_points length differs from inter dimension"));
            }
        }
        for i in 0..n {
            if self.inter[i][i] != 0 {
                return Err(invalid("inter diagonal not zero"));
            }
            for j in 0..i {
                if self.inter[i][j] != self.inter[j][i] {
                    return Err(invalid("inter not symmetric"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let via = u64::from(self.inter[i][j]) + u64::from(self.inter[j][k]);
                    if u64::from(self.inter[i][k]) > via {
                        return Err(invalid("inter violates the triangle inequality"));
                    }
                }
            }
        }
        if self.intra[0] != 0 {
            return Err(invalid("intra[0] must be 0"));
        }
        for s in 1..n {
            let nearest = (0..n).filter(|&o| o != s).map(|o| self.inter[s][o]).min();
            if let Some(nearest) = nearest {
                if self.intra[s] > nearest {
                    return Err(invalid(format!(
                        "intra[{s}] exceeds the smallest inter-sector time from sector {s}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profession {
    pub id: String,
    pub monthly_cost: u64,
}

/// A type of care and the time each profession spends on one occurrence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Care {
    pub id: String,
    pub frequency: f64,
    /// Minutes per profession; a missing entry means 0 (not involved).
    pub durations: BTreeMap<String, u32>,
    /// Whether the profession serves this care without travelling; missing means `false`.
    #[serde(default)]
    pub remote: BTreeMap<String, bool>,
}

impl Care {
    pub fn duration(&self, profession: &str) -> u32 {
        self.durations.get(profession).copied().unwrap_or(0)
    }

    pub fn is_remote(&self, profession: &str) -> bool {
        self.remote.get(profession).copied().unwrap_or(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub territory: Territory,
    pub professions: Vec<Profession>,
    pub cares: Vec<Care>,
    pub daily_limit: u32,
    pub pattern: DemandPattern,
    #[serde(default)]
    pub label: String,
}

impl Instance {
    pub fn sector_count(&self) -> usize {
        self.territory.sector_count()
    }

    pub fn profession_index(&self, id: &str) -> Result<usize> {
        self.professions
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| Error::UnknownProfession(id.to_string()))
    }

    pub fn care_index(&self, id: &str) -> Result<usize> {
        self.cares
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| Error::UnknownCare(id.to_string()))
    }

    /// `w[a][p]`: minutes of profession `p` per demand of care `a`.
    pub fn duration(&self, care: usize, profession: usize) -> u32 {
        self.cares[care].duration(&self.professions[profession].id)
    }

    pub fn is_remote(&self, care: usize, profession: usize) -> bool {
        self.cares[care].is_remote(&self.professions[profession].id)
    }

    pub fn costs(&self) -> Vec<u64> {
        self.professions.iter().map(|p| p.monthly_cost).collect()
    }

    pub fn profession_ids(&self) -> Vec<String> {
        self.professions.iter().map(|p| p.id.clone()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.territory.validate()?;
        if self.daily_limit == 0 {
            return Err(invalid("daily_limit must be positive"));
        }
        if self.professions.is_empty() {
            return Err(invalid("at least one profession is required"));
        }
        for (i, p) in self.professions.iter().enumerate() {
            if p.monthly_cost == 0 {
                return Err(invalid(format!("monthly_cost of `{}` must be positive", p.id)));
            }
            if self.professions[..i].iter().any(|q| q.id == p.id) {
                return Err(invalid(format!("duplicate profession `{}`", p.id)));
            }
        }
        if self.cares.is_empty() {
            return Err(invalid("at least one care is required"));
        }
        for (i, care) in self.cares.iter().enumerate() {
            if self.cares[..i].iter().any(|c| c.id == care.id) {
                return Err(invalid(format!("duplicate care `{}`", care.id)));
            }
            if !(care.frequency >= 0.0) {
                return Err(invalid(format!("frequency of `{}` must be non-negative", care.id)));
            }
            for key in care.durations.keys().chain(care.remote.keys()) {
                if !self.professions.iter().any(|p| &p.id == key) {
                    return Err(invalid(format!(
                        "care `{}` references undeclared profession `{key}`",
                        care.id
                    )));
                }
            }
        }
        let total: f64 = self.cares.iter().map(|c| c.frequency).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("care frequencies sum to {total}, expected 1")));
        }

        // Any single demand must fit in a day, whatever its sector.
        let max_service = self
            .cares
            .iter()
            .flat_map(|c| c.durations.values().copied())
            .max()
            .unwrap_or(0);
        let max_intra = self.territory.intra.iter().copied().max().unwrap_or(0);
        let max_leg = self.territory.inter[0].iter().copied().max().unwrap_or(0);
        let single = u64::from(max_service) + u64::from(max_intra) + 2 * u64::from(max_leg);
        if u64::from(self.daily_limit) <= single {
            return Err(invalid(format!(
                "daily_limit {} does not exceed the longest single-demand day {single}",
                self.daily_limit
            )));
        }

        self.pattern.validate(self.sector_count(), self.cares.len())
    }

    /// Per-demand time charge of `care` for `profession` at `sector`: the service
    /// duration plus the intra-sector travel time. Sector 0 is the depot and only
    /// accepts cares the profession serves remotely.
    pub fn effective_service_minutes(
        &self,
        care: &str,
        profession: &str,
        sector: usize,
    ) -> Result<u32> {
        let a = self.care_index(care)?;
        let p = self.profession_index(profession)?;
        if sector > self.sector_count() {
            return Err(Error::SectorOutOfRange {
                sector,
                sector_count: self.sector_count(),
            });
        }
        if sector == 0 && !self.is_remote(a, p) {
            return Err(Error::NotRemote {
                care: care.to_string(),
                profession: profession.to_string(),
            });
        }
        Ok(self.duration(a, p) + self.territory.intra[sector])
    }
}

/// One day of demand: `demands[s - 1][a]` is the number of demands of care
/// `a` in sector `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub demands: Vec<Vec<u32>>,
}

impl Scenario {
    pub fn zeros(sectors: usize, cares: usize) -> Self {
        Scenario {
            demands: vec![vec![0; cares]; sectors],
        }
    }

    pub fn total(&self) -> u64 {
        self.demands.iter().flatten().map(|&d| u64::from(d)).sum()
    }

    /// Demand at 1-based `sector` for care `care`.
    pub fn get(&self, sector: usize, care: usize) -> u32 {
        self.demands[sector - 1][care]
    }

    pub fn validate(&self, instance: &Instance) -> Result<()> {
        if self.demands.len() != instance.sector_count() {
            return Err(invalid(format!(
                "scenario has {} sector rows, instance has {}",
                self.demands.len(),
                instance.sector_count()
            )));
        }
        if self.demands.iter().any(|row| row.len() != instance.cares.len()) {
            return Err(invalid("scenario rows must have one entry per care"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioBundle {
    pub scenarios: Vec<Scenario>,
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let text = fs::read_to_string(path)?;
    parse_instance(&text)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let instance: Instance = serde_json::from_str(text)?;
    instance.validate()?;
    Ok(instance)
}

/// Canonical text form: pretty JSON with a trailing newline.
pub fn instance_to_string(instance: &Instance) -> Result<String> {
    let mut text = serde_json::to_string_pretty(instance)?;
    text.push('\n');
    Ok(text)
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, instance_to_string(instance)?)?;
    Ok(())
}

pub fn load_scenario(path: impl AsRef<Path>, instance: &Instance) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(&fs::read_to_string(path)?)?;
    scenario.validate(instance)?;
    Ok(scenario)
}

pub fn load_scenarios(path: impl AsRef<Path>, instance: &Instance) -> Result<Vec<Scenario>> {
    let bundle: ScenarioBundle = serde_json::from_str(&fs::read_to_string(path)?)?;
    for scenario in &bundle.scenarios {
        scenario.validate(instance)?;
    }
    Ok(bundle.scenarios)
}

pub fn save_scenarios(scenarios: &[Scenario], path: impl AsRef<Path>) -> Result<()> {
    let bundle = ScenarioBundle {
        scenarios: scenarios.to_vec(),
    };
    let mut text = serde_json::to_string(&bundle)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
