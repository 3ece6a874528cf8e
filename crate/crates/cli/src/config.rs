//! Hierarchy configuration in TOML.
//!
//! ```toml
//! convention = "weighted-average"   # or "sum"
//!
//! [grid]
//! start = 0.0
//! end = 24.0
//! points = 24
//!
//! [[nodes]]
//! id = "silesia"
//!
//! [[nodes]]
//! id = "kat"
//! parent = "silesia"
//! weight = 304063
//! data = "kat.csv"
//! ```
//!
//! Data paths are resolved against the directory holding the config file.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use hfts_core::{Aggregation, Grid, Hierarchy, NodeSpec, SeriesMap, ValidationReport};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::ingest::{load_station_csv, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierarchyConfig {
    #[serde(default)]
    pub convention: Aggregation,
    pub grid: GridSpec,
    pub nodes: Vec<NodeEntry>,
}

impl HierarchyConfig {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::data("config encoding", e))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_toml()?.as_bytes())
    }
}

/// A parsed config: the hierarchy plus where each leaf's data lives.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub grid: Grid<f64>,
    pub hierarchy: Hierarchy<f64>,
    pub bindings: BTreeMap<String, PathBuf>,
}

pub fn parse_hierarchy_config(text: &str, path: &Path) -> Result<LoadedConfig> {
    let ctx = path.display().to_string();
    let cfg: HierarchyConfig = toml::from_str(text).map_err(|e| CliError::data(&ctx, e))?;
    let grid = Grid::new(cfg.grid.start, cfg.grid.end, cfg.grid.points)
        .map_err(|e| CliError::data(&ctx, e))?;
    let specs = cfg
        .nodes
        .iter()
        .map(|n| NodeSpec {
            id: n.id.clone(),
            parent: n.parent.clone(),
            weight: n.weight,
        })
        .collect();
    let hierarchy = Hierarchy::new(specs, cfg.convention).map_err(|e| CliError::data(&ctx, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut bindings = BTreeMap::new();
    for n in &cfg.nodes {
        match (&n.data, hierarchy.is_leaf(&n.id)) {
            (Some(p), true) => {
                bindings.insert(n.id.clone(), base.join(p));
            }
            (None, true) => {
                return Err(CliError::data(
                    &ctx,
                    format!("leaf `{}` has no data path", n.id),
                ))
            }
            (Some(_), false) => {
                return Err(CliError::data(
                    &ctx,
                    format!(
                        "internal node `{}` has a data path; internal series are aggregated from leaves",
                        n.id
                    ),
                ))
            }
            (None, false) => {}
        }
    }
    Ok(LoadedConfig {
        path: path.to_path_buf(),
        grid,
        hierarchy,
        bindings,
    })
}

pub fn load_hierarchy_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_hierarchy_config(&text, path)
}

/// Leaf data after ingestion, aligned to the dates every leaf has.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub series: SeriesMap<f64>,
    pub reports: BTreeMap<String, ValidationReport>,
    /// Dates present in some leaf but dropped because another leaf lacks them.
    pub dropped_dates: Vec<NaiveDate>,
}

pub fn load_data(cfg: &LoadedConfig) -> Result<LoadedData> {
    let mut raw = SeriesMap::new();
    let mut reports = BTreeMap::new();
    for (id, path) in &cfg.bindings {
        let (series, report) = load_station_csv(path, id, cfg.grid)?;
        raw.insert(id.clone(), series);
        reports.insert(id.clone(), report);
    }
    let mut common: Option<BTreeSet<NaiveDate>> = None;
    let mut all = BTreeSet::new();
    for s in raw.values() {
        let dates: BTreeSet<NaiveDate> = s.timestamps().iter().copied().collect();
        all.extend(dates.iter().copied());
        common = Some(match common {
            None => dates,
            Some(c) => c.intersection(&dates).copied().collect(),
        });
    }
    let common = common.unwrap_or_default();
    if common.is_empty() {
        return Err(CliError::data(
            cfg.path.display().to_string(),
            "leaves share no dates",
        ));
    }
    let dropped_dates = all.difference(&common).copied().collect();
    let mut series = SeriesMap::new();
    for (id, s) in raw {
        let (curves, dates): (Vec<_>, Vec<_>) = s
            .curves()
            .iter()
            .zip(s.timestamps())
            .filter(|(_, d)| common.contains(d))
            .map(|(c, d)| (c.clone(), *d))
            .unzip();
        let aligned = hfts_core::FunctionalSeries::new(id.clone(), cfg.grid, curves, dates)
            .map_err(|e| CliError::data(format!("node `{id}`"), e))?;
        series.insert(id, aligned);
    }
    Ok(LoadedData {
        series,
        reports,
        dropped_dates,
    })
}
