//! Seeded synthetic hierarchies shaped like hourly station data.

use chrono::{Days, NaiveDate};
use hfts_core::diagnostics::{inject_outliers, OutlierKind};
use hfts_core::{Aggregation, Curve, FunctionalSeries, Grid, SeriesMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::{GridSpec, HierarchyConfig, NodeEntry};
use crate::error::{CliError, Result};

/// Five stations with their populations; used when five leaves are requested.
pub const SILESIA: [(&str, f64); 5] = [
    ("gli", 182_155.0),
    ("kat", 304_063.0),
    ("dab", 121_902.0),
    ("bie", 172_407.0),
    ("cze", 227_184.0),
];

pub const SILESIA_ROOT: &str = "silesia";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BasePattern {
    /// Every curve equals `value` before noise.
    Constant { value: f64 },
    /// Two-harmonic daily cycle around `level`, scaled per leaf.
    Diurnal { level: f64, amplitude: f64 },
}

impl Default for BasePattern {
    fn default() -> Self {
        Self::Diurnal {
            level: 50.0,
            amplitude: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_leaves: usize,
    pub n_days: usize,
    pub grid: GridSpec,
    pub pattern: BasePattern,
    pub noise_sd: f64,
    /// Day-to-day autocorrelation of the level disturbance.
    pub persistence: f64,
    pub seed: u64,
    pub start: NaiveDate,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_leaves: 5,
            n_days: 181,
            grid: GridSpec {
                start: 0.0,
                end: 24.0,
                points: 24,
            },
            pattern: BasePattern::default(),
            noise_sd: 10.0,
            persistence: 0.7,
            seed: 0,
            start: NaiveDate::from_ymd_opt(2016, 9, 1).expect("valid date"),
        }
    }
}

pub fn leaf_names(n: usize) -> Vec<(String, f64)> {
    if n == SILESIA.len() {
        return SILESIA.iter().map(|&(id, w)| (id.to_string(), w)).collect();
    }
    (0..n)
        .map(|i| (format!("leaf{:02}", i + 1), 100_000.0))
        .collect()
}

fn pattern_value(pattern: BasePattern, leaf: usize, n_leaves: usize, t: f64, span: f64) -> f64 {
    match pattern {
        BasePattern::Constant { value } => value,
        BasePattern::Diurnal { level, amplitude } => {
            // leaves sit between 0.7 and 1.3 times the base level
            let rel = if n_leaves > 1 {
                leaf as f64 / (n_leaves - 1) as f64
            } else {
                0.5
            };
            let l = level * (0.7 + 0.6 * rel);
            let x = std::f64::consts::TAU * t / span;
            l * (1.0 + amplitude * ((x - 2.4).sin() + 0.5 * (2.0 * x + 0.8).sin()))
        }
    }
}

/// Leaf series keyed by node id. The level disturbance of each leaf mixes a
/// regional and a local AR(1) path; hourly noise is added on top.
pub fn synthesize_hfts(spec: &SynthSpec) -> Result<SeriesMap<f64>> {
    if spec.n_leaves == 0 || spec.n_days == 0 {
        return Err(CliError::Usage("leaves and days must be positive".into()));
    }
    if !(spec.noise_sd >= 0.0 && spec.noise_sd.is_finite()) {
        return Err(CliError::Usage(format!(
            "noise sd must be nonnegative, got {}",
            spec.noise_sd
        )));
    }
    if !(0.0..1.0).contains(&spec.persistence) {
        return Err(CliError::Usage(format!(
            "persistence must lie in [0, 1), got {}",
            spec.persistence
        )));
    }
    let grid = Grid::new(spec.grid.start, spec.grid.end, spec.grid.points)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let names = leaf_names(spec.n_leaves);
    let span = grid.measure();
    let points = grid.points();
    let base: Vec<Vec<f64>> = (0..spec.n_leaves)
        .map(|j| {
            points
                .iter()
                .map(|&t| pattern_value(spec.pattern, j, spec.n_leaves, t - grid.start(), span))
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rho = spec.persistence;
    let innov = (1.0 - rho * rho).sqrt();
    let sd = spec.noise_sd;
    let mut regional = 0.0;
    let mut local = vec![0.0; spec.n_leaves];
    let mut curves: Vec<Vec<Curve<f64>>> = vec![Vec::with_capacity(spec.n_days); spec.n_leaves];
    let mut dates = Vec::with_capacity(spec.n_days);
    for day in 0..spec.n_days {
        dates.push(
            spec.start
                .checked_add_days(Days::new(day as u64))
                .ok_or_else(|| CliError::Usage("date range overflows".into()))?,
        );
        let z: f64 = rng.sample(StandardNormal);
        regional = rho * regional + innov * z;
        for (j, leaf_curves) in curves.iter_mut().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            local[j] = rho * local[j] + innov * z;
            let shift = sd * (0.6 * regional + 0.8 * local[j]);
            let values = base[j]
                .iter()
                .map(|&b| {
                    let e: f64 = rng.sample(StandardNormal);
                    b + shift + 0.5 * sd * e
                })
                .collect();
            leaf_curves.push(Curve::new(grid, values).map_err(|e| CliError::Usage(e.to_string()))?);
        }
    }
    let mut out = SeriesMap::new();
    for ((id, _), c) in names.into_iter().zip(curves) {
        let s = FunctionalSeries::new(id.clone(), grid, c, dates.clone())
            .map_err(|e| CliError::Usage(e.to_string()))?;
        out.insert(id, s);
    }
    Ok(out)
}

/// Two-level config over the leaves of [`synthesize_hfts`], with data files
/// named `<id>.csv` next to the config.
pub fn synth_config(spec: &SynthSpec) -> HierarchyConfig {
    let mut nodes = vec![NodeEntry {
        id: SILESIA_ROOT.to_string(),
        parent: None,
        weight: None,
        data: None,
    }];
    for (id, w) in leaf_names(spec.n_leaves) {
        nodes.push(NodeEntry {
            data: Some(format!("{id}.csv").into()),
            id,
            parent: Some(SILESIA_ROOT.to_string()),
            weight: Some(w),
        });
    }
    HierarchyConfig {
        convention: Aggregation::WeightedAverage,
        grid: spec.grid,
        nodes,
    }
}

/// Per-leaf outlier stream, distinct from the generator stream.
fn leaf_seed(seed: u64, leaf: usize) -> u64 {
    seed ^ (leaf as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Replaces `floor(rate * days)` curves of every leaf with outliers. Without
/// an explicit magnitude, ten times the mean value of the data is used.
/// Returns the magnitude applied.
pub fn contaminate(
    data: &mut SeriesMap<f64>,
    kind: OutlierKind,
    rate: f64,
    magnitude: Option<f64>,
    seed: u64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(CliError::Usage(format!(
            "contamination must lie in [0, 1], got {rate}"
        )));
    }
    let n: usize = data.values().map(|s| s.len() * s.grid().n_points()).sum();
    let total: f64 = data
        .values()
        .flat_map(|s| s.curves().iter().flat_map(|c| c.values().iter()))
        .sum();
    let magnitude = magnitude.unwrap_or(10.0 * total / n.max(1) as f64);
    for (j, s) in data.values_mut().enumerate() {
        *s = inject_outliers(s, kind, rate, magnitude, leaf_seed(seed, j))
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(magnitude)
}
