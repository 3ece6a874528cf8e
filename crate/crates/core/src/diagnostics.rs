//! Depth-based dispersion and evaluation: central regions, scale curves,
//! functional boxplots, MAD of integrated forecast errors, and seeded outlier
//! injection for robustness experiments.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::curves::{integrate, Curve, FunctionalSeries};
use crate::depth::{depth_all, DepthKind};
use crate::error::{Error, Result};
use crate::median_forecast::{functional_median, Backtest};
use crate::scalar::{cmp, Scalar};

pub const DEFAULT_FENCE_FACTOR: f64 = 1.5;

/// Normal-consistency constant for the MAD, off by default.
pub const MAD_NORMAL_CONSTANT: f64 = 1.4826;

/// Envelope of the `max(1, ceil(alpha * n))` deepest curves.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralRegion<T> {
    pub alpha: T,
    pub lower: Curve<T>,
    pub upper: Curve<T>,
    /// Sorted ascending.
    pub member_indices: Vec<usize>,
}

impl<T: Scalar> CentralRegion<T> {
    /// Area between the envelopes.
    pub fn volume(&self) -> T {
        integrate(&self.upper.sub(&self.lower).expect("envelopes share a grid"))
    }

    pub fn contains(&self, c: &Curve<T>) -> bool {
        c.values()
            .iter()
            .zip(self.lower.values().iter().zip(self.upper.values()))
            .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }
}

/// Sample indices from deepest to shallowest, ties broken by lower index.
pub fn depth_ranking<T: Scalar>(sample: &[Curve<T>], depth: DepthKind) -> Result<Vec<usize>> {
    if sample.is_empty() {
        return Err(Error::Empty("sample"));
    }
    if sample.len() == 1 {
        return Ok(vec![0]);
    }
    let d = depth_all(sample, depth, None)?.depths;
    let mut order: Vec<usize> = (0..sample.len()).collect();
    order.sort_by(|&a, &b| cmp(&d[b], &d[a]));
    Ok(order)
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1]")));
    }
    Ok(())
}

/// `max(1, ceil(alpha * n))`; a relative slack of 1e-12 absorbs products such
/// as `(2/3) * 3` landing a hair above an integer.
pub fn region_size<T: Scalar>(alpha: T, n: usize) -> usize {
    let x = alpha.as_f64() * n as f64;
    let m = (x - 1e-12 * x.max(1.0)).ceil() as usize;
    m.clamp(1, n)
}

fn envelope<T: Scalar>(sample: &[Curve<T>], members: &[usize]) -> Result<(Curve<T>, Curve<T>)> {
    let grid = *sample[members[0]].grid();
    let mut lo = sample[members[0]].values().to_vec();
    let mut hi = lo.clone();
    for &i in &members[1..] {
        for (t, &v) in sample[i].values().iter().enumerate() {
            lo[t] = lo[t].min(v);
            hi[t] = hi[t].max(v);
        }
    }
    Ok((Curve::new(grid, lo)?, Curve::new(grid, hi)?))
}

fn region_from_ranking<T: Scalar>(
    sample: &[Curve<T>],
    ranking: &[usize],
    alpha: T,
) -> Result<CentralRegion<T>> {
    check_alpha(alpha)?;
    let m = region_size(alpha, sample.len());
    let mut members = ranking[..m].to_vec();
    members.sort_unstable();
    let (lower, upper) = envelope(sample, &members)?;
    Ok(CentralRegion {
        alpha,
        lower,
        upper,
        member_indices: members,
    })
}

pub fn central_region<T: Scalar>(
    sample: &[Curve<T>],
    alpha: T,
    depth: DepthKind,
) -> Result<CentralRegion<T>> {
    check_alpha(alpha)?;
    let ranking = depth_ranking(sample, depth)?;
    region_from_ranking(sample, &ranking, alpha)
}

/// Central-region volume at each alpha (alphas ascending).
pub fn scale_curve<T: Scalar>(
    sample: &[Curve<T>],
    alphas: &[T],
    depth: DepthKind,
) -> Result<Vec<(T, T)>> {
    for &a in alphas {
        check_alpha(a)?;
    }
    if alphas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("alphas must be sorted ascending".into()));
    }
    let ranking = depth_ranking(sample, depth)?;
    alphas
        .iter()
        .map(|&a| Ok((a, region_from_ranking(sample, &ranking, a)?.volume())))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxplotSummary<T> {
    pub median_curve: Curve<T>,
    pub region50: CentralRegion<T>,
    /// `(lower, upper)`: the 50% envelope widened by the fence factor times its height.
    pub fences: (Curve<T>, Curve<T>),
    pub outlier_indices: Vec<usize>,
}

pub fn functional_boxplot<T: Scalar>(
    sample: &[Curve<T>],
    depth: DepthKind,
) -> Result<BoxplotSummary<T>> {
    functional_boxplot_with_factor(sample, depth, T::lit(DEFAULT_FENCE_FACTOR))
}

/// Functional boxplot with an adjustable fence factor.
///
/// The median follows the depth tie rule. If more curves tie for maximal
/// depth than fit in the 50% region, their average need not lie inside it.
pub fn functional_boxplot_with_factor<T: Scalar>(
    sample: &[Curve<T>],
    depth: DepthKind,
    fence_factor: T,
) -> Result<BoxplotSummary<T>> {
    if sample.len() < 2 {
        return Err(Error::SampleTooSmall {
            need: 2,
            got: sample.len(),
        });
    }
    let median_curve = functional_median(sample, depth, None)?;
    let region50 = central_region(sample, T::lit(0.5), depth)?;
    let height = region50.upper.sub(&region50.lower)?;
    let lower = region50.lower.sub(&height.scale(fence_factor))?;
    let upper = region50.upper.add(&height.scale(fence_factor))?;
    let outlier_indices = sample
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            c.values()
                .iter()
                .zip(lower.values().iter().zip(upper.values()))
                .any(|(&v, (&lo, &hi))| v < lo || v > hi)
        })
        .map(|(i, _)| i)
        .collect();
    Ok(BoxplotSummary {
        median_curve,
        region50,
        fences: (lower, upper),
        outlier_indices,
    })
}

fn median<T: Scalar>(xs: &mut [T]) -> T {
    xs.sort_by(cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / T::lit(2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MadOptions {
    /// Integrate `realized - forecast` instead of its absolute value.
    pub signed: bool,
    /// Multiply by 1.4826.
    pub normal_consistency: bool,
}

/// Integrated differences between realized and forecast curves.
pub fn integrated_differences<T: Scalar>(
    pairs: &[(Curve<T>, Curve<T>)],
    signed: bool,
) -> Result<Vec<T>> {
    pairs
        .iter()
        .map(|(realized, forecast)| {
            let diff = realized.sub(forecast)?;
            Ok(integrate(&if signed { diff } else { diff.abs() }))
        })
        .collect()
}

/// Median absolute deviation about the median of the integrated absolute
/// differences.
pub fn mad_integrated<T: Scalar>(pairs: &[(Curve<T>, Curve<T>)]) -> Result<T> {
    mad_integrated_with(pairs, MadOptions::default())
}

pub fn mad_integrated_with<T: Scalar>(
    pairs: &[(Curve<T>, Curve<T>)],
    opts: MadOptions,
) -> Result<T> {
    if pairs.is_empty() {
        return Err(Error::Empty("forecast pairs"));
    }
    let d = integrated_differences(pairs, opts.signed)?;
    Ok(mad(&d, opts.normal_consistency))
}

/// Raw MAD of a sample of reals.
pub fn mad<T: Scalar>(xs: &[T], normal_consistency: bool) -> T {
    let mut d = xs.to_vec();
    let med = median(&mut d);
    let mut dev: Vec<T> = d.iter().map(|&x| (x - med).abs()).collect();
    let m = median(&mut dev);
    if normal_consistency {
        m * T::lit(MAD_NORMAL_CONSTANT)
    } else {
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeScore<T> {
    pub mad: T,
    pub mean_abs_integrated_error: T,
    pub n_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport<T> {
    pub method: String,
    pub per_node: BTreeMap<String, NodeScore<T>>,
    pub runtime_seconds: f64,
}

/// Scores every node of a backtest.
pub fn evaluate_backtest<T: Scalar>(
    backtest: &Backtest<T>,
    method: impl Into<String>,
    runtime_seconds: f64,
) -> Result<EvaluationReport<T>> {
    let mut per_node = BTreeMap::new();
    for (id, node) in &backtest.per_node {
        let pairs = node.pairs();
        let d = integrated_differences(&pairs, false)?;
        if d.is_empty() {
            return Err(Error::Empty("forecast pairs"));
        }
        per_node.insert(
            id.clone(),
            NodeScore {
                mad: mad(&d, false),
                mean_abs_integrated_error: d.iter().copied().sum::<T>() / T::from_count(d.len()),
                n_pairs: d.len(),
            },
        );
    }
    Ok(EvaluationReport {
        method: method.into(),
        per_node,
        runtime_seconds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierKind {
    /// Level shift by the magnitude.
    Amplitude,
    /// Added sinusoid with integer frequency 2..=6 over the domain.
    Shape,
    /// Independent noise around the curve mean.
    Covariance,
}

/// The `floor(rate * n)` indices, ascending, that [`inject_outliers`] replaces.
pub fn outlier_indices(n: usize, rate: f64, seed: u64) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pick(&mut rng, n, rate)
}

fn pick(rng: &mut ChaCha8Rng, n: usize, rate: f64) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidParameter(format!("rate {rate} outside [0, 1]")));
    }
    let m = (rate * n as f64).floor() as usize;
    let mut idx = index::sample(rng, n, m.min(n)).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

pub fn inject_outliers<T: Scalar>(
    series: &FunctionalSeries<T>,
    kind: OutlierKind,
    rate: f64,
    magnitude: T,
    seed: u64,
) -> Result<FunctionalSeries<T>> {
    if !magnitude.is_finite() {
        return Err(Error::InvalidParameter("magnitude must be finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = pick(&mut rng, series.len(), rate)?;
    let grid = *series.grid();
    let mut curves = series.curves().to_vec();
    for i in chosen {
        let c = &curves[i];
        curves[i] = match kind {
            OutlierKind::Amplitude => c.map(|v| v + magnitude),
            OutlierKind::Shape => {
                let freq = rng.random_range(2..=6u32) as f64;
                let start = grid.start().as_f64();
                let span = grid.measure().as_f64();
                let values = c
                    .values()
                    .iter()
                    .zip(grid.points())
                    .map(|(&v, t)| {
                        let phase = std::f64::consts::TAU * freq * (t.as_f64() - start) / span;
                        v + magnitude * T::lit(phase.sin())
                    })
                    .collect();
                Curve::new(grid, values)?
            }
            OutlierKind::Covariance => {
                let mean = c.mean_value();
                let values = (0..c.len())
                    .map(|_| {
                        let z: f64 = rng.sample(StandardNormal);
                        mean + magnitude * T::lit(z)
                    })
                    .collect();
                Curve::new(grid, values)?
            }
        };
    }
    Ok(series.with_curves(curves))
}
