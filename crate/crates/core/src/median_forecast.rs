//! Depth-induced functional medians, moving-window forecasters, the
//! hierarchical double-median forecaster and rolling one-step backtests for
//! every hierarchical method.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{integrate, mean_curve, Curve, FunctionalSeries};
use crate::depth::{depth_all, DepthKind};
use crate::error::{Error, Result};
use crate::fpca::{forecast_window, ScoreModel, DEFAULT_VAR_THRESHOLD};
use crate::reconcile::{
    bottom_up, floored_variance, gls_reconcile, historical_proportions, is_aggregate_consistent,
    aggregation_violation, materialize_node_series, summing_matrix, top_down, Hierarchy,
    StackedForecast, SummingMatrix, CONSISTENCY_TOL,
};
use crate::scalar::Scalar;

/// Node id to series.
pub type SeriesMap<T> = BTreeMap<String, FunctionalSeries<T>>;

/// Absolute tolerance under which two depth values are a tie.
pub const DEPTH_TIE_TOL: f64 = 1e-12;

/// Default moving-window length.
pub const DEFAULT_WINDOW: usize = 10;

/// The median curve and the sample indices that attained maximal depth.
#[derive(Debug, Clone, PartialEq)]
pub struct MedianSelection<T> {
    pub curve: Curve<T>,
    pub maximizers: Vec<usize>,
}

/// Deepest sample curve; the pointwise mean of all maximizers when several tie.
pub fn functional_median_selection<T: Scalar>(
    sample: &[Curve<T>],
    depth: DepthKind,
    weights: Option<&[T]>,
) -> Result<MedianSelection<T>> {
    match sample {
        [] => Err(Error::Empty("median sample")),
        [only] => Ok(MedianSelection {
            curve: only.clone(),
            maximizers: vec![0],
        }),
        _ => {
            let d = depth_all(sample, depth, weights)?;
            let maximizers = d.argmax(T::lit(DEPTH_TIE_TOL));
            let curve = if let [i] = maximizers[..] {
                sample[i].clone()
            } else {
                let tied: Vec<Curve<T>> = maximizers.iter().map(|&i| sample[i].clone()).collect();
                mean_curve(&tied)?
            };
            Ok(MedianSelection { curve, maximizers })
        }
    }
}

pub fn functional_median<T: Scalar>(
    sample: &[Curve<T>],
    depth: DepthKind,
    weights: Option<&[T]>,
) -> Result<Curve<T>> {
    Ok(functional_median_selection(sample, depth, weights)?.curve)
}

/// The `k` most recent observations ending at `end_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MovingWindow {
    k: usize,
    end_index: usize,
}

impl MovingWindow {
    pub fn new(k: usize, end_index: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("window length must be positive".into()));
        }
        if end_index + 1 < k {
            return Err(Error::SampleTooSmall {
                need: k,
                got: end_index + 1,
            });
        }
        Ok(Self { k, end_index })
    }

    /// Window ending at the last observation of a series of length `len`.
    pub fn latest(k: usize, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Empty("series"));
        }
        Self::new(k, len - 1)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn end_index(&self) -> usize {
        self.end_index
    }

    pub fn slice<'a, T>(&self, curves: &'a [Curve<T>]) -> Result<&'a [Curve<T>]> {
        if self.end_index >= curves.len() {
            return Err(Error::SampleTooSmall {
                need: self.end_index + 1,
                got: curves.len(),
            });
        }
        Ok(&curves[self.end_index + 1 - self.k..=self.end_index])
    }
}

pub fn moving_median_forecast<T: Scalar>(
    series: &FunctionalSeries<T>,
    k: usize,
    depth: DepthKind,
) -> Result<Curve<T>> {
    let w = MovingWindow::latest(k, series.len())?;
    functional_median(w.slice(series.curves())?, depth, None)
}

pub fn moving_mean_forecast<T: Scalar>(series: &FunctionalSeries<T>, k: usize) -> Result<Curve<T>> {
    let w = MovingWindow::latest(k, series.len())?;
    mean_curve(w.slice(series.curves())?)
}

pub fn naive_forecast<T: Scalar>(series: &FunctionalSeries<T>) -> Result<Curve<T>> {
    series.last().cloned().ok_or(Error::Empty("series"))
}

/// Single-series one-step forecaster applied independently at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseForecaster<T> {
    MovingMedian(DepthKind),
    MovingMean,
    Naive,
    Fpca {
        var_threshold: T,
        score_model: ScoreModel,
    },
}

impl<T: Scalar> BaseForecaster<T> {
    pub fn fpca_default() -> Self {
        Self::Fpca {
            var_threshold: T::lit(DEFAULT_VAR_THRESHOLD),
            score_model: ScoreModel::Ar1,
        }
    }

    /// Forecast of the observation following `window` (oldest first).
    pub fn forecast_window(&self, window: &[Curve<T>]) -> Result<Curve<T>> {
        if window.is_empty() {
            return Err(Error::Empty("forecast window"));
        }
        match *self {
            Self::MovingMedian(depth) => functional_median(window, depth, None),
            Self::MovingMean => mean_curve(window),
            Self::Naive => Ok(window[window.len() - 1].clone()),
            Self::Fpca {
                var_threshold,
                score_model,
            } => forecast_window(window, var_threshold, score_model),
        }
    }

    pub fn forecast_series(&self, series: &FunctionalSeries<T>, k: usize) -> Result<Curve<T>> {
        let w = MovingWindow::latest(k, series.len())?;
        self.forecast_window(w.slice(series.curves())?)
    }
}

/// Base forecasts of every node in `order` for each window end `k-1..len-2`;
/// entry `i` targets observation `k + i`.
pub(crate) fn base_backtest<T: Scalar>(
    nodes: &SeriesMap<T>,
    order: &[String],
    base: &BaseForecaster<T>,
    k: usize,
) -> Result<Vec<Vec<Curve<T>>>> {
    let len = series_len(nodes, order)?;
    if k == 0 || len <= k {
        return Err(Error::SampleTooSmall {
            need: k + 1,
            got: len,
        });
    }
    (k - 1..len - 1)
        .into_par_iter()
        .map(|end| {
            let w = MovingWindow::new(k, end)?;
            order
                .iter()
                .map(|id| base.forecast_window(w.slice(nodes[id.as_str()].curves())?))
                .collect()
        })
        .collect()
}

fn series_len<T: Scalar>(nodes: &SeriesMap<T>, order: &[String]) -> Result<usize> {
    let first = order.first().ok_or(Error::Empty("node order"))?;
    Ok(nodes
        .get(first)
        .ok_or_else(|| Error::MissingData(first.clone()))?
        .len())
}

/// Whether internal-node medians weight children by population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Population,
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DoubleMedianOptions {
    pub depth: DepthKind,
    pub weighting: Weighting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForecastMethod {
    DoubleMedian,
    MovingMean,
    Naive,
    BottomUp,
    TopDown,
    GlsOptimal,
}

/// Forecasting strategy for a whole hierarchy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HierMethod<T> {
    /// Moving medians at the leaves, then medians of child forecasts upward.
    DoubleMedian(DoubleMedianOptions),
    /// Moving mean at every node.
    MovingMean,
    /// Last observation at every node.
    Naive,
    BottomUp(BaseForecaster<T>),
    TopDown(BaseForecaster<T>),
    /// Base forecasts at every node reconciled by GLS with backtest variances.
    GlsOptimal(BaseForecaster<T>),
}

impl<T> HierMethod<T> {
    pub fn label(&self) -> ForecastMethod {
        match self {
            Self::DoubleMedian(_) => ForecastMethod::DoubleMedian,
            Self::MovingMean => ForecastMethod::MovingMean,
            Self::Naive => ForecastMethod::Naive,
            Self::BottomUp(_) => ForecastMethod::BottomUp,
            Self::TopDown(_) => ForecastMethod::TopDown,
            Self::GlsOptimal(_) => ForecastMethod::GlsOptimal,
        }
    }
}

/// One forecast curve per hierarchy node.
#[derive(Debug, Clone, PartialEq)]
pub struct HierForecast<T> {
    pub per_node: BTreeMap<String, Curve<T>>,
    pub target_timestamp: Option<NaiveDate>,
    pub method: ForecastMethod,
    pub aggregate_consistent: bool,
    /// Relative tolerance used for `aggregate_consistent`.
    pub consistency_tolerance: T,
    /// Largest absolute deviation from the aggregation constraints.
    pub max_violation: T,
}

impl<T: Scalar> HierForecast<T> {
    fn assemble(
        s: &SummingMatrix<T>,
        per_node: BTreeMap<String, Curve<T>>,
        target_timestamp: Option<NaiveDate>,
        method: ForecastMethod,
    ) -> Result<Self> {
        let stacked = StackedForecast::from_curves(&s.row_order, &per_node)?;
        Ok(Self {
            aggregate_consistent: is_aggregate_consistent(s, &stacked.values)?,
            max_violation: aggregation_violation(s, &stacked.values)?,
            consistency_tolerance: T::lit(CONSISTENCY_TOL),
            per_node,
            target_timestamp,
            method,
        })
    }
}

/// Shared state for forecasting at arbitrary window ends.
struct Engine<'a, T> {
    h: &'a Hierarchy<T>,
    s: SummingMatrix<T>,
    nodes: SeriesMap<T>,
    k: usize,
}

impl<'a, T: Scalar> Engine<'a, T> {
    fn new(data: &SeriesMap<T>, h: &'a Hierarchy<T>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("window length must be positive".into()));
        }
        let nodes = materialize_node_series(data, h)?;
        let s = summing_matrix(h)?;
        let len = series_len(&nodes, &s.row_order)?;
        if len < k {
            return Err(Error::SampleTooSmall { need: k, got: len });
        }
        Ok(Self { h, s, nodes, k })
    }

    fn len(&self) -> usize {
        self.nodes[self.h.root()].len()
    }

    fn window(&self, id: &str, end: usize) -> Result<&[Curve<T>]> {
        MovingWindow::new(self.k, end)?.slice(self.nodes[id].curves())
    }

    fn double_median(&self, end: usize, opts: DoubleMedianOptions) -> Result<BTreeMap<String, Curve<T>>> {
        let mut out = BTreeMap::new();
        for leaf in self.h.leaves() {
            let w = self.window(leaf, end)?;
            out.insert(leaf.to_string(), functional_median(w, opts.depth, None)?);
        }
        for id in self.h.internal_nodes().into_iter().rev() {
            let children = self.h.children(id)?;
            let curves: Vec<Curve<T>> = children.iter().map(|c| out[*c].clone()).collect();
            let weights = match opts.weighting {
                Weighting::Population => Some(
                    children
                        .iter()
                        .map(|c| self.h.subtree_weight(c))
                        .collect::<Result<Vec<T>>>()?,
                ),
                Weighting::Equal => None,
            };
            let median = functional_median(&curves, opts.depth, weights.as_deref())?;
            out.insert(id.to_string(), median);
        }
        Ok(out)
    }

    fn per_node(
        &self,
        end: usize,
        base: &BaseForecaster<T>,
    ) -> Result<BTreeMap<String, Curve<T>>> {
        self.s
            .row_order
            .iter()
            .map(|id| Ok((id.clone(), base.forecast_window(self.window(id, end)?)?)))
            .collect()
    }

    fn bottom_up(&self, end: usize, base: &BaseForecaster<T>) -> Result<BTreeMap<String, Curve<T>>> {
        let leaves = self
            .s
            .col_order
            .iter()
            .map(|id| base.forecast_window(self.window(id, end)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(bottom_up(&self.s, &leaves)?.to_map())
    }

    fn top_down(&self, end: usize, base: &BaseForecaster<T>) -> Result<BTreeMap<String, Curve<T>>> {
        let root = base.forecast_window(self.window(self.h.root(), end)?)?;
        let p = historical_proportions(&self.nodes, self.h, end, self.k)?;
        Ok(top_down(&self.s, &root, &p)?.to_map())
    }

    fn gls(
        &self,
        base_rows: &[Curve<T>],
        v: &[T],
    ) -> Result<BTreeMap<String, Curve<T>>> {
        let curves: BTreeMap<String, Curve<T>> = self
            .s
            .row_order
            .iter()
            .cloned()
            .zip(base_rows.iter().cloned())
            .collect();
        let x_hat = StackedForecast::from_curves(&self.s.row_order, &curves)?;
        Ok(gls_reconcile(&self.s, &x_hat, v)?.reconciled.to_map())
    }

    /// Integrated residuals `realized - forecast` for entry `i` of a base backtest.
    fn residual_integrals(&self, i: usize, rows: &[Curve<T>]) -> Result<Vec<T>> {
        self.s
            .row_order
            .iter()
            .zip(rows)
            .map(|(id, f)| Ok(integrate(&self.nodes[id.as_str()].curves()[self.k + i].sub(f)?)))
            .collect()
    }

    /// Per-node variances from the first `count` residual vectors; identity
    /// when fewer than two are available.
    fn variances(&self, residuals: &[Vec<T>], count: usize) -> Vec<T> {
        let m = self.s.n_nodes();
        if count < 2 {
            return vec![T::one(); m];
        }
        (0..m)
            .map(|r| {
                let xs: Vec<T> = residuals[..count].iter().map(|v| v[r]).collect();
                floored_variance(&xs)
            })
            .collect()
    }

    fn step(&self, method: &HierMethod<T>, end: usize) -> Result<BTreeMap<String, Curve<T>>> {
        match method {
            HierMethod::DoubleMedian(o) => self.double_median(end, *o),
            HierMethod::MovingMean => self.per_node(end, &BaseForecaster::MovingMean),
            HierMethod::Naive => self.per_node(end, &BaseForecaster::Naive),
            HierMethod::BottomUp(b) => self.bottom_up(end, b),
            HierMethod::TopDown(b) => self.top_down(end, b),
            HierMethod::GlsOptimal(b) => {
                let mut residuals = Vec::new();
                for i in 0..end + 1 - self.k {
                    let rows = self
                        .s
                        .row_order
                        .iter()
                        .map(|id| b.forecast_window(self.window(id, self.k - 1 + i)?))
                        .collect::<Result<Vec<_>>>()?;
                    residuals.push(self.residual_integrals(i, &rows)?);
                }
                let rows: Vec<Curve<T>> = self
                    .s
                    .row_order
                    .iter()
                    .map(|id| b.forecast_window(self.window(id, end)?))
                    .collect::<Result<_>>()?;
                let v = self.variances(&residuals, residuals.len());
                self.gls(&rows, &v)
            }
        }
    }
}

fn next_day(d: Option<&NaiveDate>) -> Option<NaiveDate> {
    d.and_then(|d| d.succ_opt())
}

/// One-step forecast of every node from the latest window of length `k`.
pub fn forecast_hierarchy<T: Scalar>(
    data: &SeriesMap<T>,
    h: &Hierarchy<T>,
    method: &HierMethod<T>,
    k: usize,
) -> Result<HierForecast<T>> {
    let engine = Engine::new(data, h, k)?;
    let end = engine.len() - 1;
    let per_node = engine.step(method, end)?;
    let target = next_day(engine.nodes[h.root()].timestamps().last());
    HierForecast::assemble(&engine.s, per_node, target, method.label())
}

pub fn double_median_forecast<T: Scalar>(
    data: &SeriesMap<T>,
    h: &Hierarchy<T>,
    k: usize,
    opts: DoubleMedianOptions,
) -> Result<HierForecast<T>> {
    forecast_hierarchy(data, h, &HierMethod::DoubleMedian(opts), k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeBacktest<T> {
    pub forecasts: Vec<Curve<T>>,
    pub realized: Vec<Curve<T>>,
}

impl<T: Scalar> NodeBacktest<T> {
    /// `(realized, forecast)` pairs.
    pub fn pairs(&self) -> Vec<(Curve<T>, Curve<T>)> {
        self.realized
            .iter()
            .cloned()
            .zip(self.forecasts.iter().cloned())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.forecasts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forecasts.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Backtest<T> {
    pub method: ForecastMethod,
    pub target_dates: Vec<NaiveDate>,
    pub per_node: BTreeMap<String, NodeBacktest<T>>,
}

/// Forecasts observation `t + 1` from the window ending at `t` for every
/// `t = k-1, ..., len-2` and pairs it with the realized curve. Internal-node
/// realizations are aggregated from the leaves.
pub fn rolling_backtest<T: Scalar>(
    data: &SeriesMap<T>,
    h: &Hierarchy<T>,
    method: &HierMethod<T>,
    k: usize,
) -> Result<Backtest<T>> {
    let engine = Engine::new(data, h, k)?;
    let len = engine.len();
    if len <= k {
        return Err(Error::SampleTooSmall {
            need: k + 1,
            got: len,
        });
    }
    let steps: Vec<BTreeMap<String, Curve<T>>> = match method {
        HierMethod::GlsOptimal(b) => {
            let base = base_backtest(&engine.nodes, &engine.s.row_order, b, k)?;
            let residuals = base
                .iter()
                .enumerate()
                .map(|(i, rows)| engine.residual_integrals(i, rows))
                .collect::<Result<Vec<_>>>()?;
            base.par_iter()
                .enumerate()
                .map(|(i, rows)| engine.gls(rows, &engine.variances(&residuals, i)))
                .collect::<Result<_>>()?
        }
        _ => (k - 1..len - 1)
            .into_par_iter()
            .map(|end| engine.step(method, end))
            .collect::<Result<_>>()?,
    };
    let mut per_node = BTreeMap::new();
    for id in &engine.s.row_order {
        let realized = engine.nodes[id.as_str()].curves()[k..].to_vec();
        let forecasts = steps.iter().map(|m| m[id].clone()).collect();
        per_node.insert(
            id.clone(),
            NodeBacktest {
                forecasts,
                realized,
            },
        );
    }
    Ok(Backtest {
        method: method.label(),
        target_dates: engine.nodes[h.root()].timestamps()[k..].to_vec(),
        per_node,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::Grid;
    use crate::reconcile::{Aggregation, NodeSpec};

    fn grid() -> Grid<f64> {
        Grid::new(0.0, 24.0, 24).unwrap()
    }

    fn dates(n: usize) -> Vec<NaiveDate> {
        let d0 = NaiveDate::from_ymd_opt(2016, 9, 1).unwrap();
        (0..n).map(|i| d0 + chrono::Days::new(i as u64)).collect()
    }

    fn series(id: &str, curves: Vec<Curve<f64>>) -> FunctionalSeries<f64> {
        let n = curves.len();
        FunctionalSeries::new(id, grid(), curves, dates(n)).unwrap()
    }

    fn constant_series(id: &str, values: &[f64]) -> FunctionalSeries<f64> {
        series(id, values.iter().map(|&v| Curve::constant(grid(), v)).collect())
    }

    fn star(n: usize, w: f64) -> Hierarchy<f64> {
        let mut specs = vec![NodeSpec::root("root")];
        for i in 0..n {
            specs.push(NodeSpec::leaf(format!("l{i}"), "root", w));
        }
        Hierarchy::new(specs, Aggregation::WeightedAverage).unwrap()
    }

    #[test]
    fn median_examples() {
        let s: Vec<_> = [0.0, 1.0, 2.0].iter().map(|&v| Curve::constant(grid(), v)).collect();
        assert_eq!(functional_median(&s, DepthKind::Mbd, None).unwrap().values(), &[1.0; 24]);
        let a = Curve::from_fn(grid(), |t| t).unwrap();
        let b = Curve::from_fn(grid(), |t| 2.0 - t).unwrap();
        let m = functional_median_selection(&[a.clone(), b.clone()], DepthKind::Mbd, None).unwrap();
        assert_eq!(m.maximizers, vec![0, 1]);
        assert!(m.curve.max_abs_diff(&Curve::constant(grid(), 1.0)) < 1e-12);
        assert_eq!(functional_median(std::slice::from_ref(&a), DepthKind::Mbd, None).unwrap(), a);
        assert!(functional_median::<f64>(&[], DepthKind::Mbd, None).is_err());
    }

    #[test]
    fn moving_forecasts() {
        let s = constant_series("a", &[3.0; 12]);
        assert_eq!(moving_median_forecast(&s, 10, DepthKind::Mbd).unwrap().values(), &[3.0; 24]);
        assert_eq!(moving_mean_forecast(&s, 4).unwrap().values(), &[3.0; 24]);
        let s = constant_series("a", &[5.0, 0.0, 10.0, 7.0]);
        assert_eq!(moving_median_forecast(&s, 1, DepthKind::Mbd).unwrap().values(), &[7.0; 24]);
        assert_eq!(naive_forecast(&s).unwrap().values(), &[7.0; 24]);
        let s = constant_series("a", &[0.0, 10.0]);
        assert_eq!(moving_mean_forecast(&s, 2).unwrap().values(), &[5.0; 24]);
        assert!(moving_median_forecast(&s, 3, DepthKind::Mbd).is_err());
        assert!(moving_mean_forecast(&s, 3).is_err());
        let empty = FunctionalSeries::<f64>::from_parts("e", grid(), vec![], vec![]);
        assert!(naive_forecast(&empty).is_err());
    }

    #[test]
    fn moving_window_bounds() {
        assert!(MovingWindow::new(0, 3).is_err());
        assert!(MovingWindow::new(5, 3).is_err());
        let w = MovingWindow::new(4, 3).unwrap();
        let curves: Vec<_> = (0..6).map(|i| Curve::constant(grid(), i as f64)).collect();
        let sl = w.slice(&curves).unwrap();
        assert_eq!(sl.len(), 4);
        assert_eq!(sl[3].values()[0], 3.0);
    }

    #[test]
    fn double_median_of_five_constants() {
        let h = star(5, 1.0);
        let data: SeriesMap<f64> = (0..5)
            .map(|i| (format!("l{i}"), constant_series(&format!("l{i}"), &[i as f64; 10])))
            .collect();
        let f = double_median_forecast(&data, &h, 10, DoubleMedianOptions::default()).unwrap();
        assert_eq!(f.per_node.len(), 6);
        assert_eq!(f.per_node["root"].values(), &[2.0; 24]);
        assert_eq!(f.method, ForecastMethod::DoubleMedian);
        assert!(f.aggregate_consistent);
        assert_eq!(f.target_timestamp, NaiveDate::from_ymd_opt(2016, 9, 11));
    }

    #[test]
    fn double_median_not_forced_consistent() {
        let h = star(3, 1.0);
        let data: SeriesMap<f64> = [0.0, 1.0, 5.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| (format!("l{i}"), constant_series(&format!("l{i}"), &[v; 4])))
            .collect();
        let f = double_median_forecast(&data, &h, 3, DoubleMedianOptions::default()).unwrap();
        assert_eq!(f.per_node["root"].values(), &[1.0; 24]);
        assert!(!f.aggregate_consistent);
        assert!((f.max_violation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn backtest_pair_counts() {
        let h = star(2, 1.0);
        let data: SeriesMap<f64> = (0..2)
            .map(|i| (format!("l{i}"), constant_series(&format!("l{i}"), &[1.0; 11])))
            .collect();
        let bt = rolling_backtest(&data, &h, &HierMethod::Naive, 10).unwrap();
        assert_eq!(bt.target_dates.len(), 1);
        assert!(bt.per_node.values().all(|n| n.len() == 1));
        assert!(rolling_backtest(&data, &h, &HierMethod::Naive, 11).is_err());
    }

    #[test]
    fn misaligned_leaves_rejected() {
        let h = star(2, 1.0);
        let mut data: SeriesMap<f64> = SeriesMap::new();
        data.insert("l0".into(), constant_series("l0", &[1.0; 12]));
        data.insert("l1".into(), constant_series("l1", &[1.0; 11]));
        assert!(matches!(
            double_median_forecast(&data, &h, 10, DoubleMedianOptions::default()),
            Err(Error::Misaligned(_))
        ));
        data.remove("l1");
        assert!(matches!(
            double_median_forecast(&data, &h, 10, DoubleMedianOptions::default()),
            Err(Error::MissingData(_))
        ));
    }
}
