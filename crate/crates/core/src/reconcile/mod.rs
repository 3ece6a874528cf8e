//! Hierarchy structure, the summing matrix, bottom-up and top-down
//! disaggregation, and generalized least squares reconciliation.

mod hierarchy;

use std::collections::BTreeMap;

pub use hierarchy::{Aggregation, Hierarchy, NodeSpec};

use crate::curves::{integrate, Curve, FunctionalSeries, Grid};
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::median_forecast::{base_backtest, BaseForecaster, SeriesMap};
use crate::scalar::Scalar;

/// Relative tolerance for aggregation constraints.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Floor applied to estimated forecast variances.
pub const VARIANCE_FLOOR: f64 = 1e-8;

/// Maps leaf values to every node: `X = S b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummingMatrix<T> {
    pub s: Matrix<T>,
    pub row_order: Vec<String>,
    pub col_order: Vec<String>,
}

impl<T: Scalar> SummingMatrix<T> {
    pub fn n_nodes(&self) -> usize {
        self.s.rows()
    }

    pub fn n_leaves(&self) -> usize {
        self.s.cols()
    }

    pub fn row_of(&self, id: &str) -> Option<usize> {
        self.row_order.iter().position(|r| r == id)
    }

    /// Rows of the leaves, in column order.
    pub fn leaf_rows(&self) -> Vec<usize> {
        let internal = self.n_nodes() - self.n_leaves();
        (internal..self.n_nodes()).collect()
    }
}

pub fn summing_matrix<T: Scalar>(h: &Hierarchy<T>) -> Result<SummingMatrix<T>> {
    let row_order: Vec<String> = h.row_order().into_iter().map(String::from).collect();
    let col_order: Vec<String> = h.leaves().into_iter().map(String::from).collect();
    let col: BTreeMap<&str, usize> = col_order
        .iter()
        .enumerate()
        .map(|(j, id)| (id.as_str(), j))
        .collect();
    let mut s = Matrix::zeros(row_order.len(), col_order.len());
    for (i, id) in row_order.iter().enumerate() {
        let leaves = h.leaves_under(id)?;
        let total = h.subtree_weight(id)?;
        for leaf in leaves {
            let w = h
                .leaf_weight(leaf)
                .ok_or_else(|| Error::InvalidHierarchy(format!("leaf `{leaf}` has no weight")))?;
            s[(i, col[leaf])] = match h.convention() {
                _ if h.is_leaf(id) => T::one(),
                Aggregation::WeightedAverage => w / total,
                Aggregation::Sum => T::one(),
            };
        }
    }
    Ok(SummingMatrix {
        s,
        row_order,
        col_order,
    })
}

/// One curve per node, stacked in summing-matrix row order.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedForecast<T> {
    pub row_order: Vec<String>,
    /// `n_nodes x n_points`.
    pub values: Matrix<T>,
    pub grid: Grid<T>,
}

impl<T: Scalar> StackedForecast<T> {
    pub fn from_curves(row_order: &[String], curves: &BTreeMap<String, Curve<T>>) -> Result<Self> {
        let first = row_order
            .first()
            .and_then(|id| curves.get(id))
            .ok_or(Error::Empty("stacked forecast rows"))?;
        let grid = *first.grid();
        let mut values = Matrix::zeros(row_order.len(), grid.n_points());
        for (i, id) in row_order.iter().enumerate() {
            let c = curves.get(id).ok_or_else(|| Error::MissingData(id.clone()))?;
            if c.grid() != &grid {
                return Err(Error::GridMismatch(format!("forecast for `{id}`")));
            }
            values.row_mut(i).copy_from_slice(c.values());
        }
        Ok(Self {
            row_order: row_order.to_vec(),
            values,
            grid,
        })
    }

    pub fn curve(&self, row: usize) -> Curve<T> {
        Curve::new(self.grid, self.values.row(row).to_vec()).expect("row matches grid")
    }

    pub fn get(&self, id: &str) -> Option<Curve<T>> {
        self.row_order.iter().position(|r| r == id).map(|i| self.curve(i))
    }

    pub fn to_map(&self) -> BTreeMap<String, Curve<T>> {
        self.row_order
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), self.curve(i)))
            .collect()
    }
}

/// Largest deviation of any row from `S` applied to the leaf rows.
pub fn aggregation_violation<T: Scalar>(s: &SummingMatrix<T>, x: &Matrix<T>) -> Result<T> {
    let leaf_rows = s.leaf_rows();
    let mut leaves = Matrix::zeros(s.n_leaves(), x.cols());
    for (j, &r) in leaf_rows.iter().enumerate() {
        leaves.row_mut(j).copy_from_slice(x.row(r));
    }
    let implied = s.s.matmul(&leaves)?;
    Ok(implied.max_abs_diff(x))
}

/// Whether `x` satisfies the aggregation constraints up to [`CONSISTENCY_TOL`],
/// scaled by the magnitude of the values.
pub fn is_aggregate_consistent<T: Scalar>(s: &SummingMatrix<T>, x: &Matrix<T>) -> Result<bool> {
    let tol = T::lit(CONSISTENCY_TOL) * x.max_abs().max(T::one());
    Ok(aggregation_violation(s, x)? <= tol)
}

#[derive(Debug, Clone)]
pub struct ReconciliationResult<T> {
    /// Reconciled leaf curves, `n_leaves x n_points`.
    pub beta: Matrix<T>,
    pub reconciled: StackedForecast<T>,
    /// Base forecasts minus reconciled forecasts.
    pub residual: StackedForecast<T>,
    pub v_diag: Vec<T>,
}

/// Solves `(S' V^-1 S) beta = S' V^-1 x_hat` at every grid point and returns
/// `S beta`.
pub fn gls_reconcile<T: Scalar>(
    s: &SummingMatrix<T>,
    x_hat: &StackedForecast<T>,
    v_diag: &[T],
) -> Result<ReconciliationResult<T>> {
    let m = s.n_nodes();
    let n = s.n_leaves();
    if x_hat.values.rows() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            actual: x_hat.values.rows(),
        });
    }
    if v_diag.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            actual: v_diag.len(),
        });
    }
    if let Some(v) = v_diag.iter().find(|v| !(**v > T::zero() && v.is_finite())) {
        return Err(Error::InvalidParameter(format!("variance {v} is not positive")));
    }
    let inv_v: Vec<T> = v_diag.iter().map(|&v| T::one() / v).collect();
    let mut normal = Matrix::zeros(n, n);
    for a in 0..n {
        for b in 0..=a {
            let mut acc = T::zero();
            for i in 0..m {
                acc = acc + s.s[(i, a)] * inv_v[i] * s.s[(i, b)];
            }
            normal[(a, b)] = acc;
            normal[(b, a)] = acc;
        }
    }
    let chol = Cholesky::factor(&normal)?;
    let p = x_hat.values.cols();
    let mut beta = Matrix::zeros(n, p);
    let mut rhs = vec![T::zero(); n];
    for t in 0..p {
        for (a, r) in rhs.iter_mut().enumerate() {
            *r = (0..m)
                .map(|i| s.s[(i, a)] * inv_v[i] * x_hat.values[(i, t)])
                .sum();
        }
        for (a, v) in chol.solve(&rhs).into_iter().enumerate() {
            beta[(a, t)] = v;
        }
    }
    let reconciled_values = s.s.matmul(&beta)?;
    let mut residual_values = x_hat.values.clone();
    for i in 0..m {
        for t in 0..p {
            residual_values[(i, t)] = x_hat.values[(i, t)] - reconciled_values[(i, t)];
        }
    }
    Ok(ReconciliationResult {
        beta,
        reconciled: StackedForecast {
            row_order: s.row_order.clone(),
            values: reconciled_values,
            grid: x_hat.grid,
        },
        residual: StackedForecast {
            row_order: s.row_order.clone(),
            values: residual_values,
            grid: x_hat.grid,
        },
        v_diag: v_diag.to_vec(),
    })
}

/// `S` applied to leaf forecasts given in column order.
pub fn bottom_up<T: Scalar>(
    s: &SummingMatrix<T>,
    leaf_forecasts: &[Curve<T>],
) -> Result<StackedForecast<T>> {
    if leaf_forecasts.len() != s.n_leaves() {
        return Err(Error::LengthMismatch {
            expected: s.n_leaves(),
            actual: leaf_forecasts.len(),
        });
    }
    let grid = *leaf_forecasts[0].grid();
    let rows: Vec<Vec<T>> = leaf_forecasts
        .iter()
        .map(|c| {
            if c.grid() != &grid {
                return Err(Error::GridMismatch("leaf forecasts".into()));
            }
            Ok(c.values().to_vec())
        })
        .collect::<Result<_>>()?;
    let leaves = Matrix::from_rows(&rows)?;
    let mut values = s.s.matmul(&leaves)?;
    // leaf rows pass through untouched
    for (j, r) in s.leaf_rows().into_iter().enumerate() {
        values.row_mut(r).copy_from_slice(leaves.row(j));
    }
    Ok(StackedForecast {
        row_order: s.row_order.clone(),
        values,
        grid,
    })
}

/// Scales the root forecast by a per-leaf proportion and re-aggregates.
/// The proportions must reproduce the root under `S`.
pub fn top_down<T: Scalar>(
    s: &SummingMatrix<T>,
    root_forecast: &Curve<T>,
    proportions: &BTreeMap<String, T>,
) -> Result<StackedForecast<T>> {
    let leaves: Vec<Curve<T>> = s
        .col_order
        .iter()
        .map(|id| {
            let p = *proportions
                .get(id)
                .ok_or_else(|| Error::MissingData(format!("proportion for `{id}`")))?;
            if !(p > T::zero() && p.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "proportion for `{id}` is not positive: {p}"
                )));
            }
            Ok(root_forecast.scale(p))
        })
        .collect::<Result<_>>()?;
    let out = bottom_up(s, &leaves)?;
    let diff = out.curve(0).max_abs_diff(root_forecast);
    let scale = root_forecast
        .values()
        .iter()
        .fold(T::one(), |m, v| m.max(v.abs()));
    if diff > T::lit(CONSISTENCY_TOL) * scale {
        return Err(Error::InconsistentProportions(diff.as_f64()));
    }
    Ok(out)
}

/// Leaf-to-root ratios of window means, `mean(leaf) / mean(root)`, over the
/// last `k` observations.
pub fn historical_proportions<T: Scalar>(
    node_series: &SeriesMap<T>,
    h: &Hierarchy<T>,
    end: usize,
    k: usize,
) -> Result<BTreeMap<String, T>> {
    let window_mean = |id: &str| -> Result<T> {
        let s = node_series
            .get(id)
            .ok_or_else(|| Error::MissingData(id.to_string()))?;
        let w = &s.curves()[end + 1 - k..=end];
        Ok(w.iter().map(Curve::mean_value).sum::<T>() / T::from_count(w.len()))
    };
    let root_mean = window_mean(h.root())?;
    if root_mean.abs() <= T::epsilon() {
        return Err(Error::InvalidParameter(
            "root series has zero mean; top-down shares undefined".into(),
        ));
    }
    h.leaves()
        .into_iter()
        .map(|leaf| Ok((leaf.to_string(), window_mean(leaf)? / root_mean)))
        .collect()
}

/// Checks that every leaf has a series and that all leaves share grid and dates.
pub fn check_leaf_alignment<T: Scalar>(data: &SeriesMap<T>, h: &Hierarchy<T>) -> Result<()> {
    let leaves = h.leaves();
    let first = data
        .get(leaves[0])
        .ok_or_else(|| Error::MissingData(leaves[0].to_string()))?;
    for &leaf in &leaves[1..] {
        let s = data
            .get(leaf)
            .ok_or_else(|| Error::MissingData(leaf.to_string()))?;
        if s.grid() != first.grid() {
            return Err(Error::GridMismatch(format!(
                "leaf `{leaf}` grid differs from `{}`",
                leaves[0]
            )));
        }
        if s.timestamps() != first.timestamps() || s.len() != first.len() {
            return Err(Error::Misaligned(format!(
                "leaf `{leaf}` dates differ from `{}`",
                leaves[0]
            )));
        }
    }
    Ok(())
}

/// Series for every node: leaves as given, internal nodes aggregated through `S`.
pub fn materialize_node_series<T: Scalar>(
    data: &SeriesMap<T>,
    h: &Hierarchy<T>,
) -> Result<SeriesMap<T>> {
    check_leaf_alignment(data, h)?;
    let s = summing_matrix(h)?;
    let leaf_series: Vec<&FunctionalSeries<T>> =
        s.col_order.iter().map(|id| &data[id.as_str()]).collect();
    let template = leaf_series[0];
    let grid = *template.grid();
    let mut out = SeriesMap::new();
    for (i, id) in s.row_order.iter().enumerate() {
        if h.is_leaf(id) {
            out.insert(id.clone(), data[id.as_str()].clone());
            continue;
        }
        let curves = (0..template.len())
            .map(|d| {
                let mut values = vec![T::zero(); grid.n_points()];
                for (j, ls) in leaf_series.iter().enumerate() {
                    let w = s.s[(i, j)];
                    if w == T::zero() {
                        continue;
                    }
                    for (acc, &v) in values.iter_mut().zip(ls.curves()[d].values()) {
                        *acc = *acc + w * v;
                    }
                }
                Curve::new(grid, values)
            })
            .collect::<Result<Vec<_>>>()?;
        out.insert(
            id.clone(),
            template.with_curves(curves).with_node_id(id.clone()),
        );
    }
    Ok(out)
}

/// Independent base forecasts from the last `k` observations of every node.
pub fn stack_base_forecasts<T: Scalar>(
    data: &SeriesMap<T>,
    h: &Hierarchy<T>,
    base: &BaseForecaster<T>,
    k: usize,
) -> Result<StackedForecast<T>> {
    let nodes = materialize_node_series(data, h)?;
    let s = summing_matrix(h)?;
    let mut curves = BTreeMap::new();
    for id in &s.row_order {
        curves.insert(id.clone(), base.forecast_series(&nodes[id.as_str()], k)?);
    }
    StackedForecast::from_curves(&s.row_order, &curves)
}

/// Population variance, floored at [`VARIANCE_FLOOR`].
pub(crate) fn floored_variance<T: Scalar>(xs: &[T]) -> T {
    let n = T::from_count(xs.len());
    let mean = xs.iter().copied().sum::<T>() / n;
    let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / n;
    var.max(T::lit(VARIANCE_FLOOR))
}

/// Per-node variance of integrated one-step residuals `realized - forecast`
/// from a rolling backtest of `base`, in summing-matrix row order.
pub fn estimate_v<T: Scalar>(
    data: &SeriesMap<T>,
    h: &Hierarchy<T>,
    base: &BaseForecaster<T>,
    k: usize,
) -> Result<Vec<T>> {
    let nodes = materialize_node_series(data, h)?;
    let s = summing_matrix(h)?;
    let len = nodes[s.row_order[0].as_str()].len();
    if k == 0 || len < k + 2 {
        return Err(Error::SampleTooSmall {
            need: k + 2,
            got: len,
        });
    }
    let forecasts = base_backtest(&nodes, &s.row_order, base, k)?;
    let mut v = Vec::with_capacity(s.n_nodes());
    for (r, id) in s.row_order.iter().enumerate() {
        let realized = nodes[id.as_str()].curves();
        let resid: Vec<T> = forecasts
            .iter()
            .enumerate()
            .map(|(i, per_node)| {
                let target = k + i;
                Ok(integrate(&realized[target].sub(&per_node[r])?))
            })
            .collect::<Result<_>>()?;
        v.push(floored_variance(&resid));
    }
    Ok(v)
}
