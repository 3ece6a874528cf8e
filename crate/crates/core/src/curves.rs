//! Functional-data primitives: uniform time grids, sampled curves and
//! time-ordered series of curves.

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fraction of missing samples above which a raw curve is rejected.
pub const MAX_MISSING_FRACTION: f64 = 0.3;

/// Equally spaced sample points on `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    start: T,
    end: T,
    n_points: usize,
}

impl<T: Scalar> Grid<T> {
    pub fn new(start: T, end: T, n_points: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || end <= start {
            return Err(Error::InvalidGrid(format!(
                "degenerate interval [{start}, {end}]"
            )));
        }
        if n_points == 0 {
            return Err(Error::InvalidGrid("zero points".into()));
        }
        Ok(Self {
            start,
            end,
            n_points,
        })
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn end(&self) -> T {
        self.end
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Lebesgue measure of the domain.
    pub fn measure(&self) -> T {
        self.end - self.start
    }

    /// Spacing between neighbouring points; the whole measure for a single-point grid.
    pub fn step(&self) -> T {
        if self.n_points > 1 {
            self.measure() / T::from_count(self.n_points - 1)
        } else {
            self.measure()
        }
    }

    pub fn point(&self, i: usize) -> T {
        self.start + self.step() * T::from_count(i)
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }
}

/// One functional observation sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Curve<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Scalar> Curve<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                actual: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid<T>, value: T) -> Self {
        Self {
            grid,
            values: vec![value; grid.n_points()],
        }
    }

    pub fn from_fn(grid: Grid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.points().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Applies `f` pointwise, keeping the grid.
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Combines two curves pointwise after checking that they share a grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, factor: T) -> Self {
        self.map(|v| v * factor)
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn mean_value(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::from_count(self.values.len())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }
}

/// Left-Riemann integral: `step * sum(values[..n-1])`; value times measure on a
/// single-point grid.
pub fn integrate<T: Scalar>(c: &Curve<T>) -> T {
    let grid = c.grid();
    if grid.n_points() == 1 {
        return c.values[0] * grid.measure();
    }
    let n = c.values.len();
    c.values[..n - 1].iter().copied().sum::<T>() * grid.step()
}

/// Weighted pointwise average `sum(w_i x_i) / sum(w_i)`.
pub fn pointwise_combine<T: Scalar>(curves: &[Curve<T>], weights: &[T]) -> Result<Curve<T>> {
    let first = curves.first().ok_or(Error::Empty("curves"))?;
    if weights.len() != curves.len() {
        return Err(Error::LengthMismatch {
            expected: curves.len(),
            actual: weights.len(),
        });
    }
    ensure_shared_grid(curves)?;
    let total: T = weights.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::InvalidWeights(format!(
            "weight sum must be positive, got {total}"
        )));
    }
    let mut values = vec![T::zero(); first.len()];
    for (c, &w) in curves.iter().zip(weights) {
        for (acc, &v) in values.iter_mut().zip(c.values()) {
            *acc = *acc + w * v;
        }
    }
    for v in &mut values {
        *v = *v / total;
    }
    Curve::new(first.grid, values)
}

/// Pointwise arithmetic mean.
pub fn mean_curve<T: Scalar>(curves: &[Curve<T>]) -> Result<Curve<T>> {
    let weights = vec![T::one(); curves.len()];
    pointwise_combine(curves, &weights)
}

pub(crate) fn ensure_same_grid<T: Scalar>(a: &Grid<T>, b: &Grid<T>) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

pub(crate) fn ensure_shared_grid<T: Scalar>(curves: &[Curve<T>]) -> Result<()> {
    if let Some(first) = curves.first() {
        for c in &curves[1..] {
            ensure_same_grid(first.grid(), c.grid())?;
        }
    }
    Ok(())
}

/// Fills gaps by linear interpolation between the nearest present neighbours,
/// extending the nearest value at the ends. Returns the repaired values and
/// the number of filled cells.
pub fn repair_missing<T: Scalar>(raw: &[Option<T>], max_fraction: f64) -> Result<(Vec<T>, usize)> {
    let total = raw.len();
    let present: Vec<usize> = (0..total).filter(|&i| raw[i].is_some()).collect();
    let missing = total - present.len();
    if total == 0 {
        return Err(Error::Empty("curve values"));
    }
    if present.is_empty() || missing as f64 > max_fraction * total as f64 {
        return Err(Error::TooManyMissing { missing, total });
    }
    let mut out = Vec::with_capacity(total);
    for i in 0..total {
        if let Some(v) = raw[i] {
            out.push(v);
            continue;
        }
        let next = present.partition_point(|&p| p < i);
        let v = match (next.checked_sub(1).map(|j| present[j]), present.get(next)) {
            (Some(lo), Some(&hi)) => {
                let a = raw[lo].unwrap();
                let b = raw[hi].unwrap();
                let frac = T::from_count(i - lo) / T::from_count(hi - lo);
                a + (b - a) * frac
            }
            (Some(lo), None) => raw[lo].unwrap(),
            (None, Some(&hi)) => raw[hi].unwrap(),
            (None, None) => unreachable!("at least one value present"),
        };
        out.push(v);
    }
    Ok((out, missing))
}

/// Time-ordered curves for one hierarchy node.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSeries<T> {
    node_id: String,
    grid: Grid<T>,
    curves: Vec<Curve<T>>,
    timestamps: Vec<NaiveDate>,
}

impl<T: Scalar> FunctionalSeries<T> {
    /// Builds a series, rejecting anything [`validate_series`] would flag.
    pub fn new(
        node_id: impl Into<String>,
        grid: Grid<T>,
        curves: Vec<Curve<T>>,
        timestamps: Vec<NaiveDate>,
    ) -> Result<Self> {
        let s = Self::from_parts(node_id, grid, curves, timestamps);
        let report = validate_series(&s);
        if let Some(f) = report.findings.first() {
            return Err(match f {
                Finding::GridMismatch { index } => {
                    Error::GridMismatch(format!("series `{}` curve {index}", s.node_id))
                }
                other => Error::Misaligned(format!("series `{}`: {other}", s.node_id)),
            });
        }
        Ok(s)
    }

    /// Assembles a series without any checks.
    pub fn from_parts(
        node_id: impl Into<String>,
        grid: Grid<T>,
        curves: Vec<Curve<T>>,
        timestamps: Vec<NaiveDate>,
    ) -> Self {
        Self {
            node_id: node_id.into(),
            grid,
            curves,
            timestamps,
        }
    }

    pub fn node_id(&self) -> &str {
        &self.node_id
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn curves(&self) -> &[Curve<T>] {
        &self.curves
    }

    pub fn timestamps(&self) -> &[NaiveDate] {
        &self.timestamps
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn last(&self) -> Option<&Curve<T>> {
        self.curves.last()
    }

    /// The first `len` observations.
    pub fn truncated(&self, len: usize) -> Self {
        let len = len.min(self.len());
        Self {
            node_id: self.node_id.clone(),
            grid: self.grid,
            curves: self.curves[..len].to_vec(),
            timestamps: self.timestamps[..len].to_vec(),
        }
    }

    pub fn with_node_id(mut self, node_id: impl Into<String>) -> Self {
        self.node_id = node_id.into();
        self
    }

    pub fn with_curves(&self, curves: Vec<Curve<T>>) -> Self {
        Self {
            node_id: self.node_id.clone(),
            grid: self.grid,
            curves,
            timestamps: self.timestamps.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    GridMismatch { index: usize },
    NonMonotoneTimestamp { index: usize },
    LengthMismatch { curves: usize, timestamps: usize },
    MissingValues { index: usize, count: usize },
    Repaired { date: NaiveDate, count: usize },
    Rejected { date: NaiveDate, missing: usize, total: usize },
}

impl Finding {
    /// Repairs are informational; everything else blocks forecasting.
    pub fn is_error(&self) -> bool {
        !matches!(self, Finding::Repaired { .. } | Finding::Rejected { .. })
    }
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Finding::GridMismatch { index } => write!(f, "curve {index} is on a different grid"),
            Finding::NonMonotoneTimestamp { index } => {
                write!(f, "timestamp {index} does not increase")
            }
            Finding::LengthMismatch { curves, timestamps } => {
                write!(f, "{curves} curves but {timestamps} timestamps")
            }
            Finding::MissingValues { index, count } => {
                write!(f, "curve {index} has {count} missing values")
            }
            Finding::Repaired { date, count } => {
                write!(f, "{date}: {count} missing values interpolated")
            }
            Finding::Rejected {
                date,
                missing,
                total,
            } => write!(f, "{date}: rejected, {missing} of {total} values missing"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(Finding::is_error)
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.findings.extend(other.findings);
    }
}

pub fn validate_series<T: Scalar>(s: &FunctionalSeries<T>) -> ValidationReport {
    let mut findings = Vec::new();
    if s.curves.len() != s.timestamps.len() {
        findings.push(Finding::LengthMismatch {
            curves: s.curves.len(),
            timestamps: s.timestamps.len(),
        });
    }
    for (index, c) in s.curves.iter().enumerate() {
        if c.grid() != &s.grid {
            findings.push(Finding::GridMismatch { index });
        }
        let count = c.values().iter().filter(|v| !v.is_finite()).count();
        if count > 0 {
            findings.push(Finding::MissingValues { index, count });
        }
    }
    for index in 1..s.timestamps.len() {
        if s.timestamps[index] <= s.timestamps[index - 1] {
            findings.push(Finding::NonMonotoneTimestamp { index });
        }
    }
    ValidationReport { findings }
}
