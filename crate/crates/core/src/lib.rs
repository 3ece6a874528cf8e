//! Forecasting hierarchical functional time series.
//!
//! Two families of forecasters are provided:
//!
//! * the double-median forecaster: moving-window functional medians (by
//!   modified band depth) at the leaves, then depth medians of the child
//!   forecasts up to the root;
//! * base forecasts at every node (FPCA scores with AR(1), moving mean,
//!   moving median or naive) reconciled bottom-up, top-down or by generalized
//!   least squares.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the common case.

pub mod curves;
pub mod depth;
pub mod diagnostics;
pub mod error;
pub mod fpca;
pub mod linalg;
pub mod median_forecast;
pub mod reconcile;
mod scalar;

pub use curves::{
    integrate, pointwise_combine, validate_series, Curve, Finding, FunctionalSeries, Grid,
    ValidationReport,
};
pub use depth::{DepthKind, DepthMethod, DepthResult};
pub use error::{Error, Result};
pub use median_forecast::{
    BaseForecaster, Backtest, DoubleMedianOptions, ForecastMethod, HierForecast, HierMethod,
    SeriesMap, Weighting,
};
pub use reconcile::{Aggregation, Hierarchy, NodeSpec, StackedForecast, SummingMatrix};
pub use scalar::Scalar;

pub type Grid64 = Grid<f64>;
pub type Curve64 = Curve<f64>;
pub type Series64 = FunctionalSeries<f64>;
pub type Hierarchy64 = Hierarchy<f64>;
pub type SeriesMap64 = SeriesMap<f64>;
pub type HierForecast64 = HierForecast<f64>;
pub type HierMethod64 = HierMethod<f64>;

pub type Grid32 = Grid<f32>;
pub type Curve32 = Curve<f32>;
pub type Series32 = FunctionalSeries<f32>;
pub type Hierarchy32 = Hierarchy<f32>;
