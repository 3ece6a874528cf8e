//! Empirical functional principal components and the score-based one-step
//! forecaster used as the base model of the GLS reconciliation pipeline.
//!
//! Inner products are discrete, `<u, v> = sum_t u(t) v(t) * step`, and the
//! covariance uses the `1/n` normalization, so the eigenvalues sum to the mean
//! squared norm of the centered curves.

use crate::curves::{ensure_shared_grid, mean_curve, Curve, FunctionalSeries};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::scalar::Scalar;

pub const DEFAULT_VAR_THRESHOLD: f64 = 0.95;

/// Eigenvalues below this fraction of the largest are treated as zero.
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct FpcaModel<T> {
    pub mean_curve: Curve<T>,
    pub components: Vec<Curve<T>>,
    pub eigenvalues: Vec<T>,
    /// `n_curves x n_components`.
    pub scores: Matrix<T>,
    pub explained_variance_ratio: Vec<T>,
}

impl<T: Scalar> FpcaModel<T> {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn score_series(&self, component: usize) -> Vec<T> {
        self.scores.column(component)
    }
}

fn weight<T: Scalar>(c: &Curve<T>) -> T {
    c.grid().step()
}

fn inner<T: Scalar>(u: &[T], v: &[T], h: T) -> T {
    u.iter().zip(v).map(|(&a, &b)| a * b).sum::<T>() * h
}

/// Flips `v` so that its entry of largest magnitude is positive.
fn fix_sign<T: Scalar>(v: &mut [T]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < T::zero() {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

pub fn fit_fpca<T: Scalar>(sample: &[Curve<T>], var_threshold: T) -> Result<FpcaModel<T>> {
    if sample.len() < 2 {
        return Err(Error::SampleTooSmall {
            need: 2,
            got: sample.len(),
        });
    }
    if !(var_threshold > T::zero() && var_threshold <= T::one()) {
        return Err(Error::InvalidParameter(format!(
            "variance threshold {var_threshold} outside (0, 1]"
        )));
    }
    ensure_shared_grid(sample)?;
    let n = sample.len();
    let grid = *sample[0].grid();
    let p = grid.n_points();
    let h = weight(&sample[0]);
    let mean = mean_curve(sample)?;
    let centered: Vec<Vec<T>> = sample
        .iter()
        .map(|c| {
            c.values()
                .iter()
                .zip(mean.values())
                .map(|(&a, &m)| a - m)
                .collect()
        })
        .collect();
    let total: T = centered.iter().map(|x| inner(x, x, h)).sum::<T>() / T::from_count(n);
    // rounding in the mean leaves noise of order eps^2 * energy
    let energy: T = sample
        .iter()
        .map(|c| inner(c.values(), c.values(), h))
        .sum::<T>()
        / T::from_count(n);
    let floor = T::lit(RANK_TOL) * energy;

    // (eigenvalue, component values) candidates, eigenvalues nonincreasing
    let mut candidates: Vec<(T, Vec<T>)> = Vec::new();
    if n < p {
        let mut gram = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let g = inner(&centered[i], &centered[j], h);
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }
        let eig = symmetric_eigen(&gram)?;
        let top = eig.values.first().copied().unwrap_or(T::zero());
        for (j, &mu) in eig.values.iter().enumerate() {
            if !(mu > top * T::lit(RANK_TOL)) || mu / T::from_count(n) <= floor {
                break;
            }
            let a = eig.vectors.column(j);
            let norm = mu.sqrt();
            let phi: Vec<T> = (0..p)
                .map(|t| (0..n).map(|i| a[i] * centered[i][t]).sum::<T>() / norm)
                .collect();
            candidates.push((mu / T::from_count(n), phi));
        }
    } else {
        let mut cov = Matrix::zeros(p, p);
        for x in &centered {
            for s in 0..p {
                for t in 0..=s {
                    cov[(s, t)] = cov[(s, t)] + x[s] * x[t];
                }
            }
        }
        let factor = h / T::from_count(n);
        for s in 0..p {
            for t in 0..=s {
                let v = cov[(s, t)] * factor;
                cov[(s, t)] = v;
                cov[(t, s)] = v;
            }
        }
        let eig = symmetric_eigen(&cov)?;
        let top = eig.values.first().copied().unwrap_or(T::zero());
        let inv_sqrt_h = T::one() / h.sqrt();
        for (j, &lambda) in eig.values.iter().enumerate() {
            if !(lambda > top * T::lit(RANK_TOL)) || lambda <= floor {
                break;
            }
            let phi = eig.vectors.column(j).into_iter().map(|e| e * inv_sqrt_h).collect();
            candidates.push((lambda, phi));
        }
    }

    let mut retained: Vec<(T, Vec<T>)> = Vec::new();
    if candidates.is_empty() {
        // zero covariance: keep one arbitrary unit component with eigenvalue 0
        let c = T::one() / (h * T::from_count(p)).sqrt();
        retained.push((T::zero(), vec![c; p]));
    } else {
        let target = var_threshold * total * (T::one() - T::lit(1e-12));
        let mut cum = T::zero();
        for cand in candidates {
            cum = cum + cand.0;
            retained.push(cand);
            if cum >= target {
                break;
            }
        }
    }

    // modified Gram-Schmidt in the discrete inner product
    let mut components: Vec<Vec<T>> = Vec::with_capacity(retained.len());
    let mut eigenvalues = Vec::with_capacity(retained.len());
    for (lambda, mut phi) in retained {
        for q in &components {
            let proj = inner(&phi, q, h);
            for (a, &b) in phi.iter_mut().zip(q) {
                *a = *a - proj * b;
            }
        }
        let norm = inner(&phi, &phi, h).sqrt();
        for a in phi.iter_mut() {
            *a = *a / norm;
        }
        fix_sign(&mut phi);
        components.push(phi);
        eigenvalues.push(lambda.max(T::zero()));
    }

    let k = components.len();
    let mut scores = Matrix::zeros(n, k);
    for (i, x) in centered.iter().enumerate() {
        for (j, phi) in components.iter().enumerate() {
            scores[(i, j)] = inner(x, phi, h);
        }
    }
    let explained_variance_ratio = eigenvalues
        .iter()
        .map(|&l| if total > T::zero() { l / total } else { T::zero() })
        .collect();
    let components = components
        .into_iter()
        .map(|v| Curve::new(grid, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(FpcaModel {
        mean_curve: mean,
        components,
        eigenvalues,
        scores,
        explained_variance_ratio,
    })
}

/// `mean + sum_j scores[j] * component_j`.
pub fn reconstruct<T: Scalar>(model: &FpcaModel<T>, scores_row: &[T]) -> Result<Curve<T>> {
    if scores_row.len() != model.n_components() {
        return Err(Error::LengthMismatch {
            expected: model.n_components(),
            actual: scores_row.len(),
        });
    }
    let mut values = model.mean_curve.values().to_vec();
    for (phi, &s) in model.components.iter().zip(scores_row) {
        for (v, &c) in values.iter_mut().zip(phi.values()) {
            *v = *v + s * c;
        }
    }
    Curve::new(*model.mean_curve.grid(), values)
}

/// How each score series is extrapolated one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreModel {
    /// AR(1) without intercept, coefficient by least squares.
    #[default]
    Ar1,
    /// The score mean (AR coefficient pinned to zero).
    Mean,
}

/// Variance below which a score series is treated as constant.
const SCORE_VAR_FLOOR: f64 = 1e-12;

/// One-step forecast of a score series.
pub fn forecast_score<T: Scalar>(scores: &[T], model: ScoreModel) -> T {
    let n = T::from_count(scores.len());
    let mean = scores.iter().copied().sum::<T>() / n;
    let var = scores.iter().map(|&s| (s - mean) * (s - mean)).sum::<T>() / n;
    if model == ScoreModel::Mean || var < T::lit(SCORE_VAR_FLOOR) || scores.len() < 2 {
        return mean;
    }
    let (mut num, mut den) = (T::zero(), T::zero());
    for w in scores.windows(2) {
        num = num + w[1] * w[0];
        den = den + w[0] * w[0];
    }
    if den <= T::zero() {
        return mean;
    }
    let coef = num / den;
    coef * *scores.last().unwrap()
}

/// Fits FPCA to `window` (oldest first) and extrapolates every retained score.
pub fn forecast_window<T: Scalar>(
    window: &[Curve<T>],
    var_threshold: T,
    model: ScoreModel,
) -> Result<Curve<T>> {
    if window.len() < 3 {
        return Err(Error::SampleTooSmall {
            need: 3,
            got: window.len(),
        });
    }
    let fit = fit_fpca(window, var_threshold)?;
    let next: Vec<T> = (0..fit.n_components())
        .map(|j| forecast_score(&fit.score_series(j), model))
        .collect();
    reconstruct(&fit, &next)
}

pub fn fpca_score_forecast<T: Scalar>(
    series: &FunctionalSeries<T>,
    window: usize,
    var_threshold: T,
) -> Result<Curve<T>> {
    if window < 3 {
        return Err(Error::InvalidParameter(format!(
            "FPCA window must be at least 3, got {window}"
        )));
    }
    if series.len() < window {
        return Err(Error::SampleTooSmall {
            need: window,
            got: series.len(),
        });
    }
    let curves = series.curves();
    forecast_window(&curves[curves.len() - window..], var_threshold, ScoreModel::Ar1)
}
