//! Functional depths: modified band depth (plain and pair-weighted) and
//! Fraiman–Muniz depth.
//!
//! Band membership is inclusive at the boundary and the time measure is the
//! uniform counting measure on the grid, so every MBD value is a ratio of
//! integers with denominator `C(n,2) * n_points`. Both the pairwise and the
//! rank-based routes accumulate that integer numerator and divide once, which
//! makes them agree bit for bit.

use serde::Serialize;

use crate::curves::{ensure_same_grid, ensure_shared_grid, Curve};
use crate::error::{Error, Result};
use crate::scalar::{cmp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DepthMethod {
    Mbd,
    WeightedMbd,
    FraimanMuniz,
}

/// Depth selector exposed to forecasting and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum DepthKind {
    #[default]
    Mbd,
    FraimanMuniz,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthResult<T> {
    pub depths: Vec<T>,
    pub method: DepthMethod,
    pub sample_size: usize,
}

impl<T: Scalar> DepthResult<T> {
    /// Indices attaining the maximum depth, up to `tol`.
    pub fn argmax(&self, tol: T) -> Vec<usize> {
        let max = self
            .depths
            .iter()
            .copied()
            .fold(T::neg_infinity(), T::max);
        (0..self.depths.len())
            .filter(|&i| max - self.depths[i] <= tol)
            .collect()
    }
}

fn inside<T: Scalar>(v: T, a: T, b: T) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    lo <= v && v <= hi
}

fn band_count<T: Scalar>(x: &Curve<T>, x1: &Curve<T>, x2: &Curve<T>) -> usize {
    x.values()
        .iter()
        .zip(x1.values())
        .zip(x2.values())
        .filter(|((&v, &a), &b)| inside(v, a, b))
        .count()
}

/// Fraction of grid points at which `x` lies inside the band spanned by `x1` and `x2`.
pub fn band_fraction<T: Scalar>(x: &Curve<T>, x1: &Curve<T>, x2: &Curve<T>) -> Result<T> {
    ensure_same_grid(x.grid(), x1.grid())?;
    ensure_same_grid(x.grid(), x2.grid())?;
    Ok(T::from_count(band_count(x, x1, x2)) / T::from_count(x.len()))
}

fn check_sample<T: Scalar>(sample: &[Curve<T>], need: usize) -> Result<()> {
    if sample.len() < need {
        return Err(Error::SampleTooSmall {
            need,
            got: sample.len(),
        });
    }
    ensure_shared_grid(sample)
}

fn n_pairs(n: usize) -> usize {
    n * (n.saturating_sub(1)) / 2
}

/// Modified band depth of `x` with respect to `sample`, by enumerating every pair.
/// `x` need not be a member of the sample.
pub fn mbd<T: Scalar>(x: &Curve<T>, sample: &[Curve<T>]) -> Result<T> {
    check_sample(sample, 2)?;
    ensure_same_grid(x.grid(), sample[0].grid())?;
    let mut inside_total: u64 = 0;
    for i1 in 0..sample.len() {
        for i2 in i1 + 1..sample.len() {
            inside_total += band_count(x, &sample[i1], &sample[i2]) as u64;
        }
    }
    Ok(mbd_ratio(inside_total, sample.len(), x.len()))
}

fn mbd_ratio<T: Scalar>(numerator: u64, n: usize, n_points: usize) -> T {
    let denom = (n_pairs(n) as u64) * n_points as u64;
    T::from_u64(numerator).unwrap() / T::from_u64(denom).unwrap()
}

/// Sorted copy of one grid column.
fn column<T: Scalar>(sample: &[Curve<T>], t: usize) -> Vec<T> {
    let mut col: Vec<T> = sample.iter().map(|c| c.values()[t]).collect();
    col.sort_by(cmp);
    col
}

/// MBD of every sample member.
///
/// At each grid point a value `v` lies in every band except those whose two
/// ends are both strictly below or both strictly above it, so the count of
/// covering bands is `C(n,2) - C(below,2) - C(above,2)`. This reproduces the
/// inclusive tie convention exactly.
pub fn mbd_all<T: Scalar>(sample: &[Curve<T>]) -> Result<DepthResult<T>> {
    check_sample(sample, 2)?;
    let n = sample.len();
    let n_points = sample[0].len();
    let total_pairs = n_pairs(n) as u64;
    let mut counts = vec![0u64; n];
    for t in 0..n_points {
        let col = column(sample, t);
        for (i, c) in sample.iter().enumerate() {
            let v = c.values()[t];
            let below = col.partition_point(|&u| u < v);
            let above = n - col.partition_point(|&u| u <= v);
            counts[i] += total_pairs - n_pairs(below) as u64 - n_pairs(above) as u64;
        }
    }
    Ok(DepthResult {
        depths: counts
            .into_iter()
            .map(|k| mbd_ratio(k, n, n_points))
            .collect(),
        method: DepthMethod::Mbd,
        sample_size: n,
    })
}

fn check_weights<T: Scalar>(weights: &[T], n: usize) -> Result<Vec<T>> {
    if weights.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: weights.len(),
        });
    }
    if let Some(w) = weights.iter().find(|w| !(**w > T::zero() && w.is_finite())) {
        return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
    }
    let total: T = weights.iter().copied().sum();
    Ok(weights.iter().map(|&w| w / total).collect())
}

/// MBD where the band spanned by curves `i1`, `i2` carries weight `w_i1 * w_i2`.
/// Weights are normalized internally; equal weights reproduce [`mbd_all`].
pub fn weighted_mbd_all<T: Scalar>(sample: &[Curve<T>], weights: &[T]) -> Result<DepthResult<T>> {
    check_sample(sample, 2)?;
    let n = sample.len();
    let w = check_weights(weights, n)?;
    let n_points = sample[0].len();

    // sum over unordered pairs of w_a * w_b within a set = (S^2 - Q) / 2
    let pair_mass = |s: T, q: T| (s * s - q) / T::lit(2.0);
    let total_q: T = w.iter().map(|&x| x * x).sum();
    let all_pairs = pair_mass(T::one(), total_q);

    let mut acc = vec![T::zero(); n];
    let mut order: Vec<usize> = (0..n).collect();
    // prefix sums of w and w^2 in sorted order
    let mut ps = vec![T::zero(); n + 1];
    let mut pq = vec![T::zero(); n + 1];
    for t in 0..n_points {
        let value = |i: usize| sample[i].values()[t];
        order.sort_by(|&a, &b| cmp(&value(a), &value(b)));
        for (r, &i) in order.iter().enumerate() {
            ps[r + 1] = ps[r] + w[i];
            pq[r + 1] = pq[r] + w[i] * w[i];
        }
        for i in 0..n {
            let v = value(i);
            let below = order.partition_point(|&j| value(j) < v);
            let not_above = order.partition_point(|&j| value(j) <= v);
            let low = pair_mass(ps[below], pq[below]);
            let high = pair_mass(ps[n] - ps[not_above], pq[n] - pq[not_above]);
            acc[i] = acc[i] + (all_pairs - low - high);
        }
    }
    let denom = all_pairs * T::from_count(n_points);
    Ok(DepthResult {
        depths: acc
            .into_iter()
            .map(|a| (a / denom).max(T::zero()).min(T::one()))
            .collect(),
        method: DepthMethod::WeightedMbd,
        sample_size: n,
    })
}

/// Fraiman–Muniz depth with the univariate depth `1 - |1/2 - F_t(v)|` and
/// `F_t(v) = #{values <= v} / n`.
pub fn fm_depth_all<T: Scalar>(sample: &[Curve<T>]) -> Result<DepthResult<T>> {
    check_sample(sample, 1)?;
    let n = sample.len();
    let n_points = sample[0].len();
    let half = T::lit(0.5);
    let mut acc = vec![T::zero(); n];
    for t in 0..n_points {
        let col = column(sample, t);
        for (i, c) in sample.iter().enumerate() {
            let v = c.values()[t];
            let f = T::from_count(col.partition_point(|&u| u <= v)) / T::from_count(n);
            acc[i] = acc[i] + (T::one() - (half - f).abs());
        }
    }
    Ok(DepthResult {
        depths: acc
            .into_iter()
            .map(|a| a / T::from_count(n_points))
            .collect(),
        method: DepthMethod::FraimanMuniz,
        sample_size: n,
    })
}

/// Depth of every sample member under `kind`. Weights apply to MBD only.
pub fn depth_all<T: Scalar>(
    sample: &[Curve<T>],
    kind: DepthKind,
    weights: Option<&[T]>,
) -> Result<DepthResult<T>> {
    match (kind, weights) {
        (DepthKind::Mbd, None) => mbd_all(sample),
        (DepthKind::Mbd, Some(w)) => weighted_mbd_all(sample, w),
        (DepthKind::FraimanMuniz, _) => fm_depth_all(sample),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::Grid;

    fn grid(n: usize) -> Grid<f64> {
        Grid::new(0.0, 1.0, n).unwrap()
    }

    fn consts(vals: &[f64], n_points: usize) -> Vec<Curve<f64>> {
        vals.iter()
            .map(|&v| Curve::constant(grid(n_points), v))
            .collect()
    }

    #[test]
    fn band_fraction_examples() {
        let g = grid(4);
        let lo = Curve::constant(g, 0.0);
        let hi = Curve::constant(g, 2.0);
        assert_eq!(band_fraction(&Curve::constant(g, 1.0), &lo, &hi).unwrap(), 1.0);
        assert_eq!(band_fraction(&Curve::constant(g, 3.0), &lo, &hi).unwrap(), 0.0);
        let x = Curve::new(g, vec![0.0, 3.0, 0.0, 3.0]).unwrap();
        assert_eq!(band_fraction(&x, &lo, &hi).unwrap(), 0.5);
        let other = Curve::constant(Grid::new(0.0, 2.0, 4).unwrap(), 1.0);
        assert!(band_fraction(&other, &lo, &hi).is_err());
    }

    #[test]
    fn mbd_known_answers() {
        let s = consts(&[0.0, 1.0, 2.0], 5);
        assert_eq!(mbd(&s[1], &s).unwrap(), 1.0);
        assert_eq!(mbd(&s[0], &s).unwrap(), 2.0 / 3.0);
        let two = consts(&[3.0, -1.0], 5);
        assert_eq!(mbd(&two[0], &two).unwrap(), 1.0);
        assert!(matches!(
            mbd(&two[0], &two[..1]),
            Err(Error::SampleTooSmall { need: 2, got: 1 })
        ));
        let all = mbd_all(&s).unwrap();
        assert_eq!(all.depths, vec![2.0 / 3.0, 1.0, 2.0 / 3.0]);
        assert_eq!(all.sample_size, 3);
    }

    #[test]
    fn dominating_curve_has_minimal_depth() {
        let mut s = consts(&[0.0, 0.5, 1.5, 1.0], 6);
        s.push(Curve::constant(grid(6), 10.0));
        let d = mbd_all(&s).unwrap();
        assert_eq!(d.depths[4], 2.0 / 5.0);
    }

    #[test]
    fn weighted_reduces_to_plain() {
        let s = consts(&[0.0, 1.0, 2.0, 1.0, 5.0], 3);
        let plain = mbd_all(&s).unwrap();
        let weighted = weighted_mbd_all(&s, &[2.0; 5]).unwrap();
        for (a, b) in plain.depths.iter().zip(&weighted.depths) {
            assert!((a - b).abs() < 1e-12);
        }
        let two = consts(&[0.0, 1.0], 3);
        let d = weighted_mbd_all(&two, &[1.0, 1000.0]).unwrap();
        assert!(d.depths.iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn weighted_errors() {
        let s = consts(&[0.0, 1.0, 2.0], 3);
        assert!(matches!(
            weighted_mbd_all(&s, &[1.0, 0.0, 1.0]),
            Err(Error::InvalidWeights(_))
        ));
        assert!(matches!(
            weighted_mbd_all(&s, &[1.0, 1.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn fm_known_answers() {
        let one = consts(&[4.0], 3);
        assert_eq!(fm_depth_all(&one).unwrap().depths, vec![0.5]);
        let s = consts(&[0.0, 1.0, 2.0], 3);
        let d = fm_depth_all(&s).unwrap().depths;
        // F = 1/3, 2/3, 1
        assert!((d[0] - (1.0 - (0.5f64 - 1.0 / 3.0).abs())).abs() < 1e-15);
        assert!((d[1] - (1.0 - (0.5f64 - 2.0 / 3.0).abs())).abs() < 1e-15);
        assert_eq!(d[2], 0.5);
        assert_eq!(d[0], d[1]);
        assert!(d[1] > d[2]);
        assert!(fm_depth_all::<f64>(&[]).is_err());
    }

    #[test]
    fn argmax_with_ties() {
        let r = DepthResult {
            depths: vec![0.5, 1.0, 1.0 - 1e-13, 0.2],
            method: DepthMethod::Mbd,
            sample_size: 4,
        };
        assert_eq!(r.argmax(1e-12), vec![1, 2]);
    }

    #[test]
    fn works_in_f32() {
        let g = Grid::new(0.0f32, 1.0, 3).unwrap();
        let s: Vec<_> = [0.0f32, 1.0, 2.0]
            .iter()
            .map(|&v| Curve::constant(g, v))
            .collect();
        assert_eq!(mbd_all(&s).unwrap().depths, vec![2.0 / 3.0, 1.0, 2.0 / 3.0]);
    }
}
