use hfts_core::fpca::{fit_fpca, forecast_score, forecast_window, reconstruct, ScoreModel};
use hfts_core::{Curve, Grid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(p: usize) -> Grid<f64> {
    Grid::new(0.0, 24.0, p).unwrap()
}

fn inner(u: &Curve<f64>, v: &Curve<f64>) -> f64 {
    u.values().iter().zip(v.values()).map(|(a, b)| a * b).sum::<f64>() * u.grid().step()
}

fn random_sample(seed: u64, n: usize, p: usize) -> Vec<Curve<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let v = (0..p).map(|_| rng.random_range(-50.0..50.0)).collect();
            Curve::new(grid(p), v).unwrap()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn full_rank_round_trip_and_orthonormality(
        seed in any::<u64>(),
        n in 3usize..35,
        p in prop::sample::select(vec![6usize, 12, 24]),
    ) {
        let sample = random_sample(seed, n, p);
        let m = fit_fpca(&sample, 1.0).unwrap();
        for (i, c) in sample.iter().enumerate() {
            let r = reconstruct(&m, m.scores.row(i)).unwrap();
            prop_assert!(r.max_abs_diff(c) < 1e-8, "curve {} off by {}", i, r.max_abs_diff(c));
        }
        for a in 0..m.n_components() {
            for b in 0..m.n_components() {
                let want = if a == b { 1.0 } else { 0.0 };
                let got = inner(&m.components[a], &m.components[b]);
                prop_assert!((got - want).abs() < 1e-8, "<{},{}> = {}", a, b, got);
            }
        }
    }

    #[test]
    fn eigenvalues_sorted_and_account_for_total_variance(
        seed in any::<u64>(),
        n in 3usize..20,
    ) {
        let sample = random_sample(seed, n, 12);
        let m = fit_fpca(&sample, 1.0).unwrap();
        prop_assert!(m.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        let mean = &m.mean_curve;
        let total: f64 = sample
            .iter()
            .map(|c| {
                let d = c.sub(mean).unwrap();
                inner(&d, &d)
            })
            .sum::<f64>()
            / n as f64;
        let sum: f64 = m.eigenvalues.iter().sum();
        prop_assert!((sum - total).abs() < 1e-8 * total.max(1.0));
        let ratio: f64 = m.explained_variance_ratio.iter().sum();
        prop_assert!((ratio - 1.0).abs() < 1e-8);
        // eigenvalue j equals the mean squared score on component j
        for j in 0..m.n_components() {
            let ms = m.score_series(j).iter().map(|s| s * s).sum::<f64>() / n as f64;
            prop_assert!((ms - m.eigenvalues[j]).abs() < 1e-6 * total.max(1.0));
        }
    }

    #[test]
    fn threshold_keeps_fewest_components(seed in any::<u64>(), thr in 0.05..0.99f64) {
        let sample = random_sample(seed, 15, 12);
        let m = fit_fpca(&sample, thr).unwrap();
        let cum: f64 = m.explained_variance_ratio.iter().sum();
        prop_assert!(cum >= thr - 1e-9);
        let without_last: f64 = m.explained_variance_ratio[..m.n_components() - 1].iter().sum();
        prop_assert!(without_last < thr);
    }
}

#[test]
fn alternating_series_flips_the_last_deviation() {
    let g = grid(24);
    let m = Curve::from_fn(g, |t: f64| 30.0 + 5.0 * (t / 4.0).sin()).unwrap();
    let v = Curve::from_fn(g, |t: f64| (t / 6.0).cos()).unwrap();
    let window: Vec<Curve<f64>> = (0..10)
        .map(|i| if i % 2 == 0 { m.add(&v).unwrap() } else { m.sub(&v).unwrap() })
        .collect();
    // last curve is m - v, so the next one should be m + v
    let f = forecast_window(&window, 0.95, ScoreModel::Ar1).unwrap();
    assert!(f.max_abs_diff(&m.add(&v).unwrap()) < 1e-9);
    let fit = fit_fpca(&window, 0.95).unwrap();
    assert_eq!(fit.n_components(), 1);
    let s = fit.score_series(0);
    let norm = inner(&v, &v).sqrt();
    assert!(s.iter().all(|x| (x.abs() - norm).abs() < 1e-9));
    assert!((forecast_score(&s, ScoreModel::Ar1) + s[9]).abs() < 1e-9);
    let flat = forecast_window(&window, 0.95, ScoreModel::Mean).unwrap();
    assert!(flat.max_abs_diff(&m) < 1e-9);
}

#[test]
fn float32_fit_is_close_to_float64() {
    let sample = random_sample(3, 8, 12);
    let g32 = Grid::<f32>::new(0.0, 24.0, 12).unwrap();
    let s32: Vec<Curve<f32>> = sample
        .iter()
        .map(|c| Curve::new(g32, c.values().iter().map(|&v| v as f32).collect()).unwrap())
        .collect();
    let m64 = fit_fpca(&sample, 1.0).unwrap();
    let m32 = fit_fpca(&s32, 1.0).unwrap();
    let top64 = m64.eigenvalues[0];
    let top32 = m32.eigenvalues[0] as f64;
    assert!((top64 - top32).abs() / top64 < 1e-3);
}
