//! End-to-end acceptance checks. Runs as a plain binary so that each check
//! prints its verdict whether or not it passes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use hfts_cli::synth::{contaminate, synthesize_hfts, SynthSpec, SILESIA};
use hfts_core::depth::mbd_all;
use hfts_core::diagnostics::{
    central_region, evaluate_backtest, functional_boxplot, scale_curve, OutlierKind,
};
use hfts_core::fpca::{fit_fpca, reconstruct};
use hfts_core::median_forecast::{
    forecast_hierarchy, functional_median, functional_median_selection, rolling_backtest,
};
use hfts_core::reconcile::{aggregation_violation, gls_reconcile, summing_matrix};
use hfts_core::{
    Aggregation, BaseForecaster, Curve, DepthKind, DoubleMedianOptions, FunctionalSeries, Grid,
    HierMethod, Hierarchy, NodeSpec, SeriesMap, StackedForecast,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn grid(p: usize) -> Grid<f64> {
    Grid::new(0.0, 24.0, p).unwrap()
}

fn to_curves(rows: &[Vec<f64>]) -> Vec<Curve<f64>> {
    let g = grid(rows[0].len());
    rows.iter().map(|r| Curve::new(g, r.clone()).unwrap()).collect()
}

fn random_rows(rng: &mut ChaCha8Rng, n: usize, t: usize, ties: bool) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            (0..t)
                .map(|_| {
                    if ties {
                        rng.random_range(0..4) as f64
                    } else {
                        rng.random_range(-100.0..100.0)
                    }
                })
                .collect()
        })
        .collect()
}

/// Pairwise band counts straight from the definition.
fn mbd_oracle(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let t = rows[0].len();
    let pairs = n * (n - 1) / 2;
    (0..n)
        .map(|i| {
            let mut inside = 0u64;
            for a in 0..n {
                for b in a + 1..n {
                    for p in 0..t {
                        let lo = rows[a][p].min(rows[b][p]);
                        let hi = rows[a][p].max(rows[b][p]);
                        inside += u64::from(lo <= rows[i][p] && rows[i][p] <= hi);
                    }
                }
            }
            inside as f64 / (pairs * t) as f64
        })
        .collect()
}

fn oracle_median(rows: &[Vec<f64>]) -> Vec<f64> {
    if rows.len() == 1 {
        return rows[0].clone();
    }
    let d = mbd_oracle(rows);
    let best = d.iter().copied().fold(f64::MIN, f64::max);
    let tied: Vec<&Vec<f64>> = rows.iter().zip(&d).filter(|(_, &x)| x >= best - 1e-12).map(|(r, _)| r).collect();
    (0..rows[0].len())
        .map(|p| tied.iter().map(|r| r[p]).sum::<f64>() / tied.len() as f64)
        .collect()
}

fn depth_oracle_equivalence() -> Check {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut tied = 0;
    for s in 0..200 {
        let n = rng.random_range(2..=25);
        let t = rng.random_range(1..=48);
        let ties = s % 2 == 1;
        tied += usize::from(ties);
        let rows = random_rows(&mut rng, n, t, ties);
        let fast = mbd_all(&to_curves(&rows)).map_err(|e| e.to_string())?.depths;
        ensure!(fast == mbd_oracle(&rows), "sample {s} (n={n}, T={t}) differs from the oracle");
    }
    let secs = t0.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "took {secs:.2} s");
    Ok(format!("200 samples ({tied} with ties) equal the pairwise oracle exactly in {secs:.2} s"))
}

fn known_answer_depths() -> Check {
    let g = grid(24);
    let three: Vec<_> = [0.0, 1.0, 2.0].iter().map(|&v| Curve::constant(g, v)).collect();
    let d = mbd_all(&three).map_err(|e| e.to_string())?.depths;
    ensure!(d == vec![2.0 / 3.0, 1.0, 2.0 / 3.0], "constants gave {d:?}");
    let two: Vec<_> = [5.0, -3.0].iter().map(|&v| Curve::constant(g, v)).collect();
    let d2 = mbd_all(&two).map_err(|e| e.to_string())?.depths;
    ensure!(d2 == vec![1.0, 1.0], "two curves gave {d2:?}");
    Ok(format!("{{0,1,2}} -> {d:?}, two curves -> {d2:?}"))
}

fn median_correctness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for s in 0..100 {
        let n = rng.random_range(2..=20);
        let rows = random_rows(&mut rng, n, 24, s % 4 == 3);
        let got = functional_median(&to_curves(&rows), DepthKind::Mbd, None).map_err(|e| e.to_string())?;
        ensure!(got.values() == oracle_median(&rows).as_slice(), "sample {s} differs");
    }
    let g = grid(24);
    let pair = [Curve::constant(g, 2.0), Curve::constant(g, 6.0)];
    let sel = functional_median_selection(&pair, DepthKind::Mbd, None).map_err(|e| e.to_string())?;
    ensure!(sel.maximizers == vec![0, 1], "tie maximizers {:?}", sel.maximizers);
    ensure!(sel.curve == Curve::constant(g, 4.0), "tie average wrong");
    Ok("100 samples match brute-force argmax exactly; two-curve tie averages to 4".into())
}

/// Random tree with at most four levels and twenty leaves.
fn random_hierarchy(rng: &mut ChaCha8Rng, conv: Aggregation) -> Hierarchy<f64> {
    let n_internal = rng.random_range(0..=6usize);
    let mut level = vec![0usize];
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut specs = vec![NodeSpec::root("root")];
    let mut names = vec!["root".to_string()];
    for i in 0..n_internal {
        let cand: Vec<usize> = (0..names.len()).filter(|&j| level[j] < 2).collect();
        let p = cand[rng.random_range(0..cand.len())];
        names.push(format!("n{i}"));
        specs.push(NodeSpec::internal(names[i + 1].clone(), names[p].clone()));
        level.push(level[p] + 1);
        parents.push(Some(p));
    }
    let mut has_child = vec![false; names.len()];
    for p in parents.iter().flatten() {
        has_child[*p] = true;
    }
    let mut childless: Vec<usize> = (0..names.len()).filter(|&j| !has_child[j]).collect();
    let n_leaves = rng.random_range((childless.len()).max(2)..=20);
    for l in 0..n_leaves {
        let p = childless.pop().unwrap_or_else(|| rng.random_range(0..names.len()));
        specs.push(NodeSpec::leaf(format!("leaf{l}"), names[p].clone(), rng.random_range(1.0..500.0)));
    }
    Hierarchy::new(specs, conv).unwrap()
}

fn gls_fixed_point_and_hand_solve() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let conv = if rng.random_bool(0.5) { Aggregation::Sum } else { Aggregation::WeightedAverage };
        let h = random_hierarchy(&mut rng, conv);
        let s = summing_matrix(&h).map_err(|e| e.to_string())?;
        let leaves: Vec<Curve<f64>> = (0..s.n_leaves())
            .map(|_| Curve::new(grid(6), (0..6).map(|_| rng.random_range(1.0..100.0)).collect()).unwrap())
            .collect();
        let x = hfts_core::reconcile::bottom_up(&s, &leaves).map_err(|e| e.to_string())?;
        let v: Vec<f64> = (0..s.n_nodes()).map(|_| rng.random_range(0.1..10.0)).collect();
        let r = gls_reconcile(&s, &x, &v).map_err(|e| e.to_string())?;
        worst = worst.max(r.reconciled.values.max_abs_diff(&x.values));
    }
    ensure!(worst <= 1e-10, "consistent input moved by {worst:e}");

    let h = Hierarchy::new(
        vec![NodeSpec::root("top"), NodeSpec::leaf("a", "top", 1.0), NodeSpec::leaf("b", "top", 1.0)],
        Aggregation::Sum,
    )
    .unwrap();
    let s = summing_matrix(&h).map_err(|e| e.to_string())?;
    let per: BTreeMap<String, Curve<f64>> = [("top", 10.0), ("a", 4.0), ("b", 4.0)]
        .iter()
        .map(|&(id, v)| (id.to_string(), Curve::constant(grid(24), v)))
        .collect();
    let x = StackedForecast::from_curves(&s.row_order, &per).map_err(|e| e.to_string())?;
    let r = gls_reconcile(&s, &x, &[1.0; 3]).map_err(|e| e.to_string())?;
    let rec = r.reconciled.to_map();
    let top = rec["top"].values()[0];
    let a = rec["a"].values()[0];
    let b = rec["b"].values()[0];
    ensure!((top - 28.0 / 3.0).abs() <= 1e-9, "top {top}");
    ensure!((a - 14.0 / 3.0).abs() <= 1e-9 && (b - 14.0 / 3.0).abs() <= 1e-9, "leaves {a} {b}");

    // brute-force minimization of |x - S beta|^2 by successive grid refinement
    let obj = |b1: f64, b2: f64| (10.0 - b1 - b2).powi(2) + (4.0 - b1).powi(2) + (4.0 - b2).powi(2);
    let (mut c1, mut c2, mut step) = (0.0, 0.0, 1.0);
    for _ in 0..40 {
        let mut best = (obj(c1, c2), c1, c2);
        for i in -10..=10 {
            for j in -10..=10 {
                let (p, q) = (c1 + i as f64 * step, c2 + j as f64 * step);
                let v = obj(p, q);
                if v < best.0 {
                    best = (v, p, q);
                }
            }
        }
        (c1, c2) = (best.1, best.2);
        step /= 4.0;
    }
    // near the minimum a step d changes the objective by about d^2, so a
    // search on objective values cannot resolve beta below ~1e-8
    ensure!((c1 - a).abs() <= 1e-7 && (c2 - b).abs() <= 1e-7, "brute force found ({c1}, {c2})");
    ensure!(obj(a, b) <= obj(c1, c2) * (1.0 + 8.0 * f64::EPSILON), "brute force beat the solve");
    Ok(format!(
        "fixed point within {worst:.1e} on 50 hierarchies; (10,4,4) -> top {top:.12}, leaves {a:.12}; brute force ({c1:.12}, {c2:.12})"
    ))
}

fn dates(n: usize) -> Vec<chrono::NaiveDate> {
    let d0 = chrono::NaiveDate::from_ymd_opt(2017, 1, 1).unwrap();
    (0..n).map(|i| d0 + chrono::Days::new(i as u64)).collect()
}

fn aggregate_consistency() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let methods = [
        HierMethod::BottomUp(BaseForecaster::MovingMean),
        HierMethod::BottomUp(BaseForecaster::fpca_default()),
        HierMethod::TopDown(BaseForecaster::MovingMean),
        HierMethod::TopDown(BaseForecaster::fpca_default()),
        HierMethod::GlsOptimal(BaseForecaster::MovingMean),
        HierMethod::GlsOptimal(BaseForecaster::fpca_default()),
    ];
    let mut worst = 0.0f64;
    let mut depth_max = 0;
    for _ in 0..50 {
        let conv = if rng.random_bool(0.5) { Aggregation::Sum } else { Aggregation::WeightedAverage };
        let h = random_hierarchy(&mut rng, conv);
        ensure!(h.depth() <= 4 && h.leaves().len() <= 20, "generator out of bounds");
        depth_max = depth_max.max(h.depth());
        let data: SeriesMap<f64> = h
            .leaves()
            .into_iter()
            .map(|id| {
                let level = rng.random_range(20.0..80.0);
                let curves = (0..14)
                    .map(|_| Curve::new(grid(6), (0..6).map(|_| level + rng.random_range(-10.0..10.0)).collect()).unwrap())
                    .collect();
                (id.to_string(), FunctionalSeries::new(id, grid(6), curves, dates(14)).unwrap())
            })
            .collect();
        let s = summing_matrix(&h).map_err(|e| e.to_string())?;
        for m in &methods {
            let f = forecast_hierarchy(&data, &h, m, 5).map_err(|e| e.to_string())?;
            let x = StackedForecast::from_curves(&s.row_order, &f.per_node).map_err(|e| e.to_string())?;
            worst = worst.max(aggregation_violation(&s, &x.values).map_err(|e| e.to_string())?);
        }
    }
    ensure!(worst <= 1e-10, "violation {worst:e}");
    Ok(format!(
        "{} methods on 50 hierarchies (depth up to {depth_max}): max violation {worst:.1e}",
        methods.len()
    ))
}

fn leaf_mads(data: &SeriesMap<f64>, h: &Hierarchy<f64>, method: &HierMethod<f64>) -> Result<BTreeMap<String, f64>, String> {
    let b = rolling_backtest(data, h, method, 10).map_err(|e| e.to_string())?;
    let r = evaluate_backtest(&b, "", 0.0).map_err(|e| e.to_string())?;
    Ok(h.leaves().into_iter().map(|id| (id.to_string(), r.per_node[id].mad)).collect())
}

fn silesia() -> Hierarchy<f64> {
    let mut specs = vec![NodeSpec::root("silesia")];
    specs.extend(SILESIA.iter().map(|&(id, w)| NodeSpec::leaf(id, "silesia", w)));
    Hierarchy::new(specs, Aggregation::WeightedAverage).unwrap()
}

fn synth(seed: u64, rate: f64) -> Result<SeriesMap<f64>, String> {
    let spec = SynthSpec { seed, ..SynthSpec::default() };
    let mut data = synthesize_hfts(&spec).map_err(|e| e.to_string())?;
    if rate > 0.0 {
        contaminate(&mut data, OutlierKind::Amplitude, rate, None, seed).map_err(|e| e.to_string())?;
    }
    Ok(data)
}

fn mean(m: &BTreeMap<String, f64>) -> f64 {
    m.values().sum::<f64>() / m.len() as f64
}

fn robustness_ordering() -> Check {
    let t0 = Instant::now();
    let h = silesia();
    let methods = [
        ("double-median", HierMethod::DoubleMedian(DoubleMedianOptions::default())),
        ("moving-mean", HierMethod::MovingMean),
        ("fpca-gls", HierMethod::GlsOptimal(BaseForecaster::fpca_default())),
    ];
    let mut wins = 0;
    let mut lines = Vec::new();
    for seed in 0..10u64 {
        let clean = synth(seed, 0.0)?;
        let dirty = synth(seed, 0.10)?;
        let mut inc = Vec::new();
        for (_, m) in &methods {
            inc.push(mean(&leaf_mads(&dirty, &h, m)?) - mean(&leaf_mads(&clean, &h, m)?));
        }
        if inc[0] < inc[1] && inc[0] < inc[2] {
            wins += 1;
        }
        lines.push(format!("{:.0}/{:.0}/{:.0}", inc[0], inc[1], inc[2]));
    }
    let secs = t0.elapsed().as_secs_f64();
    ensure!(wins >= 9, "double median had the smallest MAD increase on only {wins}/10 seeds [{}]", lines.join(" "));
    ensure!(secs < 120.0, "took {secs:.1} s");
    Ok(format!(
        "double median least affected on {wins}/10 seeds in {secs:.1} s; increases dm/mm/gls: {}",
        lines.join(" ")
    ))
}

fn table_ordering() -> Check {
    let h = silesia();
    let data = synth(2017, 0.05)?;
    let dm = leaf_mads(&data, &h, &HierMethod::DoubleMedian(DoubleMedianOptions::default()))?;
    let gls = leaf_mads(&data, &h, &HierMethod::GlsOptimal(BaseForecaster::fpca_default()))?;
    let cells: Vec<String> = dm.iter().map(|(id, d)| format!("{id} {d:.1} vs {:.1}", gls[id])).collect();
    ensure!(dm.iter().all(|(id, d)| *d < gls[id]), "ordering broken: {}", cells.join(", "));
    Ok(format!("double median below fpca-gls at every leaf: {}", cells.join(", ")))
}

fn time_backtest(data: &SeriesMap<f64>, h: &Hierarchy<f64>, m: &HierMethod<f64>) -> Result<Duration, String> {
    let mut best = Duration::MAX;
    for _ in 0..3 {
        let t = Instant::now();
        rolling_backtest(data, h, m, 10).map_err(|e| e.to_string())?;
        best = best.min(t.elapsed());
    }
    Ok(best)
}

fn runtime_direction() -> Check {
    let h = silesia();
    let data = synth(8, 0.0)?;
    let dm = time_backtest(&data, &h, &HierMethod::DoubleMedian(DoubleMedianOptions::default()))?;
    let gls = time_backtest(&data, &h, &HierMethod::GlsOptimal(BaseForecaster::fpca_default()))?;
    let ratio = gls.as_secs_f64() / dm.as_secs_f64();
    ensure!(dm.as_secs_f64() < 30.0, "double median took {dm:?}");
    ensure!(ratio >= 2.0, "fpca-gls only {ratio:.2}x slower ({dm:?} vs {gls:?})");
    Ok(format!("double median {:.3} s, fpca-gls {:.3} s ({ratio:.1}x)", dm.as_secs_f64(), gls.as_secs_f64()))
}

fn diagnostics_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let alphas: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let mut contained = 0;
    for s in 0..100 {
        let n = rng.random_range(2..=30);
        let c = to_curves(&random_rows(&mut rng, n, 12, s % 5 == 4));
        let sc = scale_curve(&c, &alphas, DepthKind::Mbd).map_err(|e| e.to_string())?;
        ensure!(sc.windows(2).all(|w| w[0].1 <= w[1].1), "sample {s}: scale curve decreases");
        let regions: Vec<_> = alphas.iter().map(|&a| central_region(&c, a, DepthKind::Mbd).unwrap()).collect();
        for w in regions.windows(2) {
            ensure!(
                w[0].member_indices.iter().all(|i| w[1].member_indices.contains(i))
                    && w[1].contains(&w[0].lower)
                    && w[1].contains(&w[0].upper),
                "sample {s}: regions not nested"
            );
        }
        let b = functional_boxplot(&c, DepthKind::Mbd).map_err(|e| e.to_string())?;
        let sel = functional_median_selection(&c, DepthKind::Mbd, None).map_err(|e| e.to_string())?;
        // an average of more tied curves than the region holds may leave it
        if sel.maximizers.len() <= b.region50.member_indices.len() {
            ensure!(b.region50.contains(&b.median_curve), "sample {s}: median outside the 50% region");
            contained += 1;
        }
    }
    let g = grid(25);
    let k: Vec<_> = [0.0, 1.0, 2.0].iter().map(|&v| Curve::constant(g, v)).collect();
    let vols: Vec<f64> = scale_curve(&k, &[1.0 / 3.0, 2.0 / 3.0, 1.0], DepthKind::Mbd)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|p| p.1)
        .collect();
    ensure!(vols == vec![0.0, 24.0, 48.0], "known answer gave {vols:?}");
    Ok(format!("100 samples monotone and nested, median contained in {contained}; known answer {vols:?}"))
}

fn fpca_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut rec_err, mut orth_err) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let n = rng.random_range(3..=40);
        let p = [6, 12, 24][rng.random_range(0..3)];
        let c = to_curves(&random_rows(&mut rng, n, p, false));
        let m = fit_fpca(&c, 1.0).map_err(|e| e.to_string())?;
        for (i, x) in c.iter().enumerate() {
            let r = reconstruct(&m, m.scores.row(i)).map_err(|e| e.to_string())?;
            rec_err = rec_err.max(r.max_abs_diff(x));
        }
        let step = grid(p).step();
        for a in 0..m.n_components() {
            for b in 0..m.n_components() {
                let ip: f64 = m.components[a].values().iter().zip(m.components[b].values()).map(|(u, v)| u * v).sum::<f64>() * step;
                orth_err = orth_err.max((ip - if a == b { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    ensure!(rec_err < 1e-8, "reconstruction error {rec_err:e}");
    ensure!(orth_err < 1e-8, "orthonormality error {orth_err:e}");
    Ok(format!("50 samples: reconstruction {rec_err:.1e}, orthonormality {orth_err:.1e}"))
}

fn hfts(args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_hfts"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("hfts {}: {}", args.join(" "), String::from_utf8_lossy(&o.stderr)));
    }
    Ok(())
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(files(&p));
        } else if !p.file_name().unwrap().to_string_lossy().contains("manifest") {
            out.push(p);
        }
    }
    out.sort();
    out
}

fn end_to_end_determinism() -> Check {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let p = |x: &Path| x.to_str().unwrap().to_string();
    let cfg_a = a.join("hierarchy.toml");
    hfts(&["synthesize", "--seed", "42", "--contamination", "0.05", "--out", &p(&a)])?;
    hfts(&["forecast", "--config", &p(&cfg_a), "--method", "double-median", "--out", &p(&a.join("fc"))])?;
    hfts(&["evaluate", "--config", &p(&cfg_a), "--out", &p(&a.join("ev"))])?;

    let cfg_b = b.join("hierarchy.toml");
    hfts(&["replay", &p(&a.join("manifest.json")), "--out", &p(&b)])?;
    hfts(&["replay", &p(&a.join("fc/manifest.json")), "--out", &p(&b.join("fc")), "--config", &p(&cfg_b)])?;
    hfts(&["replay", &p(&a.join("ev/manifest.json")), "--out", &p(&b.join("ev")), "--config", &p(&cfg_b)])?;

    let fa = files(&a);
    let fb = files(&b);
    let rel = |root: &Path, v: &[PathBuf]| v.iter().map(|x| x.strip_prefix(root).unwrap().to_path_buf()).collect::<Vec<_>>();
    ensure!(rel(&a, &fa) == rel(&b, &fb), "different file sets");
    for (x, y) in fa.iter().zip(&fb) {
        ensure!(fs::read(x).unwrap() == fs::read(y).unwrap(), "{} differs after replay", x.strip_prefix(&a).unwrap().display());
    }
    Ok(format!("{} output files byte-identical after replay", fa.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("depth oracle equivalence", depth_oracle_equivalence),
        ("known-answer depths", known_answer_depths),
        ("median correctness", median_correctness),
        ("gls fixed point and hand solve", gls_fixed_point_and_hand_solve),
        ("aggregate consistency", aggregate_consistency),
        ("robustness ordering", robustness_ordering),
        ("per-leaf MAD ordering", table_ordering),
        ("runtime direction", runtime_direction),
        ("diagnostics properties", diagnostics_properties),
        ("fpca round trip", fpca_round_trip),
        ("end-to-end determinism", end_to_end_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let verdict = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
