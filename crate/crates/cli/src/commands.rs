use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hfts_core::diagnostics::{
    evaluate_backtest, functional_boxplot_with_factor, scale_curve, NodeScore,
    OutlierKind,
};
use hfts_core::median_forecast::{forecast_hierarchy, rolling_backtest};
use hfts_core::reconcile::{
    aggregation_violation, is_aggregate_consistent, materialize_node_series, summing_matrix,
};
use hfts_core::{
    BaseForecaster, Curve, DepthKind, DoubleMedianOptions, HierMethod, SeriesMap,
    StackedForecast, Weighting,
};
use serde::Serialize;

use crate::args::*;
use crate::config::{load_data, load_hierarchy_config, LoadedConfig, LoadedData};
use crate::error::{CliError, Result};
use crate::ingest::{write_atomic, write_series_csv, DECIMALS};
use crate::manifest::{RunManifest, MANIFEST_FILE};
use crate::synth::{contaminate, synth_config, synthesize_hfts, BasePattern, SynthSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    DoubleMedian,
    MovingMean,
    Naive,
    BottomUp,
    TopDown,
    Gls,
}

impl MethodKind {
    fn name(self) -> &'static str {
        match self {
            Self::DoubleMedian => "double-median",
            Self::MovingMean => "moving-mean",
            Self::Naive => "naive",
            Self::BottomUp => "bottom-up",
            Self::TopDown => "top-down",
            Self::Gls => "gls",
        }
    }

    fn reconciles(self) -> bool {
        matches!(self, Self::BottomUp | Self::TopDown | Self::Gls)
    }
}

const KINDS: [MethodKind; 6] = [
    MethodKind::DoubleMedian,
    MethodKind::MovingMean,
    MethodKind::Naive,
    MethodKind::BottomUp,
    MethodKind::TopDown,
    MethodKind::Gls,
];

fn base_name(b: BaseArg) -> &'static str {
    match b {
        BaseArg::Fpca => "fpca",
        BaseArg::MovingMedian => "moving-median",
        BaseArg::MovingMean => "moving-mean",
        BaseArg::Naive => "naive",
    }
}

const BASES: [BaseArg; 4] = [
    BaseArg::Fpca,
    BaseArg::MovingMedian,
    BaseArg::MovingMean,
    BaseArg::Naive,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodSpec {
    pub kind: MethodKind,
    /// Only set for reconciling methods.
    pub base: Option<BaseArg>,
}

impl MethodSpec {
    pub fn parse(raw: &str, default_base: BaseArg) -> Result<Self> {
        let raw = raw.trim();
        if let Some(&kind) = KINDS.iter().find(|k| k.name() == raw) {
            let base = kind.reconciles().then_some(default_base);
            return Ok(Self { kind, base });
        }
        for b in BASES {
            if let Some(rest) = raw.strip_prefix(base_name(b)).and_then(|r| r.strip_prefix('-')) {
                if let Some(&kind) = KINDS.iter().find(|k| k.reconciles() && k.name() == rest) {
                    return Ok(Self {
                        kind,
                        base: Some(b),
                    });
                }
            }
        }
        Err(CliError::Usage(format!(
            "unknown method `{raw}`; expected double-median, moving-mean, naive, \
             bottom-up, top-down, gls or <base>-<bottom-up|top-down|gls> with base \
             fpca, moving-median, moving-mean or naive"
        )))
    }

    pub fn label(&self) -> String {
        match self.base {
            Some(b) => format!("{}-{}", base_name(b), self.kind.name()),
            None => self.kind.name().to_string(),
        }
    }

    pub fn to_method(&self, model: &ModelArgs) -> HierMethod<f64> {
        let depth = depth_kind(model.depth);
        let base = match self.base.unwrap_or(model.base) {
            BaseArg::Fpca => BaseForecaster::Fpca {
                var_threshold: model.var_threshold,
                score_model: Default::default(),
            },
            BaseArg::MovingMedian => BaseForecaster::MovingMedian(depth),
            BaseArg::MovingMean => BaseForecaster::MovingMean,
            BaseArg::Naive => BaseForecaster::Naive,
        };
        match self.kind {
            MethodKind::DoubleMedian => HierMethod::DoubleMedian(DoubleMedianOptions {
                depth,
                weighting: match model.weights {
                    WeightsArg::Population => Weighting::Population,
                    WeightsArg::Equal => Weighting::Equal,
                },
            }),
            MethodKind::MovingMean => HierMethod::MovingMean,
            MethodKind::Naive => HierMethod::Naive,
            MethodKind::BottomUp => HierMethod::BottomUp(base),
            MethodKind::TopDown => HierMethod::TopDown(base),
            MethodKind::Gls => HierMethod::GlsOptimal(base),
        }
    }
}

pub fn depth_kind(d: DepthArg) -> DepthKind {
    match d {
        DepthArg::Mbd => DepthKind::Mbd,
        DepthArg::Fm => DepthKind::FraimanMuniz,
    }
}

fn depth_name(d: DepthArg) -> &'static str {
    match d {
        DepthArg::Mbd => "mbd",
        DepthArg::Fm => "fm",
    }
}

fn absolute(p: &Path) -> PathBuf {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf())
}

fn check_model(m: &ModelArgs) -> Result<()> {
    if m.window == 0 {
        return Err(CliError::Usage("--window must be at least 1".into()));
    }
    if !(m.var_threshold > 0.0 && m.var_threshold <= 1.0) {
        return Err(CliError::Usage(format!(
            "--var-threshold must lie in (0, 1], got {}",
            m.var_threshold
        )));
    }
    Ok(())
}

fn record_model(manifest: &mut RunManifest, m: &ModelArgs) {
    manifest.window = Some(m.window);
    manifest.depth = Some(depth_name(m.depth).to_string());
    manifest.weights = Some(
        match m.weights {
            WeightsArg::Population => "population",
            WeightsArg::Equal => "equal",
        }
        .to_string(),
    );
    manifest.var_threshold = Some(m.var_threshold);
}

fn load(config: &Path) -> Result<(LoadedConfig, LoadedData)> {
    let cfg = load_hierarchy_config(config)?;
    let data = load_data(&cfg)?;
    Ok((cfg, data))
}

fn inputs_of(cfg: &LoadedConfig) -> Vec<PathBuf> {
    std::iter::once(cfg.path.clone())
        .chain(cfg.bindings.values().cloned())
        .collect()
}

/// Makes every path in the invocation absolute so a manifest can be replayed
/// from any working directory.
fn absolutize(cmd: &mut Command) {
    match cmd {
        Command::Validate(a) => {
            a.config = absolute(&a.config);
            a.out = a.out.as_deref().map(absolute);
        }
        Command::Forecast(a) => {
            a.config = absolute(&a.config);
            a.out = absolute(&a.out);
        }
        Command::Evaluate(a) => {
            a.config = absolute(&a.config);
            a.out = absolute(&a.out);
        }
        Command::Diagnose(a) => {
            a.config = absolute(&a.config);
            a.out = absolute(&a.out);
        }
        Command::Synthesize(a) => a.out = absolute(&a.out),
        Command::Replay(a) => {
            a.manifest = absolute(&a.manifest);
            a.out = a.out.as_deref().map(absolute);
            a.config = a.config.as_deref().map(absolute);
        }
    }
}

pub fn run(mut cmd: Command) -> Result<()> {
    absolutize(&mut cmd);
    match cmd {
        Command::Validate(a) => cmd_validate(&a),
        Command::Forecast(a) => cmd_forecast(&a).map(drop),
        Command::Evaluate(a) => cmd_evaluate(&a).map(drop),
        Command::Diagnose(a) => cmd_diagnose(&a).map(drop),
        Command::Synthesize(a) => cmd_synthesize(&a).map(drop),
        Command::Replay(a) => cmd_replay(&a),
    }
}

#[derive(Serialize)]
struct NodeFindings<'a> {
    days: usize,
    findings: &'a [hfts_core::Finding],
}

#[derive(Serialize)]
struct ValidationFile<'a> {
    nodes: BTreeMap<&'a str, NodeFindings<'a>>,
    dropped_dates: &'a [chrono::NaiveDate],
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<()> {
    let (cfg, data) = load(&args.config)?;
    let h = &cfg.hierarchy;
    println!(
        "{}: {} nodes, {} leaves, depth {}",
        cfg.path.display(),
        h.len(),
        h.leaves().len(),
        h.depth()
    );
    for (id, report) in &data.reports {
        let days = data.series[id].len();
        println!("  {id}: {days} days, {} findings", report.findings.len());
        for f in &report.findings {
            println!("    {f}");
        }
    }
    if !data.dropped_dates.is_empty() {
        println!(
            "  {} dates dropped because not every leaf has them",
            data.dropped_dates.len()
        );
    }
    if let Some(out) = &args.out {
        let file = ValidationFile {
            nodes: data
                .reports
                .iter()
                .map(|(id, r)| {
                    (
                        id.as_str(),
                        NodeFindings {
                            days: data.series[id].len(),
                            findings: &r.findings,
                        },
                    )
                })
                .collect(),
            dropped_dates: &data.dropped_dates,
        };
        let json = serde_json::to_string_pretty(&file)
            .map_err(|e| CliError::data("report encoding", e))?;
        write_atomic(out, json.as_bytes())?;
    }
    Ok(())
}

fn check_consistency(
    cfg: &LoadedConfig,
    rows: &[BTreeMap<String, Curve<f64>>],
) -> Result<(bool, f64)> {
    let s = summing_matrix(&cfg.hierarchy).map_err(|e| CliError::compute("summing matrix", e))?;
    let mut ok = true;
    let mut worst = 0.0f64;
    for per_node in rows {
        let stacked = StackedForecast::from_curves(&s.row_order, per_node)
            .map_err(|e| CliError::compute("stacking forecasts", e))?;
        let v = aggregation_violation(&s, &stacked.values)
            .map_err(|e| CliError::compute("consistency check", e))?;
        worst = worst.max(v);
        ok &= is_aggregate_consistent(&s, &stacked.values)
            .map_err(|e| CliError::compute("consistency check", e))?;
    }
    Ok((ok, worst))
}

pub fn cmd_forecast(args: &ForecastArgs) -> Result<RunManifest> {
    let t0 = Instant::now();
    check_model(&args.model)?;
    let spec = MethodSpec::parse(&args.method, args.model.base)?;
    let method = spec.to_method(&args.model);
    let (cfg, data) = load(&args.config)?;
    let h = &cfg.hierarchy;
    let label = spec.label();
    let ctx = format!("{label} forecast");
    let order: Vec<String> = h.row_order().iter().map(|s| s.to_string()).collect();

    let (dates, per_date): (Vec<_>, Vec<BTreeMap<String, Curve<f64>>>) = if args.next_only {
        let f = forecast_hierarchy(&data.series, h, &method, args.model.window)
            .map_err(|e| CliError::compute(&ctx, e))?;
        let date = f
            .target_timestamp
            .ok_or_else(|| CliError::data(&ctx, "no date after the last observation"))?;
        (vec![date], vec![f.per_node])
    } else {
        let b = rolling_backtest(&data.series, h, &method, args.model.window)
            .map_err(|e| CliError::compute(&ctx, e))?;
        let rows = (0..b.target_dates.len())
            .map(|i| {
                b.per_node
                    .iter()
                    .map(|(id, nb)| (id.clone(), nb.forecasts[i].clone()))
                    .collect()
            })
            .collect();
        (b.target_dates, rows)
    };

    let (consistent, worst) = check_consistency(&cfg, &per_date)?;
    if spec.kind.reconciles() && !consistent {
        return Err(CliError::Compute {
            context: ctx,
            source: hfts_core::Error::InvalidParameter(format!(
                "reconciled forecasts violate aggregation by {worst:e}"
            )),
        });
    }

    let mut manifest = RunManifest::new(Command::Forecast(args.clone()));
    for id in &order {
        let curves: Vec<Curve<f64>> = per_date.iter().map(|m| m[id].clone()).collect();
        let path = args.out.join(format!("{id}.csv"));
        write_series_csv(&path, &dates, &curves)?;
        manifest.outputs.push(path);
    }
    println!(
        "{label}: {} nodes x {} forecasts written to {}",
        order.len(),
        dates.len(),
        args.out.display()
    );
    println!(
        "aggregate consistency: {} (max violation {worst:.3e})",
        if consistent { "holds" } else { "does not hold" }
    );
    manifest.methods = vec![label];
    record_model(&mut manifest, &args.model);
    manifest.inputs = inputs_of(&cfg);
    manifest
        .notes
        .push(format!("max aggregation violation {worst:e}"));
    finish(manifest, &args.out.join(MANIFEST_FILE), t0)
}

fn finish(mut manifest: RunManifest, path: &Path, t0: Instant) -> Result<RunManifest> {
    manifest.outputs.push(path.to_path_buf());
    manifest.runtime_seconds = t0.elapsed().as_secs_f64();
    manifest.write(path)?;
    eprintln!("finished in {:.3} s", manifest.runtime_seconds);
    Ok(manifest)
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodScores {
    pub method: String,
    pub per_node: BTreeMap<String, NodeScore<f64>>,
}

/// The evaluation file. Timings are kept out of it (they go to the manifest)
/// so that reruns produce identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationFile {
    pub window: usize,
    pub nodes: Vec<String>,
    pub methods: Vec<MethodScores>,
}

pub fn render_table(file: &EvaluationFile) -> String {
    let width = file
        .methods
        .iter()
        .map(|m| m.method.len())
        .max()
        .unwrap_or(6)
        .max(6);
    let mut out = String::new();
    let block = |out: &mut String, title: &str, pick: &dyn Fn(&NodeScore<f64>) -> f64| {
        let _ = writeln!(out, "{title} (window {})", file.window);
        let _ = write!(out, "{:<width$}", "method");
        for n in &file.nodes {
            let _ = write!(out, " {n:>12}");
        }
        out.push('\n');
        for m in &file.methods {
            let _ = write!(out, "{:<width$}", m.method);
            for n in &file.nodes {
                let _ = write!(out, " {:>12.3}", pick(&m.per_node[n]));
            }
            out.push('\n');
        }
    };
    block(&mut out, "MAD of integrated differences", &|s| s.mad);
    out.push('\n');
    block(
        &mut out,
        "mean absolute integrated error",
        &|s| s.mean_abs_integrated_error,
    );
    out
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<RunManifest> {
    let t0 = Instant::now();
    check_model(&args.model)?;
    if args.method.is_empty() {
        return Err(CliError::Usage("--method needs at least one method".into()));
    }
    let specs = args
        .method
        .iter()
        .map(|m| MethodSpec::parse(m, args.model.base))
        .collect::<Result<Vec<_>>>()?;
    let (cfg, data) = load(&args.config)?;
    let h = &cfg.hierarchy;
    let mut manifest = RunManifest::new(Command::Evaluate(args.clone()));
    let mut methods = Vec::new();
    for spec in &specs {
        let label = spec.label();
        let ctx = format!("{label} backtest");
        let t = Instant::now();
        let b = rolling_backtest(&data.series, h, &spec.to_method(&args.model), args.model.window)
            .map_err(|e| CliError::compute(&ctx, e))?;
        let secs = t.elapsed().as_secs_f64();
        let report = evaluate_backtest(&b, label.clone(), secs).map_err(|e| CliError::compute(&ctx, e))?;
        eprintln!("{label}: {} forecasts per node in {secs:.3} s", b.target_dates.len());
        manifest.method_runtimes.insert(label.clone(), secs);
        manifest.methods.push(label.clone());
        methods.push(MethodScores {
            method: label,
            per_node: report.per_node,
        });
    }
    let file = EvaluationFile {
        window: args.model.window,
        nodes: h.row_order().iter().map(|s| s.to_string()).collect(),
        methods,
    };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| CliError::data("report encoding", e))?;
    let json_path = args.out.join("evaluation.json");
    let table_path = args.out.join("evaluation.txt");
    let table = render_table(&file);
    write_atomic(&json_path, json.as_bytes())?;
    write_atomic(&table_path, table.as_bytes())?;
    print!("{table}");
    manifest.outputs = vec![json_path, table_path];
    record_model(&mut manifest, &args.model);
    manifest.inputs = inputs_of(&cfg);
    finish(manifest, &args.out.join(MANIFEST_FILE), t0)
}

fn diagnose_sample(
    args: &DiagnoseArgs,
    cfg: &LoadedConfig,
    data: &LoadedData,
) -> Result<(Vec<Curve<f64>>, Vec<String>)> {
    let h = &cfg.hierarchy;
    if args.pooled {
        let mut curves = Vec::new();
        let mut labels = Vec::new();
        for leaf in h.leaves() {
            let s = &data.series[leaf];
            curves.extend(s.curves().iter().cloned());
            labels.extend(s.timestamps().iter().map(|d| format!("{leaf} {d}")));
        }
        return Ok((curves, labels));
    }
    let id = args.node.as_deref().unwrap_or_default();
    if !h.contains(id) {
        return Err(CliError::Usage(format!(
            "unknown node `{id}`; valid ids: {}",
            h.bfs_order().join(", ")
        )));
    }
    let nodes: SeriesMap<f64> = materialize_node_series(&data.series, h)
        .map_err(|e| CliError::compute("aggregating node series", e))?;
    let s = &nodes[id];
    let labels = s.timestamps().iter().map(|d| format!("{id} {d}")).collect();
    Ok((s.curves().to_vec(), labels))
}

pub fn cmd_diagnose(args: &DiagnoseArgs) -> Result<RunManifest> {
    let t0 = Instant::now();
    if args.what == DiagnoseWhat::ScaleCurve {
        if args.alphas.is_empty() {
            return Err(CliError::Usage("--alphas needs at least one value".into()));
        }
        if let Some(a) = args.alphas.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
            return Err(CliError::Usage(format!("alpha {a} outside (0, 1]")));
        }
        if args.alphas.windows(2).any(|w| w[1] < w[0]) {
            return Err(CliError::Usage("--alphas must be ascending".into()));
        }
    }
    if !(args.fence_factor >= 0.0 && args.fence_factor.is_finite()) {
        return Err(CliError::Usage("--fence-factor must be nonnegative".into()));
    }
    let (cfg, data) = load(&args.config)?;
    let (sample, labels) = diagnose_sample(args, &cfg, &data)?;
    let depth = depth_kind(args.depth);
    let mut manifest = RunManifest::new(Command::Diagnose(args.clone()));
    let mut w = csv::Writer::from_writer(Vec::new());
    let enc = |e: csv::Error| CliError::data("csv encoding", e);
    let fmt = |v: f64| format!("{v:.DECIMALS$}");
    match args.what {
        DiagnoseWhat::Boxplot => {
            let b = functional_boxplot_with_factor(&sample, depth, args.fence_factor)
                .map_err(|e| CliError::compute("functional boxplot", e))?;
            w.write_record([
                "t",
                "median",
                "region_lower",
                "region_upper",
                "fence_lower",
                "fence_upper",
            ])
            .map_err(enc)?;
            let grid = *sample[0].grid();
            for (i, t) in grid.points().into_iter().enumerate() {
                w.write_record([
                    fmt(t),
                    fmt(b.median_curve.values()[i]),
                    fmt(b.region50.lower.values()[i]),
                    fmt(b.region50.upper.values()[i]),
                    fmt(b.fences.0.values()[i]),
                    fmt(b.fences.1.values()[i]),
                ])
                .map_err(enc)?;
            }
            println!(
                "boxplot of {} curves: {} outside the fences",
                sample.len(),
                b.outlier_indices.len()
            );
            for &i in &b.outlier_indices {
                println!("  outlier: {}", labels[i]);
                manifest.notes.push(format!("outlier {}", labels[i]));
            }
        }
        DiagnoseWhat::ScaleCurve => {
            let sc = scale_curve(&sample, &args.alphas, depth)
                .map_err(|e| CliError::compute("scale curve", e))?;
            w.write_record(["alpha", "volume"]).map_err(enc)?;
            for (a, v) in sc {
                w.write_record([fmt(a), fmt(v)]).map_err(enc)?;
            }
            println!("scale curve of {} curves at {} levels", sample.len(), args.alphas.len());
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::data("csv encoding", e.error()))?;
    write_atomic(&args.out, &bytes)?;
    manifest.outputs.push(args.out.clone());
    manifest.depth = Some(depth_name(args.depth).to_string());
    manifest.inputs = inputs_of(&cfg);
    let mut mpath = args.out.clone().into_os_string();
    mpath.push(".manifest.json");
    finish(manifest, Path::new(&mpath), t0)
}

pub fn cmd_synthesize(args: &SynthesizeArgs) -> Result<RunManifest> {
    let t0 = Instant::now();
    let spec = SynthSpec {
        n_leaves: args.leaves,
        n_days: args.days,
        grid: crate::config::GridSpec {
            start: args.grid_start,
            end: args.grid_end,
            points: args.points,
        },
        pattern: match args.pattern {
            PatternArg::Constant => BasePattern::Constant { value: args.level },
            PatternArg::Diurnal => BasePattern::Diurnal {
                level: args.level,
                amplitude: args.amplitude,
            },
        },
        noise_sd: args.noise_sd,
        persistence: args.persistence,
        seed: args.seed,
        start: args.start_date,
    };
    let mut data = synthesize_hfts(&spec)?;
    let mut manifest = RunManifest::new(Command::Synthesize(args.clone()));
    if args.contamination != 0.0 {
        let kind = match args.outlier_kind {
            OutlierArg::Amplitude => OutlierKind::Amplitude,
            OutlierArg::Shape => OutlierKind::Shape,
            OutlierArg::Covariance => OutlierKind::Covariance,
        };
        let magnitude = contaminate(
            &mut data,
            kind,
            args.contamination,
            args.outlier_magnitude,
            args.seed,
        )?;
        manifest
            .notes
            .push(format!("outlier magnitude {magnitude}"));
    }
    for (id, s) in &data {
        let path = args.out.join(format!("{id}.csv"));
        write_series_csv(&path, s.timestamps(), s.curves())?;
        manifest.outputs.push(path);
    }
    let cfg_path = args.out.join("hierarchy.toml");
    synth_config(&spec).write(&cfg_path)?;
    manifest.outputs.push(cfg_path.clone());
    manifest.seed = Some(args.seed);
    println!(
        "{} leaves x {} days written to {}",
        data.len(),
        args.days,
        args.out.display()
    );
    finish(manifest, &args.out.join(MANIFEST_FILE), t0)
}

pub fn cmd_replay(args: &ReplayArgs) -> Result<()> {
    let manifest = RunManifest::read(&args.manifest)?;
    let mut cmd = manifest.invocation;
    if let Some(out) = &args.out {
        match &mut cmd {
            Command::Validate(a) => a.out = Some(out.clone()),
            Command::Forecast(a) => a.out = out.clone(),
            Command::Evaluate(a) => a.out = out.clone(),
            Command::Diagnose(a) => a.out = out.clone(),
            Command::Synthesize(a) => a.out = out.clone(),
            Command::Replay(_) => {}
        }
    }
    if let Some(config) = &args.config {
        match &mut cmd {
            Command::Validate(a) => a.config = config.clone(),
            Command::Forecast(a) => a.config = config.clone(),
            Command::Evaluate(a) => a.config = config.clone(),
            Command::Diagnose(a) => a.config = config.clone(),
            Command::Synthesize(_) | Command::Replay(_) => {
                return Err(CliError::Usage(
                    "--config does not apply to the recorded command".into(),
                ))
            }
        }
    }
    if matches!(cmd, Command::Replay(_)) {
        return Err(CliError::Usage("a manifest cannot record a replay".into()));
    }
    run(cmd)
}
