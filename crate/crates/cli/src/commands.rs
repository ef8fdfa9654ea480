//! The four subcommands.

use nalgebra::DMatrix;
use serde_json::{json, Value};

use autossa::experiments::{
    calibrate_threshold, compare_methods, CompareConfig, SignalModel, SimulationConfig,
    DEFAULT_SEED,
};
use autossa::field::{candidates_2d, devectorize, identify_trend_2d};
use autossa::grouping::{
    candidates, identify_periodic_angle, identify_periodic_freq, identify_trend, AngleIdConfig,
    FreqIdConfig, SourceKind, TrendIdConfig,
};
use autossa::mssa::{
    identify_periodic_angle_mssa_right, identify_periodic_freq_mssa_right,
    identify_trend_mssa_right, MssaCandidates,
};
use autossa::spectral::{argmax_frequency, Periodogram2D, PEAK_TIE_EPS};
use autossa::{
    decompose, elementary_component, embed_1d, embed_2d, embed_mssa, Component, Decomposition,
    Group, GroupingResult, Layout,
};

use crate::error::{usage, CliError, CliResult};
use crate::input::{self, Data};
use crate::output::{emit, write_file, Cell, Report, Table};
use crate::{
    CalibrateArgs, CompareArgs, DataArgs, DecomposeArgs, IdentifyArgs, MethodArg, ModelArgs,
    SourceArg,
};

fn to_json<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("library records always serialize")
}

/// Reads and decomposes the input; returns the data, the decomposition and
/// the resolved input configuration.
fn load_and_decompose(args: &DataArgs) -> CliResult<(Data, Decomposition, Value)> {
    if !(0.0..1.0).contains(&args.rank_tol) {
        return usage(format!("--rank-tol must lie in [0, 1), got {}", args.rank_tol));
    }
    let data = input::load(&args.input, args.layout, args.window2d.is_some())?;
    let series_window = || match (args.window, args.window2d) {
        (_, Some(_)) => usage("--window2d applies to field input only"),
        (Some(l), None) => Ok(l),
        (None, None) => usage("series and multichannel input need --window"),
    };
    let (tm, window, shape) = match &data {
        Data::Series(s) => {
            let l = series_window()?;
            (embed_1d(s, l)?, json!(l), json!(s.len()))
        }
        Data::Multi(m) => {
            let l = series_window()?;
            (embed_mssa(m, l)?, json!(l), json!(m.lengths()))
        }
        Data::Field(f) => {
            if args.window.is_some() {
                return usage("field input takes --window2d, not --window");
            }
            let (lx, ly) = args
                .window2d
                .ok_or_else(|| CliError::Usage("field input needs --window2d Lx,Ly".into()))?;
            let (nx, ny) = f.shape();
            (embed_2d(f, lx, ly)?, json!([lx, ly]), json!([nx, ny]))
        }
    };
    let dec = decompose(&tm, args.rank_tol)?;
    let config = json!({
        "input": args.input.display().to_string(),
        "layout": data.kind(),
        "shape": shape,
        "window": window,
        "rank_tol": args.rank_tol,
    });
    Ok((data, dec, config))
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

/// Peak of the folded 2D periodogram outside the origin, as `(k/Mx, l/My)`.
fn peak_2d(y: &DMatrix<f64>) -> Option<(f64, f64)> {
    let p = Periodogram2D::new(y).ok()?;
    if p.is_degenerate() {
        return None;
    }
    let power = p.normalized();
    let best = power
        .iter()
        .skip(1)
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let (mx, my) = p.shape();
    (0..power.ncols())
        .flat_map(|l| (0..power.nrows()).map(move |k| (k, l)))
        .skip(1)
        .find(|&(k, l)| power[(k, l)] >= best - PEAK_TIE_EPS)
        .map(|(k, l)| (k as f64 / mx as f64, l as f64 / my as f64))
}

pub fn decompose_cmd(args: &DecomposeArgs, threads: Option<usize>) -> CliResult<()> {
    let (data, dec, config) = load_and_decompose(&args.data)?;
    let config = merge(config, json!({ "threads": threads }));
    let field_window = match dec.layout() {
        Layout::HankelBlockHankel { lx, ly, .. } => Some((*lx, *ly)),
        _ => None,
    };

    let mut table = match field_window {
        Some(_) => Table::new(&["index", "sigma", "lambda", "theta_x", "theta_y"]),
        None => Table::new(&["index", "sigma", "lambda", "theta"]),
    };
    let mut components = Vec::new();
    for (i, t) in dec.triples().iter().take(dec.rank()).enumerate() {
        let mut row: Vec<Cell> = vec![(i + 1).into(), t.sigma.into(), t.lambda().into()];
        let theta = match field_window {
            Some((lx, ly)) => {
                let peak = devectorize(&t.u, lx, ly).ok().and_then(|u| peak_2d(&u));
                row.push(peak.map(|p| p.0).into());
                row.push(peak.map(|p| p.1).into());
                json!(peak.map(|p| [p.0, p.1]))
            }
            None => {
                let theta = argmax_frequency(&t.u).ok().map(|(f, _)| f);
                row.push(theta.into());
                json!(theta)
            }
        };
        table.push(row);
        components.push(json!({
            "index": i + 1,
            "sigma": t.sigma,
            "lambda": t.lambda(),
            "theta": theta,
        }));
    }

    let mut report = Report::new("decompose", config);
    report.body.insert("rank".into(), json!(dec.rank()));
    report.body.insert("components".into(), Value::Array(components));
    report.table = table;

    if let Some(path) = &args.components {
        let text = components_table(&data, &dec)?.to_csv(&report.provenance());
        write_file(path, &text)?;
    }
    emit(args.out.output.as_ref(), &report.render(args.out.format))
}

/// Every elementary reconstruction as a column, with position columns.
fn components_table(data: &Data, dec: &Decomposition) -> CliResult<Table> {
    let positions: Vec<Vec<Cell>> = match data {
        Data::Series(s) => (1..=s.len()).map(|t| vec![t.into()]).collect(),
        Data::Multi(m) => m
            .lengths()
            .iter()
            .enumerate()
            .flat_map(|(p, &n)| (1..=n).map(move |t| vec![(p + 1).into(), t.into()]))
            .collect(),
        Data::Field(f) => {
            let (nx, ny) = f.shape();
            (1..=ny)
                .flat_map(|y| (1..=nx).map(move |x| vec![x.into(), y.into()]))
                .collect()
        }
    };
    let mut columns: Vec<String> = match data {
        Data::Series(_) => vec!["t".into()],
        Data::Multi(_) => vec!["channel".into(), "t".into()],
        Data::Field(_) => vec!["x".into(), "y".into()],
    };
    columns.extend((1..=dec.rank()).map(|i| format!("c{i}")));
    let recon = (0..dec.rank())
        .map(|i| Ok(elementary_component(dec, i)?.flat()))
        .collect::<CliResult<Vec<_>>>()?;
    let mut table = Table::with_columns(columns);
    for (r, mut row) in positions.into_iter().enumerate() {
        row.extend(recon.iter().map(|c| Cell::Real(c[r])));
        table.push(row);
    }
    debug_assert_eq!(table.rows.len(), data.flat().len());
    Ok(table)
}

fn source_kind(s: SourceArg) -> SourceKind {
    match s {
        SourceArg::Eigen => SourceKind::Eigen,
        SourceArg::Factor => SourceKind::Factor,
        SourceArg::Recon => SourceKind::Recon,
    }
}

fn label(c: &Component) -> String {
    match c {
        Component::Single(i) => i.to_string(),
        Component::Pair(i, j) => format!("{i}-{j}"),
    }
}

/// Validated method parameters.
enum MethodCfg {
    Trend { omega: f64, omega2: Option<f64>, threshold: f64 },
    Freq(FreqIdConfig),
    Angle(AngleIdConfig),
}

fn method_cfg(args: &IdentifyArgs) -> CliResult<(MethodCfg, Value)> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| CliError::Usage(format!("the {} method needs {flag}", method_name(args.method))))
    };
    Ok(match args.method {
        MethodArg::Trend => {
            let (omega, threshold) = (need(args.omega, "--omega")?, need(args.threshold, "--threshold")?);
            (
                MethodCfg::Trend { omega, omega2: args.omega2, threshold },
                json!({ "omega": omega, "omega2": args.omega2, "threshold": threshold }),
            )
        }
        MethodArg::Freq => {
            let rho0 = need(args.rho0, "--rho0")?;
            let cfg = FreqIdConfig { s0: args.s0, rho0 };
            (MethodCfg::Freq(cfg), json!({ "s0": args.s0, "rho0": rho0 }))
        }
        MethodArg::Angle => match (args.t0, args.m) {
            (Some(t0), None) => (MethodCfg::Angle(AngleIdConfig::threshold(t0)), json!({ "t0": t0 })),
            (None, Some(m)) => (MethodCfg::Angle(AngleIdConfig::count(m)), json!({ "m": m })),
            _ => return usage("the angle method needs exactly one of --t0 and --m"),
        },
    })
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Trend => "trend",
        MethodArg::Freq => "freq",
        MethodArg::Angle => "angle",
    }
}

fn source_name(s: SourceArg) -> &'static str {
    match s {
        SourceArg::Eigen => "eigen",
        SourceArg::Factor => "factor",
        SourceArg::Recon => "recon",
    }
}

fn series_trend_cfg(omega: f64, omega2: Option<f64>, threshold: f64, source: SourceKind) -> CliResult<TrendIdConfig> {
    if omega2.is_some() {
        return usage("--omega2 applies to field input only");
    }
    Ok(TrendIdConfig::low_frequency(omega, threshold).with_source(source))
}

pub fn identify_cmd(args: &IdentifyArgs, threads: Option<usize>) -> CliResult<()> {
    let (method, method_config) = method_cfg(args)?;
    let (data, dec, config) = load_and_decompose(&args.data)?;
    let d = dec.rank();
    let (first, last) = args.candidates.unwrap_or((1, d));
    if last > d {
        return usage(format!("candidate range {first}-{last} exceeds the {d} components"));
    }
    let start = first - 1;
    let group = Group::new(start..last);
    let source = source_kind(args.source);

    // positions within the candidate list are relabelled by `start`, the
    // trend methods already report component indices
    let (variant, result, diagram): (&str, GroupingResult, Vec<(usize, Vec<f64>)>) = match &data {
        Data::Field(_) => {
            let MethodCfg::Trend { omega, omega2, threshold } = method else {
                return usage(format!(
                    "unsupported combination: {} method on 2D data",
                    method_name(args.method)
                ));
            };
            let items = candidates_2d(&dec, source, &group)?;
            let result = identify_trend_2d(&items, omega, omega2.unwrap_or(omega), threshold)?;
            let flat = items.into_iter().map(|(i, m)| (i, m.as_slice().to_vec())).collect();
            ("2d", result, flat)
        }
        Data::Multi(_) if source != SourceKind::Eigen => {
            let (variant, items) = match MssaCandidates::from_decomposition(&dec, source, &group)? {
                MssaCandidates::Right(v) => ("mssa-right", v),
                MssaCandidates::Recon(v) => ("mssa-recon", v),
                MssaCandidates::Left(_) => unreachable!("left vectors come from the eigen source"),
            };
            let parts: Vec<_> = items.iter().map(|(_, p)| p.clone()).collect();
            let result = match method {
                MethodCfg::Trend { omega, omega2, threshold } => {
                    identify_trend_mssa_right(&items, &series_trend_cfg(omega, omega2, threshold, source)?)?
                }
                MethodCfg::Freq(cfg) => identify_periodic_freq_mssa_right(&parts, &cfg)?.shifted(start),
                MethodCfg::Angle(cfg) => identify_periodic_angle_mssa_right(&parts, &cfg)?.shifted(start),
            };
            let flat = items.into_iter().map(|(i, p)| (i, p.concat())).collect();
            (variant, result, flat)
        }
        Data::Series(_) | Data::Multi(_) => {
            let variant = if matches!(data, Data::Multi(_)) { "mssa-left" } else { "1d" };
            let items = candidates(&dec, source, &group)?;
            let vectors: Vec<&[f64]> = items.iter().map(|(_, v)| v.as_slice()).collect();
            let result = match method {
                MethodCfg::Trend { omega, omega2, threshold } => {
                    identify_trend(&items, &series_trend_cfg(omega, omega2, threshold, source)?)?
                }
                MethodCfg::Freq(cfg) => identify_periodic_freq(&vectors, &cfg)?.shifted(start),
                MethodCfg::Angle(cfg) => identify_periodic_angle(&vectors, &cfg)?.shifted(start),
            };
            (variant, result, items)
        }
    };
    let result = result.shifted(1);

    let config = merge(
        config,
        json!({
            "method": method_name(args.method),
            "source": source_name(args.source),
            "candidates": [first, last],
            "parameters": method_config,
            "threads": threads,
        }),
    );
    let mut table = Table::new(&["component", "measure", "selected"]);
    for m in &result.measures {
        table.push(vec![
            label(&m.component).into(),
            m.value.into(),
            result.selected.contains(&m.component).into(),
        ]);
    }
    for i in &result.degenerate {
        if !result.measures.iter().any(|m| m.component.indices().contains(i)) {
            table.push(vec![i.to_string().into(), Cell::Missing, false.into()]);
        }
    }
    let selected: Vec<usize> = result.index_set().into_iter().collect();

    let mut report = Report::new("identify", config);
    report.body.insert("variant".into(), json!(variant));
    report.body.insert("rank".into(), json!(d));
    report.body.insert("selected".into(), json!(selected));
    report.body.insert("result".into(), to_json(&result));
    report.table = table;

    if let Some(path) = &args.diagram {
        write_file(path, &diagram_table(&diagram).to_csv(&report.provenance()))?;
    }
    emit(args.out.output.as_ref(), &report.render(args.out.format))
}

/// Points `(y_j[k], y_{j+1}[k])` of every consecutive candidate pair.
fn diagram_table(items: &[(usize, Vec<f64>)]) -> Table {
    let mut table = Table::new(&["first", "second", "k", "x", "y"]);
    for w in items.windows(2) {
        let ((i, a), (j, b)) = (&w[0], &w[1]);
        for (k, (x, y)) in a.iter().zip(b).enumerate() {
            table.push(vec![(i + 1).into(), (j + 1).into(), (k + 1).into(), (*x).into(), (*y).into()]);
        }
    }
    table
}

fn seed_config(model: &ModelArgs) -> (u64, Value) {
    let seed = model.seed.unwrap_or(DEFAULT_SEED);
    (seed, json!({ "seed": seed, "seed_is_default": model.seed.is_none() }))
}

fn model_config(model: &ModelArgs, omega: f64) -> CliResult<(SignalModel, Value)> {
    let signal = SignalModel::harmonic(model.length, omega, model.alpha);
    signal.validate()?;
    let config = json!({
        "length": model.length,
        "window": model.window,
        "omega": omega,
        "alpha": model.alpha,
    });
    Ok((signal, config))
}

pub fn calibrate_cmd(args: &CalibrateArgs, threads: Option<usize>) -> CliResult<()> {
    let (signal, model_json) = model_config(&args.model, args.omega)?;
    let (seed, seed_json) = seed_config(&args.model);
    let cfg = SimulationConfig {
        model: signal,
        window: args.model.window,
        n_sim: args.nsim,
        seed,
        sigma_grid: args.sigma_grid.0.clone(),
    };
    let result = calibrate_threshold(&cfg)?;
    let config = merge(
        merge(model_json, seed_json),
        json!({ "sigma_grid": cfg.sigma_grid, "nsim": args.nsim, "threads": threads }),
    );

    let mut table = Table::new(&["sigma", "q95", "used", "dropped"]);
    for row in &result.rows {
        table.push(vec![row.sigma.into(), row.q95.into(), row.used.into(), row.dropped.into()]);
    }
    let mut report = Report::new("calibrate", config);
    report.body.insert("recommended_t0".into(), json!(result.recommended_t0));
    report.body.insert("rows".into(), to_json(&result.rows));
    report.notes.insert("recommended_t0".into(), json!(result.recommended_t0));
    report.table = table;

    if let Some(path) = &args.summary {
        write_file(path, &report.render(crate::output::Format::Json))?;
    }
    emit(args.out.output.as_ref(), &report.render(args.out.format))
}

pub fn compare_cmd(args: &CompareArgs, threads: Option<usize>) -> CliResult<()> {
    let (signal, model_json) = model_config(&args.model, args.omega)?;
    let (seed, seed_json) = seed_config(&args.model);
    let mut cfg = CompareConfig::new(signal, args.model.window, args.nrep, seed);
    cfg.sigma_grid = args.sigma_grid.0.clone();
    cfg.s0 = args.s0;
    let report_data = compare_methods(&cfg)?;
    let config = merge(
        merge(model_json, seed_json),
        json!({
            "sigma_grid": cfg.sigma_grid,
            "nrep": args.nrep,
            "s0": cfg.s0,
            "threshold_grid": "0:1:0.01",
            "threads": threads,
        }),
    );

    let mut table = Table::new(&[
        "sigma", "mean_tau", "mean_rho", "median_tau", "median_rho", "used", "excluded",
    ]);
    let mut rows = Vec::new();
    for row in &report_data.rows {
        table.push(vec![
            row.sigma.into(),
            row.mean_tau.into(),
            row.mean_rho.into(),
            row.median_tau.into(),
            row.median_rho.into(),
            row.used.into(),
            row.excluded.into(),
        ]);
        let mut value = to_json(row);
        if !args.replications {
            if let Value::Object(m) = &mut value {
                m.remove("replications");
            }
        }
        rows.push(value);
    }
    let mut report = Report::new("compare", config);
    report.body.insert("rows".into(), Value::Array(rows));
    report.table = table;
    emit(args.out.output.as_ref(), &report.render(args.out.format))
}
