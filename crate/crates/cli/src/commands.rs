use std::path::PathBuf;

use clap::Args;
use dapt_core::exact::residual;
use dapt_core::fit::{fit_loglog, sweep_is_sufficient};
use dapt_core::numerics::{vec_norm, CVector};
use dapt_core::pipeline::Dapt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::model::Model;
use crate::output::{complex_headers, matrix_headers, matrix_json, push_matrix, push_vector, Report, Table, VERSION};

fn ground_ket(d: &Dapt) -> CVector {
    d.path().frame(0).basis().column(0).into_owned()
}

fn sup(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

/// Exact and order-`P` states side by side.
pub fn evolve(c: &RunConfig) -> CliResult<Report> {
    let model = Model::from_config(c)?;
    let v = c.v();
    let d = model.build(c, c.order)?;
    let approx = d.computational(&d.series(c.order, v)?, 0)?;
    let reference = model.reference(&ground_ket(&d), d.grid(), v, c)?;
    let res = residual(&reference.states, &approx)?;

    let dim = approx[0].len();
    let mut headers = vec!["s".to_string()];
    headers.extend(complex_headers("exact_", dim));
    headers.extend(complex_headers("approx_", dim));
    headers.extend(["residual".to_string(), "norm_drift".to_string()]);
    let mut table = Table::new(headers);
    for (k, s) in d.grid().points().enumerate() {
        let mut row = vec![s];
        push_vector(&mut row, &reference.states[k]);
        push_vector(&mut row, &approx[k]);
        row.push(res.per_node[k]);
        row.push(reference.norm_drift[k]);
        table.push(row);
    }
    Ok(Report {
        command: "evolve",
        table,
        summary: json!({
            "v": v,
            "order": c.order,
            "nodes": c.nodes,
            "sup_residual": res.sup,
            "final_residual": res.per_node.last(),
            "max_component_error": res.max_component,
            "max_norm_drift": sup(reference.norm_drift.iter().copied()),
            "reference": reference.method,
            "rk4_substeps": reference.substeps,
        }),
    })
}

/// `U^n(s)` for every level and the corrected ground holonomy `V⁽⁰⁾(s)`.
pub fn holonomy(c: &RunConfig) -> CliResult<Report> {
    let model = Model::from_config(c)?;
    let v = c.v();
    let d = model.build(c, c.order.max(1))?;
    let ch = d.corrected_holonomy(v)?;
    let dims = d.path().dims().to_vec();

    let mut headers = vec!["s".to_string()];
    for (n, &dn) in dims.iter().enumerate() {
        headers.extend(matrix_headers(&format!("u{n}"), dn, dn));
    }
    headers.extend(matrix_headers("v0", dims[0], dims[0]));
    headers.push("v0_unitarity".into());
    let mut table = Table::new(headers);
    for (k, s) in d.grid().points().enumerate() {
        let mut row = vec![s];
        for h in d.holonomies() {
            push_matrix(&mut row, h.at(k));
        }
        push_matrix(&mut row, &ch.v0[k]);
        row.push(ch.unitarity_deviation_at(k));
        table.push(row);
    }

    let levels: Vec<Value> = d
        .holonomies()
        .iter()
        .enumerate()
        .map(|(n, h)| {
            json!({
                "level": n,
                "dim": dims[n],
                "final": matrix_json(h.last()),
                "cyclic": matrix_json(&d.cyclic_holonomy(n)),
                "max_unitarity_deviation": h.max_unitarity_deviation(),
            })
        })
        .collect();
    let reference = model.holonomy_errors(&d, Some(&ch.v0), c).map(|(u, v0)| {
        json!({ "u0_max_entry_error": u, "v0_max_entry_error": v0 })
    });
    Ok(Report {
        command: "holonomy",
        table,
        summary: json!({
            "v": v,
            "nodes": c.nodes,
            "levels": levels,
            "v0_final": matrix_json(ch.v0.last().expect("non-empty grid")),
            "v0_max_unitarity_deviation": ch.max_unitarity_deviation(),
            "closed_form_comparison": reference,
        }),
    })
}

/// Each order `Ψ⁽ᵖ⁾` separately and the partial sum.
pub fn dapt(c: &RunConfig) -> CliResult<Report> {
    let model = Model::from_config(c)?;
    let v = c.v();
    let d = model.build(c, c.order)?;
    let orders = (0..=c.order)
        .map(|p| d.computational(&d.state(p, v)?, 0))
        .collect::<dapt_core::Result<Vec<_>>>()?;
    let series = d.computational(&d.series(c.order, v)?, 0)?;

    let dim = series[0].len();
    let mut headers = vec!["s".to_string()];
    for p in 0..=c.order {
        headers.extend(complex_headers(&format!("psi{p}_"), dim));
    }
    headers.extend(complex_headers("series_", dim));
    let mut table = Table::new(headers);
    for (k, s) in d.grid().points().enumerate() {
        let mut row = vec![s];
        for states in &orders {
            push_vector(&mut row, &states[k]);
        }
        push_vector(&mut row, &series[k]);
        table.push(row);
    }
    let per_order: Vec<Value> = orders
        .iter()
        .enumerate()
        .map(|(p, states)| {
            json!({
                "order": p,
                "start_norm": vec_norm(&states[0]),
                "max_norm": sup(states.iter().map(vec_norm)),
            })
        })
        .collect();
    Ok(Report {
        command: "dapt",
        table,
        summary: json!({
            "v": v,
            "nodes": c.nodes,
            "dims": d.path().dims(),
            "energies_at_start": d.path().frame(0).energies(),
            "orders": per_order,
            "series_final_norm": vec_norm(series.last().expect("non-empty grid")),
        }),
    })
}

/// Adiabaticity margins along the path.
pub fn validate(c: &RunConfig) -> CliResult<Report> {
    let model = Model::from_config(c)?;
    let v = c.v();
    let d = model.build(c, 0)?;
    let r = d.validity(v, c.threshold)?;

    let mut headers = vec!["s".to_string()];
    headers.extend((0..r.q1.len()).map(|g| format!("q1_g{g}")));
    for (n, per_level) in r.q2.iter().enumerate() {
        headers.extend((0..per_level.len()).map(|g| format!("q2_n{}_g{g}", n + 1)));
    }
    let mut table = Table::new(headers);
    for (k, s) in d.grid().points().enumerate() {
        let mut row = vec![s];
        row.extend(r.q1.iter().map(|q| q[k]));
        row.extend(r.q2.iter().flatten().map(|q| q[k]));
        table.push(row);
    }
    Ok(Report {
        command: "validate",
        table,
        summary: json!({
            "v": v,
            "threshold": r.threshold,
            "q1_sup": r.q1_sup,
            "q2_sup": r.q2_sup,
            "q1_end": r.q1_end,
            "q2_end": r.q2_end,
            "max_sup": r.max_sup(),
            "max_end": r.max_end(),
            "adiabatic_ok": r.adiabatic_ok,
        }),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    /// The swept input: `w` for built-in models, `v` for sampled ones.
    pub rate: f64,
    pub v: f64,
    /// Residual of the order-`p` partial sum; NaN above the order cap.
    pub residuals: [f64; 3],
    pub margin_sup: f64,
    /// Closed-form holonomy error (`V⁽⁰⁾` when available, else `U⁰`); NaN
    /// without a closed form.
    pub holonomy_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub column: String,
    pub slope: f64,
    pub half_width: f64,
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub slopes: Vec<SlopeFit>,
}

const SWEEP_HEADERS: [&str; 7] = [
    "rate",
    "v",
    "residual_order0",
    "residual_order1",
    "residual_order2",
    "margin_sup",
    "holonomy_error",
];

impl SweepResult {
    pub fn report(&self) -> Report {
        let mut table = Table::new(SWEEP_HEADERS.iter().map(|h| h.to_string()).collect());
        for r in &self.rows {
            let mut row = vec![r.rate, r.v];
            row.extend(r.residuals);
            row.extend([r.margin_sup, r.holonomy_error]);
            table.push(row);
        }
        Report {
            command: "sweep",
            table,
            summary: serde_json::to_value(self).expect("sweep result serializes"),
        }
    }

    pub fn slope(&self, column: &str) -> Option<&SlopeFit> {
        self.slopes.iter().find(|f| f.column == column)
    }
}

/// Distinct, sorted and spanning a decade, or `InsufficientSweep`.
fn checked_sweep(values: &[f64]) -> CliResult<Vec<f64>> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let distinct = sorted.windows(2).all(|w| w[0] < w[1]);
    if !distinct || !sweep_is_sufficient(&sorted) {
        return Err(CliError::InsufficientSweep(values.to_vec()));
    }
    Ok(sorted)
}

fn fit_columns(x: &[f64], columns: &[(String, Vec<f64>)]) -> CliResult<Vec<SlopeFit>> {
    columns
        .iter()
        .map(|(name, y)| {
            let f = fit_loglog(x, y)?;
            Ok(SlopeFit {
                column: name.clone(),
                slope: f.slope,
                half_width: f.half_width,
                r_squared: f.r_squared,
                points: f.points,
            })
        })
        .collect()
}

fn sweep_point(base: &Model, d: &Dapt, c: &RunConfig, rate: f64) -> CliResult<SweepRow> {
    let pc = c.at_rate(rate);
    let local = base.rated(&pc)?;
    let model = local.as_ref().unwrap_or(base);
    let v = pc.v();
    let reference = model.reference(&ground_ket(d), d.grid(), v, &pc)?;
    let mut residuals = [f64::NAN; 3];
    for (p, slot) in residuals.iter_mut().enumerate().take(c.order + 1) {
        let approx = d.computational(&d.series(p, v)?, 0)?;
        *slot = residual(&reference.states, &approx)?.sup;
    }
    let v0 = if c.order >= 1 {
        Some(d.corrected_holonomy(v)?.v0)
    } else {
        None
    };
    let holonomy_error = match model.holonomy_errors(d, v0.as_deref(), &pc) {
        Some((_, Some(v_err))) => v_err,
        Some((u_err, None)) => u_err,
        None => f64::NAN,
    };
    Ok(SweepRow {
        rate,
        v,
        residuals,
        margin_sup: d.validity(v, c.threshold)?.max_sup(),
        holonomy_error,
    })
}

/// Residuals, margins and holonomy errors over the sweep values, with
/// log-log slopes of every computed residual order against `v`.
///
/// The correction blocks do not depend on `v`, so one pipeline build serves
/// every point; points run on a worker pool and only read it.
pub fn sweep(c: &RunConfig) -> CliResult<SweepResult> {
    let values = checked_sweep(&c.sweep)?;
    let model = Model::from_config(c)?;
    let d = model.build(c, c.order)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        values
            .par_iter()
            .map(|&x| sweep_point(&model, &d, c, x))
            .collect::<CliResult<Vec<_>>>()
    })?;
    let v: Vec<f64> = rows.iter().map(|r| r.v).collect();
    let columns: Vec<(String, Vec<f64>)> = (0..=c.order)
        .map(|p| (format!("residual_order{p}"), rows.iter().map(|r| r.residuals[p]).collect()))
        .collect();
    let slopes = fit_columns(&v, &columns)?;
    Ok(SweepResult { rows, slopes })
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// CSV with an abscissa column and one or more positive data columns.
    #[arg(long)]
    pub input: PathBuf,
    /// Abscissa column.
    #[arg(long, default_value = "v")]
    pub x: String,
    /// Data columns; by default every `residual_*` column that is not all NaN.
    #[arg(long, value_delimiter = ',')]
    pub y: Vec<String>,
    /// Output JSON; defaults to the input path with extension `fit.json`.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl FitArgs {
    pub fn json_path(&self) -> PathBuf {
        self.json.clone().unwrap_or_else(|| self.input.with_extension("fit.json"))
    }
}

/// Log-log slopes of columns of an existing table.
pub fn fit_order(a: &FitArgs) -> CliResult<Value> {
    let t = Table::read_csv(&a.input)?;
    let column = |name: &str| {
        t.column(name)
            .ok_or_else(|| CliError::Config(format!("{} has no column {name:?}", a.input.display())))
    };
    let x = column(&a.x)?;
    checked_sweep(&x)?;
    let names: Vec<String> = if a.y.is_empty() {
        t.headers
            .iter()
            .filter(|h| h.starts_with("residual_"))
            .filter(|h| t.column(h).is_some_and(|col| col.iter().any(|y| !y.is_nan())))
            .cloned()
            .collect()
    } else {
        a.y.clone()
    };
    if names.is_empty() {
        return Err(CliError::Config("no data columns to fit".into()));
    }
    let columns = names
        .iter()
        .map(|n| Ok((n.clone(), column(n)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let fits = fit_columns(&x, &columns)?;
    Ok(json!({
        "command": "fit-order",
        "version": VERSION,
        "config": a,
        "summary": { "x": a.x, "points": x.len(), "slopes": fits },
    }))
}
