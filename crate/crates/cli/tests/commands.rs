use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use dapt_cli::commands::{self, FitArgs};
use dapt_cli::config::ModelKind;
use dapt_cli::{exit, CliError, RunConfig, Table};
use dapt_core::models::GammaModel;
use dapt_core::numerics::{c64, CMatrix, CVector, Grid};
use dapt_core::source::SampledHamiltonian;

fn column_max(t: &Table, name: &str) -> f64 {
    t.column(name).unwrap().into_iter().fold(0.0, f64::max)
}

fn matrix_at(t: &Table, row: usize, prefix: &str, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |r, c| {
        let re = t.rows[row][t.column_index(&format!("{prefix}_{r}{c}_re")).unwrap()];
        let im = t.rows[row][t.column_index(&format!("{prefix}_{r}{c}_im")).unwrap()];
        c64(re, im)
    })
}

/// Hermitian, doubly degenerate, with off-diagonal mixing.
fn constant_h() -> CMatrix {
    let d = CMatrix::from_diagonal(&CVector::from_iterator(4, [-1.0, -1.0, 0.5, 0.5].map(|x| c64(x, 0.0))));
    let mut q = CMatrix::identity(4, 4);
    let (c, s) = (0.6, 0.8);
    q[(0, 0)] = c64(c, 0.0);
    q[(0, 2)] = c64(0.0, -s);
    q[(2, 0)] = c64(0.0, -s);
    q[(2, 2)] = c64(c, 0.0);
    &q * d * q.adjoint()
}

fn constant_file(dir: &Path) -> PathBuf {
    let path = dir.join("constant.txt");
    let h = constant_h();
    SampledHamiltonian::from_fn(&Grid::uniform(9).unwrap(), |_| h.clone())
        .unwrap()
        .write(&path)
        .unwrap();
    path
}

fn file_config(path: PathBuf, v: f64) -> RunConfig {
    RunConfig {
        model: ModelKind::File,
        hamiltonian: Some(path),
        v: Some(v),
        ..Default::default()
    }
}

#[test]
fn evolve_defaults_stay_close_to_exact() {
    let r = commands::evolve(&RunConfig::default()).unwrap();
    let sup = r.summary["sup_residual"].as_f64().unwrap();
    assert!(sup <= 1e-3, "{sup}");
    assert_eq!(column_max(&r.table, "residual"), sup);
    assert!(column_max(&r.table, "norm_drift") < 1e-12);
    assert_eq!(r.table.rows.len(), 2001);
}

#[test]
fn zeroth_order_is_exact_for_constant_hamiltonian() {
    let dir = tempfile::tempdir().unwrap();
    let c = RunConfig {
        order: 0,
        nodes: 201,
        ..file_config(constant_file(dir.path()), 0.01)
    };
    let r = commands::evolve(&c).unwrap();
    assert_eq!(r.summary["reference"], "rk4");
    let sup = r.summary["sup_residual"].as_f64().unwrap();
    assert!(sup <= 1e-9, "{sup}");
}

#[test]
fn missing_hamiltonian_file_is_io_error() {
    let c = file_config("/nonexistent/h.txt".into(), 0.01);
    let err = commands::evolve(&c).unwrap_err();
    assert!(matches!(err, CliError::Input { .. }), "{err}");
    assert_eq!(err.exit_code(), exit::IO);
}

#[test]
fn holonomy_matches_closed_form_after_one_period() {
    let c = RunConfig {
        nodes: 4001,
        w: 0.05,
        ..Default::default()
    };
    let r = commands::holonomy(&c).unwrap();
    let m = GammaModel::new(c.b, c.theta, c.w).unwrap();
    let last = r.table.rows.len() - 1;
    let u = matrix_at(&r.table, last, "u0", 2);
    let closed = m.wz(m.time(1.0));
    let err = (u - closed).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(err <= 1e-6, "{err}");
    let reported = r.summary["closed_form_comparison"]["u0_max_entry_error"].as_f64().unwrap();
    assert!(reported <= 1e-6, "{reported}");
}

#[test]
fn equatorial_field_gives_diagonal_holonomy() {
    let c = RunConfig {
        theta: PI / 2.0,
        nodes: 501,
        ..Default::default()
    };
    let r = commands::holonomy(&c).unwrap();
    for k in 0..r.table.rows.len() {
        let u = matrix_at(&r.table, k, "u0", 2);
        assert!(u[(0, 1)].norm() <= 1e-10 && u[(1, 0)].norm() <= 1e-10, "node {k}: {u}");
    }
}

#[test]
fn constant_hamiltonian_has_trivial_holonomy() {
    let dir = tempfile::tempdir().unwrap();
    let c = RunConfig {
        nodes: 101,
        ..file_config(constant_file(dir.path()), 0.05)
    };
    let r = commands::holonomy(&c).unwrap();
    for k in 0..r.table.rows.len() {
        for prefix in ["u0", "u1"] {
            let u = matrix_at(&r.table, k, prefix, 2);
            let dev = (u - CMatrix::identity(2, 2)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(dev <= 1e-10, "{prefix} at node {k}: {dev}");
        }
    }
}

#[test]
fn dapt_orders_vanish_at_start_and_sum_to_series() {
    let c = RunConfig {
        order: 2,
        nodes: 801,
        ..Default::default()
    };
    let r = commands::dapt(&c).unwrap();
    let v = c.v();
    let orders = r.summary["orders"].as_array().unwrap();
    assert!((orders[0]["start_norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    for o in &orders[1..] {
        assert!(o["start_norm"].as_f64().unwrap() < 1e-10);
    }
    for row in [0, 400, 800] {
        for k in 0..4 {
            for part in ["re", "im"] {
                let get = |name: String| r.table.rows[row][r.table.column_index(&name).unwrap()];
                let sum = get(format!("psi0_{k}_{part}"))
                    + v * get(format!("psi1_{k}_{part}"))
                    + v * v * get(format!("psi2_{k}_{part}"));
                assert!((sum - get(format!("series_{k}_{part}"))).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn validate_flags_slow_and_fast_rotation() {
    let slow = commands::validate(&RunConfig::default()).unwrap();
    assert_eq!(slow.summary["adiabatic_ok"], true);
    let fast = commands::validate(&RunConfig {
        w: 10.0,
        ..Default::default()
    })
    .unwrap();
    assert_eq!(fast.summary["adiabatic_ok"], false);
}

#[test]
fn margins_halve_with_the_rate() {
    let sup = |w: f64| {
        let r = commands::validate(&RunConfig {
            w,
            nodes: 4001,
            ..Default::default()
        })
        .unwrap();
        r.summary["max_sup"].as_f64().unwrap()
    };
    let ratio = sup(0.005) / sup(0.01);
    assert!((ratio - 0.5).abs() <= 0.025, "{ratio}");
}

#[test]
fn sweep_recovers_first_and_second_order() {
    let s = commands::sweep(&RunConfig::default()).unwrap();
    let v: Vec<f64> = s.rows.iter().map(|r| r.v).collect();
    assert!(v.windows(2).all(|w| w[0] < w[1]));
    let s0 = s.slope("residual_order0").unwrap().slope;
    let s1 = s.slope("residual_order1").unwrap().slope;
    assert!((s0 - 1.0).abs() <= 0.1, "{s0}");
    assert!((s1 - 2.0).abs() <= 0.2, "{s1}");
    assert!(s.slope("residual_order2").is_none());
    assert!(s.rows.iter().all(|r| r.residuals[2].is_nan()));
}

#[test]
fn sweep_recovers_third_order() {
    let c = RunConfig {
        order: 2,
        nodes: 100_001,
        ..Default::default()
    };
    let s = commands::sweep(&c).unwrap();
    let s2 = s.slope("residual_order2").unwrap().slope;
    assert!((s2 - 3.0).abs() <= 0.3, "{s2}");
}

#[test]
fn duplicate_or_narrow_sweeps_are_refused() {
    for values in [
        vec![1e-3, 1e-3, 1e-2, 3e-2, 1e-1],
        vec![1e-2, 2e-2, 3e-2, 5e-2],
        vec![1e-3, 1e-1],
    ] {
        let err = commands::sweep(&RunConfig {
            sweep: values,
            ..Default::default()
        })
        .unwrap_err();
        assert!(matches!(err, CliError::InsufficientSweep(_)));
        assert_eq!(err.exit_code(), exit::INSUFFICIENT_SWEEP);
    }
}

#[test]
fn sweep_on_sampled_input_uses_rk4_reference() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gamma.txt");
    let m = GammaModel::new(1.0, PI / 3.0, 1.0).unwrap();
    SampledHamiltonian::from_fn(&Grid::uniform(2001).unwrap(), |s| m.hamiltonian_at_phase(2.0 * PI * s))
        .unwrap()
        .write(&path)
        .unwrap();
    let c = RunConfig {
        order: 1,
        nodes: 1001,
        sweep: vec![2e-3, 5e-3, 1e-2, 2e-2],
        ..file_config(path, 0.01)
    };
    let s = commands::sweep(&c).unwrap();
    assert!(s.rows.iter().all(|r| r.holonomy_error.is_nan()));
    let s0 = s.slope("residual_order0").unwrap().slope;
    let s1 = s.slope("residual_order1").unwrap().slope;
    assert!((s0 - 1.0).abs() <= 0.1, "{s0}");
    assert!((s1 - 2.0).abs() <= 0.2, "{s1}");
}

#[test]
fn written_csv_reads_back_exactly_and_json_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let c = RunConfig {
        nodes: 301,
        order: 2,
        out_dir: dir.path().to_path_buf(),
        ..Default::default()
    };
    for report in [commands::evolve(&c).unwrap(), commands::holonomy(&c).unwrap()] {
        let csv = c.csv_path(report.command);
        let json = c.json_path(report.command);
        report.write(&csv, &json, &c).unwrap();
        assert_eq!(Table::read_csv(&csv).unwrap(), report.table);
        let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        assert!(!value["version"].as_str().unwrap().is_empty());
        let echoed: RunConfig = serde_json::from_value(value["config"].clone()).unwrap();
        assert_eq!(echoed, c);
    }
}

#[test]
fn fit_order_reproduces_sweep_slopes_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let c = RunConfig::default();
    let s = commands::sweep(&c).unwrap();
    let csv = dir.path().join("sweep.csv");
    s.report().write(&csv, &dir.path().join("sweep.json"), &c).unwrap();
    let fit = commands::fit_order(&FitArgs {
        input: csv,
        x: "v".into(),
        y: vec![],
        json: None,
    })
    .unwrap();
    let slopes = fit["summary"]["slopes"].as_array().unwrap();
    assert_eq!(slopes.len(), 2);
    for f in slopes {
        let name = f["column"].as_str().unwrap();
        assert_eq!(f["slope"].as_f64().unwrap(), s.slope(name).unwrap().slope);
    }
}
