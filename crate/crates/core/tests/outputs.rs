use std::path::Path;
use std::process::Command;

use condensate_linear::acceptance::{ANISOTROPIC_CFG, DEFAULT_CFG, DEPLETION_CFG, SHIPPED, STATIONARY_CFG};
use condensate_linear::acceptance::compare_runs;
use condensate_linear::config::RunConfig;
use condensate_linear::field::Sector;
use condensate_linear::pipeline::{build_model, decompose, report_exit_code, run_evolve, run_pipeline};
use condensate_linear::spectral::MassShift;
use condensate_linear::timechange::gas_mass_shift;

fn cfg(text: &str) -> RunConfig {
    RunConfig::from_toml(text).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn fixed_schemas() {
    let dir = tempfile::tempdir().unwrap();
    run_pipeline(&cfg(DEFAULT_CFG), Some(dir.path())).unwrap();
    let decay = read(dir.path(), "decay.csv");
    assert_eq!(decay.lines().next(), Some("t,tau,dist_to_limit,mc,mc_sq_gap"));
    let rec = read(dir.path(), "reconstruct.csv");
    assert_eq!(rec.lines().next(), Some("t,tau,m_c,mass_moment,energy_moment,dist_to_limit"));
    assert_eq!(read(dir.path(), "trajectory.csv").lines().next(), Some("tau,sector,m0,m1,dist_to_limit"));
    assert_eq!(read(dir.path(), "damping.csv").lines().next(), Some("k,d,M,gamma_half,ratio"));

    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    for key in ["admissible", "margin", "n_star", "qc_infinity", "slope_u", "slope_mc", "residuals"] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }
    let analysis: serde_json::Value = serde_json::from_str(&read(dir.path(), "analysis.json")).unwrap();
    for key in ["coefficients", "n_star", "trusted_window_tau", "theorem2_bound", "smallk_norm"] {
        assert!(analysis.get(key).is_some(), "missing {key}");
    }

    let row: Vec<f64> = decay.lines().nth(5).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row.len(), 5);
    let digits = decay.lines().nth(5).unwrap().split(',').next().unwrap();
    assert_eq!(digits.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
}

#[test]
fn svg_is_xml_with_one_polyline_per_series() {
    let dir = tempfile::tempdir().unwrap();
    run_pipeline(&cfg(DEFAULT_CFG), Some(dir.path())).unwrap();
    for (name, series) in [("decay.svg", 2), ("mc.svg", 1), ("spectrum.svg", 1)] {
        let text = read(dir.path(), name);
        let doc = roxmltree::Document::parse(&text).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        let lines = doc.descendants().filter(|n| n.has_tag_name("polyline")).count();
        assert_eq!(lines, series, "{name}");
    }
}

#[test]
fn shipped_configs_are_deterministic() {
    for (name, text) in SHIPPED {
        let c = cfg(text);
        c.validate().unwrap();
        if name == "decay" {
            continue;
        }
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run_pipeline(&c, Some(a.path())).unwrap();
        run_pipeline(&c, Some(b.path())).unwrap();
        let (count, differ) = compare_runs(a.path(), b.path()).unwrap();
        assert!(count > 5 && differ.is_empty(), "{name}: {differ:?}");
    }
}

#[test]
fn echoed_config_reproduces_the_run() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_pipeline(&cfg(ANISOTROPIC_CFG), Some(a.path())).unwrap();
    let echo = RunConfig::load(&a.path().join("config.toml")).unwrap();
    assert_eq!(echo, cfg(ANISOTROPIC_CFG));
    run_pipeline(&echo, Some(b.path())).unwrap();
    let (_, differ) = compare_runs(a.path(), b.path()).unwrap();
    assert!(differ.is_empty(), "{differ:?}");
    let snaps = read(a.path(), "snapshots.csv");
    assert!(snaps.lines().any(|l| l.contains(",2:1,") || l.contains("(2,1)")), "{}", &snaps[..200]);
}

#[test]
fn stationary_data_do_not_move() {
    let a = run_pipeline(&cfg(STATIONARY_CFG), None).unwrap();
    assert!(a.report.admissible);
    let r = a.report.residuals.unwrap().coarse;
    for v in [r.r_mass, r.r_conservation, r.r_ode, r.r_energy, r.r_ledger, r.energy_drift] {
        assert!(v < 1e-10, "{r:?}");
    }
    let rec = a.reconstruction.unwrap();
    assert!(rec.m_c.iter().all(|m| (m - 1.0).abs() < 1e-12));
}

#[test]
fn depletion_gives_a_breakdown_report() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_pipeline(&cfg(DEPLETION_CFG), Some(dir.path())).unwrap();
    assert!(!a.report.admissible && a.reconstruction.is_none());
    assert_eq!(report_exit_code(&a.report), 3);
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "breakdown.json")).unwrap();
    let tau_star = report["breakdown"]["tau_star"].as_f64().unwrap();
    let g = report["breakdown"]["g_at"].as_f64().unwrap();
    assert!(tau_star > 0.0 && tau_star.is_finite());
    assert!((2.0 * g - 25.0).abs() < 1e-9);
}

#[test]
fn small_grid_is_rejected() {
    let e = RunConfig::from_toml("[grid]\nn = 4\n[[sector]]\nl = 0\nm = 0\nprofile = \"1\"\n[condensate]\nm_c0 = 1\n").unwrap_err();
    assert!(e.to_string().contains("N ≥ 8"), "{e}");
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn sampled_gas_mass_matches_the_spectral_shift() {
    let c = cfg(DEFAULT_CFG);
    let model = build_model(&c).unwrap();
    let eig = decompose(&model, &c).unwrap();
    let traj = run_evolve(&c, None).unwrap();
    let sampled = gas_mass_shift(&traj).unwrap();
    let f = c.initial_field(&model.grid).unwrap();
    let shift = eig.mass_shift(f.get(Sector::RADIAL).unwrap());
    for (tau, g) in traj.tau.iter().zip(&sampled) {
        assert!((g - shift.g(*tau)).abs() <= 1e-10 * (1.0 + g.abs()), "τ = {tau}");
    }
}

fn bin(args: &[&str], cwd: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_condensate"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let depletion = configs.join("depletion.cfg");
    let default = configs.join("default.cfg");
    assert_eq!(bin(&["reconstruct", "--config", depletion.to_str().unwrap(), "--out", "o"], d), 3);
    assert!(d.join("o/breakdown.json").exists());
    assert_eq!(bin(&["gamma", "--config", default.to_str().unwrap(), "--threads", "2", "--out", "g"], d), 0);
    assert!(d.join("g/gamma.csv").exists() && d.join("g/metadata.json").exists());
    std::fs::write(d.join("bad.cfg"), "[grid]\nn = 4\n").unwrap();
    assert_eq!(bin(&["operator", "--config", "bad.cfg"], d), 2);
    assert_eq!(bin(&["evolve"], d), 2);
    std::fs::write(d.join("bad2.cfg"), "[[sector]]\nl = 0\nm = 0\nprofile = \"1\"\n[condensate]\nm_c0 = 1\n[spectrum]\nmax_sweeps = 1\n").unwrap();
    assert_eq!(bin(&["operator", "--config", "bad2.cfg"], d), 4);
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/anisotropic.cfg");
    let config = config.to_str().unwrap();
    assert_eq!(bin(&["analyze", "--config", config, "--threads", "1", "--out", "one"], d), 0);
    assert_eq!(bin(&["analyze", "--config", config, "--threads", "4", "--out", "four"], d), 0);
    let (count, differ) = compare_runs(&d.join("one"), &d.join("four")).unwrap();
    assert!(count > 5 && differ.is_empty(), "{differ:?}");
}
