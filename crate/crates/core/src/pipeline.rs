//! Stage orchestration: grid → operator → spectrum → trajectory → time change
//! → analysis, with the files each command writes.

use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::{
    check_rate_bound, decay_fit, depletion_scan, trusted_window, u_infinity, weighted_smallk_norm, AsymptoticState,
    BoundCheck, DecayFit, DepletionScan, SmallKNorm,
};
use crate::collision::{
    assemble_linearized, damping_coefficient, expected_half_ratio, q3_radial, DampingReport, LinearOperator,
    ReductionConstants,
};
use crate::config::RunConfig;
use crate::error::Result;
use crate::field::{HarmonicField, Sector};
use crate::gamma::{gamma_table, ArgumentScale, GammaTable};
use crate::grid::{bose, build_grid_with_rule, equilibrium_weights, EquilibriumWeights, RadialGrid, WeightRule};
use crate::output::{write_csv, write_json, write_metadata, write_text, Axis, Plot, Series, Table};
use crate::profile::parse_profile;
use crate::spectral::{spectral_decompose_with, EigenSystem, Eigensolver, LinearMassShift, MassShift, TrajectoryRecord};
use crate::timechange::{build_map, check_admissibility, reconstruct, residuals, Breakdown, Reconstruction, Residuals, TimeChangeMap};

/// Grid, weights and assembled operator.
pub struct Model {
    pub grid: RadialGrid,
    pub weights: EquilibriumWeights,
    pub op: LinearOperator,
}

pub fn build_model(cfg: &RunConfig) -> Result<Model> {
    let grid = build_grid_with_rule(cfg.grid.k_max, cfg.grid.n, cfg.grid.rule).map_err(|e| e.in_stage("grid"))?;
    let weights = equilibrium_weights(&grid);
    let consts = ReductionConstants::new(cfg.constants.n_c).map_err(|e| e.in_stage("operator"))?;
    let op = assemble_linearized(&grid, &weights, &consts);
    Ok(Model { grid, weights, op })
}

pub fn decompose(model: &Model, cfg: &RunConfig) -> Result<EigenSystem> {
    spectral_decompose_with(&model.op, &model.grid, cfg.tolerances.eigen, cfg.spectrum.solver, cfg.spectrum.max_sweeps).map_err(|e| e.in_stage("spectrum"))
}

/// Mass shift of sector (0, 0); identically zero when it is absent.
pub fn mass_shift(eig: &EigenSystem, u0: &HarmonicField) -> Arc<dyn MassShift> {
    match u0.get(Sector::RADIAL) {
        Some(f) => Arc::new(eig.mass_shift(f)),
        None => Arc::new(LinearMassShift { rate: 0.0 }),
    }
}

pub fn run_gamma(cfg: &RunConfig, out: Option<&Path>) -> Result<GammaTable> {
    let grid = build_grid_with_rule(cfg.grid.k_max, cfg.grid.n, cfg.grid.rule).map_err(|e| e.in_stage("grid"))?;
    let table = gamma_table(&grid, cfg.gamma.scale, cfg.tolerances.gamma).map_err(|e| e.in_stage("gamma"))?;
    if let Some(dir) = out {
        write_csv(dir, "gamma.csv", &gamma_csv(&table))?;
        finish(dir, cfg, "gamma")?;
    }
    Ok(table)
}

fn gamma_csv(table: &GammaTable) -> Table {
    let mut t = Table::new(&["x", "gamma", "err_estimate"]);
    for i in 0..table.x.len() {
        t.push(vec![table.x[i].into(), table.values[i].into(), table.errors[i].into()]);
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DampingSummary {
    pub mean_ratio: f64,
    pub expected_ratio: f64,
    pub spread_resolved: f64,
    pub spread_all: f64,
    pub resolved_rows: (usize, usize),
    /// Spread of `d/(M Γ(k))` over the same rows.
    pub full_argument_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChemicalPotentialProbe {
    pub mu: f64,
    /// `max |Q₃(n_μ)| / max row scale`.
    pub relative_max: f64,
    /// `(k, Q₃(n_μ)(k))` on the first nodes.
    pub small_k: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorSummary {
    pub n: usize,
    pub k_max: f64,
    pub h: f64,
    pub rule: WeightRule,
    pub c0: f64,
    pub eigensolver: Eigensolver,
    pub sweeps: usize,
    pub lambda_min: f64,
    pub lambda_max_raw: f64,
    pub raw_kernel_value: f64,
    pub slowest_rate: f64,
    pub kernel_count: usize,
    pub kernel_cosine_defect: f64,
    pub kernel_residual: f64,
    pub symmetry_defect: f64,
    pub energy_column_residual: f64,
    pub orthonormality_defect: f64,
    pub reconstruction_residual: f64,
    pub damping: DampingSummary,
    pub chemical_potential_probe: ChemicalPotentialProbe,
}

pub fn operator_summary(model: &Model, eig: &EigenSystem, cfg: &RunConfig) -> Result<(OperatorSummary, DampingReport)> {
    let Model { grid, weights, op } = model;
    let tol = cfg.tolerances.gamma;
    let half = gamma_table(grid, ArgumentScale::Half, tol).map_err(|e| e.in_stage("gamma"))?;
    let full = gamma_table(grid, ArgumentScale::Full, tol).map_err(|e| e.in_stage("gamma"))?;
    let report = damping_coefficient(op, grid, weights, &half)?;
    let control = damping_coefficient(op, grid, weights, &full)?;

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let f: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let g: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();

    let mu = -0.5;
    let n_mu: Vec<f64> = grid.nodes().iter().map(|&k| bose(k, mu)).collect();
    let q = q3_radial(&n_mu, grid, &op.consts)?;
    let scale = q.row_scale.iter().fold(0.0f64, |a, b| a.max(*b));
    let probe = ChemicalPotentialProbe {
        mu,
        relative_max: q.rate.iter().fold(0.0f64, |a, b| a.max(b.abs())) / scale,
        small_k: grid.nodes().iter().zip(&q.rate).take(5).map(|(k, r)| (*k, *r)).collect(),
    };

    let summary = OperatorSummary {
        n: grid.len(),
        k_max: grid.k_max(),
        h: grid.h(),
        rule: grid.rule(),
        c0: op.consts.c0,
        eigensolver: cfg.spectrum.solver,
        sweeps: eig.sweeps,
        lambda_min: eig.lambda_min(),
        lambda_max_raw: eig.lambda_max_raw(),
        raw_kernel_value: eig.raw_kernel_value,
        slowest_rate: eig.slowest_rate(),
        kernel_count: eig.kernel_count(1e-9),
        kernel_cosine_defect: 1.0 - eig.kernel_cosine(grid.nodes()),
        kernel_residual: op.kernel_residual(grid.nodes()),
        symmetry_defect: op.symmetry_defect(&f, &g),
        energy_column_residual: op.energy_column_residual(grid.nodes(), &f),
        orthonormality_defect: eig.orthonormality_defect(),
        reconstruction_residual: eig.reconstruction_residual(),
        damping: DampingSummary {
            mean_ratio: report.mean_ratio,
            expected_ratio: expected_half_ratio(&op.consts),
            spread_resolved: report.spread_resolved,
            spread_all: report.spread_all,
            resolved_rows: report.resolved,
            full_argument_spread: control.spread_resolved,
        },
        chemical_potential_probe: probe,
    };
    Ok((summary, report))
}

fn damping_csv(r: &DampingReport) -> Table {
    let mut t = Table::new(&["k", "d", "M", "gamma_half", "ratio"]);
    for i in 0..r.k.len() {
        t.push(vec![r.k[i].into(), r.d[i].into(), r.m[i].into(), r.gamma[i].into(), r.ratio[i].into()]);
    }
    t
}

pub fn run_operator(cfg: &RunConfig, out: Option<&Path>) -> Result<OperatorSummary> {
    let model = build_model(cfg)?;
    let eig = decompose(&model, cfg)?;
    let (summary, report) = operator_summary(&model, &eig, cfg)?;
    if let Some(dir) = out {
        write_csv(dir, "damping.csv", &damping_csv(&report))?;
        write_json(dir, "operator.json", &summary)?;
        if cfg.output.svg {
            write_text(dir, "spectrum.svg", &spectrum_plot(&eig).to_svg())?;
        }
        finish(dir, cfg, "operator")?;
    }
    Ok(summary)
}

pub fn run_evolve(cfg: &RunConfig, out: Option<&Path>) -> Result<TrajectoryRecord> {
    let model = build_model(cfg)?;
    let eig = decompose(&model, cfg)?;
    let u0 = cfg.initial_field(&model.grid).map_err(|e| e.in_stage("profile"))?;
    let traj = crate::spectral::trajectory(&eig, &model.grid, &model.weights, &u0, &cfg.tau.samples(), &cfg.output.snapshots)
        .map_err(|e| e.in_stage("trajectory"))?;
    if let Some(dir) = out {
        write_trajectory(dir, &traj, &model.grid)?;
        finish(dir, cfg, "evolve")?;
    }
    Ok(traj)
}

fn write_trajectory(dir: &Path, traj: &TrajectoryRecord, grid: &RadialGrid) -> Result<()> {
    let mut t = Table::new(&["tau", "sector", "m0", "m1", "dist_to_limit"]);
    for s in &traj.series {
        for j in 0..traj.tau.len() {
            t.push(vec![
                traj.tau[j].into(),
                s.sector.to_string().into(),
                s.m0[j].into(),
                s.m1[j].into(),
                s.dist_to_limit[j].into(),
            ]);
        }
    }
    write_csv(dir, "trajectory.csv", &t)?;
    if !traj.snapshots.is_empty() {
        let mut t = Table::new(&["tau", "sector", "k", "value"]);
        for (tau, field) in &traj.snapshots {
            for (sector, f) in field.sectors() {
                for (k, v) in grid.nodes().iter().zip(f) {
                    t.push(vec![(*tau).into(), sector.to_string().into(), (*k).into(), (*v).into()]);
                }
            }
        }
        write_csv(dir, "snapshots.csv", &t)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualStudy {
    pub dt: f64,
    pub coarse: Residuals,
    pub fine: Residuals,
    /// Coarse over fine residual, `≈ 4` for second-order differences.
    pub ratio_mass: f64,
    pub ratio_conservation: f64,
    pub ratio_ode: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub admissible: bool,
    pub margin: f64,
    pub caveat: bool,
    pub sup_g: f64,
    pub tau_sup: Option<f64>,
    pub breakdown: Option<Breakdown>,
    pub n_star: f64,
    pub qc_infinity: Option<f64>,
    pub t_final: Option<f64>,
    pub mc_final: Option<f64>,
    pub slope_u: Option<f64>,
    pub slope_mc: Option<f64>,
    pub decay_note: Option<String>,
    pub residuals: Option<ResidualStudy>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub l: u32,
    pub m: i32,
    pub energy_projection: f64,
    pub literal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCheck {
    pub t_final: f64,
    pub mc_final: f64,
    pub expected: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub coefficients: Vec<CoefficientRow>,
    pub n_star: f64,
    pub trusted_window_tau: (f64, f64),
    pub trusted_window_t: Option<(f64, f64)>,
    pub decay_u: Option<DecayFit>,
    pub decay_mc: Option<DecayFit>,
    pub decay_error: Option<String>,
    /// `‖u − u_∞‖ + |m_c² − m_c0² + 2N_*| ≤ (C_u + C_m)(1 + t/(m_c0² − 2N_*))^{-1/2}`.
    pub theorem2_bound: Option<BoundCheck>,
    pub smallk_norm: Option<SmallKNorm>,
    pub limit: Option<LimitCheck>,
}

/// Everything a full run produces.
pub struct RunArtifacts {
    pub model: Model,
    pub eig: EigenSystem,
    pub u0: HarmonicField,
    pub state: AsymptoticState,
    pub trajectory: TrajectoryRecord,
    pub map: Option<TimeChangeMap>,
    pub reconstruction: Option<Reconstruction>,
    pub report: RunReport,
    pub analysis: Analysis,
}

/// Runs every stage and, if `out` is given, writes every output file.
pub fn run_pipeline(cfg: &RunConfig, out: Option<&Path>) -> Result<RunArtifacts> {
    cfg.validate()?;
    let model = build_model(cfg)?;
    let eig = decompose(&model, cfg)?;
    let u0 = cfg.initial_field(&model.grid).map_err(|e| e.in_stage("profile"))?;
    let Model { grid, weights, op } = &model;
    let state = u_infinity(&u0, grid, weights);
    let taus = cfg.tau.samples();
    let trajectory = crate::spectral::trajectory(&eig, grid, weights, &u0, &taus, &cfg.output.snapshots)
        .map_err(|e| e.in_stage("trajectory"))?;
    let shift = mass_shift(&eig, &u0);
    let m_c0 = cfg.condensate.m_c0;

    let verdict = check_admissibility(m_c0, shift.as_ref(), &taus, shift.limit()).map_err(|e| e.in_stage("time-change"))?;
    let mut report = RunReport {
        admissible: verdict.admissible,
        margin: verdict.margin,
        caveat: verdict.caveat,
        sup_g: verdict.sup_g,
        tau_sup: verdict.tau_sup,
        breakdown: verdict.breakdown,
        n_star: state.n_star,
        qc_infinity: None,
        t_final: None,
        mc_final: None,
        slope_u: None,
        slope_mc: None,
        decay_note: None,
        residuals: None,
    };
    let mut analysis = Analysis {
        coefficients: state
            .coefficients
            .iter()
            .zip(&state.literal)
            .map(|((s, c), (_, lit))| CoefficientRow {
                l: s.l,
                m: s.m,
                energy_projection: *c,
                literal: *lit,
            })
            .collect(),
        n_star: state.n_star,
        trusted_window_tau: trusted_window(&eig, grid),
        trusted_window_t: None,
        decay_u: None,
        decay_mc: None,
        decay_error: None,
        theorem2_bound: None,
        smallk_norm: None,
        limit: None,
    };
    if let Some(sc) = cfg.sectors.iter().find(|s| s.l == 0 && s.m == 0) {
        let expr = parse_profile(&sc.profile)?;
        analysis.smallk_norm = Some(weighted_smallk_norm(&|k| expr.eval(k), cfg.grid.k_max, cfg.grid.n)?);
    }

    let (map, reconstruction) = if verdict.admissible {
        let map = build_map(m_c0, shift.clone(), &taus).map_err(|e| e.in_stage("time-change"))?;
        let times = cfg.output.times();
        let rec = reconstruct(&eig, &map, grid, weights, &u0, &times).map_err(|e| e.in_stage("reconstruct"))?;
        report.qc_infinity = map.q_inf;
        report.t_final = rec.t.last().copied();
        report.mc_final = rec.m_c.last().copied();

        let rate: Vec<f64> = op.damping.iter().zip(&weights.m).map(|(d, m)| d / m).collect();
        let apply = |f: &[f64]| op.apply(f);
        let dt = cfg.tolerances.residual_dt;
        let study = |dt: f64| -> Result<Residuals> {
            let r = reconstruct(&eig, &map, grid, weights, &u0, &cfg.residual_times(dt))?;
            residuals(&r, &apply, weights, &rate)
        };
        let coarse = study(dt).map_err(|e| e.in_stage("residuals"))?;
        let fine = study(0.5 * dt).map_err(|e| e.in_stage("residuals"))?;
        let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::NAN };
        report.residuals = Some(ResidualStudy {
            dt,
            coarse,
            fine,
            ratio_mass: ratio(coarse.r_mass, fine.r_mass),
            ratio_conservation: ratio(coarse.r_conservation, fine.r_conservation),
            ratio_ode: ratio(coarse.r_ode, fine.r_ode),
        });

        let (lo, hi) = analysis.trusted_window_tau;
        let window = (map.t_of(lo)?, map.t_of(hi)?);
        analysis.trusted_window_t = Some(window);
        let gap: Vec<f64> = rec
            .m_c
            .iter()
            .map(|m| (m * m - m_c0 * m_c0 + 2.0 * state.n_star).abs())
            .collect();
        match (decay_fit(&rec.t, &rec.dist_to_limit, window), decay_fit(&rec.t, &gap, window)) {
            (Ok(fu), Ok(fm)) => {
                report.slope_u = fu.slope;
                report.slope_mc = fm.slope;
                let d = m_c0 * m_c0 - 2.0 * state.n_star;
                if let (Some(cu), Some(cm)) = (fu.c_fit, fm.c_fit) {
                    let y: Vec<f64> = rec.dist_to_limit.iter().zip(&gap).map(|(a, b)| a + b).collect();
                    analysis.theorem2_bound = Some(check_rate_bound(&rec.t, &y, cu + cm, d));
                }
                if fu.stationary {
                    report.decay_note = Some("stationary".into());
                }
                analysis.decay_u = Some(fu);
                analysis.decay_mc = Some(fm);
            }
            (Err(e), _) | (_, Err(e)) => {
                report.decay_note = Some(e.to_string());
                analysis.decay_error = Some(e.to_string());
            }
        }
        if let (Some(&t), Some(&mc), Some(q)) = (rec.t.last(), rec.m_c.last(), map.q_inf) {
            analysis.limit = Some(LimitCheck {
                t_final: t,
                mc_final: mc,
                expected: q,
                relative_error: (mc / q - 1.0).abs(),
            });
        }
        (Some(map), Some(rec))
    } else {
        (None, None)
    };

    let artifacts = RunArtifacts {
        model,
        eig,
        u0,
        state,
        trajectory,
        map,
        reconstruction,
        report,
        analysis,
    };
    if let Some(dir) = out {
        emit_outputs(dir, cfg, &artifacts)?;
    }
    Ok(artifacts)
}

/// Writes the data files, plots and summaries of a full run.
pub fn emit_outputs(dir: &Path, cfg: &RunConfig, a: &RunArtifacts) -> Result<()> {
    let (summary, damping) = operator_summary(&a.model, &a.eig, cfg)?;
    write_csv(dir, "damping.csv", &damping_csv(&damping))?;
    write_json(dir, "operator.json", &summary)?;
    write_trajectory(dir, &a.trajectory, &a.model.grid)?;
    write_reconstruction(dir, cfg, a)?;
    write_json(dir, "analysis.json", &a.analysis)?;
    write_json(dir, "summary.json", &summary_json(&a.report))?;
    if cfg.output.svg {
        write_text(dir, "spectrum.svg", &spectrum_plot(&a.eig).to_svg())?;
        if let Some(rec) = &a.reconstruction {
            write_text(dir, "decay.svg", &decay_plot(rec, a.state.n_star).to_svg())?;
            write_text(dir, "mc.svg", &mc_plot(rec).to_svg())?;
        }
    }
    finish(dir, cfg, "pipeline")
}

fn write_reconstruction(dir: &Path, cfg: &RunConfig, a: &RunArtifacts) -> Result<()> {
    match &a.reconstruction {
        Some(rec) => {
            let mut t = Table::new(&["t", "tau", "m_c", "mass_moment", "energy_moment", "dist_to_limit"]);
            let mut d = Table::new(&["t", "tau", "dist_to_limit", "mc", "mc_sq_gap"]);
            let m_c0 = cfg.condensate.m_c0;
            for j in 0..rec.t.len() {
                t.push(vec![
                    rec.t[j].into(),
                    rec.tau[j].into(),
                    rec.m_c[j].into(),
                    rec.mass_moment[j].into(),
                    rec.energy_moment[j].into(),
                    rec.dist_to_limit[j].into(),
                ]);
                let gap = rec.m_c[j].powi(2) - m_c0 * m_c0 + 2.0 * a.state.n_star;
                d.push(vec![
                    rec.t[j].into(),
                    rec.tau[j].into(),
                    rec.dist_to_limit[j].into(),
                    rec.m_c[j].into(),
                    gap.into(),
                ]);
            }
            write_csv(dir, "reconstruct.csv", &t)?;
            write_csv(dir, "decay.csv", &d)?;
            write_json(dir, "reconstruct.json", &a.report)
        }
        None => write_json(dir, "breakdown.json", &a.report),
    }
}

/// The summary with its fixed key set.
pub fn summary_json(r: &RunReport) -> serde_json::Value {
    serde_json::json!({
        "admissible": r.admissible,
        "margin": r.margin,
        "n_star": r.n_star,
        "qc_infinity": r.qc_infinity,
        "slope_u": r.slope_u,
        "slope_mc": r.slope_mc,
        "residuals": r.residuals,
        "breakdown": r.breakdown,
        "decay_note": r.decay_note,
    })
}

pub fn run_reconstruct(cfg: &RunConfig, out: Option<&Path>) -> Result<RunReport> {
    let a = run_pipeline(cfg, None)?;
    if let Some(dir) = out {
        write_reconstruction(dir, cfg, &a)?;
        if cfg.output.svg {
            if let Some(rec) = &a.reconstruction {
                write_text(dir, "mc.svg", &mc_plot(rec).to_svg())?;
            }
        }
        finish(dir, cfg, "reconstruct")?;
    }
    Ok(a.report)
}

/// The full pipeline; with `out` every file of a run is written.
pub fn run_analyze(cfg: &RunConfig, out: Option<&Path>) -> Result<RunArtifacts> {
    run_pipeline(cfg, out)
}

pub fn run_scan(cfg: &RunConfig, out: Option<&Path>) -> Result<DepletionScan> {
    let model = build_model(cfg)?;
    let eig = decompose(&model, cfg)?;
    let u0 = cfg.initial_field(&model.grid).map_err(|e| e.in_stage("profile"))?;
    let shift = mass_shift(&eig, &u0);
    let s = &cfg.scan;
    let scan = depletion_scan(shift.as_ref(), &cfg.tau.samples(), s.m_c0_min, s.m_c0_max, s.count, s.rel_tol)
        .map_err(|e| e.in_stage("scan"))?;
    if let Some(dir) = out {
        let mut t = Table::new(&["m_c0", "verdict", "margin_or_tau_star"]);
        for r in &scan.rows {
            let verdict = if r.admissible { "admissible" } else { "breakdown" };
            t.push(vec![r.m_c0.into(), verdict.into(), r.margin_or_tau_star.into()]);
        }
        write_csv(dir, "scan.csv", &t)?;
        write_json(
            dir,
            "scan.json",
            &serde_json::json!({
                "threshold": scan.threshold,
                "sup_g": scan.sup_g,
                "stationary": scan.stationary,
                "bisection_steps": scan.bisection_steps,
            }),
        )?;
        finish(dir, cfg, "scan-depletion")?;
    }
    Ok(scan)
}

/// Echo of the effective configuration plus wall-clock metadata.
fn finish(dir: &Path, cfg: &RunConfig, command: &str) -> Result<()> {
    write_text(dir, "config.toml", &cfg.to_toml())?;
    write_metadata(dir, command)
}

fn spectrum_plot(eig: &EigenSystem) -> Plot {
    let pts = eig
        .values
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != eig.kernel_index)
        .rev()
        .enumerate()
        .map(|(i, (_, v))| ((i + 1) as f64, -v))
        .collect();
    Plot {
        title: "Decay rates of the symmetrized generator".into(),
        x_label: "mode (slowest first)".into(),
        y_label: "-lambda".into(),
        x_axis: Axis::Log,
        y_axis: Axis::Log,
        series: vec![Series {
            name: "-lambda_j".into(),
            points: pts,
        }],
    }
}

fn decay_plot(rec: &Reconstruction, n_star: f64) -> Plot {
    let m0 = rec.m_c0;
    Plot {
        title: "Relaxation toward the asymptotic state".into(),
        x_label: "1 + t".into(),
        y_label: "distance".into(),
        x_axis: Axis::Log,
        y_axis: Axis::Log,
        series: vec![
            Series {
                name: "||u - u_inf||".into(),
                points: rec.t.iter().zip(&rec.dist_to_limit).map(|(t, d)| (1.0 + t, *d)).collect(),
            },
            Series {
                name: "|m_c^2 - m_c0^2 + 2 N*|".into(),
                points: rec
                    .t
                    .iter()
                    .zip(&rec.m_c)
                    .map(|(t, m)| (1.0 + t, (m * m - m0 * m0 + 2.0 * n_star).abs()))
                    .collect(),
            },
        ],
    }
}

fn mc_plot(rec: &Reconstruction) -> Plot {
    Plot {
        title: "Condensate mass".into(),
        x_label: "1 + t".into(),
        y_label: "m_c".into(),
        x_axis: Axis::Log,
        y_axis: Axis::Linear,
        series: vec![Series {
            name: "m_c(t)".into(),
            points: rec.t.iter().zip(&rec.m_c).map(|(t, m)| (1.0 + t, *m)).collect(),
        }],
    }
}

/// Exit status of a finished run: 3 for a breakdown report, 0 otherwise.
pub fn report_exit_code(report: &RunReport) -> i32 {
    if report.breakdown.is_some() {
        3
    } else {
        0
    }
}
