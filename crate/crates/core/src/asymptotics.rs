//! Long-time state, decay-rate fits, the small-momentum condition and the
//! depletion threshold scan.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{kernel_coefficient, radial_moment, HarmonicField, Sector};
use crate::grid::{build_grid_with_rule, equilibrium_weights, EquilibriumWeights, RadialGrid, WeightRule};
use crate::spectral::{EigenSystem, MassShift};
use crate::timechange::check_admissibility;

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticState {
    /// Energy-preserving coefficients `⟨F₀, k⟩_μ / ⟨k, k⟩_μ` per sector.
    pub coefficients: Vec<(Sector, f64)>,
    /// `∫F₀ Y_{ℓm} dμ` taken literally.
    pub literal: Vec<(Sector, f64)>,
    pub profile: HarmonicField,
    pub n_star: f64,
}

impl AsymptoticState {
    pub fn coefficient(&self, sector: Sector) -> Option<f64> {
        self.coefficients.iter().find(|(s, _)| *s == sector).map(|c| c.1)
    }
}

pub fn u_infinity(u0: &HarmonicField, grid: &RadialGrid, weights: &EquilibriumWeights) -> AsymptoticState {
    let norm = (4.0 * std::f64::consts::PI).sqrt();
    let mut coefficients = Vec::new();
    let mut literal = Vec::new();
    let profile = u0.map_sectors(|s, f| {
        let c = kernel_coefficient(f, grid, weights);
        coefficients.push((s, c));
        literal.push((s, radial_moment(f, 0, grid, weights) / norm));
        grid.nodes().iter().map(|k| c * k).collect()
    });
    let n_star = n_star(u0, &profile, grid, weights);
    AsymptoticState {
        coefficients,
        literal,
        profile,
        n_star,
    }
}

/// `Σ_i (u_∞ − u₀)_i μ_i` over sector (0, 0); zero when that sector is absent.
pub fn n_star(u0: &HarmonicField, u_inf: &HarmonicField, grid: &RadialGrid, weights: &EquilibriumWeights) -> f64 {
    match (u0.get(Sector::RADIAL), u_inf.get(Sector::RADIAL)) {
        (Some(a), Some(b)) => radial_moment(b, 0, grid, weights) - radial_moment(a, 0, grid, weights),
        _ => 0.0,
    }
}

/// τ-range on which the discrete spectrum reproduces algebraic decay.
///
/// At time τ the distance is carried by modes near `k* = h/(2|λ_slow|τ)`.
/// The window keeps `2h ≤ k* ≤ 1/16`, clear of the grid cutoff below and of
/// the profile's curvature above.
pub fn trusted_window(eig: &EigenSystem, grid: &RadialGrid) -> (f64, f64) {
    let rate = -eig.slowest_rate();
    let h = grid.h();
    let lo = 8.0 * h / rate;
    let hi = 0.25 / rate;
    (lo, hi)
}

pub const MIN_WINDOW_RATIO: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    /// Fitted `y ≈ C (1+t)^slope`; `None` for stationary data.
    pub slope: Option<f64>,
    pub c_fit: Option<f64>,
    pub window: (f64, f64),
    pub points: usize,
    pub stationary: bool,
}

/// Least-squares slope of `log y` against `log(1+t)` over samples in `window`.
pub fn decay_fit(t: &[f64], y: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale <= 1e-13 {
        return Ok(DecayFit {
            slope: None,
            c_fit: None,
            window,
            points: 0,
            stationary: true,
        });
    }
    let hint = "increase N or reduce k_max so that h·|λ_slow|⁻¹ spans a wider range";
    if !(window.0 > 0.0 && window.1 >= MIN_WINDOW_RATIO * window.0) {
        return Err(Error::WindowTooShort(format!(
            "trusted window [{:.3e}, {:.3e}] is shorter than a factor {MIN_WINDOW_RATIO}; {hint}",
            window.0, window.1
        )));
    }
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(t, y)| **t >= window.0 && **t <= window.1 && **y > 0.0)
        .map(|(t, y)| ((1.0 + t).ln(), y.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::WindowTooShort(format!(
            "only {} samples inside [{:.3e}, {:.3e}]; {hint}",
            pts.len(),
            window.0,
            window.1
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(DecayFit {
        slope: Some(slope),
        c_fit: Some((my - slope * mx).exp()),
        window,
        points: pts.len(),
        stationary: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub holds: bool,
    /// `max_t y(t) / (C (1 + t/D)^{-1/2})`.
    pub worst_ratio: f64,
}

/// Checks `y(t) ≤ C (1 + t/D)^{-1/2}` on every sample.
pub fn check_rate_bound(t: &[f64], y: &[f64], c: f64, d: f64) -> BoundCheck {
    let worst = t
        .iter()
        .zip(y)
        .map(|(t, y)| y / (c / (1.0 + t / d).sqrt()))
        .fold(0.0f64, f64::max);
    BoundCheck {
        holds: worst <= 1.0,
        worst_ratio: worst,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallKNorm {
    pub value: f64,
    /// Values at `2N` and `4N`.
    pub refined: [f64; 2],
    /// The value keeps growing by a fixed amount per grid doubling.
    pub marginal: bool,
}

/// `Σ_{k_i<1} u_i² μ_i / k_i` at `N`, `2N` and `4N` on trapezoid grids. A node
/// sitting exactly on `k = 1` enters with half weight.
pub fn weighted_smallk_norm(u: &dyn Fn(f64) -> f64, k_max: f64, n: usize) -> Result<SmallKNorm> {
    let eval = |n: usize| -> Result<f64> {
        let g = build_grid_with_rule(k_max, n, WeightRule::Trapezoid)?;
        let w = equilibrium_weights(&g);
        let edge = 1e-9 * g.h();
        Ok(g
            .nodes()
            .iter()
            .zip(&w.mu)
            .map(|(k, mu)| {
                let chi = if *k < 1.0 - edge {
                    1.0
                } else if *k <= 1.0 + edge {
                    0.5
                } else {
                    0.0
                };
                chi * u(*k).powi(2) * mu / k
            })
            .sum())
    };
    let value = eval(n)?;
    let r1 = eval(2 * n)?;
    let r2 = eval(4 * n)?;
    let (d1, d2) = (r1 - value, r2 - r1);
    Ok(SmallKNorm {
        value,
        refined: [r1, r2],
        marginal: d1 > 1e-3 * value.abs() && d2 >= 0.75 * d1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub m_c0: f64,
    pub admissible: bool,
    /// Margin when admissible, breakdown τ* otherwise.
    pub margin_or_tau_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepletionScan {
    pub rows: Vec<ScanRow>,
    pub sup_g: f64,
    /// `None` when every `m_c0 > 0` is admissible.
    pub threshold: Option<f64>,
    pub stationary: bool,
    pub bisection_steps: usize,
}

/// Tabulates the verdict on `count` values across `[lo, hi]` and bisects the
/// admissibility boundary to `rel_tol` in `m_c0²`.
pub fn depletion_scan(
    shift: &dyn MassShift,
    taus: &[f64],
    lo: f64,
    hi: f64,
    count: usize,
    rel_tol: f64,
) -> Result<DepletionScan> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(Error::config("scan", "need 0 < m_c0_min < m_c0_max and at least 2 points"));
    }
    let limit = shift.limit();
    let verdict = |m: f64| check_admissibility(m, shift, taus, limit);
    let probe = verdict(hi)?;
    let sup_g = probe.sup_g;
    let g_scale = taus.iter().map(|&t| shift.g(t).abs()).fold(0.0f64, f64::max);
    let rows: Vec<ScanRow> = (0..count)
        .into_par_iter()
        .map(|i| {
            let m = lo + (hi - lo) * i as f64 / (count - 1) as f64;
            let v = verdict(m)?;
            Ok(ScanRow {
                m_c0: m,
                admissible: v.admissible,
                margin_or_tau_star: if v.admissible {
                    v.margin
                } else {
                    v.breakdown.map_or(f64::INFINITY, |b| b.tau_star)
                },
            })
        })
        .collect::<Result<_>>()?;
    if sup_g <= 1e-12 * g_scale.max(1e-300) || g_scale == 0.0 {
        return Ok(DepletionScan {
            rows,
            sup_g,
            threshold: None,
            stationary: g_scale == 0.0,
            bisection_steps: 0,
        });
    }
    let low = verdict(lo)?;
    if low.admissible || !probe.admissible {
        return Err(Error::config(
            "scan",
            format!(
                "range [{lo}, {hi}] does not bracket the threshold; measured sup g = {sup_g:.6e} \
                 (threshold m_c0 ≈ {:.6})",
                (2.0 * sup_g).sqrt()
            ),
        ));
    }
    let (mut a, mut b) = (lo, hi);
    let mut steps = 0;
    while (b * b - a * a) > rel_tol * a * a && steps < 200 {
        let mid = 0.5 * (a + b);
        if verdict(mid)?.admissible {
            b = mid;
        } else {
            a = mid;
        }
        steps += 1;
    }
    Ok(DepletionScan {
        rows,
        sup_g,
        threshold: Some(0.5 * (a + b)),
        stationary: false,
        bisection_steps: steps,
    })
}
