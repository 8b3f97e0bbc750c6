//! Time reparameterization linking the constant-coefficient flow `v(τ)` to the
//! coupled pair `(u(t), m_c(t))`.
//!
//! With `g(τ) = ∫(v(τ) − u₀) dμ`, `q_c(τ) = (m_c(0)² − 2g(τ))^{1/2}` and
//! `t(τ) = ∫₀^τ q_c`, the reconstruction is `u(t) = v(τ(t))`, `m_c(t) = q_c(τ(t))`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{kernel_coefficient, radial_moment, HarmonicField, Sector};
use crate::grid::{EquilibriumWeights, RadialGrid};
use crate::quadrature::gauss_legendre;
use crate::spectral::{EigenSystem, MassShift, TrajectoryRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct SamplePolicy {
    pub tau_min: f64,
    pub tau_max: f64,
    pub per_decade: usize,
}

impl Default for SamplePolicy {
    fn default() -> Self {
        SamplePolicy {
            tau_min: 1e-9,
            tau_max: 1e4,
            per_decade: 20,
        }
    }
}

impl SamplePolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_min > 0.0 && self.tau_max > self.tau_min && self.tau_max.is_finite()) {
            return Err(Error::config("tau", "need 0 < tau_min < tau_max < ∞"));
        }
        if self.per_decade == 0 {
            return Err(Error::config("tau.per_decade", "must be positive"));
        }
        Ok(())
    }

    /// `0` followed by geometric samples from `tau_min` to `tau_max`.
    pub fn samples(&self) -> Vec<f64> {
        let decades = (self.tau_max / self.tau_min).log10();
        let n = (decades * self.per_decade as f64).ceil().max(1.0) as usize;
        let mut out = Vec::with_capacity(n + 2);
        out.push(0.0);
        for i in 0..=n {
            let x = self.tau_min * 10f64.powf(decades * i as f64 / n as f64);
            out.push(x);
        }
        *out.last_mut().unwrap() = self.tau_max;
        out
    }
}

/// `g(τ) = m₀(τ) − m₀(0)` for sector (0, 0) of a trajectory record.
pub fn gas_mass_shift(traj: &TrajectoryRecord) -> Result<Vec<f64>> {
    let s = traj.sector(Sector::RADIAL)?;
    let m0 = s.m0[0];
    Ok(s.m0.iter().map(|m| m - m0).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakdown {
    pub tau_star: f64,
    pub g_at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// `m_c0² − 2 sup g`.
    pub margin: f64,
    pub sup_g: f64,
    /// Where the supremum is attained; `None` means at `τ = ∞`.
    pub tau_sup: Option<f64>,
    /// Set when `|margin| ≤ 1%` of `m_c0²`.
    pub caveat: bool,
    pub breakdown: Option<Breakdown>,
    /// Sample points added around local maxima of `g`.
    pub refined: Vec<f64>,
}

/// Decides `m_c0² > 2 sup_τ g(τ)` from samples, refinements near sampled
/// maxima and the asymptote.
pub fn check_admissibility(
    m_c0: f64,
    shift: &dyn MassShift,
    taus: &[f64],
    n_star: Option<f64>,
) -> Result<Admissibility> {
    if !(m_c0.is_finite() && m_c0 > 0.0) {
        return Err(Error::config("m_c0", "condensate mass must be positive"));
    }
    let g: Vec<f64> = taus.iter().map(|&t| shift.g(t)).collect();
    let mut refined = Vec::new();
    for i in 1..taus.len().saturating_sub(1) {
        if g[i] >= g[i - 1] && g[i] >= g[i + 1] && (g[i] > g[i - 1] || g[i] > g[i + 1]) {
            if let Some(t) = local_max(shift, taus[i - 1], taus[i + 1]) {
                refined.push(t);
            }
        }
    }
    let mut sup = f64::NEG_INFINITY;
    let mut tau_sup = None;
    let extra: Vec<(f64, f64)> = refined.iter().map(|&t| (t, shift.g(t))).collect();
    for (t, v) in taus.iter().copied().zip(g.iter().copied()).chain(extra) {
        if v > sup {
            sup = v;
            tau_sup = Some(t);
        }
    }
    if let Some(ns) = n_star {
        if ns >= sup {
            sup = ns;
            tau_sup = None;
        }
    }
    let threshold = m_c0 * m_c0;
    let margin = threshold - 2.0 * sup;
    let admissible = margin > 0.0;
    let breakdown = if admissible {
        None
    } else {
        let mut pts: Vec<f64> = taus.iter().copied().chain(refined.iter().copied()).collect();
        pts.sort_by(f64::total_cmp);
        find_breakdown(m_c0, shift, &pts)
    };
    Ok(Admissibility {
        admissible,
        margin,
        sup_g: sup,
        tau_sup,
        caveat: margin.abs() <= 0.01 * threshold,
        breakdown,
        refined,
    })
}

fn local_max(shift: &dyn MassShift, a: f64, b: f64) -> Option<f64> {
    let (mut lo, mut hi) = (a, b);
    if !(shift.dg(lo) > 0.0 && shift.dg(hi) < 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if shift.dg(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn find_breakdown(m_c0: f64, shift: &dyn MassShift, pts: &[f64]) -> Option<Breakdown> {
    let h = |t: f64| m_c0 * m_c0 - 2.0 * shift.g(t);
    let mut prev = 0.0;
    let mut hit = None;
    for &t in pts {
        if h(t) <= 0.0 {
            hit = Some(t);
            break;
        }
        prev = t;
    }
    if hit.is_none() {
        // The crossing lies beyond the sampled horizon.
        let mut t = pts.last().copied().unwrap_or(1.0).max(1.0);
        for _ in 0..200 {
            t *= 2.0;
            if h(t) <= 0.0 {
                hit = Some(t);
                break;
            }
            prev = t;
        }
    }
    let (mut lo, mut hi) = (prev, hit?);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(Breakdown {
        tau_star: hi,
        g_at: shift.g(hi),
    })
}

const GL_POINTS: usize = 10;

#[derive(Clone)]
pub struct TimeChangeMap {
    pub m_c0: f64,
    pub tau: Vec<f64>,
    pub g: Vec<f64>,
    pub q_c: Vec<f64>,
    pub t: Vec<f64>,
    /// `(m_c0² − 2 lim g)^{1/2}` when the limit is known.
    pub q_inf: Option<f64>,
    pub verdict: Admissibility,
    shift: Arc<dyn MassShift>,
    gl: (Vec<f64>, Vec<f64>),
}

impl std::fmt::Debug for TimeChangeMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimeChangeMap")
            .field("m_c0", &self.m_c0)
            .field("samples", &self.tau.len())
            .field("q_inf", &self.q_inf)
            .field("verdict", &self.verdict)
            .finish()
    }
}

/// Builds `q_c` and `t(τ)` on `taus` (plus refinements), refusing inadmissible data.
pub fn build_map(m_c0: f64, shift: Arc<dyn MassShift>, taus: &[f64]) -> Result<TimeChangeMap> {
    if taus.first() != Some(&0.0) || taus.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("τ samples must start at 0 and increase".into()));
    }
    let limit = shift.limit();
    let verdict = check_admissibility(m_c0, shift.as_ref(), taus, limit)?;
    if !verdict.admissible {
        let b = verdict.breakdown.unwrap_or(Breakdown {
            tau_star: f64::INFINITY,
            g_at: verdict.sup_g,
        });
        return Err(Error::Inadmissible {
            tau_star: b.tau_star,
            g_at: b.g_at,
        });
    }
    let mut tau: Vec<f64> = taus.iter().copied().chain(verdict.refined.iter().copied()).collect();
    tau.sort_by(f64::total_cmp);
    tau.dedup();
    let gl = gauss_legendre(GL_POINTS);
    let mut map = TimeChangeMap {
        m_c0,
        g: tau.iter().map(|&s| shift.g(s)).collect(),
        q_c: Vec::new(),
        t: Vec::with_capacity(tau.len()),
        q_inf: limit.map(|l| (m_c0 * m_c0 - 2.0 * l).sqrt()),
        tau,
        verdict,
        shift,
        gl,
    };
    map.q_c = map.g.iter().map(|g| (m_c0 * m_c0 - 2.0 * g).sqrt()).collect();
    let mut acc = 0.0;
    map.t.push(0.0);
    for w in map.tau.windows(2) {
        acc += map.integral(w[0], w[1]);
        map.t.push(acc);
    }
    Ok(map)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inversion {
    pub tau: f64,
    /// The requested `t` lies beyond the last sample.
    pub extrapolated: bool,
}

impl TimeChangeMap {
    pub fn q_at(&self, tau: f64) -> f64 {
        (self.m_c0 * self.m_c0 - 2.0 * self.shift.g(tau)).sqrt()
    }

    pub fn g_at(&self, tau: f64) -> f64 {
        self.shift.g(tau)
    }

    pub fn shift(&self) -> &dyn MassShift {
        self.shift.as_ref()
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        let (x, w) = &self.gl;
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        x.iter().zip(w).map(|(x, w)| w * self.q_at(c + h * x)).sum::<f64>() * h
    }

    fn tail_slope(&self) -> f64 {
        self.q_inf.unwrap_or(*self.q_c.last().unwrap())
    }

    /// `t(τ)` at an arbitrary `τ ≥ 0`.
    pub fn t_of(&self, tau: f64) -> Result<f64> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("τ must be non-negative, got {tau}")));
        }
        let last = self.tau.len() - 1;
        if tau >= self.tau[last] {
            return Ok(self.t[last] + self.tail_slope() * (tau - self.tau[last]));
        }
        let i = self.tau.partition_point(|&s| s <= tau) - 1;
        Ok(self.t[i] + self.integral(self.tau[i], tau))
    }

    /// Solves `t(τ) = t` by bracketing and safeguarded Newton steps.
    pub fn invert(&self, t: f64) -> Result<Inversion> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("t must be non-negative, got {t}")));
        }
        if t == 0.0 {
            return Ok(Inversion {
                tau: 0.0,
                extrapolated: false,
            });
        }
        let last = self.tau.len() - 1;
        if t >= self.t[last] {
            return Ok(Inversion {
                tau: self.tau[last] + (t - self.t[last]) / self.tail_slope(),
                extrapolated: t > self.t[last],
            });
        }
        let i = self.t.partition_point(|&s| s <= t) - 1;
        let (mut lo, mut hi) = (self.tau[i], self.tau[i + 1]);
        let base = self.t[i];
        let frac = (t - base) / (self.t[i + 1] - base);
        let mut x = lo + frac * (hi - lo);
        let tol = 1e-14 * (1.0 + t);
        for _ in 0..100 {
            let f = base + self.integral(self.tau[i], x) - t;
            if f.abs() <= tol {
                break;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let step = x - f / self.q_at(x);
            x = if step > lo && step < hi {
                step
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        Ok(Inversion {
            tau: x,
            extrapolated: false,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub t: Vec<f64>,
    pub tau: Vec<f64>,
    pub m_c: Vec<f64>,
    /// dμ-mass of sector (0, 0).
    pub mass_moment: Vec<f64>,
    /// Energy moment of sector (0, 0).
    pub energy_moment: Vec<f64>,
    /// `‖u(t) − u_∞‖_{L²(dμ)}` summed over sectors.
    pub dist_to_limit: Vec<f64>,
    pub extrapolated: Vec<bool>,
    pub profiles: Vec<HarmonicField>,
    pub m_c0: f64,
}

/// `u(t_j) = v(τ(t_j))` and `m_c(t_j)` from the mass ledger.
pub fn reconstruct(
    eig: &EigenSystem,
    map: &TimeChangeMap,
    grid: &RadialGrid,
    weights: &EquilibriumWeights,
    u0: &HarmonicField,
    t_list: &[f64],
) -> Result<Reconstruction> {
    let radial = u0.get(Sector::RADIAL);
    let mass0 = radial.map_or(0.0, |f| radial_moment(f, 0, grid, weights));
    let limits: Vec<(Sector, Vec<f64>)> = u0
        .sectors()
        .map(|(s, f)| {
            let c = kernel_coefficient(f, grid, weights);
            (s, grid.nodes().iter().map(|k| c * k).collect())
        })
        .collect();
    use rayon::prelude::*;
    let rows: Vec<(Inversion, HarmonicField)> = t_list
        .par_iter()
        .map(|&t| {
            let inv = map.invert(t)?;
            let mut u = HarmonicField::new(grid.len());
            for (s, f) in u0.sectors() {
                u.insert(s, eig.propagate(f, inv.tau)?)?;
            }
            Ok((inv, u))
        })
        .collect::<Result<_>>()?;
    let mut out = Reconstruction {
        t: t_list.to_vec(),
        tau: Vec::new(),
        m_c: Vec::new(),
        mass_moment: Vec::new(),
        energy_moment: Vec::new(),
        dist_to_limit: Vec::new(),
        extrapolated: Vec::new(),
        profiles: Vec::new(),
        m_c0: map.m_c0,
    };
    for (inv, u) in rows {
        let (m0, m1) = match u.get(Sector::RADIAL) {
            Some(f) => (
                radial_moment(f, 0, grid, weights),
                radial_moment(f, 1, grid, weights),
            ),
            None => (0.0, 0.0),
        };
        let q2 = map.m_c0 * map.m_c0 - 2.0 * (m0 - mass0);
        if !(q2 > 0.0) {
            return Err(Error::Inadmissible {
                tau_star: inv.tau,
                g_at: m0 - mass0,
            });
        }
        let mut d2 = 0.0;
        for (s, lim) in &limits {
            let f = u.require(*s)?;
            let diff: Vec<f64> = f.iter().zip(lim).map(|(a, b)| a - b).collect();
            d2 += weights.dot_mu(&diff, &diff);
        }
        out.tau.push(inv.tau);
        out.m_c.push(q2.sqrt());
        out.mass_moment.push(m0);
        out.energy_moment.push(m1);
        out.dist_to_limit.push(d2.sqrt());
        out.extrapolated.push(inv.extrapolated);
        out.profiles.push(u);
    }
    Ok(out)
}

/// Net exchange below this fraction of the gross rate counts as roundoff.
pub const NET_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `dm_c/dt + m_c⁻² ∫𝓛u dp`, the rate implied by the construction.
    pub r_mass: f64,
    /// `dm_c/dt + m_c⁻¹ ∫𝓛u dp`, the mass equation as printed.
    pub r_mass_literal: f64,
    /// `d/dt (m_c + ∫u dμ)`, the mass law read with `p_c = m_c`.
    pub r_conservation_literal: f64,
    /// `d/dt (m_c²/2 + ∫u dμ)`.
    pub r_conservation: f64,
    /// `d/dt ∫u |p| dμ`.
    pub r_energy: f64,
    /// `M ∂u/∂t − m_c⁻¹ 𝓛u` in `L²(dμ/Γ)`.
    pub r_ode: f64,
    /// `max |m_c² + 2 mass − (m_c² + 2 mass)(t₀)| / m_c(0)²`.
    pub r_ledger: f64,
    /// `max |energy − energy(0)| / |energy(0)|`.
    pub energy_drift: f64,
}

/// Finite-difference residuals on a uniform `t` grid. `damping_rate` holds a
/// per-node weight proportional to `Γ` for the `L²(dμ/Γ)` norm. Each residual
/// is relative to its net signal, or to the gross loss rate built from
/// `damping_rate · |u|` when the net signal is below `NET_FLOOR` of it.
pub fn residuals(
    rec: &Reconstruction,
    op_apply: &dyn Fn(&[f64]) -> Vec<f64>,
    weights: &EquilibriumWeights,
    damping_rate: &[f64],
) -> Result<Residuals> {
    let n = rec.t.len();
    if n < 3 {
        return Err(Error::Domain("residuals need at least 3 time samples".into()));
    }
    let dt = rec.t[1] - rec.t[0];
    if rec
        .t
        .windows(2)
        .any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1e-300) * (1.0 + w[1]))
    {
        return Err(Error::Domain("residuals need a uniform t grid".into()));
    }
    let radial: Vec<Option<&[f64]>> = rec.profiles.iter().map(|u| u.get(Sector::RADIAL)).collect();
    let exchange: Vec<f64> = radial
        .iter()
        .map(|u| u.map_or(0.0, |u| op_apply(u).iter().zip(&weights.rho).map(|(a, r)| a * r).sum()))
        .collect();
    let e0 = rec.energy_moment[0];
    let ledger0 = rec.m_c[0] * rec.m_c[0] + 2.0 * rec.mass_moment[0];
    let mut r = Residuals {
        r_mass: 0.0,
        r_mass_literal: 0.0,
        r_conservation_literal: 0.0,
        r_conservation: 0.0,
        r_energy: 0.0,
        r_ode: 0.0,
        r_ledger: 0.0,
        energy_drift: 0.0,
    };
    for j in 0..n {
        let ledger = rec.m_c[j] * rec.m_c[j] + 2.0 * rec.mass_moment[j];
        r.r_ledger = r.r_ledger.max((ledger - ledger0).abs() / (rec.m_c0 * rec.m_c0));
        if e0 != 0.0 {
            r.energy_drift = r.energy_drift.max((rec.energy_moment[j] - e0).abs() / e0.abs());
        }
    }
    // Net scales, and gross ones built from Σ μ_i (d_i/M_i) |u_i| for data
    // whose net exchange is roundoff.
    let (mut s_mass, mut s_lit, mut s_cons, mut s_ode) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut g_mass, mut g_cons, mut g_ode) = (0.0f64, 0.0f64, 0.0f64);
    for j in 1..n - 1 {
        let d = |v: &[f64]| (v[j + 1] - v[j - 1]) / (2.0 * dt);
        let mc = rec.m_c[j];
        let dmc = d(&rec.m_c);
        let dmass = d(&rec.mass_moment);
        let x = exchange[j];
        let loss = radial[j].map_or(0.0, |u| {
            u.iter().zip(&weights.mu).zip(damping_rate).map(|((u, m), r)| m * r * u.abs()).sum::<f64>()
        });
        r.r_mass = r.r_mass.max((dmc + x / (mc * mc)).abs());
        s_mass = s_mass.max((x / (mc * mc)).abs());
        g_mass = g_mass.max(loss / (mc * mc));
        r.r_mass_literal = r.r_mass_literal.max((dmc + x / mc).abs());
        s_lit = s_lit.max((x / mc).abs());
        r.r_conservation_literal = r.r_conservation_literal.max((dmc + dmass).abs());
        r.r_conservation = r.r_conservation.max((mc * dmc + dmass).abs());
        s_cons = s_cons.max(dmass.abs());
        g_cons = g_cons.max(loss / mc);
        r.r_energy = r.r_energy.max(d(&rec.energy_moment).abs());
        for (s, u) in rec.profiles[j].sectors() {
            let up = rec.profiles[j + 1].require(s)?;
            let um = rec.profiles[j - 1].require(s)?;
            let au = op_apply(u);
            let (mut num, mut den, mut gross) = (0.0, 0.0, 0.0);
            for i in 0..u.len() {
                let dudt = (up[i] - um[i]) / (2.0 * dt);
                let rhs = au[i] / (mc * weights.m[i]);
                let w = weights.mu[i] / damping_rate[i];
                num += w * (dudt - rhs).powi(2);
                den += w * rhs * rhs;
                gross += weights.mu[i] * damping_rate[i] * (u[i] / mc).powi(2);
            }
            r.r_ode = r.r_ode.max(num.sqrt());
            s_ode = s_ode.max(den.sqrt());
            g_ode = g_ode.max(gross.sqrt());
        }
    }
    let rel = |v: f64, net: f64, gross: f64| {
        let s = if net > NET_FLOOR * gross { net } else { gross };
        if s > 0.0 {
            v / s
        } else {
            v
        }
    };
    r.r_mass = rel(r.r_mass, s_mass, g_mass);
    r.r_mass_literal = rel(r.r_mass_literal, s_lit, g_cons);
    r.r_conservation_literal = rel(r.r_conservation_literal, s_cons, g_cons);
    r.r_conservation = rel(r.r_conservation, s_cons, g_cons);
    r.r_energy = rel(r.r_energy, e0.abs(), e0.abs());
    r.r_ode = rel(r.r_ode, s_ode, g_ode);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::LinearMassShift;

    fn policy(tau_max: f64) -> Vec<f64> {
        SamplePolicy {
            tau_min: 1e-6,
            tau_max,
            per_decade: 20,
        }
        .samples()
    }

    #[test]
    fn samples_are_increasing() {
        let s = SamplePolicy::default().samples();
        assert_eq!(s[0], 0.0);
        assert_eq!(*s.last().unwrap(), 1e4);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn closed_form_linear_shift() {
        let map = build_map(2.0, Arc::new(LinearMassShift { rate: 1.0 }), &policy(1.0)).unwrap();
        let t1 = map.t_of(1.0).unwrap();
        assert!((t1 - (8.0 - 2.0 * 2f64.sqrt()) / 3.0).abs() < 1e-10);
        let inv = map.invert(t1).unwrap();
        assert!((inv.tau - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_shift_is_linear() {
        let map = build_map(2.0, Arc::new(LinearMassShift { rate: 0.0 }), &policy(10.0)).unwrap();
        assert!((map.invert(3.0).unwrap().tau - 1.5).abs() < 1e-14);
        assert_eq!(map.invert(0.0).unwrap().tau, 0.0);
        assert!((map.t_of(4.0).unwrap() - 8.0).abs() < 1e-13);
        assert!(map.invert(-1.0).is_err());
        let far = map.invert(1e3).unwrap();
        assert!(far.extrapolated && (far.tau - 500.0).abs() < 1e-10);
        assert!(map.verdict.admissible && map.verdict.margin == 4.0);
    }

    #[test]
    fn linear_shift_breaks_down() {
        let e = build_map(2.0, Arc::new(LinearMassShift { rate: 1.0 }), &policy(10.0)).unwrap_err();
        match e {
            Error::Inadmissible { tau_star, .. } => assert!((tau_star - 2.0).abs() < 1e-12),
            e => panic!("{e:?}"),
        }
    }

    struct Bump;
    impl MassShift for Bump {
        fn g(&self, t: f64) -> f64 {
            5.0 * t * (-t).exp()
        }
        fn dg(&self, t: f64) -> f64 {
            5.0 * (1.0 - t) * (-t).exp()
        }
        fn limit(&self) -> Option<f64> {
            Some(0.0)
        }
    }

    #[test]
    fn transient_maximum_is_refined() {
        let taus = SamplePolicy {
            tau_min: 1e-3,
            tau_max: 100.0,
            per_decade: 3,
        }
        .samples();
        let v = check_admissibility(2.0, &Bump, &taus, Some(0.0)).unwrap();
        let sup = 5.0 * (-1.0f64).exp();
        assert!((v.sup_g - sup).abs() < 1e-12);
        assert!((v.tau_sup.unwrap() - 1.0).abs() < 1e-6);
        assert!(v.admissible);
        let v = check_admissibility(1.9, &Bump, &taus, Some(0.0)).unwrap();
        assert!(!v.admissible);
        let b = v.breakdown.unwrap();
        assert!((1.9f64 * 1.9 - 2.0 * Bump.g(b.tau_star)).abs() < 1e-10 && b.tau_star < 1.0);
    }
}
