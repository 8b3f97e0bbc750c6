//! Collinear radial reduction of the three-wave operator and its linearization.
//!
//! With the phonon dispersion `ω = |p|` the deltas `δ(p−p₁−p₂) δ(ω−ω₁−ω₂)`
//! force `p₁, p₂` onto the ray of `p`. Integrating them out leaves, for radial
//! densities,
//!
//! ```text
//! Q₃(n)(k) = c₀ [ ∫₀^k a²(k−a)² B(k; a, k−a) da − 2 ∫₀^{k_max−k} a²(k+a)² B(k+a; k, a) da ]
//! B(a+b; a, b) = n_a n_b (1 + n_{a+b}) − (1 + n_a)(1 + n_b) n_{a+b}
//! ```
//!
//! Writing `n = n₀ + ε n₀(1+n₀) F` and differentiating at `ε = 0` gives
//! `dB = ρ₃(a,b) (F_a + F_b − F_{a+b})` with
//! `ρ₃(a,b) = n₀(a) n₀(b) (1 + n₀(a+b)) = 1/(8 sinh(a/2) sinh(b/2) sinh((a+b)/2))`.
//!
//! Both integrals are discretized with the pair weights
//! `c_{jl} = w_j w_l w_{j+l} / h` over node pairs `(j, l)` with `j + l ≤ N`. In
//! the `dp` pairing the operator becomes
//!
//! ```text
//! ⟨𝓛F, G⟩ = −4π c₀ Σ_{j,l} c_{jl} k_j² k_l² k_{j+l}² ρ₃ X_F X_G,   X_F = F_j + F_l − F_{j+l},
//! ```
//!
//! which is symmetric, non-positive, and annihilates `F = k` exactly.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::GammaTable;
use crate::grid::{EquilibriumWeights, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReductionConstants {
    /// Condensate density entering the azimuthal prefactor.
    pub n_c: f64,
    /// `c₀ = 2π / n_c^{3/2}`.
    pub c0: f64,
}

impl ReductionConstants {
    pub fn new(n_c: f64) -> Result<Self> {
        if !(n_c.is_finite() && n_c > 0.0) {
            return Err(Error::config("n_c", "condensate density must be positive"));
        }
        Ok(ReductionConstants {
            n_c,
            c0: 2.0 * std::f64::consts::PI / n_c.powf(1.5),
        })
    }

    pub fn with_c0(c0: f64) -> Result<Self> {
        if !(c0.is_finite() && c0 > 0.0) {
            return Err(Error::config("c0", "prefactor must be positive"));
        }
        Ok(ReductionConstants {
            n_c: (2.0 * std::f64::consts::PI / c0).powf(2.0 / 3.0),
            c0,
        })
    }
}

impl Default for ReductionConstants {
    fn default() -> Self {
        ReductionConstants::new(1.0).expect("unit density is valid")
    }
}

/// `1 / (8 sinh(a/2) sinh(b/2) sinh((a+b)/2))`.
pub fn rho3(a: f64, b: f64) -> f64 {
    0.125 / ((0.5 * a).sinh() * (0.5 * b).sinh() * (0.5 * (a + b)).sinh())
}

/// Symmetric pair kernel `w_j w_l w_{j+l}/h · k_j² k_l² k_{j+l}² ρ₃(k_j, k_l)`
/// for zero-based `j, l` with `j + l + 1 < N`.
fn pair_kernel(grid: &RadialGrid, j: usize, l: usize) -> f64 {
    let (j, l) = if j <= l { (j, l) } else { (l, j) };
    let s = j + l + 1;
    let k = grid.nodes();
    let w = grid.weights();
    let (a, b, c) = (k[j], k[l], k[s]);
    w[j] * w[l] * w[s] / grid.h() * (a * a) * (b * b) * (c * c) * rho3(a, b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Q3Profile {
    pub rate: Vec<f64>,
    /// Per-node magnitude `c₀ Σ |gain| + |loss|` of the terms that cancel in `B`.
    pub row_scale: Vec<f64>,
}

/// Pointwise collision rate for a radial occupation profile on the grid.
pub fn q3_radial(n: &[f64], grid: &RadialGrid, consts: &ReductionConstants) -> Result<Q3Profile> {
    let len = grid.len();
    if n.len() != len {
        return Err(Error::Domain(format!(
            "density has {} entries, grid has {len}",
            n.len()
        )));
    }
    let bad: Vec<usize> = n
        .iter()
        .enumerate()
        .filter(|(_, v)| !(v.is_finite() && **v >= 0.0))
        .map(|(i, _)| i + 1)
        .collect();
    if !bad.is_empty() {
        return Err(Error::Domain(format!(
            "density must be finite and non-negative; offending nodes {bad:?}"
        )));
    }
    let k = grid.nodes();
    let w = grid.weights();
    let h = grid.h();
    // Returns (B, |gain| + |loss|) for the triad a + b -> a+b.
    let bracket = |a: usize, b: usize, c: usize| {
        let gain = n[a] * n[b] * (1.0 + n[c]);
        let loss = (1.0 + n[a]) * (1.0 + n[b]) * n[c];
        (gain - loss, gain + loss)
    };
    let rows: Vec<(f64, f64)> = (0..len)
        .into_par_iter()
        .map(|i| {
            let (mut q, mut s) = (0.0, 0.0);
            for j in 0..i {
                let l = i - 1 - j;
                let wt = w[j] * w[l] / h * k[j] * k[j] * k[l] * k[l];
                let (b, m) = bracket(j, l, i);
                q += wt * b;
                s += wt * m;
            }
            for l in 0..len.saturating_sub(i + 1) {
                let c = i + l + 1;
                let wt = 2.0 * w[l] * w[c] / h * k[l] * k[l] * k[c] * k[c];
                let (b, m) = bracket(i, l, c);
                q -= wt * b;
                s += wt * m;
            }
            (consts.c0 * q, consts.c0 * s)
        })
        .collect();
    Ok(Q3Profile {
        rate: rows.iter().map(|r| r.0).collect(),
        row_scale: rows.iter().map(|r| r.1).collect(),
    })
}

/// Discretized linearized operator acting on the perturbation `F`.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    /// `(A F)_i ≈ 𝓛(F)(k_i)`.
    pub a: DMatrix<f64>,
    /// `diag(ρ) A`, symmetric.
    pub k_sym: DMatrix<f64>,
    /// Coefficient of `−F(k_i)` in the two damping integrals.
    pub damping: Vec<f64>,
    pub rho: Vec<f64>,
    pub mu: Vec<f64>,
    pub consts: ReductionConstants,
}

pub fn assemble_linearized(
    grid: &RadialGrid,
    weights: &EquilibriumWeights,
    consts: &ReductionConstants,
) -> LinearOperator {
    let n = grid.len();
    let scale = 4.0 * std::f64::consts::PI * consts.c0;
    let rows: Vec<(Vec<f64>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n];
            let mut damp = 0.0;
            for j in 0..i {
                let l = i - 1 - j;
                let s = pair_kernel(grid, j, l);
                row[j] += s;
                row[l] += s;
                row[i] -= s;
                damp += s;
            }
            for l in 0..n.saturating_sub(i + 1) {
                let c = i + l + 1;
                let s = 2.0 * pair_kernel(grid, i, l);
                row[i] -= s;
                row[l] -= s;
                row[c] += s;
                damp += s;
            }
            for v in row.iter_mut() {
                *v *= scale;
            }
            (row, scale * damp / weights.rho[i])
        })
        .collect();
    let k_sym = DMatrix::from_fn(n, n, |i, j| rows[i].0[j]);
    let a = DMatrix::from_fn(n, n, |i, j| rows[i].0[j] / weights.rho[i]);
    LinearOperator {
        a,
        k_sym,
        damping: rows.iter().map(|r| r.1).collect(),
        rho: weights.rho.clone(),
        mu: weights.mu.clone(),
        consts: *consts,
    }
}

impl LinearOperator {
    pub fn len(&self) -> usize {
        self.damping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.damping.is_empty()
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let v = &self.a * DVector::from_column_slice(f);
        v.as_slice().to_vec()
    }

    /// `⟨A F, G⟩_dp = Σ_i ρ_i (A F)_i G_i`.
    pub fn pairing(&self, f: &[f64], g: &[f64]) -> f64 {
        let af = self.apply(f);
        af.iter().zip(g).zip(&self.rho).map(|((a, g), r)| a * g * r).sum()
    }

    /// Rate of change of the gas `dp`-mass, `Σ_i ρ_i (A F)_i`.
    pub fn mass_exchange(&self, f: &[f64]) -> f64 {
        let af = self.apply(f);
        af.iter().zip(&self.rho).map(|(a, r)| a * r).sum()
    }

    pub fn norm(&self) -> f64 {
        self.a.norm()
    }

    /// `|⟨AF,G⟩ − ⟨F,AG⟩| / (‖diag(ρ)A‖ ‖F‖ ‖G‖)`.
    pub fn symmetry_defect(&self, f: &[f64], g: &[f64]) -> f64 {
        let d = (self.pairing(f, g) - self.pairing(g, f)).abs();
        d / (self.k_sym.norm() * l2(f) * l2(g))
    }

    /// `‖A k‖ / (‖A‖ ‖k‖)`.
    pub fn kernel_residual(&self, k: &[f64]) -> f64 {
        l2(&self.apply(k)) / (self.norm() * l2(k))
    }

    /// `|Σ k_i ρ_i (AF)_i| / Σ |k_i ρ_i (AF)_i|`.
    pub fn energy_column_residual(&self, k: &[f64], f: &[f64]) -> f64 {
        let af = self.apply(f);
        let terms: Vec<f64> = af
            .iter()
            .zip(k)
            .zip(&self.rho)
            .map(|((a, k), r)| a * k * r)
            .collect();
        let s: f64 = terms.iter().sum();
        let m: f64 = terms.iter().map(|t| t.abs()).sum();
        if m == 0.0 {
            0.0
        } else {
            s.abs() / m
        }
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖(Q₃(n₀ + εMF) − Q₃(n₀))/ε − AF‖ / ‖AF‖`.
pub fn linearization_defect(
    op: &LinearOperator,
    f: &[f64],
    eps: f64,
    grid: &RadialGrid,
    weights: &EquilibriumWeights,
) -> Result<f64> {
    let base = q3_radial(&weights.n0, grid, &op.consts)?;
    let n: Vec<f64> = weights
        .n0
        .iter()
        .zip(&weights.m)
        .zip(f)
        .map(|((n, m), f)| n + eps * m * f)
        .collect();
    let q = q3_radial(&n, grid, &op.consts)?;
    let af = op.apply(f);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..af.len() {
        num += ((q.rate[i] - base.rate[i]) / eps - af[i]).powi(2);
        den += af[i] * af[i];
    }
    Ok((num / den).sqrt())
}

/// The pairing `⟨𝓛F, G⟩_dp` evaluated as a direct double sum over resonant pairs.
pub fn quadratic_form(f: &[f64], g: &[f64], grid: &RadialGrid, consts: &ReductionConstants) -> f64 {
    let n = grid.len();
    let partial: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut acc = 0.0;
            for l in 0..n.saturating_sub(j + 1) {
                let s = j + l + 1;
                let xf = f[j] + f[l] - f[s];
                let xg = g[j] + g[l] - g[s];
                acc += pair_kernel(grid, j, l) * xf * xg;
            }
            acc
        })
        .collect();
    -4.0 * std::f64::consts::PI * consts.c0 * partial.iter().sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DampingReport {
    pub k: Vec<f64>,
    pub d: Vec<f64>,
    pub m: Vec<f64>,
    pub gamma: Vec<f64>,
    pub ratio: Vec<f64>,
    /// Mean ratio over the resolved rows.
    pub mean_ratio: f64,
    /// `max |r_i / r̄ − 1|` over the resolved rows.
    pub spread_resolved: f64,
    /// Same over every row.
    pub spread_all: f64,
    /// One-based row range `[first, last]` regarded as resolved.
    pub resolved: (usize, usize),
}

/// Zone of rows unaffected by the end corrections and by the truncation of
/// the exchange integral at `k_max`.
pub fn resolved_rows(grid: &RadialGrid) -> (usize, usize) {
    let n = grid.len();
    let first = if grid.rule() == crate::grid::WeightRule::EndCorrected {
        2 * 12.min(n / 4) + 1
    } else {
        1
    };
    (first.min(n), (n / 2).max(first.min(n)))
}

/// Damping coefficients and their ratio to `M(k) Γ(s·k)` from a tabulated Γ.
pub fn damping_coefficient(
    op: &LinearOperator,
    grid: &RadialGrid,
    weights: &EquilibriumWeights,
    table: &GammaTable,
) -> Result<DampingReport> {
    if table.x.len() != grid.len() {
        return Err(Error::Domain("Γ table does not match the grid".into()));
    }
    let ratio: Vec<f64> = op
        .damping
        .iter()
        .zip(&weights.m)
        .zip(&table.values)
        .map(|((d, m), g)| d / (m * g))
        .collect();
    let (lo, hi) = resolved_rows(grid);
    let window = &ratio[lo - 1..hi];
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    let spread = |r: &[f64]| r.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max);
    Ok(DampingReport {
        k: grid.nodes().to_vec(),
        d: op.damping.clone(),
        m: weights.m.clone(),
        gamma: table.values.clone(),
        ratio: ratio.clone(),
        mean_ratio: mean,
        spread_resolved: spread(window),
        spread_all: spread(&ratio),
        resolved: (lo, hi),
    })
}

/// Constant expected for `d/(M Γ(k/2))`: `16 c₀`.
pub fn expected_half_ratio(consts: &ReductionConstants) -> f64 {
    16.0 * consts.c0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, equilibrium_weights};
    use crate::quadrature::integrate;

    fn setup(k_max: f64, n: usize) -> (RadialGrid, EquilibriumWeights, LinearOperator) {
        let g = build_grid(k_max, n).unwrap();
        let eq = equilibrium_weights(&g);
        let op = assemble_linearized(&g, &eq, &ReductionConstants::default());
        (g, eq, op)
    }

    #[test]
    fn finite_difference_linearization_is_first_order() {
        let g = build_grid(20.0, 200).unwrap();
        let eq = equilibrium_weights(&g);
        let op = assemble_linearized(&g, &eq, &ReductionConstants::default());
        let f: Vec<f64> = g.nodes().iter().map(|k| (1.3 * k).sin()).collect();
        let e: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&eps| linearization_defect(&op, &f, eps, &g, &eq).unwrap())
            .collect();
        for w in e.windows(2) {
            let order = (w[0] / w[1]).log10();
            assert!((order - 1.0).abs() < 0.1, "{e:?}");
        }
    }

    #[test]
    fn detailed_balance_at_zero_chemical_potential() {
        let (g, eq, _) = setup(40.0, 200);
        let q = q3_radial(&eq.n0, &g, &ReductionConstants::default()).unwrap();
        let scale = q.row_scale.iter().cloned().fold(0.0, f64::max);
        let max = q.rate.iter().map(|r| r.abs()).fold(0.0, f64::max);
        assert!(max <= 1e-12 * scale, "{max} vs {scale}");
    }

    #[test]
    fn negative_density_is_rejected() {
        let g = build_grid(10.0, 20).unwrap();
        let mut n = vec![0.1; 20];
        n[3] = -1.0;
        n[7] = -0.5;
        let e = q3_radial(&n, &g, &ReductionConstants::default()).unwrap_err();
        assert!(e.to_string().contains("[4, 8]"), "{e}");
    }

    #[test]
    fn energy_mode_is_in_kernel() {
        let (g, _, op) = setup(20.0, 100);
        assert!(op.kernel_residual(g.nodes()) < 1e-12);
    }

    fn continuum_mass_row(k: f64) -> f64 {
        let c0 = 2.0 * std::f64::consts::PI;
        let a = integrate(|a| a * a * (k - a) * (k - a) * rho3(a, k - a), 0.0, k, 1e-12, 0.0, 2000);
        let b = integrate(|a| a * a * (k + a) * (k + a) * rho3(k, a), 0.0, 80.0, 1e-12, 0.0, 2000);
        c0 * (a.value - 2.0 * b.value)
    }

    #[test]
    fn mass_mode_sign_structure() {
        let (g, _, op) = setup(40.0, 400);
        let af = op.apply(&vec![1.0; 400]);
        assert!(op.mass_exchange(&vec![1.0; 400]) < 0.0);
        assert!(op.damping.iter().all(|d| *d > 0.0));
        // Splitting dominates at small k, coalescence gain at large k.
        for i in [5usize, 20, 50, 80, 120, 200] {
            let exact = continuum_mass_row(g.k(i));
            assert_eq!(af[i - 1] < 0.0, exact < 0.0, "k = {}", g.k(i));
            assert!((af[i - 1] / exact - 1.0).abs() < 1e-3, "k = {}", g.k(i));
        }
        let cross = af.iter().position(|v| *v >= 0.0).unwrap();
        assert!(continuum_mass_row(g.k(cross)) < 0.0 && continuum_mass_row(g.k(cross + 1)) > 0.0);
    }

    #[test]
    fn doubling_c0_doubles_entries() {
        let g = build_grid(10.0, 40).unwrap();
        let eq = equilibrium_weights(&g);
        let c = ReductionConstants::with_c0(1.5).unwrap();
        let c2 = ReductionConstants::with_c0(3.0).unwrap();
        let a = assemble_linearized(&g, &eq, &c);
        let b = assemble_linearized(&g, &eq, &c2);
        for (x, y) in a.a.iter().zip(b.a.iter()) {
            assert_eq!(2.0 * x, *y);
        }
        assert!((ReductionConstants::with_c0(2.0 * std::f64::consts::PI).unwrap().n_c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadratic_form_matches_matrix() {
        let (g, _, op) = setup(20.0, 100);
        let f: Vec<f64> = g.nodes().iter().map(|k| (0.3 * k).sin() + 0.1).collect();
        let h: Vec<f64> = g.nodes().iter().map(|k| (-0.2 * k).exp()).collect();
        let a = op.pairing(&f, &h);
        let b = quadratic_form(&f, &h, &g, &op.consts);
        assert!((a / b - 1.0).abs() < 1e-10);
        assert!(quadratic_form(&f, g.nodes(), &g, &op.consts).abs() < 1e-12 * a.abs());
        let ones = vec![1.0; 100];
        let m = op.mass_exchange(&f);
        assert!((m / quadratic_form(&f, &ones, &g, &op.consts) - 1.0).abs() < 1e-10);
    }
}
