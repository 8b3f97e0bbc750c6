//! Uniform momentum grid, quadrature weights and the μ = 0 Bose–Einstein
//! equilibrium expressed as per-node measures.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Quadrature rule attached to the grid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightRule {
    /// `h` in the interior, `h/2` at `k_max`, nothing at the implicit node `k = 0`.
    Trapezoid,
    /// Trapezoid with positive end corrections on the first and last nodes.
    ///
    /// The right end is exact for polynomials through degree 5. The left end
    /// is fitted so that `Σ w_i k_i^{2+p} M(k_i)` reproduces the integrals
    /// `∫₀^{k_max} k^{2+p} M(k) dk` for `p = 0..=5`, which covers every
    /// moment the diagnostics use.
    EndCorrected,
}

const CORRECTION_NODES: usize = 12;
const CORRECTION_DEGREE: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    h: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rule: WeightRule,
}

impl RadialGrid {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn k_max(&self) -> f64 {
        self.h * self.nodes.len() as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rule(&self) -> WeightRule {
        self.rule
    }

    /// Node `k_i` for the 1-based index `i`.
    pub fn k(&self, i: usize) -> f64 {
        self.nodes[i - 1]
    }

    /// Zero-based position of `k_i + k_j`, if it lies on the grid.
    pub fn resonance_index(&self, i: usize, j: usize) -> Option<usize> {
        let s = i + j + 1;
        (s < self.len()).then_some(s)
    }
}

/// Uniform grid with the default end-corrected weights.
pub fn build_grid(k_max: f64, n: usize) -> Result<RadialGrid> {
    build_grid_with_rule(k_max, n, WeightRule::EndCorrected)
}

pub fn build_grid_with_rule(k_max: f64, n: usize, rule: WeightRule) -> Result<RadialGrid> {
    if !(k_max.is_finite() && k_max > 0.0) {
        return Err(Error::config("k_max", "k_max must be positive"));
    }
    if n < 8 {
        return Err(Error::config("N", format!("N ≥ 8 required, got {n}")));
    }
    let h = k_max / n as f64;
    let nodes: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
    let mut weights = vec![h; n];
    weights[n - 1] = 0.5 * h;
    let mut grid = RadialGrid {
        h,
        nodes,
        weights,
        rule: WeightRule::Trapezoid,
    };
    if rule == WeightRule::EndCorrected {
        if let Some(w) = end_corrected_weights(&grid) {
            grid.weights = w;
            grid.rule = WeightRule::EndCorrected;
        }
    }
    Ok(grid)
}

fn end_corrected_weights(grid: &RadialGrid) -> Option<Vec<f64>> {
    let n = grid.len();
    let h = grid.h;
    let m = CORRECTION_NODES.min(n / 4);
    if m < 2 {
        return None;
    }
    let degree = CORRECTION_DEGREE.min(m - 2);
    let mut w = grid.weights.clone();

    // Right end: Euler–Maclaurin constants in the reflected index j = N - i.
    let rows = degree + 1;
    let a = DMatrix::from_fn(rows, m, |p, j| (j as f64 / m as f64).powi(p as i32));
    let b = DVector::from_fn(rows, |p, _| right_end_constant(p) / (m as f64).powi(p as i32));
    let gamma = least_norm(&a, &b)?;
    for j in 0..m {
        w[n - 1 - j] += h * gamma[j];
    }

    // Left end: exact for the equilibrium-weighted monomials.
    let k = grid.nodes();
    let km = k[m - 1];
    let targets: Vec<f64> = (0..rows)
        .map(|p| {
            let r = quadrature::integrate(
                |x| energy_weight(x) * x.powi(p as i32),
                0.0,
                grid.k_max(),
                1e-15,
                0.0,
                4000,
            );
            r.value
        })
        .collect();
    let a = DMatrix::from_fn(rows, m, |p, i| h * energy_weight(k[i]) * (k[i] / km).powi(p as i32));
    let b = DVector::from_fn(rows, |p, _| {
        let current: f64 = (0..n)
            .map(|i| w[i] * energy_weight(k[i]) * k[i].powi(p as i32))
            .sum();
        (targets[p] - current) / km.powi(p as i32)
    });
    let gamma = least_norm(&a, &b)?;
    for i in 0..m {
        w[i] += h * gamma[i];
    }
    w.iter().all(|&x| x > 0.0).then_some(w)
}

fn right_end_constant(p: usize) -> f64 {
    match p {
        1 => 1.0 / 12.0,
        3 => -1.0 / 120.0,
        5 => 1.0 / 252.0,
        _ => 0.0,
    }
}

fn least_norm(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let gram = a * a.transpose();
    let y = gram.cholesky()?.solve(b);
    Some(a.transpose() * y)
}

/// `n₀(k) = 1/(e^k − 1)`.
pub fn n0(k: f64) -> f64 {
    1.0 / k.exp_m1()
}

/// Bose–Einstein occupation `1/(e^{k−μ} − 1)` for `μ ≤ 0`.
pub fn bose(k: f64, mu: f64) -> f64 {
    1.0 / (k - mu).exp_m1()
}

/// `M(k) = n₀(1 + n₀) = 1/(4 sinh²(k/2))`.
pub fn m_eq(k: f64) -> f64 {
    let s = (0.5 * k).sinh();
    0.25 / (s * s)
}

/// `k² M(k)`, regular at the origin with value 1.
pub fn energy_weight(k: f64) -> f64 {
    let x = 0.5 * k;
    if x.abs() < 1e-8 {
        return 1.0 - x * x / 3.0;
    }
    let r = x / x.sinh();
    r * r
}

/// Per-node equilibrium data and the dp, dμ and energy-dμ measures.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumWeights {
    pub n0: Vec<f64>,
    pub m: Vec<f64>,
    /// `4π k_i² w_i`.
    pub rho: Vec<f64>,
    /// `ρ_i M_i`.
    pub mu: Vec<f64>,
    /// `μ_i k_i`.
    pub eta: Vec<f64>,
}

pub fn equilibrium_weights(grid: &RadialGrid) -> EquilibriumWeights {
    let four_pi = 4.0 * std::f64::consts::PI;
    let k = grid.nodes();
    let w = grid.weights();
    let n0: Vec<f64> = k.iter().map(|&k| n0(k)).collect();
    let m: Vec<f64> = k.iter().map(|&k| m_eq(k)).collect();
    let rho: Vec<f64> = k.iter().zip(w).map(|(k, w)| four_pi * k * k * w).collect();
    let mu: Vec<f64> = k
        .iter()
        .zip(w)
        .map(|(&k, w)| four_pi * energy_weight(k) * w)
        .collect();
    let eta: Vec<f64> = mu.iter().zip(k).map(|(mu, k)| mu * k).collect();
    EquilibriumWeights {
        n0,
        m,
        rho,
        mu,
        eta,
    }
}

impl EquilibriumWeights {
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// `Σ_i f_i g_i μ_i`, the discrete `L²(dμ)` pairing.
    pub fn dot_mu(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter().zip(g).zip(&self.mu).map(|((f, g), m)| f * g * m).sum()
    }

    pub fn norm_mu(&self, f: &[f64]) -> f64 {
        self.dot_mu(f, f).sqrt()
    }

    /// `Σ_i f_i g_i ρ_i`, the discrete `dp` pairing.
    pub fn dot_rho(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter().zip(g).zip(&self.rho).map(|((f, g), r)| f * g * r).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const ZETA3: f64 = 1.202_056_903_159_594_3;

    #[test]
    fn default_grid_arithmetic() {
        let g = build_grid(40.0, 400).unwrap();
        assert!((g.h() - 0.1).abs() < 1e-15);
        assert!((g.k(1) - 0.1).abs() < 1e-15);
        assert_eq!(g.k(400), 40.0);
        let g = build_grid(1.0, 8).unwrap();
        let expected: Vec<f64> = (1..=8).map(|i| i as f64 * 0.125).collect();
        assert_eq!(g.nodes(), expected.as_slice());
    }

    #[test]
    fn invalid_arguments_name_the_field() {
        let e = build_grid(0.0, 100).unwrap_err();
        assert!(e.to_string().contains("k_max must be positive"), "{e}");
        let e = build_grid(10.0, 4).unwrap_err();
        assert!(e.to_string().contains("N ≥ 8"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn trapezoid_weight_sum() {
        for (k_max, n) in [(40.0, 400), (1.0, 8), (7.3, 91)] {
            let g = build_grid_with_rule(k_max, n, WeightRule::Trapezoid).unwrap();
            let s: f64 = g.weights().iter().sum();
            let expected = k_max - 0.5 * g.h();
            assert!((s / expected - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn corrected_weights_are_positive() {
        for (k_max, n) in [(40.0, 400), (4.0, 800), (1.0, 8), (10.0, 50), (40.0, 800)] {
            let g = build_grid(k_max, n).unwrap();
            assert!(g.weights().iter().all(|&w| w > 0.0), "{k_max} {n}");
        }
        assert_eq!(build_grid(40.0, 400).unwrap().rule(), WeightRule::EndCorrected);
    }

    #[test]
    fn corrected_rule_integrates_smooth_functions() {
        let g = build_grid(4.0, 800).unwrap();
        let s: f64 = g.nodes().iter().zip(g.weights()).map(|(k, w)| w * k.cos()).sum();
        assert!((s - 4.0f64.sin()).abs() < 1e-11, "{}", s - 4.0f64.sin());
    }

    #[test]
    fn two_formulas_for_m_agree() {
        for &k in &[1e-3f64, 0.1, 1.0, 5.0, 20.0, 40.0] {
            let a = k.exp() / k.exp_m1().powi(2);
            assert!((a / m_eq(k) - 1.0).abs() < 1e-12);
            let n = n0(k);
            assert!((n * (1.0 + n) / m_eq(k) - 1.0).abs() < 1e-12);
        }
        assert!((n0(1.0) - 0.581_976_7).abs() < 1e-7);
    }

    #[test]
    fn measure_sums_match_closed_forms() {
        let g = build_grid(40.0, 400).unwrap();
        let eq = equilibrium_weights(&g);
        let s0: f64 = eq.mu.iter().sum();
        let s1: f64 = eq.eta.iter().sum();
        let s2: f64 = eq.eta.iter().zip(g.nodes()).map(|(e, k)| e * k).sum();
        assert!((s0 - 4.0 * PI.powi(3) / 3.0).abs() < 1e-10);
        assert!((s1 / (24.0 * PI * ZETA3) - 1.0).abs() < 1e-10);
        assert!((s2 / (16.0 * PI.powi(5) / 15.0) - 1.0).abs() < 1e-10);
        assert!(eq.mu.iter().all(|m| m.is_finite() && *m > 0.0));
        assert!((eq.mu[0] / (4.0 * PI * g.weights()[0]) - 1.0).abs() < 1e-2);
    }
}
