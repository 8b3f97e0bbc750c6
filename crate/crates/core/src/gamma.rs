//! The damping function
//!
//! `Γ(x) = sinh x ∫₀^∞ (y²/sinh y) [ |x−y|²/sinh|x−y| + (x+y)²/sinh(x+y) ] dy`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::quadrature;

/// Integration is truncated at `y = x + TAIL`; the integrand there is below `y⁴e^{−y}`.
const TAIL: f64 = 60.0;
const MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaValue {
    pub value: f64,
    /// Estimated absolute quadrature error.
    pub error: f64,
    /// False if the requested tolerance was not reached (best-effort value).
    pub converged: bool,
}

/// `sinh x / (sinh y sinh z)` for positive arguments, without overflow.
fn sinh_ratio(x: f64, y: f64, z: f64) -> f64 {
    2.0 * (x - y - z).exp() * (-(-2.0 * x).exp_m1()) / ((-2.0 * y).exp_m1() * (-2.0 * z).exp_m1())
}

fn integrand(x: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let d = (x - y).abs();
    let first = if d > 0.0 {
        y * y * d * d * sinh_ratio(x, y, d)
    } else {
        0.0
    };
    let s = x + y;
    first + y * y * s * s * sinh_ratio(x, y, s)
}

pub fn gamma_paper(x: f64, tol: f64) -> Result<GammaValue> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Γ(x) requires finite x ≥ 0, got {x}")));
    }
    if !(tol >= 1e-12) {
        return Err(Error::Domain(format!("Γ tolerance must be ≥ 1e-12, got {tol:e}")));
    }
    if x == 0.0 {
        return Ok(GammaValue {
            value: 0.0,
            error: 0.0,
            converged: true,
        });
    }
    let f = |y: f64| integrand(x, y);
    let inner = quadrature::integrate(f, 0.0, x, 0.25 * tol, 0.0, MAX_PANELS);
    let outer = quadrature::integrate(f, x, x + TAIL, 0.25 * tol, 0.0, MAX_PANELS);
    let value = inner.value + outer.value;
    let error = inner.error + outer.error;
    Ok(GammaValue {
        value,
        error,
        converged: error <= tol * value.abs(),
    })
}

/// `∫₀^∞ y²/sinh y dy`.
pub fn phi_integral(tol: f64) -> f64 {
    let f = |y: f64| {
        if y <= 0.0 {
            0.0
        } else {
            2.0 * y * y * (-y).exp() / (-(-2.0 * y).exp_m1())
        }
    };
    quadrature::integrate(f, 0.0, TAIL + 20.0, tol, 0.0, MAX_PANELS).value
}

/// `lim_{x→0} Γ(x)/x` by Richardson extrapolation of `Γ(x)/x = c + a x² + b x³`
/// through the three sample points.
pub fn small_x_slope(xs: [f64; 3], tol: f64) -> Result<f64> {
    let mut m = nalgebra::Matrix3::zeros();
    let mut rhs = nalgebra::Vector3::zeros();
    for (r, &x) in xs.iter().enumerate() {
        m[(r, 0)] = 1.0;
        m[(r, 1)] = x * x;
        m[(r, 2)] = x * x * x;
        rhs[r] = gamma_paper(x, tol)?.value / x;
    }
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Domain("Richardson sample points are degenerate".into()))?;
    Ok(sol[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArgumentScale {
    /// Γ evaluated at `k_i`.
    #[default]
    Full,
    /// Γ evaluated at `k_i / 2`.
    Half,
}

impl ArgumentScale {
    pub fn factor(self) -> f64 {
        match self {
            ArgumentScale::Full => 1.0,
            ArgumentScale::Half => 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaTable {
    pub scale: ArgumentScale,
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub converged: bool,
}

pub fn gamma_table(grid: &RadialGrid, scale: ArgumentScale, tol: f64) -> Result<GammaTable> {
    let x: Vec<f64> = grid.nodes().iter().map(|k| k * scale.factor()).collect();
    gamma_table_at(&x, scale, tol)
}

pub fn gamma_table_at(x: &[f64], scale: ArgumentScale, tol: f64) -> Result<GammaTable> {
    let vals: Vec<GammaValue> = x
        .par_iter()
        .map(|&x| gamma_paper(x, tol))
        .collect::<Result<_>>()?;
    Ok(GammaTable {
        scale,
        x: x.to_vec(),
        values: vals.iter().map(|v| v.value).collect(),
        errors: vals.iter().map(|v| v.error).collect(),
        converged: vals.iter().all(|v| v.converged),
    })
}

impl GammaTable {
    pub fn is_positive(&self) -> bool {
        self.x
            .iter()
            .zip(&self.values)
            .all(|(&x, &v)| x == 0.0 || v > 0.0)
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use std::f64::consts::PI;

    const ZETA3: f64 = 1.202_056_903_159_594_3;

    #[test]
    fn zero_and_domain() {
        assert_eq!(gamma_paper(0.0, 1e-10).unwrap().value, 0.0);
        assert!(gamma_paper(-1.0, 1e-10).is_err());
        assert!(gamma_paper(1.0, 1e-14).is_err());
    }

    #[test]
    fn phi_integral_oracle() {
        // 2 Γ(3) (1 − 2⁻³) ζ(3)
        let exact = 2.0 * 2.0 * (1.0 - 0.125) * ZETA3;
        assert!((phi_integral(1e-14) - exact).abs() < 1e-12);
    }

    #[test]
    fn small_x_limit() {
        let slope = small_x_slope([1e-2, 5e-3, 2.5e-3], 1e-12).unwrap();
        let exact = PI.powi(4) / 15.0;
        assert!((slope / exact - 1.0).abs() < 1e-6, "{slope}");
        for &x in &[0.05, 0.02, 0.001] {
            let g = gamma_paper(x, 1e-12).unwrap().value;
            assert!((g - exact * x).abs() <= 0.05 * x);
        }
    }

    #[test]
    fn large_x_power_law() {
        let g = gamma_paper(30.0, 1e-12).unwrap().value;
        assert!((g / 30f64.powi(5) * 15.0 - 1.0).abs() < 0.02);
        let far = gamma_paper(800.0, 1e-12).unwrap();
        assert!(far.value.is_finite() && far.converged);
    }

    #[test]
    fn table_scales_and_shape() {
        let g = build_grid(40.0, 400).unwrap();
        let full = gamma_table(&g, ArgumentScale::Full, 1e-10).unwrap();
        let half = gamma_table(&g, ArgumentScale::Half, 1e-10).unwrap();
        assert!((full.values[0] - 0.649_394).abs() < 0.01 * 0.649_394);
        assert_eq!(half.values[1], full.values[0]);
        assert!(full.is_positive() && full.is_monotone() && full.converged);
        assert!(half.is_positive() && half.is_monotone());
        for (v, e) in full.values.iter().zip(&full.errors) {
            assert!(*e <= 1e-10 * v);
        }
    }
}
