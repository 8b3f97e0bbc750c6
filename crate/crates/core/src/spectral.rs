//! Spectral solution of `M ∂v/∂τ = 𝓛 v`.
//!
//! With `D = diag(μ)` the generator `diag(1/M) A = D⁻¹ K` is similar to the
//! symmetric `S = D^{-1/2} K D^{-1/2}`. Writing `S = V Λ Vᵀ`,
//! `v(τ) = D^{-1/2} V e^{Λτ} Vᵀ D^{1/2} v(0)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collision::LinearOperator;
use crate::error::{Error, Result};
use crate::field::{kernel_coefficient, HarmonicField, Sector};
use crate::grid::{EquilibriumWeights, RadialGrid};
use crate::jacobi::jacobi_eigen;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eigensolver {
    /// Cyclic Jacobi rotations.
    #[default]
    Jacobi,
    /// Householder tridiagonalization with implicit QR (nalgebra).
    Householder,
}

pub const DEFAULT_SWEEPS: usize = 200;

#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Ascending; the kernel entry is set to exactly zero.
    pub values: Vec<f64>,
    /// Eigenvalue of the kernel mode as returned by the solver.
    pub raw_kernel_value: f64,
    /// Kernel eigenvector as returned by the solver.
    pub raw_kernel_vector: Vec<f64>,
    pub kernel_index: usize,
    /// Orthonormal columns in symmetrized coordinates.
    pub vectors: DMatrix<f64>,
    pub sqrt_mu: Vec<f64>,
    pub symmetric: DMatrix<f64>,
    pub sweeps: usize,
}

pub fn spectral_decompose(
    op: &LinearOperator,
    grid: &RadialGrid,
    tol: f64,
    solver: Eigensolver,
) -> Result<EigenSystem> {
    spectral_decompose_with(op, grid, tol, solver, DEFAULT_SWEEPS)
}

/// As [`spectral_decompose`] with an explicit Jacobi sweep limit.
pub fn spectral_decompose_with(
    op: &LinearOperator,
    grid: &RadialGrid,
    tol: f64,
    solver: Eigensolver,
    max_sweeps: usize,
) -> Result<EigenSystem> {
    let n = op.len();
    let sqrt_mu: Vec<f64> = op.mu.iter().map(|m| m.sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| {
        let a = op.k_sym[(i, j)];
        let b = op.k_sym[(j, i)];
        0.5 * (a + b) / (sqrt_mu[i] * sqrt_mu[j])
    });
    let (mut values, mut vectors, sweeps) = match solver {
        Eigensolver::Jacobi => {
            let flat: Vec<f64> = (0..n * n).map(|x| s[(x / n, x % n)]).collect();
            let r = jacobi_eigen(&flat, n, tol, max_sweeps)?;
            let v = DMatrix::from_fn(n, n, |i, j| r.vectors[i * n + j]);
            (r.values, v, r.sweeps)
        }
        Eigensolver::Householder => {
            let e = nalgebra::SymmetricEigen::new(s.clone());
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
            let vals = order.iter().map(|&i| e.eigenvalues[i]).collect();
            let v = DMatrix::from_fn(n, n, |i, j| e.eigenvectors[(i, order[j])]);
            (vals, v, 0)
        }
    };

    // The kernel direction D^{1/2} k is known exactly: pin it and remove it
    // from every other column.
    let mut z: Vec<f64> = grid.nodes().iter().zip(&sqrt_mu).map(|(k, s)| k * s).collect();
    let zn = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    z.iter_mut().for_each(|x| *x /= zn);
    let kernel_index = (0..n)
        .max_by(|&i, &j| {
            let ci = column_dot(&vectors, i, &z).abs();
            let cj = column_dot(&vectors, j, &z).abs();
            ci.total_cmp(&cj)
        })
        .unwrap_or(0);
    let raw_kernel_value = values[kernel_index];
    let raw_kernel_vector: Vec<f64> = vectors.column(kernel_index).iter().copied().collect();
    values[kernel_index] = 0.0;
    for j in 0..n {
        if j == kernel_index {
            for i in 0..n {
                vectors[(i, j)] = z[i];
            }
            continue;
        }
        let d = column_dot(&vectors, j, &z);
        let mut norm = 0.0;
        for i in 0..n {
            vectors[(i, j)] -= d * z[i];
            norm += vectors[(i, j)].powi(2);
        }
        let norm = norm.sqrt();
        for i in 0..n {
            vectors[(i, j)] /= norm;
        }
    }
    Ok(EigenSystem {
        values,
        raw_kernel_value,
        raw_kernel_vector,
        kernel_index,
        vectors,
        sqrt_mu,
        symmetric: s,
        sweeps,
    })
}

fn column_dot(m: &DMatrix<f64>, j: usize, z: &[f64]) -> f64 {
    m.column(j).iter().zip(z).map(|(a, b)| a * b).sum()
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lambda_min(&self) -> f64 {
        self.values[0]
    }

    /// Largest eigenvalue as returned by the solver, including the raw kernel value.
    pub fn lambda_max_raw(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(j, &v)| if j == self.kernel_index { self.raw_kernel_value } else { v })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Non-kernel eigenvalue closest to zero.
    pub fn slowest_rate(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != self.kernel_index)
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Number of raw eigenvalues with `|λ| ≤ tol · |λ_min|`.
    pub fn kernel_count(&self, tol: f64) -> usize {
        let bound = tol * self.lambda_min().abs();
        (0..self.len())
            .filter(|&j| {
                let v = if j == self.kernel_index {
                    self.raw_kernel_value
                } else {
                    self.values[j]
                };
                v.abs() <= bound
            })
            .count()
    }

    /// `‖VᵀV − I‖_max`, the dμ-orthonormality defect of the physical eigenvectors.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.vectors.transpose() * &self.vectors;
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let e = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - e).abs());
            }
        }
        worst
    }

    /// `‖S − VΛVᵀ‖_F / ‖S‖_F`.
    pub fn reconstruction_residual(&self) -> f64 {
        let mut vl = self.vectors.clone();
        for j in 0..self.len() {
            vl.column_mut(j).scale_mut(self.values[j]);
        }
        let rec = vl * self.vectors.transpose();
        (&self.symmetric - rec).norm() / self.symmetric.norm()
    }

    /// Cosine similarity between the kernel eigenvector and `D^{1/2} f`.
    pub fn kernel_cosine(&self, f: &[f64]) -> f64 {
        let y: Vec<f64> = f.iter().zip(&self.sqrt_mu).map(|(f, s)| f * s).collect();
        let yn = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        let c = &self.raw_kernel_vector;
        let cn = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        c.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>().abs() / (yn * cn)
    }

    /// Modal coefficients `Vᵀ D^{1/2} f`.
    pub fn to_modal(&self, f: &[f64]) -> Vec<f64> {
        let y = DVector::from_iterator(f.len(), f.iter().zip(&self.sqrt_mu).map(|(f, s)| f * s));
        (self.vectors.transpose() * y).as_slice().to_vec()
    }

    pub fn from_modal(&self, a: &[f64]) -> Vec<f64> {
        let y = &self.vectors * DVector::from_column_slice(a);
        y.iter().zip(&self.sqrt_mu).map(|(y, s)| y / s).collect()
    }

    /// `β_j = Σ_i μ_i g_i φ_j(i)`: the dμ-functional `Σ μ g F` in modal form.
    pub fn functional(&self, g: &[f64]) -> Vec<f64> {
        self.to_modal(g)
    }

    pub fn propagate(&self, f0: &[f64], tau: f64) -> Result<Vec<f64>> {
        check_tau(tau)?;
        if tau == 0.0 {
            return Ok(f0.to_vec());
        }
        let a = self.to_modal(f0);
        Ok(self.from_modal(&self.evolve_modal(&a, tau)))
    }

    pub fn evolve_modal(&self, a: &[f64], tau: f64) -> Vec<f64> {
        a.iter()
            .zip(&self.values)
            .map(|(a, l)| a * (l * tau).exp())
            .collect()
    }

    /// Modal data for the dμ-mass functional of `f0`.
    pub fn mass_shift(&self, f0: &[f64]) -> SpectralMassShift {
        let a = self.to_modal(f0);
        let beta = self.functional(&vec![1.0; f0.len()]);
        SpectralMassShift {
            lambda: self.values.clone(),
            weight: a.iter().zip(&beta).map(|(a, b)| a * b).collect(),
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("τ must be finite and non-negative, got {tau}")))
    }
}

/// A mass-shift history `g(τ)` with its derivative.
pub trait MassShift: Send + Sync {
    fn g(&self, tau: f64) -> f64;
    fn dg(&self, tau: f64) -> f64;
    /// `lim_{τ→∞} g(τ)` when it exists.
    fn limit(&self) -> Option<f64>;
}

/// `g(τ) = Σ_j (e^{λ_j τ} − 1) a_j β_j` for one radial sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMassShift {
    pub lambda: Vec<f64>,
    pub weight: Vec<f64>,
}

impl MassShift for SpectralMassShift {
    fn g(&self, tau: f64) -> f64 {
        self.lambda
            .iter()
            .zip(&self.weight)
            .map(|(l, w)| (l * tau).exp_m1() * w)
            .sum()
    }

    fn dg(&self, tau: f64) -> f64 {
        self.lambda
            .iter()
            .zip(&self.weight)
            .map(|(l, w)| l * (l * tau).exp() * w)
            .sum()
    }

    fn limit(&self) -> Option<f64> {
        Some(
            self.lambda
                .iter()
                .zip(&self.weight)
                .filter(|(l, _)| **l < 0.0)
                .map(|(_, w)| -w)
                .sum(),
        )
    }
}

/// `g(τ) = rate · τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMassShift {
    pub rate: f64,
}

impl MassShift for LinearMassShift {
    fn g(&self, tau: f64) -> f64 {
        self.rate * tau
    }
    fn dg(&self, _tau: f64) -> f64 {
        self.rate
    }
    fn limit(&self) -> Option<f64> {
        (self.rate == 0.0).then_some(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorSeries {
    pub sector: Sector,
    pub m0: Vec<f64>,
    pub m1: Vec<f64>,
    pub dist_to_limit: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub tau: Vec<f64>,
    pub series: Vec<SectorSeries>,
    /// Full profiles at the requested snapshot times.
    pub snapshots: Vec<(f64, HarmonicField)>,
}

impl TrajectoryRecord {
    pub fn sector(&self, sector: Sector) -> Result<&SectorSeries> {
        self.series
            .iter()
            .find(|s| s.sector == sector)
            .ok_or(Error::MissingSector {
                l: sector.l,
                m: sector.m,
            })
    }
}

/// Samples mass, energy and distance to `c·k` for every sector of `f0`.
pub fn trajectory(
    eig: &EigenSystem,
    grid: &RadialGrid,
    weights: &EquilibriumWeights,
    f0: &HarmonicField,
    taus: &[f64],
    snapshot_taus: &[f64],
) -> Result<TrajectoryRecord> {
    if taus.first() != Some(&0.0) {
        return Err(Error::Domain("τ samples must start at 0".into()));
    }
    if taus.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("τ samples must be strictly increasing".into()));
    }
    for &t in taus.iter().chain(snapshot_taus) {
        check_tau(t)?;
    }
    let ones = vec![1.0; grid.len()];
    let beta0 = eig.functional(&ones);
    let beta1 = eig.functional(grid.nodes());
    let series: Vec<SectorSeries> = f0
        .sectors()
        .map(|(sector, f)| {
            let a = eig.to_modal(f);
            let c = kernel_coefficient(f, grid, weights);
            let inf: Vec<f64> = grid.nodes().iter().map(|k| c * k).collect();
            let b = eig.to_modal(&inf);
            let rows: Vec<(f64, f64, f64)> = taus
                .par_iter()
                .map(|&tau| {
                    let (mut m0, mut m1, mut d2) = (0.0, 0.0, 0.0);
                    for j in 0..a.len() {
                        let x = a[j] * (eig.values[j] * tau).exp();
                        m0 += x * beta0[j];
                        m1 += x * beta1[j];
                        d2 += (x - b[j]).powi(2);
                    }
                    (m0, m1, d2.sqrt())
                })
                .collect();
            SectorSeries {
                sector,
                m0: rows.iter().map(|r| r.0).collect(),
                m1: rows.iter().map(|r| r.1).collect(),
                dist_to_limit: rows.iter().map(|r| r.2).collect(),
            }
        })
        .collect();
    let snapshots = snapshot_taus
        .iter()
        .map(|&tau| {
            let mut out = HarmonicField::new(grid.len());
            for (sector, f) in f0.sectors() {
                out.insert(sector, eig.propagate(f, tau)?)?;
            }
            Ok((tau, out))
        })
        .collect::<Result<_>>()?;
    Ok(TrajectoryRecord {
        tau: taus.to_vec(),
        series,
        snapshots,
    })
}

/// Crank–Nicolson stepping of `dy/dτ = S y` in symmetrized coordinates.
pub struct TrapezoidStepper {
    pub dt: f64,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    plus: DMatrix<f64>,
    sqrt_mu: Vec<f64>,
}

impl TrapezoidStepper {
    pub fn new(eig: &EigenSystem, dt: f64) -> Result<Self> {
        check_tau(dt)?;
        let n = eig.len();
        let id = DMatrix::<f64>::identity(n, n);
        let half = &eig.symmetric * (0.5 * dt);
        let chol = (&id - &half).cholesky().ok_or_else(|| Error::Convergence {
            what: "trapezoid stepper".into(),
            detail: "I − dt/2·S is not positive definite".into(),
        })?;
        Ok(TrapezoidStepper {
            dt,
            chol,
            plus: id + half,
            sqrt_mu: eig.sqrt_mu.clone(),
        })
    }

    /// Advances `f0` by `steps` steps of size `dt`.
    pub fn advance(&self, f0: &[f64], steps: usize) -> Vec<f64> {
        let mut y = DVector::from_iterator(f0.len(), f0.iter().zip(&self.sqrt_mu).map(|(f, s)| f * s));
        for _ in 0..steps {
            y = self.chol.solve(&(&self.plus * y));
        }
        y.iter().zip(&self.sqrt_mu).map(|(y, s)| y / s).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::{assemble_linearized, ReductionConstants};
    use crate::grid::{build_grid, equilibrium_weights};

    fn system(k_max: f64, n: usize) -> (RadialGrid, EquilibriumWeights, EigenSystem) {
        let g = build_grid(k_max, n).unwrap();
        let eq = equilibrium_weights(&g);
        let op = assemble_linearized(&g, &eq, &ReductionConstants::default());
        let e = spectral_decompose(&op, &g, 1e-13, Eigensolver::Jacobi).unwrap();
        (g, eq, e)
    }

    #[test]
    fn structure_of_small_system() {
        let (g, _, e) = system(20.0, 80);
        assert!(e.lambda_max_raw() <= 1e-9 * e.lambda_min().abs());
        assert_eq!(e.kernel_count(1e-9), 1);
        assert!(e.kernel_cosine(g.nodes()) >= 1.0 - 1e-9);
        assert!(e.orthonormality_defect() < 1e-10);
        assert!(e.reconstruction_residual() < 1e-9);
        let f: Vec<f64> = g.nodes().iter().map(|k| 0.7 * k).collect();
        let v = e.propagate(&f, 5.0).unwrap();
        for (a, b) in v.iter().zip(&f) {
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn solvers_agree() {
        let g = build_grid(20.0, 60).unwrap();
        let eq = equilibrium_weights(&g);
        let op = assemble_linearized(&g, &eq, &ReductionConstants::default());
        let a = spectral_decompose(&op, &g, 1e-13, Eigensolver::Jacobi).unwrap();
        let b = spectral_decompose(&op, &g, 1e-13, Eigensolver::Householder).unwrap();
        let scale = a.lambda_min().abs();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-11 * scale);
        }
    }

    #[test]
    fn zero_time_and_negative_time() {
        let (g, _, e) = system(10.0, 40);
        let f: Vec<f64> = g.nodes().iter().map(|k| (-k).exp()).collect();
        assert_eq!(e.propagate(&f, 0.0).unwrap(), f);
        assert!(e.propagate(&f, -1.0).is_err());
    }

    #[test]
    fn stepper_tracks_spectral_solution() {
        let (g, _, e) = system(10.0, 40);
        let f: Vec<f64> = g.nodes().iter().map(|k| k * k * (-k).exp()).collect();
        let exact = e.propagate(&f, 0.05).unwrap();
        let err = |steps: usize| {
            let s = TrapezoidStepper::new(&e, 0.05 / steps as f64).unwrap();
            let v = s.advance(&f, steps);
            v.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(400), err(800));
        assert!(e1 < 1e-3, "{e1}");
        assert!(e2 < e1);
    }
}
