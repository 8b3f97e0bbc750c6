//! Perturbations stored as radial coefficient vectors per spherical-harmonic sector.
//!
//! A field represents `F(p) = Σ_{ℓm} F_{ℓm}(|p|) √(4π) Y_{ℓm}(p/|p|)`, so that a
//! purely radial perturbation `f(|p|)` is the single sector `(0, 0)` with
//! coefficient vector `f`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{EquilibriumWeights, RadialGrid};

pub const L_MAX: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Sector {
    pub l: u32,
    pub m: i32,
}

impl Sector {
    pub const RADIAL: Sector = Sector { l: 0, m: 0 };

    pub fn new(l: u32, m: i32) -> Result<Self> {
        if l > L_MAX {
            return Err(Error::config("sector.l", format!("l = {l} exceeds L_max = {L_MAX}")));
        }
        if m.unsigned_abs() > l {
            return Err(Error::config("sector.m", format!("|m| = {} exceeds l = {l}", m.abs())));
        }
        Ok(Sector { l, m })
    }
}

impl std::fmt::Display for Sector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.l, self.m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicField {
    sectors: Vec<(Sector, Vec<f64>)>,
    len: usize,
}

impl HarmonicField {
    pub fn new(len: usize) -> Self {
        HarmonicField {
            sectors: Vec::new(),
            len,
        }
    }

    pub fn radial(values: Vec<f64>) -> Self {
        let len = values.len();
        HarmonicField {
            sectors: vec![(Sector::RADIAL, values)],
            len,
        }
    }

    /// Adds a sector, rejecting duplicates, wrong lengths and non-finite entries.
    pub fn insert(&mut self, sector: Sector, values: Vec<f64>) -> Result<()> {
        if values.len() != self.len {
            return Err(Error::config(
                "field",
                format!("sector {sector} has {} entries, grid has {}", values.len(), self.len),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::config(
                "field",
                format!("sector {sector} has a non-finite entry at node {}", i + 1),
            ));
        }
        if self.get(sector).is_some() {
            return Err(Error::config("field", format!("duplicate sector {sector}")));
        }
        self.sectors.push((sector, values));
        Ok(())
    }

    pub fn with_sector(mut self, sector: Sector, values: Vec<f64>) -> Result<Self> {
        self.insert(sector, values)?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn sectors(&self) -> impl Iterator<Item = (Sector, &[f64])> {
        self.sectors.iter().map(|(s, v)| (*s, v.as_slice()))
    }

    pub fn sector_list(&self) -> Vec<Sector> {
        self.sectors.iter().map(|(s, _)| *s).collect()
    }

    pub fn get(&self, sector: Sector) -> Option<&[f64]> {
        self.sectors
            .iter()
            .find(|(s, _)| *s == sector)
            .map(|(_, v)| v.as_slice())
    }

    pub fn require(&self, sector: Sector) -> Result<&[f64]> {
        self.get(sector).ok_or(Error::MissingSector {
            l: sector.l,
            m: sector.m,
        })
    }

    /// Applies `f` to every sector's radial vector.
    pub fn map_sectors<F>(&self, mut f: F) -> HarmonicField
    where
        F: FnMut(Sector, &[f64]) -> Vec<f64>,
    {
        HarmonicField {
            sectors: self.sectors.iter().map(|(s, v)| (*s, f(*s, v))).collect(),
            len: self.len,
        }
    }
}

/// `Σ_i F_i k_i^r μ_i` for one sector.
pub fn moment(
    field: &HarmonicField,
    sector: Sector,
    power: u32,
    grid: &RadialGrid,
    weights: &EquilibriumWeights,
) -> Result<f64> {
    if power > 2 {
        return Err(Error::Domain(format!("moment power {power} not in {{0, 1, 2}}")));
    }
    let f = field.require(sector)?;
    Ok(radial_moment(f, power, grid, weights))
}

pub fn radial_moment(f: &[f64], power: u32, grid: &RadialGrid, weights: &EquilibriumWeights) -> f64 {
    f.iter()
        .zip(grid.nodes())
        .zip(&weights.mu)
        .map(|((f, k), mu)| f * k.powi(power as i32) * mu)
        .sum()
}

/// Coefficient `c` of the energy-preserving projection `c·k` of a radial vector.
pub fn kernel_coefficient(f: &[f64], grid: &RadialGrid, weights: &EquilibriumWeights) -> f64 {
    radial_moment(f, 1, grid, weights) / radial_moment(&vec![1.0; f.len()], 2, grid, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, equilibrium_weights};
    use crate::quadrature::integrate;
    use std::f64::consts::PI;

    #[test]
    fn moments_of_unit_field() {
        let g = build_grid(40.0, 400).unwrap();
        let eq = equilibrium_weights(&g);
        let f = HarmonicField::radial(vec![1.0; 400]);
        let m0 = moment(&f, Sector::RADIAL, 0, &g, &eq).unwrap();
        let m1 = moment(&f, Sector::RADIAL, 1, &g, &eq).unwrap();
        assert!((m0 - 41.341_70).abs() < 1e-4);
        assert!((m1 - 90.6330).abs() < 1e-4);
        for r in 0..=2 {
            let direct = integrate(
                |k: f64| 4.0 * PI * k.powi(2 + r) * crate::grid::m_eq(k),
                1e-300,
                60.0,
                1e-14,
                0.0,
                4000,
            );
            let m = moment(&f, Sector::RADIAL, r as u32, &g, &eq).unwrap();
            assert!((m / direct.value - 1.0).abs() < 1e-8);
        }
        let z = HarmonicField::radial(vec![0.0; 400]);
        assert_eq!(moment(&z, Sector::RADIAL, 2, &g, &eq).unwrap(), 0.0);
    }

    #[test]
    fn missing_sector_is_reported() {
        let g = build_grid(10.0, 20).unwrap();
        let eq = equilibrium_weights(&g);
        let f = HarmonicField::radial(vec![1.0; 20]);
        let e = moment(&f, Sector::new(2, 1).unwrap(), 0, &g, &eq).unwrap_err();
        assert!(matches!(e, Error::MissingSector { l: 2, m: 1 }));
    }

    #[test]
    fn field_invariants() {
        let mut f = HarmonicField::new(3);
        f.insert(Sector::RADIAL, vec![1.0, 2.0, 3.0]).unwrap();
        assert!(f.insert(Sector::RADIAL, vec![0.0; 3]).is_err());
        assert!(f.insert(Sector::new(1, 0).unwrap(), vec![f64::NAN, 0.0, 0.0]).is_err());
        assert!(f.insert(Sector::new(1, 0).unwrap(), vec![0.0; 2]).is_err());
        assert!(Sector::new(1, 2).is_err());
        assert!(Sector::new(9, 0).is_err());
    }
}
