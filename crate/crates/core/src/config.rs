//! Run configuration.
//!
//! The file is TOML: `key = value` lines grouped under `[section]` headers,
//! one `[[sector]]` table per harmonic sector. Every key except the sectors
//! and `condensate.m_c0` has a default.
//!
//! ```toml
//! [grid]
//! k_max = 40.0
//! n = 400
//! rule = "end-corrected"      # or "trapezoid"
//!
//! [constants]
//! n_c = 1.0
//!
//! [[sector]]
//! l = 0
//! m = 0
//! profile = "-1"
//!
//! [condensate]
//! m_c0 = 10.0
//!
//! [tau]
//! tau_min = 1e-9
//! tau_max = 1e4
//! per_decade = 20
//!
//! [output]
//! t_min = 1e-2                # geometric output times, plus t = 0
//! t_max = 1e4
//! t_count = 121
//! # t = [0.0, 1.0, 10.0]      # explicit list instead
//! snapshots = []              # τ values for full profile dumps
//! svg = true
//!
//! [tolerances]
//! gamma = 1e-10
//! eigen = 1e-12
//! residual_t0 = 0.05
//! residual_dt = 1e-3
//! residual_samples = 51
//!
//! [gamma]
//! scale = "full"              # or "half"
//!
//! [spectrum]
//! solver = "jacobi"           # or "householder"
//! max_sweeps = 200
//!
//! [scan]
//! m_c0_min = 1.0
//! m_c0_max = 20.0
//! count = 20
//! rel_tol = 1e-4
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{HarmonicField, Sector};
use crate::gamma::ArgumentScale;
use crate::grid::{RadialGrid, WeightRule};
use crate::profile::parse_profile;
use crate::spectral::{Eigensolver, DEFAULT_SWEEPS};
use crate::timechange::SamplePolicy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub constants: ConstantsConfig,
    #[serde(rename = "sector")]
    pub sectors: Vec<SectorConfig>,
    pub condensate: CondensateConfig,
    #[serde(default)]
    pub tau: SamplePolicy,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub gamma: GammaConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub scan: ScanConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub k_max: f64,
    pub n: usize,
    pub rule: WeightRule,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            k_max: 40.0,
            n: 400,
            rule: WeightRule::EndCorrected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsConfig {
    pub n_c: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig { n_c: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorConfig {
    pub l: u32,
    pub m: i32,
    pub profile: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondensateConfig {
    pub m_c0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    pub snapshots: Vec<f64>,
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            t_min: 1e-2,
            t_max: 1e4,
            t_count: 121,
            t: None,
            snapshots: Vec::new(),
            svg: true,
        }
    }
}

impl OutputConfig {
    /// Output times: the explicit list, or `0` followed by a geometric ladder.
    pub fn times(&self) -> Vec<f64> {
        if let Some(t) = &self.t {
            return t.clone();
        }
        let mut out = vec![0.0];
        let n = self.t_count.max(2);
        let r = (self.t_max / self.t_min).ln();
        out.extend((0..n).map(|i| self.t_min * (r * i as f64 / (n - 1) as f64).exp()));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub gamma: f64,
    pub eigen: f64,
    pub residual_t0: f64,
    pub residual_dt: f64,
    pub residual_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gamma: 1e-10,
            eigen: 1e-12,
            residual_t0: 0.05,
            residual_dt: 1e-3,
            residual_samples: 51,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct GammaConfig {
    pub scale: ArgumentScale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub solver: Eigensolver,
    /// Sweep limit of the Jacobi solver.
    pub max_sweeps: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            solver: Eigensolver::Jacobi,
            max_sweeps: DEFAULT_SWEEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub m_c0_min: f64,
    pub m_c0_max: f64,
    pub count: usize,
    pub rel_tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            m_c0_min: 1.0,
            m_c0_max: 20.0,
            count: 20,
            rel_tol: 1e-4,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// The effective configuration with all defaults filled in.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        positive("grid.k_max", self.grid.k_max)
            .map_err(|_| Error::config("grid.k_max", "k_max must be positive"))?;
        if self.grid.n < 8 {
            return Err(Error::config("grid.n", format!("N ≥ 8 required, got {}", self.grid.n)));
        }
        positive("constants.n_c", self.constants.n_c)?;
        positive("condensate.m_c0", self.condensate.m_c0)?;
        if self.sectors.is_empty() {
            return Err(Error::config("sector", "at least one sector is required"));
        }
        self.tau.validate()?;
        let t = &self.tolerances;
        positive("tolerances.gamma", t.gamma)?;
        if t.gamma < 1e-12 {
            return Err(Error::config("tolerances.gamma", "must be at least 1e-12"));
        }
        positive("tolerances.eigen", t.eigen)?;
        if self.spectrum.max_sweeps == 0 {
            return Err(Error::config("spectrum.max_sweeps", "must be at least 1"));
        }
        positive("tolerances.residual_t0", t.residual_t0)?;
        positive("tolerances.residual_dt", t.residual_dt)?;
        if t.residual_samples < 3 {
            return Err(Error::config("tolerances.residual_samples", "at least 3 samples required"));
        }
        let o = &self.output;
        match &o.t {
            Some(list) => {
                if list.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                    return Err(Error::config("output.t", "times must be finite and non-negative"));
                }
                if list.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::config("output.t", "times must be strictly increasing"));
                }
            }
            None => {
                positive("output.t_min", o.t_min)?;
                if !(o.t_max > o.t_min && o.t_max.is_finite()) {
                    return Err(Error::config("output.t_max", "must exceed output.t_min"));
                }
                if o.t_count < 2 {
                    return Err(Error::config("output.t_count", "at least 2 times required"));
                }
            }
        }
        if o.snapshots.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::config("output.snapshots", "τ values must be finite and non-negative"));
        }
        let s = &self.scan;
        positive("scan.m_c0_min", s.m_c0_min)?;
        if !(s.m_c0_max > s.m_c0_min) {
            return Err(Error::config("scan.m_c0_max", "must exceed scan.m_c0_min"));
        }
        if s.count < 2 {
            return Err(Error::config("scan.count", "at least 2 points required"));
        }
        positive("scan.rel_tol", s.rel_tol)?;
        let mut seen = Vec::new();
        for (i, sc) in self.sectors.iter().enumerate() {
            let sector = Sector::new(sc.l, sc.m)?;
            if seen.contains(&sector) {
                return Err(Error::config(format!("sector[{i}]"), format!("duplicate sector {sector}")));
            }
            seen.push(sector);
            parse_profile(&sc.profile)?;
        }
        Ok(())
    }

    /// Samples every sector profile on the grid.
    pub fn initial_field(&self, grid: &RadialGrid) -> Result<HarmonicField> {
        let mut field = HarmonicField::new(grid.len());
        for sc in &self.sectors {
            let expr = parse_profile(&sc.profile)?;
            field.insert(Sector::new(sc.l, sc.m)?, expr.sample(grid.nodes())?)?;
        }
        Ok(field)
    }

    /// Uniform residual grid at step `dt`.
    pub fn residual_times(&self, dt: f64) -> Vec<f64> {
        let t = &self.tolerances;
        let n = ((t.residual_samples - 1) as f64 * t.residual_dt / dt).round() as usize;
        (0..=n).map(|i| t.residual_t0 + i as f64 * dt).collect()
    }
}
