use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use superdirective::composite::LineAxis;
use superdirective::geometry::Direction;
use superdirective::metrics::{GridResolution, QuadratureSpec, WeightVector};
use superdirective::synthesis::{RadiusSearch, SidelobeRegion, SynthesisConfig};

use crate::CliError;

/// REIN floors for the HF band, MHz to dB.
pub const DEFAULT_EPSILON_DB: [(f64, f64); 5] = [
    (4.0, -30.0),
    (6.0, -23.0),
    (8.0, -19.0),
    (10.0, -16.0),
    (12.0, -13.0),
];

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub radius_m: f64,
    pub rotation_deg: f64,
    pub f_mhz: Vec<f64>,
    pub look_theta_deg: f64,
    pub look_phi_deg: f64,
    /// Overrides of the default floors, keyed by frequency in MHz.
    pub epsilon_db: BTreeMap<String, f64>,
    pub sidelobe_db: f64,
    pub delta_db: f64,
    pub relax_step_db: f64,
    pub max_outer_iterations: usize,
    pub max_pin_iterations: usize,
    pub grid_deg: f64,
    pub quadrature: QuadratureConfig,
    pub region: SidelobeRegion,
    pub composite: CompositeConfig,
    pub sweep: SweepConfig,
    pub radius_search: RadiusSearchConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 5,
            radius_m: 3.0,
            rotation_deg: 0.0,
            f_mhz: DEFAULT_EPSILON_DB.iter().map(|(f, _)| *f).collect(),
            look_theta_deg: 90.0,
            look_phi_deg: 0.0,
            epsilon_db: BTreeMap::new(),
            sidelobe_db: -25.0,
            delta_db: 0.1,
            relax_step_db: 1.0,
            max_outer_iterations: 10,
            max_pin_iterations: 50,
            grid_deg: 1.0,
            quadrature: QuadratureConfig::default(),
            region: SidelobeRegion::AzimuthCut,
            composite: CompositeConfig::default(),
            sweep: SweepConfig::default(),
            radius_search: RadiusSearchConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub n_theta: usize,
    pub n_phi: usize,
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            n_theta: q.n_theta,
            n_phi: q.n_phi,
            tolerance: q.tolerance,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompositeConfig {
    pub count: usize,
    pub spacing_m: f64,
    pub axis: LineAxis,
    /// `[re, im]` per sub-array; all ones when absent.
    pub excitations: Option<Vec<[f64; 2]>>,
}

impl Default for CompositeConfig {
    fn default() -> Self {
        Self {
            count: 8,
            spacing_m: 15.0,
            axis: LineAxis::Y,
            excitations: None,
        }
    }
}

impl CompositeConfig {
    pub fn excitation_weights(&self) -> Option<WeightVector> {
        self.excitations.as_ref().map(|e| {
            WeightVector::from_slice(
                &e.iter()
                    .map(|[re, im]| Complex64::new(*re, *im))
                    .collect::<Vec<_>>(),
            )
        })
    }
}

/// Axes of the sweep grid. Missing axes take the single value from the
/// top-level design.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n: Option<Vec<usize>>,
    pub radius_m: Option<Vec<f64>>,
    pub r_over_lambda: Option<Vec<f64>>,
    pub f_mhz: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadiusSearchConfig {
    pub lo_over_lambda: f64,
    pub hi_over_lambda: f64,
    pub tolerance_db: f64,
}

impl Default for RadiusSearchConfig {
    fn default() -> Self {
        let r = RadiusSearch::default();
        Self {
            lo_over_lambda: r.lo_over_lambda,
            hi_over_lambda: r.hi_over_lambda,
            tolerance_db: r.tolerance_db,
        }
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n == 0 {
            return Err(invalid("n", "sensor count must be >= 1"));
        }
        if !(self.radius_m.is_finite() && self.radius_m >= 0.0) {
            return Err(invalid(
                "radius_m",
                format!("{} must be >= 0", self.radius_m),
            ));
        }
        if self.f_mhz.is_empty() {
            return Err(invalid("f_mhz", "needs at least one frequency"));
        }
        if let Some(f) = self.f_mhz.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(invalid("f_mhz", format!("{f} MHz must be > 0")));
        }
        for key in self.epsilon_db.keys() {
            if key.trim().parse::<f64>().is_err() {
                return Err(invalid(
                    "epsilon_db",
                    format!("key {key:?} is not a frequency in MHz"),
                ));
            }
        }
        for &f in &self.f_mhz {
            self.epsilon_for(f)?;
        }
        if !(self.sidelobe_db < 0.0) {
            return Err(invalid(
                "sidelobe_db",
                format!("{} must be < 0", self.sidelobe_db),
            ));
        }
        if !(self.delta_db > 0.0) {
            return Err(invalid(
                "delta_db",
                format!("{} must be > 0", self.delta_db),
            ));
        }
        if !(self.grid_deg > 0.0 && self.grid_deg <= 45.0) {
            return Err(invalid(
                "grid_deg",
                format!("{} must be in (0, 45]", self.grid_deg),
            ));
        }
        self.quadrature_spec()?;
        self.look()?;
        if self.composite.count == 0 {
            return Err(invalid("composite.count", "must be >= 1"));
        }
        if !(self.composite.spacing_m.is_finite() && self.composite.spacing_m >= 0.0) {
            return Err(invalid("composite.spacing_m", "must be >= 0"));
        }
        if let Some(e) = &self.composite.excitations {
            if e.len() != self.composite.count {
                return Err(invalid(
                    "composite.excitations",
                    format!(
                        "has {} entries for {} sub-arrays",
                        e.len(),
                        self.composite.count
                    ),
                ));
            }
        }
        if self.sweep.radius_m.is_some() && self.sweep.r_over_lambda.is_some() {
            return Err(invalid("sweep", "give radius_m or r_over_lambda, not both"));
        }
        check_axis(
            "sweep.n",
            self.sweep
                .n
                .as_ref()
                .map(|v| v.iter().map(|x| *x as f64).collect()),
        )?;
        check_axis("sweep.radius_m", self.sweep.radius_m.clone())?;
        check_axis("sweep.r_over_lambda", self.sweep.r_over_lambda.clone())?;
        check_axis("sweep.f_mhz", self.sweep.f_mhz.clone())?;
        Ok(())
    }

    /// The REIN floor for `f_mhz`: an explicit entry, else the default table.
    pub fn epsilon_for(&self, f_mhz: f64) -> Result<f64, CliError> {
        let close = |k: f64| (k - f_mhz).abs() <= 1e-9 * f_mhz.max(1.0);
        for (k, v) in &self.epsilon_db {
            if let Ok(kf) = k.trim().parse::<f64>() {
                if close(kf) {
                    return Ok(*v);
                }
            }
        }
        DEFAULT_EPSILON_DB
            .iter()
            .find(|(k, _)| close(*k))
            .map(|(_, v)| *v)
            .ok_or_else(|| invalid("epsilon_db", format!("no entry for f = {f_mhz} MHz")))
    }

    pub fn look(&self) -> Result<Direction, CliError> {
        Direction::from_degrees(self.look_theta_deg, self.look_phi_deg)
            .map_err(|e| invalid("look_theta_deg", e))
    }

    pub fn quadrature_spec(&self) -> Result<QuadratureSpec, CliError> {
        let mut q = QuadratureSpec::new(self.quadrature.n_theta, self.quadrature.n_phi)
            .map_err(|e| invalid("quadrature", e))?;
        q.tolerance = self.quadrature.tolerance;
        q.validate().map_err(|e| invalid("quadrature", e))?;
        Ok(q)
    }

    pub fn grid(&self) -> GridResolution {
        GridResolution::degrees(self.grid_deg)
    }

    pub fn synthesis(&self, f_mhz: f64) -> Result<SynthesisConfig, CliError> {
        let mut s = SynthesisConfig::new(self.look()?, self.epsilon_for(f_mhz)?, self.sidelobe_db);
        s.delta_db = self.delta_db;
        s.relax_step_db = self.relax_step_db;
        s.max_outer_iterations = self.max_outer_iterations;
        s.max_pin_iterations = self.max_pin_iterations;
        s.region = self.region;
        s.grid = self.grid();
        s.quadrature = self.quadrature_spec()?;
        Ok(s)
    }

    pub fn radius_search(&self) -> Result<RadiusSearch, CliError> {
        Ok(RadiusSearch {
            lo_over_lambda: self.radius_search.lo_over_lambda,
            hi_over_lambda: self.radius_search.hi_over_lambda,
            tolerance_db: self.radius_search.tolerance_db,
            quadrature: self.quadrature_spec()?,
            ..RadiusSearch::default()
        })
    }

    /// `--quadrature NTHETAxNPHI`.
    pub fn override_quadrature(&mut self, text: &str) -> Result<(), CliError> {
        let (t, p) = text
            .split_once(['x', 'X'])
            .ok_or_else(|| invalid("--quadrature", format!("{text:?} is not NTHETAxNPHI")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| invalid("--quadrature", format!("{text:?} is not NTHETAxNPHI")))
        };
        self.quadrature.n_theta = parse(t)?;
        self.quadrature.n_phi = parse(p)?;
        self.quadrature_spec().map(|_| ())
    }
}

fn check_axis(field: &str, values: Option<Vec<f64>>) -> Result<(), CliError> {
    let Some(v) = values else { return Ok(()) };
    if v.is_empty() {
        return Err(invalid(field, "range is empty"));
    }
    let up = v.windows(2).all(|w| w[1] > w[0]);
    let down = v.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(invalid(field, "range must be strictly monotone"));
    }
    if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(invalid(field, "values must be finite and >= 0"));
    }
    Ok(())
}
