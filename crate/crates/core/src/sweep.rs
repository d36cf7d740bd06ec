//! Maximum directivity and REIN of circular arrays over a parameter grid.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{CarrierContext, Direction};
use crate::metrics::QuadratureSpec;
use crate::par::{map_slice, Execution};
use crate::synthesis::uca_max_directivity;

/// Sensors closer than this many wavelengths count as coincident.
const COINCIDENT_TOL_LAMBDA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub radius_m: f64,
    pub f_mhz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub radius_m: f64,
    pub f_mhz: f64,
    pub r_over_lambda: f64,
    pub dmax_db: f64,
    pub gamma_db: f64,
    /// `ok`, `degenerate-geometry`, or an error description.
    pub status: String,
}

pub fn evaluate_point(p: &SweepPoint, look: &Direction, quad: &QuadratureSpec) -> SweepRow {
    let mut row = SweepRow {
        n: p.n,
        radius_m: p.radius_m,
        f_mhz: p.f_mhz,
        r_over_lambda: f64::NAN,
        dmax_db: f64::NAN,
        gamma_db: f64::NAN,
        status: String::new(),
    };
    let ctx = match CarrierContext::from_mhz(p.f_mhz) {
        Ok(c) => c,
        Err(e) => {
            row.status = e.to_string();
            return row;
        }
    };
    row.r_over_lambda = p.radius_m / ctx.wavelength();
    let coincident = p.n > 1
        && 2.0 * p.radius_m * (std::f64::consts::PI / p.n as f64).sin()
            <= COINCIDENT_TOL_LAMBDA * ctx.wavelength();
    if coincident {
        row.status = "degenerate-geometry".into();
        return row;
    }
    match uca_max_directivity(p.n, p.radius_m, &ctx, look, quad) {
        Ok((d, g)) => {
            row.dmax_db = d;
            row.gamma_db = g;
            row.status = "ok".into();
        }
        Err(Error::InvalidGeometry(_)) => row.status = "degenerate-geometry".into(),
        Err(e) => row.status = e.to_string(),
    }
    row
}

/// One row per point, in input order.
pub fn run_sweep(
    points: &[SweepPoint],
    look: &Direction,
    quad: &QuadratureSpec,
    exec: Execution,
) -> Vec<SweepRow> {
    map_slice(exec, points, |p| evaluate_point(p, look, quad))
}
