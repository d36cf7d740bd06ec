//! Sensor layouts, look directions and plane-wave steering vectors.
//!
//! Coordinates: `theta` is the polar angle from +z, `phi` the azimuth from +x
//! in the xy-plane. Circular arrays lie in the xy-plane, so the horizontal
//! cut is `theta = pi/2`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DVector, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A direction on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// Builds a direction, wrapping `phi` into `[0, 2pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidDirection(format!(
                "non-finite angle ({theta}, {phi})"
            )));
        }
        // tolerate rounding from degree conversions at the poles
        let eps = 1e-12;
        if theta < -eps || theta > PI + eps {
            return Err(Error::InvalidDirection(format!(
                "theta = {theta} outside [0, pi]"
            )));
        }
        Ok(Self {
            theta: theta.clamp(0.0, PI),
            phi: wrap_azimuth(phi),
        })
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    /// A direction in the horizontal plane (`theta = pi/2`).
    pub fn horizontal(phi: f64) -> Self {
        Self {
            theta: PI / 2.0,
            phi: wrap_azimuth(phi),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit propagation vector `(sin t cos p, sin t sin p, cos t)`.
    pub fn unit_vector(&self) -> Vector3<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(st * cp, st * sp, ct)
    }

    /// Partial derivative of the unit vector with respect to `theta`.
    pub fn d_unit_d_theta(&self) -> Vector3<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(ct * cp, ct * sp, -st)
    }

    /// Partial derivative of the unit vector with respect to `phi`.
    pub fn d_unit_d_phi(&self) -> Vector3<f64> {
        let st = self.theta.sin();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(-st * sp, st * cp, 0.0)
    }

    /// Great-circle angle to another direction, radians.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        // atan2 form stays accurate for nearly coincident directions
        a.cross(&b).norm().atan2(a.dot(&b))
    }
}

/// Wraps an azimuth into `[0, 2pi)`.
pub fn wrap_azimuth(phi: f64) -> f64 {
    let p = phi.rem_euclid(TAU);
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// Frequency, propagation speed and the wavelength they imply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarrierContext {
    f0: f64,
    c: f64,
    lambda: f64,
}

impl CarrierContext {
    pub fn new(f0_hz: f64, c: f64) -> Result<Self> {
        if !(f0_hz.is_finite() && f0_hz > 0.0) {
            return Err(Error::InvalidCarrier(format!(
                "frequency {f0_hz} Hz must be > 0"
            )));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidCarrier(format!(
                "propagation speed {c} m/s must be > 0"
            )));
        }
        Ok(Self {
            f0: f0_hz,
            c,
            lambda: c / f0_hz,
        })
    }

    /// Free-space carrier at `f_mhz` megahertz.
    pub fn from_mhz(f_mhz: f64) -> Result<Self> {
        Self::new(f_mhz * 1e6, SPEED_OF_LIGHT)
    }

    pub fn frequency(&self) -> f64 {
        self.f0
    }

    pub fn speed(&self) -> f64 {
        self.c
    }

    pub fn wavelength(&self) -> f64 {
        self.lambda
    }

    /// Angular frequency `2 pi f0`.
    pub fn omega(&self) -> f64 {
        TAU * self.f0
    }
}

/// Per-sensor element gain model `g_k(theta, phi)`.
///
/// Only the isotropic model ships; the hook exists so that steering vectors
/// and their derivatives carry the element term explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementPattern {
    #[default]
    Isotropic,
}

impl ElementPattern {
    pub fn gain(&self, _dir: &Direction) -> Complex64 {
        match self {
            ElementPattern::Isotropic => Complex64::new(1.0, 0.0),
        }
    }

    /// `(dg/dtheta, dg/dphi)`.
    pub fn gain_gradient(&self, _dir: &Direction) -> (Complex64, Complex64) {
        match self {
            ElementPattern::Isotropic => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        }
    }
}

/// Sensor positions in meters with their element patterns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ArrayLayout", into = "ArrayLayout")]
pub struct SensorArray {
    positions: Vec<Vector3<f64>>,
    elements: Vec<ElementPattern>,
}

impl SensorArray {
    /// An array of isotropic sensors.
    pub fn new(positions: Vec<Vector3<f64>>) -> Result<Self> {
        let elements = vec![ElementPattern::Isotropic; positions.len()];
        Self::with_elements(positions, elements)
    }

    pub fn with_elements(
        positions: Vec<Vector3<f64>>,
        elements: Vec<ElementPattern>,
    ) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidGeometry(
                "array needs at least one sensor".into(),
            ));
        }
        if positions.len() != elements.len() {
            return Err(Error::LengthMismatch {
                expected: positions.len(),
                found: elements.len(),
            });
        }
        if positions.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
            return Err(Error::InvalidGeometry(
                "non-finite sensor coordinate".into(),
            ));
        }
        Ok(Self {
            positions,
            elements,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vector3<f64>] {
        &self.positions
    }

    pub fn elements(&self) -> &[ElementPattern] {
        &self.elements
    }

    /// Smallest distance between two distinct sensors (infinite for N = 1).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.positions.iter().enumerate() {
            for b in &self.positions[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        best
    }

    /// True when two sensors sit closer than `tol` meters.
    pub fn has_coincident_sensors(&self, tol: f64) -> bool {
        self.min_separation() <= tol
    }

    /// Largest distance from the origin.
    pub fn max_radius(&self) -> f64 {
        self.positions.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Copy of the array shifted by `offset`.
    pub fn translated(&self, offset: Vector3<f64>) -> Self {
        Self {
            positions: self.positions.iter().map(|p| p + offset).collect(),
            elements: self.elements.clone(),
        }
    }
}

/// Serialized array layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayLayout {
    pub sensors: Vec<SensorRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorRecord {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    #[serde(default)]
    pub element: ElementPattern,
}

impl From<SensorArray> for ArrayLayout {
    fn from(a: SensorArray) -> Self {
        let sensors = a
            .positions
            .iter()
            .zip(&a.elements)
            .map(|(p, e)| SensorRecord {
                x: p.x,
                y: p.y,
                z: p.z,
                element: *e,
            })
            .collect();
        ArrayLayout { sensors }
    }
}

impl TryFrom<ArrayLayout> for SensorArray {
    type Error = Error;

    fn try_from(l: ArrayLayout) -> Result<Self> {
        let positions = l
            .sensors
            .iter()
            .map(|s| Vector3::new(s.x, s.y, s.z))
            .collect();
        let elements = l.sensors.iter().map(|s| s.element).collect();
        SensorArray::with_elements(positions, elements)
    }
}

/// Uniform circular array of `n` isotropic sensors in the xy-plane.
///
/// Sensor `k` sits at azimuth `2 pi k / n + rotation`.
pub fn make_uca(n: usize, radius: f64, rotation: f64) -> Result<SensorArray> {
    if n == 0 {
        return Err(Error::InvalidGeometry("sensor count must be >= 1".into()));
    }
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "radius {radius} m must be >= 0"
        )));
    }
    let positions = (0..n)
        .map(|k| {
            let a = TAU * k as f64 / n as f64 + rotation;
            Vector3::new(radius * a.cos(), radius * a.sin(), 0.0)
        })
        .collect();
    SensorArray::new(positions)
}

/// Plane-wave delay of a sensor relative to the origin, seconds.
///
/// `2 pi f0 tau` is the phase advance of the sensor for a wave arriving from
/// `dir`.
pub fn propagation_delay(position: &Vector3<f64>, dir: &Direction, ctx: &CarrierContext) -> f64 {
    position.dot(&dir.unit_vector()) / ctx.speed()
}

/// Complex steering vector, entry `k` is `g_k exp(j 2 pi f0 tau_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector(pub DVector<Complex64>);

impl SteeringVector {
    pub fn values(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn steering_vector(
    array: &SensorArray,
    ctx: &CarrierContext,
    dir: &Direction,
) -> SteeringVector {
    let u = dir.unit_vector();
    let k = ctx.omega() / ctx.speed();
    let v = DVector::from_iterator(
        array.len(),
        array
            .positions
            .iter()
            .zip(&array.elements)
            .map(|(p, g)| g.gain(dir) * Complex64::from_polar(1.0, k * p.dot(&u))),
    );
    SteeringVector(v)
}

/// Analytic `(dv/dtheta, dv/dphi)` of the steering vector.
pub fn steering_derivatives(
    array: &SensorArray,
    ctx: &CarrierContext,
    dir: &Direction,
) -> (DVector<Complex64>, DVector<Complex64>) {
    let u = dir.unit_vector();
    let du_t = dir.d_unit_d_theta();
    let du_p = dir.d_unit_d_phi();
    let k = ctx.omega() / ctx.speed();
    let n = array.len();
    let mut dt = DVector::zeros(n);
    let mut dp = DVector::zeros(n);
    for (i, (p, g)) in array.positions.iter().zip(&array.elements).enumerate() {
        let phase = Complex64::from_polar(1.0, k * p.dot(&u));
        let gain = g.gain(dir);
        let (gt, gp) = g.gain_gradient(dir);
        let j = Complex64::i();
        dt[i] = gt * phase + gain * j * k * p.dot(&du_t) * phase;
        dp[i] = gp * phase + gain * j * k * p.dot(&du_p) * phase;
    }
    (dt, dp)
}
