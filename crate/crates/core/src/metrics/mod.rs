//! Array pattern, directivity matrices, directivity and REIN.

mod pattern;
mod peaks;
mod quadrature;

pub use pattern::{
    sample_azimuth_cut, sample_pattern, GridResolution, PatternGrid, PatternSource, WeightedArray,
};
pub use peaks::{
    find_sidelobe_peaks, mainlobe_radius, worst_sidelobe, MainlobeExclusion, SidelobePeak,
};
pub use quadrature::{
    compute_a, compute_a_with, gauss_legendre, integrate_noise_matrix, QuadratureReport,
    QuadratureSpec,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{steering_vector, CarrierContext, Direction, SensorArray, SteeringVector};
use crate::par::Execution;

/// Complex excitation weights, one per sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<[f64; 2]>", try_from = "Vec<[f64; 2]>")]
pub struct WeightVector(pub DVector<Complex64>);

impl WeightVector {
    pub fn new(values: DVector<Complex64>) -> Self {
        Self(values)
    }

    pub fn from_slice(values: &[Complex64]) -> Self {
        Self(DVector::from_column_slice(values))
    }

    /// `count` ones.
    pub fn uniform(count: usize) -> Self {
        Self(DVector::from_element(count, Complex64::new(1.0, 0.0)))
    }

    pub fn values(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sum |w_k|^2`.
    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// Cyclic shift by one: entry `k` takes the old entry `k - 1`.
    pub fn rotated(&self) -> Self {
        let n = self.len();
        Self(DVector::from_fn(n, |k, _| self.0[(k + n - 1) % n]))
    }
}

impl From<WeightVector> for Vec<[f64; 2]> {
    fn from(w: WeightVector) -> Self {
        w.0.iter().map(|z| [z.re, z.im]).collect()
    }
}

impl TryFrom<Vec<[f64; 2]>> for WeightVector {
    type Error = Error;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self> {
        if pairs.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("non-finite weight".into()));
        }
        Ok(Self(DVector::from_iterator(
            pairs.len(),
            pairs.iter().map(|p| Complex64::new(p[0], p[1])),
        )))
    }
}

/// A power ratio in linear units and decibels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerRatio {
    pub linear: f64,
    pub db: f64,
}

impl PowerRatio {
    pub fn from_linear(linear: f64) -> Self {
        Self {
            linear,
            db: to_db(linear),
        }
    }
}

pub fn to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `F = w^H v`.
pub fn pattern_response(w: &WeightVector, v: &SteeringVector) -> Result<Complex64> {
    if w.len() != v.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            found: v.len(),
        });
    }
    Ok(w.0.dotc(&v.0))
}

/// `w^H M w` for Hermitian `M`, real part.
pub(crate) fn hermitian_form(m: &DMatrix<Complex64>, w: &DVector<Complex64>) -> f64 {
    w.dotc(&(m * w)).re
}

/// Rank-one look-direction matrix `B = v0 v0^H`.
pub fn compute_b(
    array: &SensorArray,
    ctx: &CarrierContext,
    look: &Direction,
) -> DMatrix<Complex64> {
    let v0 = steering_vector(array, ctx, look).0;
    &v0 * v0.adjoint()
}

/// `A` and `B` for one array, carrier and look direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectivityMatrices {
    pub a: DMatrix<Complex64>,
    pub b: DMatrix<Complex64>,
    pub ctx: CarrierContext,
    pub look: Direction,
    pub quadrature: QuadratureReport,
}

impl DirectivityMatrices {
    pub fn build(
        array: &SensorArray,
        ctx: &CarrierContext,
        look: &Direction,
        quad: &QuadratureSpec,
    ) -> Result<Self> {
        Self::build_with(array, ctx, look, quad, Execution::default())
    }

    pub fn build_with(
        array: &SensorArray,
        ctx: &CarrierContext,
        look: &Direction,
        quad: &QuadratureSpec,
        exec: Execution,
    ) -> Result<Self> {
        let (a, quadrature) = compute_a_with(array, ctx, quad, exec)?;
        Ok(Self {
            a,
            b: compute_b(array, ctx, look),
            ctx: *ctx,
            look: *look,
            quadrature,
        })
    }

    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    /// Debug dump as JSON.
    pub fn to_json(&self) -> String {
        let split = |m: &DMatrix<Complex64>| MatrixJson {
            re: m
                .row_iter()
                .map(|r| r.iter().map(|z| z.re).collect())
                .collect(),
            im: m
                .row_iter()
                .map(|r| r.iter().map(|z| z.im).collect())
                .collect(),
        };
        let doc = MatricesJson {
            frequency_hz: self.ctx.frequency(),
            wavelength_m: self.ctx.wavelength(),
            look_theta_rad: self.look.theta(),
            look_phi_rad: self.look.phi(),
            quadrature: self.quadrature,
            a: split(&self.a),
            b: split(&self.b),
        };
        serde_json::to_string_pretty(&doc).expect("matrices serialize")
    }
}

#[derive(Serialize)]
struct MatrixJson {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct MatricesJson {
    frequency_hz: f64,
    wavelength_m: f64,
    look_theta_rad: f64,
    look_phi_rad: f64,
    quadrature: QuadratureReport,
    a: MatrixJson,
    b: MatrixJson,
}

/// Generalized Rayleigh quotient `D = w^H B w / w^H A w`.
pub fn directivity(w: &WeightVector, mats: &DirectivityMatrices) -> Result<PowerRatio> {
    check_weight(w, mats.size())?;
    let num = hermitian_form(&mats.b, &w.0);
    let den = hermitian_form(&mats.a, &w.0);
    Ok(PowerRatio::from_linear(num / den))
}

/// Ratio of external to internal noise, `gamma = w^H A w / w^H w`.
pub fn rein(w: &WeightVector, a: &DMatrix<Complex64>) -> Result<PowerRatio> {
    check_weight(w, a.nrows())?;
    Ok(PowerRatio::from_linear(
        hermitian_form(a, &w.0) / w.norm_squared(),
    ))
}

fn check_weight(w: &WeightVector, n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: w.len(),
        });
    }
    if w.is_zero() {
        return Err(Error::ZeroWeight);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_uca;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn single_isotropic_sensor() {
        let a = make_uca(1, 0.0, 0.0).unwrap();
        let ctx = CarrierContext::from_mhz(4.0).unwrap();
        let look = Direction::horizontal(0.0);
        let m = DirectivityMatrices::build(&a, &ctx, &look, &quad()).unwrap();
        assert!((m.a[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((m.b[(0, 0)].re - 1.0).abs() < 1e-15);
        let w = WeightVector::uniform(1);
        let d = directivity(&w, &m).unwrap();
        assert!((d.linear - 1.0).abs() < 1e-14 && d.db.abs() < 1e-12);
        let g = rein(&w, &m.a).unwrap();
        assert!((g.linear - 1.0).abs() < 1e-14);
    }

    #[test]
    fn b_diagonal_is_unit_for_isotropic() {
        let a = make_uca(6, 7.0, 0.3).unwrap();
        let ctx = CarrierContext::from_mhz(9.0).unwrap();
        let b = compute_b(&a, &ctx, &Direction::new(1.2, 0.4).unwrap());
        for k in 0..6 {
            assert!((b[(k, k)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        assert!((b.trace().re - 6.0).abs() < 1e-13);
    }

    #[test]
    fn normalization_identity() {
        let a = make_uca(5, 3.0, 0.0).unwrap();
        let ctx = CarrierContext::from_mhz(4.0).unwrap();
        let v0 = steering_vector(&a, &ctx, &Direction::horizontal(0.5));
        let w = WeightVector(v0.0.unscale(v0.0.norm_squared()));
        let f = pattern_response(&w, &v0).unwrap();
        assert!((f - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let zenith = steering_vector(&a, &ctx, &Direction::new(0.0, 0.0).unwrap());
        let u = WeightVector(DVector::from_element(5, Complex64::new(0.2, 0.0)));
        assert!((pattern_response(&u, &zenith).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn length_and_zero_errors() {
        let w = WeightVector::uniform(3);
        let v = SteeringVector(DVector::from_element(2, Complex64::new(1.0, 0.0)));
        assert!(matches!(
            pattern_response(&w, &v),
            Err(Error::LengthMismatch { .. })
        ));
        let a = DMatrix::<Complex64>::identity(3, 3);
        let z = WeightVector(DVector::zeros(3));
        assert_eq!(rein(&z, &a), Err(Error::ZeroWeight));
    }

    #[test]
    fn db_round_trip() {
        for x in [1e-9, 0.003, 1.0, 17.2, 4.5e6] {
            assert!((from_db(to_db(x)) - x).abs() <= 1e-12 * x);
        }
    }

    #[test]
    fn weights_serialize_as_pairs() {
        let w = WeightVector::from_slice(&[Complex64::new(1.5, -2.0), Complex64::new(0.0, 0.25)]);
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, "[[1.5,-2.0],[0.0,0.25]]");
        let back: WeightVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn rotation_is_cyclic() {
        let w = WeightVector::from_slice(&[1.0.into(), 2.0.into(), 3.0.into()]);
        let r = w.rotated();
        assert_eq!(r.0.as_slice(), &[3.0.into(), 1.0.into(), 2.0.into()]);
    }
}
