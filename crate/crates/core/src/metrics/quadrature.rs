//! Spherical quadrature for the noise-power matrix `A`.
//!
//! `A = (1/4pi) integral v v^H sin(theta) dtheta dphi` is evaluated with
//! Gauss-Legendre nodes in `cos(theta)` and the trapezoid rule in `phi`,
//! doubling both node counts until successive matrices agree entrywise.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{steering_vector, CarrierContext, Direction, SensorArray};
use crate::par::{map_range, Execution};

/// Node counts for the polar and azimuth integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub n_theta: usize,
    pub n_phi: usize,
    /// Largest entrywise change allowed between a rule and its doubling.
    pub tolerance: f64,
    /// Doubling stops with an error beyond this many polar nodes.
    pub max_n_theta: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            n_theta: 64,
            n_phi: 128,
            tolerance: 1e-10,
            max_n_theta: 4096,
        }
    }
}

impl QuadratureSpec {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        let spec = Self {
            n_theta,
            n_phi,
            ..Self::default()
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 8 || self.n_phi < 16 {
            return Err(Error::InvalidConfig(format!(
                "quadrature {}x{} below the 8x16 minimum",
                self.n_theta, self.n_phi
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(
                "quadrature tolerance must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// What the adaptive integration ended up using.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    pub n_theta: usize,
    pub n_phi: usize,
    /// Max entrywise change against the previous (halved) rule.
    pub last_change: f64,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` for `|z| < 1`, via the three-term recurrence.
fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (pn, pnm1) = if n == 1 { (z, 1.0) } else { (p1, p0) };
    (pn, n as f64 * (z * pn - pnm1) / (z * z - 1.0))
}

/// One fixed-size quadrature rule for `A`.
pub fn integrate_noise_matrix(
    array: &SensorArray,
    ctx: &CarrierContext,
    n_theta: usize,
    n_phi: usize,
    exec: Execution,
) -> DMatrix<Complex64> {
    let n = array.len();
    let (nodes, weights) = gauss_legendre(n_theta);
    let packed = n * (n + 1) / 2;

    // Each polar ring contributes an upper-triangle partial sum; rings are
    // added afterwards in node order so the result does not depend on `exec`.
    let rings = map_range(exec, n_theta, |i| {
        let ct = nodes[i];
        let theta = ct.clamp(-1.0, 1.0).acos();
        let mut acc = vec![Complex64::new(0.0, 0.0); packed];
        for j in 0..n_phi {
            let phi = TAU * j as f64 / n_phi as f64;
            let dir = Direction::new(theta, phi).expect("quadrature node on the sphere");
            let v = steering_vector(array, ctx, &dir).0;
            let mut idx = 0;
            for r in 0..n {
                for c in r..n {
                    acc[idx] += v[r] * v[c].conj();
                    idx += 1;
                }
            }
        }
        // (1/4pi) * w_i * (2pi/n_phi) = w_i / (2 n_phi)
        let scale = weights[i] / (2.0 * n_phi as f64);
        for a in acc.iter_mut() {
            *a *= scale;
        }
        acc
    });

    let mut total = vec![Complex64::new(0.0, 0.0); packed];
    for ring in &rings {
        for (t, r) in total.iter_mut().zip(ring) {
            *t += r;
        }
    }
    let mut a = DMatrix::zeros(n, n);
    let mut idx = 0;
    for r in 0..n {
        for c in r..n {
            let val = total[idx];
            if r == c {
                a[(r, c)] = Complex64::new(val.re, 0.0);
            } else {
                a[(r, c)] = val;
                a[(c, r)] = val.conj();
            }
            idx += 1;
        }
    }
    a
}

/// Adaptive evaluation of `A`, doubling node counts until converged.
pub fn compute_a(
    array: &SensorArray,
    ctx: &CarrierContext,
    quad: &QuadratureSpec,
) -> Result<(DMatrix<Complex64>, QuadratureReport)> {
    compute_a_with(array, ctx, quad, Execution::default())
}

pub fn compute_a_with(
    array: &SensorArray,
    ctx: &CarrierContext,
    quad: &QuadratureSpec,
    exec: Execution,
) -> Result<(DMatrix<Complex64>, QuadratureReport)> {
    quad.validate()?;
    let (mut nt, mut np) = (quad.n_theta, quad.n_phi);
    let mut current = integrate_noise_matrix(array, ctx, nt, np, exec);
    loop {
        let next = integrate_noise_matrix(array, ctx, 2 * nt, 2 * np, exec);
        let change = (&next - &current)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        nt *= 2;
        np *= 2;
        if change < quad.tolerance {
            return Ok((
                next,
                QuadratureReport {
                    n_theta: nt,
                    n_phi: np,
                    last_change: change,
                },
            ));
        }
        if 2 * nt > quad.max_n_theta {
            return Err(Error::QuadratureNotConverged {
                max_change: change,
                n_theta: nt,
                n_phi: np,
            });
        }
        current = next;
    }
}
