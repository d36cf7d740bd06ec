use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use num_complex::Complex64;

use super::WeightVector;
use crate::fmt::sig6;
use crate::geometry::{steering_vector, CarrierContext, Direction, SensorArray};
use crate::par::{map_range, Execution};

/// Anything that can report the far-field response in a direction.
pub trait PatternSource: Sync {
    fn response(&self, dir: &Direction) -> Complex64;
}

/// An array driven by a weight vector at one carrier.
#[derive(Debug, Clone, Copy)]
pub struct WeightedArray<'a> {
    pub array: &'a SensorArray,
    pub ctx: &'a CarrierContext,
    pub weights: &'a WeightVector,
}

impl PatternSource for WeightedArray<'_> {
    fn response(&self, dir: &Direction) -> Complex64 {
        let v = steering_vector(self.array, self.ctx, dir);
        self.weights.0.dotc(&v.0)
    }
}

impl<F> PatternSource for F
where
    F: Fn(&Direction) -> Complex64 + Sync,
{
    fn response(&self, dir: &Direction) -> Complex64 {
        self(dir)
    }
}

/// Sampling steps for pattern grids, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridResolution {
    pub theta_step: f64,
    pub phi_step: f64,
}

impl GridResolution {
    pub fn degrees(step: f64) -> Self {
        Self {
            theta_step: step.to_radians(),
            phi_step: step.to_radians(),
        }
    }
}

impl Default for GridResolution {
    fn default() -> Self {
        Self::degrees(1.0)
    }
}

/// Samples of `F(theta, phi)` on a rectangular grid, row-major in theta.
///
/// Azimuth is periodic. A grid with a single theta row is a horizontal cut.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternGrid {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl PatternGrid {
    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.phi.len() + j]
    }

    pub fn direction(&self, i: usize, j: usize) -> Direction {
        Direction::new(self.theta[i], self.phi[j]).expect("grid node on the sphere")
    }

    /// Largest node spacing along either axis, radians.
    pub fn max_step(&self) -> f64 {
        let dp = if self.phi.len() > 1 {
            TAU / self.phi.len() as f64
        } else {
            TAU
        };
        let dt = self
            .theta
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        dp.max(dt)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// CSV with `theta_deg,phi_deg,re,im,magnitude_dB`, magnitude relative to
    /// `reference` (usually the look-direction response).
    pub fn write_csv<W: Write>(&self, mut out: W, reference: Complex64) -> io::Result<()> {
        writeln!(out, "theta_deg,phi_deg,re,im,magnitude_dB")?;
        let r = reference.norm();
        for (i, t) in self.theta.iter().enumerate() {
            for (j, p) in self.phi.iter().enumerate() {
                let f = self.at(i, j);
                let db = (20.0 * (f.norm() / r).log10()).max(-300.0);
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    sig6(t.to_degrees()),
                    sig6(p.to_degrees()),
                    sig6(f.re),
                    sig6(f.im),
                    sig6(db)
                )?;
            }
        }
        Ok(())
    }
}

fn sample<S: PatternSource>(
    source: &S,
    theta: Vec<f64>,
    phi: Vec<f64>,
    exec: Execution,
) -> PatternGrid {
    let n_phi = phi.len();
    let rows = map_range(exec, theta.len(), |i| {
        phi.iter()
            .map(|&p| {
                source.response(&Direction::new(theta[i], p).expect("grid node on the sphere"))
            })
            .collect::<Vec<_>>()
    });
    let mut values = Vec::with_capacity(theta.len() * n_phi);
    for row in rows {
        values.extend(row);
    }
    PatternGrid { theta, phi, values }
}

fn phi_axis(step: f64) -> Vec<f64> {
    let n = ((TAU / step).round() as usize).max(2);
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

/// Pattern on the full sphere: `theta` in `[0, pi]` inclusive, `phi` in `[0, 2pi)`.
pub fn sample_pattern<S: PatternSource>(
    source: &S,
    res: GridResolution,
    exec: Execution,
) -> PatternGrid {
    let nt = ((PI / res.theta_step).round() as usize).max(1) + 1;
    let theta = (0..nt).map(|i| PI * i as f64 / (nt - 1) as f64).collect();
    sample(source, theta, phi_axis(res.phi_step), exec)
}

/// Pattern along the cone `theta = theta0` (the horizontal plane for `pi/2`).
pub fn sample_azimuth_cut<S: PatternSource>(
    source: &S,
    theta0: f64,
    phi_step: f64,
    exec: Execution,
) -> PatternGrid {
    sample(source, vec![theta0], phi_axis(phi_step), exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_uca;
    use crate::metrics::pattern_response;

    #[test]
    fn single_sensor_grid_is_constant() {
        let a = make_uca(1, 0.0, 0.0).unwrap();
        let ctx = CarrierContext::from_mhz(4.0).unwrap();
        let w = WeightVector::uniform(1);
        let src = WeightedArray {
            array: &a,
            ctx: &ctx,
            weights: &w,
        };
        let g = sample_pattern(&src, GridResolution::degrees(10.0), Execution::Sequential);
        assert_eq!(g.n_theta(), 19);
        assert_eq!(g.n_phi(), 36);
        assert!(g.values.iter().all(|z| *z == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn grid_values_are_pointwise_responses() {
        let a = make_uca(5, 3.0, 0.0).unwrap();
        let ctx = CarrierContext::from_mhz(6.0).unwrap();
        let w = WeightVector::from_slice(&[
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 0.1),
            Complex64::new(0.2, -0.9),
            Complex64::new(0.7, 0.0),
            Complex64::new(0.0, 1.0),
        ]);
        let src = WeightedArray {
            array: &a,
            ctx: &ctx,
            weights: &w,
        };
        let g = sample_pattern(&src, GridResolution::degrees(15.0), Execution::Parallel);
        for i in 0..g.n_theta() {
            for j in 0..g.n_phi() {
                let d = g.direction(i, j);
                let want = pattern_response(&w, &steering_vector(&a, &ctx, &d)).unwrap();
                assert_eq!(g.at(i, j), want);
            }
        }
        let seq = sample_pattern(&src, GridResolution::degrees(15.0), Execution::Sequential);
        assert_eq!(seq, g);
    }

    #[test]
    fn csv_header_and_normalization() {
        let g = PatternGrid {
            theta: vec![PI / 2.0],
            phi: vec![0.0, PI],
            values: vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.2)],
        };
        let mut buf = Vec::new();
        g.write_csv(&mut buf, Complex64::new(2.0, 0.0)).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "theta_deg,phi_deg,re,im,magnitude_dB");
        assert_eq!(lines[1], "90,0,2,0,0");
        assert_eq!(lines[2], "90,180,0,0.2,-20");
    }
}
