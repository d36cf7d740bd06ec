//! Sidelobe peak detection on sampled patterns.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::pattern::{PatternGrid, PatternSource};
use crate::error::{Error, Result};
use crate::geometry::Direction;

/// How the mainlobe cap around the look direction is sized.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MainlobeExclusion {
    /// Distance from the look direction to the first pattern minimum, at
    /// least three grid cells.
    #[default]
    Auto,
    /// Fixed angular radius, radians.
    Radius(f64),
}

/// A sidelobe local maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidelobePeak {
    pub direction: Direction,
    pub magnitude: f64,
    pub response: Complex64,
}

/// Refined peaks are located to this angular accuracy, radians.
const REFINE_TOL: f64 = 1e-3;

fn nearest_index(axis: &[f64], x: f64, periodic: bool) -> usize {
    let dist = |a: f64| {
        let d = (a - x).abs();
        if periodic {
            d.min(2.0 * PI - d)
        } else {
            d
        }
    };
    axis.iter()
        .enumerate()
        .min_by(|a, b| {
            dist(*a.1)
                .partial_cmp(&dist(*b.1))
                .unwrap_or(Ordering::Equal)
        })
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Angular radius of the mainlobe cap.
pub fn mainlobe_radius(grid: &PatternGrid, look: &Direction, exclusion: MainlobeExclusion) -> f64 {
    match exclusion {
        MainlobeExclusion::Radius(r) => r,
        MainlobeExclusion::Auto => {
            let floor = 3.0 * grid.max_step();
            let i0 = nearest_index(&grid.theta, look.theta(), false);
            let j0 = nearest_index(&grid.phi, look.phi(), true);
            let np = grid.n_phi() as isize;
            let mag = |i: usize, j: isize| grid.at(i, j.rem_euclid(np) as usize).norm();
            let mut est: f64 = 0.0;

            for step in [1isize, -1] {
                let mut j = j0 as isize;
                while (j - j0 as isize).abs() < np / 2 && mag(i0, j + step) <= mag(i0, j) {
                    j += step;
                }
                est = est.max(look.angle_to(&grid.direction(i0, j.rem_euclid(np) as usize)));
            }
            if grid.n_theta() > 1 {
                let nt = grid.n_theta() as isize;
                for step in [1isize, -1] {
                    let mut i = i0 as isize;
                    while i + step >= 0
                        && i + step < nt
                        && mag((i + step) as usize, j0 as isize) <= mag(i as usize, j0 as isize)
                    {
                        i += step;
                    }
                    est = est.max(look.angle_to(&grid.direction(i as usize, j0)));
                }
            }
            est.max(floor)
        }
    }
}

fn in_sidelobe_region(
    grid: &PatternGrid,
    look: &Direction,
    radius: f64,
    i: usize,
    j: usize,
) -> bool {
    look.angle_to(&grid.direction(i, j)) > radius
}

/// Largest sampled magnitude outside the mainlobe cap.
pub fn worst_sidelobe(grid: &PatternGrid, look: &Direction, radius: f64) -> Result<SidelobePeak> {
    let mut best: Option<SidelobePeak> = None;
    for i in 0..grid.n_theta() {
        for j in 0..grid.n_phi() {
            if !in_sidelobe_region(grid, look, radius, i, j) {
                continue;
            }
            let f = grid.at(i, j);
            if best.is_none_or(|b| f.norm() > b.magnitude) {
                best = Some(SidelobePeak {
                    direction: grid.direction(i, j),
                    magnitude: f.norm(),
                    response: f,
                });
            }
        }
    }
    best.ok_or(Error::EmptySidelobeRegion)
}

fn is_local_max(grid: &PatternGrid, i: usize, j: usize) -> bool {
    let (nt, np) = (grid.n_theta(), grid.n_phi());
    let here = grid.at(i, j).norm();
    let lin = |a: usize, b: usize| a * np + b;
    let me = lin(i, j);
    let mut strict = false;
    for di in -1isize..=1 {
        let ii = i as isize + di;
        if ii < 0 || ii >= nt as isize {
            continue;
        }
        for dj in -1isize..=1 {
            if di == 0 && dj == 0 {
                continue;
            }
            let jj = (j as isize + dj).rem_euclid(np as isize) as usize;
            let (ii, idx) = (ii as usize, lin(ii as usize, jj));
            if idx == me {
                continue;
            }
            let other = grid.at(ii, jj).norm();
            // plateaus: only the lowest-index member survives
            if other > here || (other == here && idx < me) {
                return false;
            }
            strict |= other < here;
        }
    }
    strict
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn refine(
    source: &dyn PatternSource,
    start: SidelobePeak,
    h_theta: Option<f64>,
    h_phi: f64,
    look: &Direction,
    radius: f64,
) -> SidelobePeak {
    let mut theta = start.direction.theta();
    let mut phi = start.direction.phi();
    let mag = |t: f64, p: f64| match Direction::new(t, p) {
        Ok(d) => source.response(&d).norm(),
        Err(_) => 0.0,
    };
    let passes = if h_theta.is_some() { 2 } else { 1 };
    for _ in 0..passes {
        phi = golden_max(|p| mag(theta, p), phi - h_phi, phi + h_phi, REFINE_TOL);
        if let Some(ht) = h_theta {
            let lo = (theta - ht).max(0.0);
            let hi = (theta + ht).min(PI);
            theta = golden_max(|t| mag(t, phi), lo, hi, REFINE_TOL);
        }
    }
    let dir = Direction::new(theta, phi).expect("refined peak on the sphere");
    let response = source.response(&dir);
    if response.norm() >= start.magnitude && look.angle_to(&dir) > radius {
        SidelobePeak {
            direction: dir,
            magnitude: response.norm(),
            response,
        }
    } else {
        start
    }
}

/// Up to `m` largest sidelobe maxima, strongest first.
///
/// Candidates are strict local maxima of `|F|` on the grid outside the
/// mainlobe cap of `radius`. When `source` is given each candidate is
/// refined by golden-section ascent within its grid cell.
pub fn find_sidelobe_peaks(
    grid: &PatternGrid,
    look: &Direction,
    radius: f64,
    m: usize,
    source: Option<&dyn PatternSource>,
) -> Result<Vec<SidelobePeak>> {
    let mut any = false;
    let mut peaks = Vec::new();
    for i in 0..grid.n_theta() {
        for j in 0..grid.n_phi() {
            if !in_sidelobe_region(grid, look, radius, i, j) {
                continue;
            }
            any = true;
            if is_local_max(grid, i, j) {
                let f = grid.at(i, j);
                peaks.push(SidelobePeak {
                    direction: grid.direction(i, j),
                    magnitude: f.norm(),
                    response: f,
                });
            }
        }
    }
    if !any {
        return Err(Error::EmptySidelobeRegion);
    }
    if let Some(src) = source {
        let h_phi = 2.0 * PI / grid.n_phi() as f64;
        let h_theta = (grid.n_theta() > 1).then(|| grid.max_step());
        for p in peaks.iter_mut() {
            *p = refine(src, *p, h_theta, h_phi, look, radius);
        }
    }
    peaks.sort_by(|a, b| {
        b.magnitude
            .partial_cmp(&a.magnitude)
            .unwrap_or(Ordering::Equal)
    });
    let mut out: Vec<SidelobePeak> = Vec::new();
    for p in peaks {
        if out
            .iter()
            .all(|q| q.direction.angle_to(&p.direction) > 2.0 * REFINE_TOL)
        {
            out.push(p);
        }
        if out.len() == m {
            break;
        }
    }
    Ok(out)
}
