//! Polar plot of an azimuth cut.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write;

use superdirective::metrics::PatternGrid;

const FLOOR_DB: f64 = -60.0;
const SIZE: f64 = 480.0;
const RADIUS: f64 = 200.0;

fn point(phi: f64, db: f64) -> (f64, f64) {
    let r = RADIUS * (db.max(FLOOR_DB) - FLOOR_DB) / -FLOOR_DB;
    // 0 deg azimuth points up, angles grow counter-clockwise
    let a = phi + FRAC_PI_2;
    (SIZE / 2.0 + r * a.cos(), SIZE / 2.0 - r * a.sin())
}

/// Magnitude of the first theta row of `grid` in dB relative to
/// `reference`, clipped at -60 dB, with a marker at `look_phi`.
pub fn polar_svg(grid: &PatternGrid, reference: f64, look_phi: f64, title: &str) -> String {
    let mut s = String::new();
    let c = SIZE / 2.0;
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{c}" y="18" text-anchor="middle" font-family="sans-serif" font-size="13">{title}</text>"#
    )
    .unwrap();
    for k in 0..=6 {
        let db = -10.0 * k as f64;
        let r = RADIUS * (db - FLOOR_DB) / -FLOOR_DB;
        writeln!(
            s,
            r##"<circle cx="{c}" cy="{c}" r="{r:.2}" fill="none" stroke="#ccc" stroke-width="0.8"/>"##
        )
        .unwrap();
        writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="9" fill="#888">{db}</text>"##,
            c + 2.0,
            c - r - 2.0
        )
        .unwrap();
    }
    for k in 0..12 {
        let phi = (30.0 * k as f64).to_radians();
        let (x, y) = point(phi, 0.0);
        writeln!(
            s,
            r##"<line x1="{c}" y1="{c}" x2="{x:.2}" y2="{y:.2}" stroke="#eee" stroke-width="0.8"/>"##
        )
        .unwrap();
    }

    let n = grid.n_phi();
    let mut path = String::new();
    for j in 0..=n {
        let j = j % n;
        let db = 20.0 * (grid.at(0, j).norm() / reference).log10();
        let (x, y) = point(grid.phi[j], if db.is_finite() { db } else { FLOOR_DB });
        let cmd = if path.is_empty() { 'M' } else { 'L' };
        write!(path, "{cmd}{x:.2},{y:.2} ").unwrap();
    }
    writeln!(
        s,
        r##"<path d="{}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>"##,
        path.trim_end()
    )
    .unwrap();

    let (x, y) = point(look_phi, 0.0);
    writeln!(
        s,
        r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#c0392b"/>"##
    )
    .unwrap();
    writeln!(s, "</svg>").unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn well_formed_and_closed() {
        let g = PatternGrid {
            theta: vec![FRAC_PI_2],
            phi: (0..36).map(|j| (10.0 * j as f64).to_radians()).collect(),
            values: (0..36)
                .map(|j| Complex64::new(1.0 + j as f64, 0.0))
                .collect(),
        };
        let s = polar_svg(&g, 36.0, 0.0, "test");
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches(" L").count(), 36);
    }
}
