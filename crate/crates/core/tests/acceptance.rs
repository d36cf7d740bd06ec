//! End-to-end acceptance criteria. Each test prints one `PASS`/`FAIL` line.

mod common;

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use superdirective::composite::{CompositeArray, CompositePattern, LineAxis};
use superdirective::geometry::{
    make_uca, steering_derivatives, steering_vector, CarrierContext, Direction,
};
use superdirective::metrics::{
    compute_a, compute_b, from_db, sample_azimuth_cut, sample_pattern, to_db, worst_sidelobe,
    GridResolution, QuadratureSpec,
};
use superdirective::par::Execution;
use superdirective::qp::{max_directivity, solve_equality_qp, solve_norm_constrained_qp};
use superdirective::reallift::{lift_matrix, lift_steering, lift_weight};
use superdirective::synthesis::{
    default_look, radius_for_rein, synthesize, uca_max_directivity, RadiusSearch, SynthesisConfig,
    SynthesisResult, SynthesisStatus,
};

use common::*;

const TABLE_F_MHZ: [f64; 5] = [4.0, 6.0, 8.0, 10.0, 12.0];
const TABLE_EPS_DB: [f64; 5] = [-30.0, -23.0, -19.0, -16.0, -13.0];
const TABLE_D_DB: [f64; 5] = [12.3, 12.9, 13.5, 14.2, 14.7];
const TABLE_GAMMA_DB: [f64; 5] = [-24.0, -17.6, -13.4, -10.4, -8.0];
const D_TOL_DB: f64 = 1.5;
const GAMMA_TOL_DB: f64 = 3.0;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} criterion {id} ({name}): {detail}");
}

fn table_synthesis(f: f64, eps: f64) -> SynthesisResult {
    let a = make_uca(5, 3.0, 0.0).unwrap();
    let ctx = CarrierContext::from_mhz(f).unwrap();
    synthesize(&a, &ctx, &SynthesisConfig::new(default_look(), eps, -25.0)).unwrap()
}

fn strictly_increasing(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[1] > w[0])
}

#[test]
fn criterion_1_table_reproduction() {
    let start = Instant::now();
    let runs: Vec<SynthesisResult> = TABLE_F_MHZ
        .iter()
        .zip(TABLE_EPS_DB)
        .map(|(&f, e)| table_synthesis(f, e))
        .collect();
    let elapsed = start.elapsed();
    let d: Vec<f64> = runs.iter().map(|r| r.directivity_db).collect();
    let g: Vec<f64> = runs.iter().map(|r| r.gamma_db).collect();
    for (i, r) in runs.iter().enumerate() {
        println!(
            "  f = {:>4} MHz  status {:<20} D = {:7.3} dB (ref {:5.1})  gamma = {:8.3} dB (ref {:6.1})  Dmax = {:6.3} dB",
            TABLE_F_MHZ[i],
            r.status.as_str(),
            d[i],
            TABLE_D_DB[i],
            g[i],
            TABLE_GAMMA_DB[i],
            r.dmax_db
        );
    }
    let converged = runs.iter().all(|r| r.status == SynthesisStatus::Converged);
    let d_ok = d
        .iter()
        .zip(TABLE_D_DB)
        .all(|(x, t)| (x - t).abs() <= D_TOL_DB);
    let g_ok = g
        .iter()
        .zip(TABLE_GAMMA_DB)
        .all(|(x, t)| (x - t).abs() <= GAMMA_TOL_DB);
    let d_mono = strictly_increasing(&d);
    let g_mono = strictly_increasing(&g);
    let fast = elapsed < Duration::from_secs(120);
    let pass = converged && d_ok && g_ok && d_mono && g_mono && fast;
    report(
        1,
        "table reproduction",
        pass,
        &format!(
            "converged {converged}, D within 1.5 dB {d_ok}, gamma within 3 dB {g_ok}, D increasing {d_mono}, gamma increasing {g_mono}, {:.2?}",
            elapsed
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_2_radius_selection() {
    let ctx = CarrierContext::from_mhz(4.0).unwrap();
    let lambda = ctx.wavelength();
    let look = default_look();
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, target) in [(7usize, 0.13), (5, 0.053)] {
        let sol = radius_for_rein(n, &ctx, -30.0, &look, &RadiusSearch::default()).unwrap();
        let ok = (sol.r_over_lambda - target).abs() <= 0.1 * target;
        pass &= ok;
        detail.push(format!(
            "N={n}: r = {:.4} lambda = {:.3} m (ref {target} lambda = {:.3} m, gamma {:.3} dB)",
            sol.r_over_lambda,
            sol.radius_m,
            target * lambda,
            sol.gamma_db
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(30);
    report(
        2,
        "radius selection",
        pass,
        &format!("{}; {:.2?}", detail.join("; "), elapsed),
    );
    assert!(pass);
}

#[test]
fn criterion_3_trend_suite() {
    let ctx = CarrierContext::from_mhz(4.0).unwrap();
    let lambda = ctx.wavelength();
    let look = default_look();
    let q = QuadratureSpec::default();
    let radii = [0.02, 0.05, 0.1, 0.2, 0.3];
    let sizes = [3usize, 5, 7];
    let table: Vec<Vec<(f64, f64)>> = sizes
        .iter()
        .map(|&n| {
            radii
                .iter()
                .map(|&r| uca_max_directivity(n, r * lambda, &ctx, &look, &q).unwrap())
                .collect()
        })
        .collect();
    let slack = 1e-9;
    let mut violations = 0;
    for row in &table {
        for w in row.windows(2) {
            violations += (w[1].0 > w[0].0 + slack) as usize;
            violations += (w[1].1 < w[0].1 - slack) as usize;
        }
    }
    for pair in table.windows(2) {
        for (lo, hi) in pair[0].iter().zip(&pair[1]) {
            violations += (hi.0 < lo.0 - slack) as usize;
            violations += (hi.1 > lo.1 + slack) as usize;
        }
    }
    for (i, n) in sizes.iter().enumerate() {
        let cells: Vec<String> = table[i]
            .iter()
            .map(|(d, g)| format!("{d:.2}/{g:.2}"))
            .collect();
        println!(
            "  N={n}  Dmax/gamma dB over r/lambda {radii:?}: {}",
            cells.join("  ")
        );
    }
    report(
        3,
        "trend suite",
        violations == 0,
        &format!("{violations} monotonicity violations"),
    );
    assert_eq!(violations, 0);
}

/// Spread of the maximum directivity over the look azimuth, dB.
fn azimuth_spread(n: usize) -> f64 {
    let ctx = CarrierContext::from_mhz(4.0).unwrap();
    let arr = make_uca(n, 0.1 * ctx.wavelength(), 0.0).unwrap();
    let (a, _) = compute_a(&arr, &ctx, &QuadratureSpec::default()).unwrap();
    let values: Vec<f64> = (0..360)
        .map(|k| {
            let look = Direction::horizontal(TAU * k as f64 / 360.0);
            let v0 = steering_vector(&arr, &ctx, &look).0;
            let (st, sp) = steering_derivatives(&arr, &ctx, &look);
            to_db(max_directivity(&a, &v0, Some((&st, &sp))).unwrap().dmax)
        })
        .collect();
    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
    hi - lo
}

#[test]
fn criterion_4_odd_even_rotation() {
    let s7 = azimuth_spread(7);
    let s8 = azimuth_spread(8);
    let pass = s7 < 0.5 && s8 > s7;
    report(
        4,
        "odd/even rotation",
        pass,
        &format!("Dmax spread over look azimuth: N=7 {s7:.3e} dB, N=8 {s8:.3} dB"),
    );
    assert!(pass);
}

#[test]
fn criterion_5_solver_oracles() {
    let mut r = rng(5005);
    let (mut worst_eq, mut worst_norm) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = 2 * r.random_range(1..6);
        let m = r.random_range(1..n);
        let a = random_spd(&mut r, n);
        let cons = random_constraints(&mut r, n, m);
        let quad = |w: &DVector<f64>| w.dot(&(&a * w));

        let w = solve_equality_qp(&a, &cons).unwrap();
        let oracle = nullspace_qp(&a, &cons);
        worst_eq = worst_eq.max((quad(&w) - quad(&oracle)).abs() / quad(&oracle).abs());

        let (_, wp) = nullspace_split(&cons);
        let (lo, hi) = (wp.norm_squared(), w.norm_squared());
        let b = lo + r.random_range(0.05..1.5) * (hi - lo);
        let sol = solve_norm_constrained_qp(&a, &cons, b).unwrap();
        let (grid, _) = secular_norm_qp(&a, &cons, b).unwrap();
        worst_norm = worst_norm.max((quad(&sol.w()) - quad(&grid)).abs() / quad(&grid).abs());
    }
    let pass = worst_eq < 1e-8 && worst_norm < 1e-8;
    report(
        5,
        "solver oracle equivalence",
        pass,
        &format!("max relative objective error: equality {worst_eq:.2e}, norm-constrained {worst_norm:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_6_closed_form_directivity() {
    let mut r = rng(6006);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = r.random_range(2..7);
        let ctx = CarrierContext::from_mhz(r.random_range(3.0..12.0)).unwrap();
        let lambda = ctx.wavelength();
        let arr = random_array(&mut r, n, 0.3 * lambda, 0.05 * lambda);
        let look = random_direction(&mut r);
        let (a, _) = compute_a(&arr, &ctx, &QuadratureSpec::default()).unwrap();
        let v0 = steering_vector(&arr, &ctx, &look).0;
        let dmax = max_directivity(&a, &v0, None).unwrap().dmax;
        let closed = (v0.adjoint() * a.clone().lu().solve(&v0).unwrap())[(0, 0)].re;
        let eig = generalized_max_eigenvalue(&compute_b(&arr, &ctx, &look), &a);
        worst = worst
            .max((dmax - closed).abs() / closed)
            .max((dmax - eig).abs() / eig);
    }
    let pass = worst < 1e-10;
    report(
        6,
        "closed-form directivity",
        pass,
        &format!("max relative error {worst:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_7_real_lift_algebra() {
    let mut r = rng(7007);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = r.random_range(1..9);
        let a = random_hermitian_pd(&mut r, n);
        let w = random_complex_vector(&mut r, n);
        let v = random_complex_vector(&mut r, n);
        let (wt, at): (DVector<f64>, DMatrix<f64>) = (lift_weight(&w), lift_matrix(&a).unwrap());
        let (vt, vh) = lift_steering(&v);
        let q = (w.adjoint() * &a * &w)[(0, 0)].re;
        let ip: Complex64 = v.dotc(&w);
        let errs = [
            (wt.dot(&(&at * &wt)) - q).abs() / q.abs().max(1.0),
            (vt.dot(&wt) - ip.re).abs() / ip.norm().max(1.0),
            (vh.dot(&wt) - ip.im).abs() / ip.norm().max(1.0),
            (wt.norm_squared() - w.norm_squared()).abs() / w.norm_squared().max(1.0),
        ];
        worst = errs.iter().cloned().fold(worst, f64::max);
    }
    let pass = worst < 1e-12;
    report(
        7,
        "real-lift algebra",
        pass,
        &format!("max relative error {worst:.2e} over 1000 instances"),
    );
    assert!(pass);
}

#[test]
fn criterion_8_rein_guarantee() {
    let mut checked = 0;
    let mut worst_margin = f64::INFINITY;
    let mut violations = 0;
    for (&f, e) in TABLE_F_MHZ.iter().zip(TABLE_EPS_DB) {
        let run = table_synthesis(f, e);
        for it in &run.iterations {
            let gain = Complex64::new(it.mainlobe_gain[0], it.mainlobe_gain[1]);
            let unit = (gain - Complex64::new(1.0, 0.0)).norm() <= 1e-9;
            if unit && it.norm_squared <= it.bound * (1.0 + 1e-9) {
                checked += 1;
                let gamma = from_db(it.gamma_db);
                let eps0 = from_db(it.epsilon_db);
                worst_margin = worst_margin.min(gamma - eps0);
                violations += (gamma < eps0 - 1e-9) as usize;
            }
        }
    }
    let pass = checked > 0 && violations == 0;
    report(
        8,
        "REIN guarantee",
        pass,
        &format!("{checked} iterates checked, {violations} violations, smallest gamma - eps0 = {worst_margin:.3e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_9_composite_factorization() {
    let ctx = CarrierContext::from_mhz(4.0).unwrap();
    let look = default_look();
    let sub = table_synthesis(4.0, -30.0);
    let comp = CompositeArray::new(
        make_uca(5, 3.0, 0.0).unwrap(),
        sub.weights.clone(),
        8,
        15.0,
        LineAxis::Y,
    )
    .unwrap();
    let total = CompositePattern::new(&comp, &ctx);

    let grid = sample_pattern(&total, GridResolution::degrees(1.0), Execution::Parallel);
    let mut worst_err = 0.0f64;
    for i in 0..grid.n_theta() {
        for j in 0..grid.n_phi() {
            let d = grid.direction(i, j);
            let prod = comp.subarray_response(&ctx, &d) * comp.array_factor(&ctx, &d);
            worst_err = worst_err.max((grid.at(i, j) - prod).norm());
        }
    }

    let cut = sample_azimuth_cut(&total, look.theta(), 1f64.to_radians(), Execution::Parallel);
    let radius = sub.mainlobe_radius_deg.to_radians();
    let peak = worst_sidelobe(&cut, &look, radius).unwrap();
    let main = total
        .weights
        .0
        .dotc(&steering_vector(&total.array, &ctx, &look).0)
        .norm();
    let sidelobe_db = 20.0 * (peak.magnitude / main).log10();

    let pass = sub.status == SynthesisStatus::Converged
        && worst_err <= 1e-10
        && sidelobe_db <= -25.0 + 0.5;
    report(
        9,
        "composite factorization",
        pass,
        &format!(
            "max |F_total - F_sub AF| = {worst_err:.2e} on a 1 deg grid; worst composite sidelobe {sidelobe_db:.2} dB outside {:.1} deg",
            sub.mainlobe_radius_deg
        ),
    );
    assert!(pass);
}
