//! Independent reference computations and random instance generators.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superdirective::geometry::{CarrierContext, Direction, SensorArray};
use superdirective::qp::EqualityConstraints;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// `G G^H + 0.1 I` for a random complex `G`.
pub fn random_hermitian_pd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    &g * g.adjoint() + DMatrix::identity(n, n) * Complex64::new(0.1, 0.0)
}

/// Random real SPD matrix.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    &g * g.transpose() + DMatrix::identity(n, n) * 0.1
}

/// `m` random constraint columns in dimension `n` with targets.
pub fn random_constraints(rng: &mut ChaCha8Rng, n: usize, m: usize) -> EqualityConstraints {
    let c = DMatrix::from_fn(n, m, |_, _| rng.random_range(-1.0..1.0));
    let f = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
    EqualityConstraints::new(c, f).unwrap()
}

/// Sensors in a cube of side `side` (meters) at least `min_sep` apart.
pub fn random_array(rng: &mut ChaCha8Rng, n: usize, side: f64, min_sep: f64) -> SensorArray {
    let mut pts: Vec<Vector3<f64>> = Vec::new();
    while pts.len() < n {
        let p = Vector3::new(
            rng.random_range(-side / 2.0..side / 2.0),
            rng.random_range(-side / 2.0..side / 2.0),
            rng.random_range(-side / 2.0..side / 2.0),
        );
        if pts.iter().all(|q| (p - q).norm() >= min_sep) {
            pts.push(p);
        }
    }
    SensorArray::new(pts).unwrap()
}

pub fn random_direction(rng: &mut ChaCha8Rng) -> Direction {
    let z: f64 = rng.random_range(-1.0..1.0);
    Direction::new(z.acos(), rng.random_range(0.0..2.0 * PI)).unwrap()
}

/// Orthonormal basis of the null space of `C^T` (eigenvectors of `C C^T`
/// with zero eigenvalue) and the minimum-norm solution of `C^T w = f`.
pub fn nullspace_split(cons: &EqualityConstraints) -> (DMatrix<f64>, DVector<f64>) {
    let c = &cons.normals;
    let n = c.nrows();
    let eig = (c * c.transpose()).symmetric_eigen();
    let top = eig.eigenvalues.max();
    let null: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i] <= 1e-12 * top)
        .collect();
    let mut z = DMatrix::zeros(n, null.len());
    for (k, &i) in null.iter().enumerate() {
        z.set_column(k, &eig.eigenvectors.column(i));
    }
    let gram = c.transpose() * c;
    let wp = c * gram.lu().solve(&cons.targets).unwrap();
    (z, wp)
}

/// Dense minimization of `w^T A w` over `w = w_p + Z y`.
pub fn nullspace_qp(a: &DMatrix<f64>, cons: &EqualityConstraints) -> DVector<f64> {
    let (z, wp) = nullspace_split(cons);
    if z.ncols() == 0 {
        return wp;
    }
    let h = z.transpose() * a * &z;
    let g = z.transpose() * a * &wp;
    let y = h.lu().solve(&(-g)).unwrap();
    wp + z * y
}

/// Norm-constrained minimization through the eigen-decomposition of the
/// reduced Hessian: a coarse 1-D grid in the multiplier followed by
/// bisection on the secular equation `|y(mu)|^2 = rho`.
pub fn secular_norm_qp(
    a: &DMatrix<f64>,
    cons: &EqualityConstraints,
    b: f64,
) -> Option<(DVector<f64>, f64)> {
    let (z, wp) = nullspace_split(cons);
    let rho = b - wp.norm_squared();
    if rho < 0.0 {
        return None;
    }
    if z.ncols() == 0 {
        return Some((wp, 0.0));
    }
    let h = z.transpose() * a * &z;
    let g = z.transpose() * a * &wp;
    let eig = h.symmetric_eigen();
    let coef = eig.eigenvectors.transpose() * &g;
    let ynorm = |mu: f64| -> f64 {
        coef.iter()
            .zip(eig.eigenvalues.iter())
            .map(|(c, l)| (c / (l + mu)).powi(2))
            .sum()
    };
    let y_of = |mu: f64| -> DVector<f64> {
        let scaled = DVector::from_fn(coef.len(), |i, _| -coef[i] / (eig.eigenvalues[i] + mu));
        &eig.eigenvectors * scaled
    };
    if ynorm(0.0) <= rho {
        return Some((&wp + &z * y_of(0.0), 0.0));
    }
    let grid: Vec<f64> = (0..=400)
        .map(|i| 10f64.powf(-12.0 + 0.05 * i as f64))
        .collect();
    let idx = grid.iter().position(|&mu| ynorm(mu) <= rho)?;
    let (mut lo, mut hi) = (if idx == 0 { 0.0 } else { grid[idx - 1] }, grid[idx]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ynorm(mid) > rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((&wp + &z * y_of(hi), hi))
}

/// Largest generalized eigenvalue of `(B, A)` via `L^-1 B L^-H`.
pub fn generalized_max_eigenvalue(b: &DMatrix<Complex64>, a: &DMatrix<Complex64>) -> f64 {
    let l = a.clone().cholesky().unwrap().l();
    let li = l.try_inverse().unwrap();
    let m = &li * b * li.adjoint();
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    m.symmetric_eigen().eigenvalues.max()
}

/// `A_kl` of a plain array by brute-force midpoint integration on the sphere.
pub fn brute_force_a(
    array: &SensorArray,
    ctx: &CarrierContext,
    nt: usize,
    np: usize,
) -> DMatrix<Complex64> {
    let n = array.len();
    let k = ctx.omega() / ctx.speed();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..nt {
        let t = PI * (i as f64 + 0.5) / nt as f64;
        for j in 0..np {
            let p = 2.0 * PI * (j as f64 + 0.5) / np as f64;
            let u = Vector3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
            let w = t.sin() * (PI / nt as f64) * (2.0 * PI / np as f64) / (4.0 * PI);
            let v: Vec<Complex64> = array
                .positions()
                .iter()
                .map(|x| Complex64::from_polar(1.0, k * x.dot(&u)))
                .collect();
            for r in 0..n {
                for c in 0..n {
                    a[(r, c)] += v[r] * v[c].conj() * w;
                }
            }
        }
    }
    a
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
