//! Equality-constrained quadratic programs over lifted real weights.
//!
//! Both solvers minimize `w^T A w` subject to `C^T w = f`; the second adds the
//! ball `|w|^2 <= b`, handled through the multiplier `mu` of the shifted
//! problem `(A + mu I)`. The KKT system is eliminated in range-space form:
//! with `A + mu I = L L^T` and `L^{-1} C = Q R`,
//! `w = L^{-T} Q R^{-T} f` and the equality multipliers are `-2 R^{-1} R^{-T} f`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{hermitian_form, WeightVector};
use crate::reallift::{lift_matrix, lift_steering, unlift_weight};

/// Singular values below this fraction of the largest count as rank loss.
pub const RANK_TOL: f64 = 1e-10;
/// Relative tolerance on `|w|^2 = b` for an active ball.
pub const BALL_TOL: f64 = 1e-9;
/// Bisection target, tighter than [`BALL_TOL`] so the objective settles too.
const BISECT_TOL: f64 = 1e-13;
const MAX_BRACKET_DOUBLINGS: usize = 200;
const MAX_BISECTIONS: usize = 200;

/// Linear constraints `C^T w = f`, one column of `C` per constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualityConstraints {
    pub normals: DMatrix<f64>,
    pub targets: DVector<f64>,
}

impl EqualityConstraints {
    pub fn new(normals: DMatrix<f64>, targets: DVector<f64>) -> Result<Self> {
        if normals.ncols() != targets.len() {
            return Err(Error::LengthMismatch {
                expected: normals.ncols(),
                found: targets.len(),
            });
        }
        Ok(Self { normals, targets })
    }

    /// No constraints on a `dim`-dimensional variable.
    pub fn empty(dim: usize) -> Self {
        Self {
            normals: DMatrix::zeros(dim, 0),
            targets: DVector::zeros(0),
        }
    }

    pub fn dim(&self) -> usize {
        self.normals.nrows()
    }

    pub fn len(&self) -> usize {
        self.normals.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.ncols() == 0
    }

    pub fn push(&mut self, normal: &DVector<f64>, target: f64) {
        let m = self.len();
        let normals = std::mem::replace(&mut self.normals, DMatrix::zeros(0, 0));
        self.normals = normals.insert_column(m, 0.0);
        self.normals.set_column(m, normal);
        let targets = std::mem::replace(&mut self.targets, DVector::zeros(0));
        self.targets = targets.insert_row(m, target);
    }

    /// `max |C^T w - f|`.
    pub fn residual(&self, w: &DVector<f64>) -> f64 {
        (self.normals.tr_mul(w) - &self.targets).amax()
    }

    /// Numerical rank of `C`.
    pub fn rank(&self) -> usize {
        if self.is_empty() {
            return 0;
        }
        let sv = self.normals.clone().svd(false, false).singular_values;
        let top = sv.max();
        sv.iter().filter(|&&s| s > RANK_TOL * top).count()
    }
}

/// Result of the norm-constrained program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpSolution {
    pub w_tilde: Vec<f64>,
    /// Multiplier of the norm ball, zero when inactive.
    pub mu: f64,
    pub active: bool,
    /// `w^T A w` with the unshifted matrix.
    pub objective: f64,
    /// Multipliers of the equality constraints at the solution.
    pub multipliers: Vec<f64>,
    /// Diagonal load added to make the factorization succeed (0 if none).
    pub diagonal_loading: f64,
}

impl QpSolution {
    pub fn w(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.w_tilde)
    }

    pub fn norm_squared(&self) -> f64 {
        self.w_tilde.iter().map(|x| x * x).sum()
    }
}

/// Cholesky factor of a symmetric matrix, loaded on the diagonal by
/// `1e-12 trace / n` if plain factorization fails.
fn factor_spd(m: DMatrix<f64>) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let n = m.nrows();
    if let Some(ch) = Cholesky::new(m.clone()) {
        return Ok((ch, 0.0));
    }
    let load = 1e-12 * m.trace().abs().max(f64::MIN_POSITIVE) / n as f64;
    let loaded = m + DMatrix::identity(n, n) * load;
    match Cholesky::new(loaded) {
        Some(ch) => {
            log::warn!("quadratic form not positive definite; diagonal load {load:.3e} applied");
            Ok((ch, load))
        }
        None => Err(Error::Singular(
            "quadratic form is not positive definite".into(),
        )),
    }
}

/// Equality-constrained minimizer with its multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct KktSolution {
    pub w: DVector<f64>,
    pub multipliers: DVector<f64>,
    pub diagonal_loading: f64,
}

fn solve_kkt(a: &DMatrix<f64>, mu: f64, cons: &EqualityConstraints) -> Result<KktSolution> {
    let n = a.nrows();
    if a.ncols() != n || cons.dim() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: cons.dim(),
        });
    }
    let shifted = if mu > 0.0 {
        a + DMatrix::identity(n, n) * mu
    } else {
        a.clone()
    };
    let (chol, loading) = factor_spd(shifted)?;
    if cons.is_empty() {
        return Ok(KktSolution {
            w: DVector::zeros(n),
            multipliers: DVector::zeros(0),
            diagonal_loading: loading,
        });
    }
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&cons.normals)
        .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
    let qr = x.qr();
    let (q, r) = (qr.q(), qr.r());
    let rmax = r.diagonal().amax();
    if r.diagonal().iter().any(|d| d.abs() <= 1e-14 * rmax) {
        return Err(Error::Singular(
            "reduced constraint system is rank deficient".into(),
        ));
    }

    let solve_once = |rhs: &DVector<f64>| -> Result<(DVector<f64>, DVector<f64>)> {
        let y = r
            .tr_solve_upper_triangular(rhs)
            .ok_or_else(|| Error::Singular("R^T solve failed".into()))?;
        let w = l
            .tr_solve_lower_triangular(&(&q * &y))
            .ok_or_else(|| Error::Singular("L^T solve failed".into()))?;
        let lam = r
            .solve_upper_triangular(&y)
            .ok_or_else(|| Error::Singular("R solve failed".into()))?
            * -2.0;
        Ok((w, lam))
    };

    let (mut w, mut lam) = solve_once(&cons.targets)?;
    let scale = 1.0 + cons.targets.norm();
    // a couple of refinement sweeps recover accuracy lost to ill-conditioning
    for _ in 0..3 {
        let res = &cons.targets - cons.normals.tr_mul(&w);
        if res.norm() <= 1e-13 * scale {
            break;
        }
        let (dw, dl) = solve_once(&res)?;
        w += dw;
        lam += dl;
    }
    let res = (cons.normals.tr_mul(&w) - &cons.targets).norm();
    if !(res <= 1e-9 * scale) {
        return Err(Error::Singular(format!(
            "constraint residual {res:.3e} after refinement"
        )));
    }
    Ok(KktSolution {
        w,
        multipliers: lam,
        diagonal_loading: loading,
    })
}

fn check_rank(cons: &EqualityConstraints) -> Result<()> {
    if cons.len() > cons.dim() {
        return Err(Error::RankDeficient {
            rank: cons.rank(),
            cols: cons.len(),
        });
    }
    let rank = cons.rank();
    if rank < cons.len() {
        return Err(Error::RankDeficient {
            rank,
            cols: cons.len(),
        });
    }
    Ok(())
}

/// Unique minimizer of `w^T A w` subject to `C^T w = f`, for SPD `A`.
pub fn solve_equality_qp(a: &DMatrix<f64>, cons: &EqualityConstraints) -> Result<DVector<f64>> {
    Ok(solve_equality_qp_detailed(a, cons)?.w)
}

pub fn solve_equality_qp_detailed(
    a: &DMatrix<f64>,
    cons: &EqualityConstraints,
) -> Result<KktSolution> {
    check_rank(cons)?;
    solve_kkt(a, 0.0, cons)
}

/// Minimizer of `w^T A w` subject to `C^T w = f` and `|w|^2 <= b`.
///
/// If the equality-only minimizer lies in the ball it is returned with
/// `mu = 0`. Otherwise `mu` is bisected until the minimizer of
/// `w^T (A + mu I) w` on the affine set has `|w|^2 = b`; that norm decreases
/// monotonically in `mu`, which is checked at every step.
pub fn solve_norm_constrained_qp(
    a: &DMatrix<f64>,
    cons: &EqualityConstraints,
    b: f64,
) -> Result<QpSolution> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "norm bound b = {b} must be > 0"
        )));
    }
    check_rank(cons)?;
    let n = a.nrows();

    let min_norm = solve_kkt(&DMatrix::identity(n, n), 0.0, cons)?
        .w
        .norm_squared();
    if min_norm > b * (1.0 + BALL_TOL) {
        return Err(Error::InfeasibleBall {
            min_norm_sq: min_norm,
            bound: b,
        });
    }

    let finish = |sol: KktSolution, mu: f64, active: bool| QpSolution {
        objective: sol.w.dot(&(a * &sol.w)),
        w_tilde: sol.w.as_slice().to_vec(),
        mu,
        active,
        multipliers: sol.multipliers.as_slice().to_vec(),
        diagonal_loading: sol.diagonal_loading,
    };

    let free = solve_kkt(a, 0.0, cons)?;
    let mut norm_lo = free.w.norm_squared();
    if norm_lo <= b {
        return Ok(finish(free, 0.0, false));
    }

    let mut lo = 0.0;
    let mut hi = (a.trace() / n as f64).abs().max(f64::MIN_POSITIVE);
    let mut at_hi = solve_kkt(a, hi, cons)?;
    let mut norm_hi = at_hi.w.norm_squared();
    let mut doublings = 0;
    while norm_hi > b {
        if norm_hi > norm_lo * (1.0 + 1e-9) {
            return Err(Error::BisectionFailure(format!(
                "norm increased from {norm_lo:.6e} to {norm_hi:.6e} while growing mu to {hi:.3e}"
            )));
        }
        if (norm_hi - b).abs() <= BISECT_TOL * b {
            return Ok(finish(at_hi, hi, true));
        }
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS {
            return Err(Error::BisectionFailure(format!(
                "no bracket up to mu = {hi:.3e}"
            )));
        }
        lo = hi;
        norm_lo = norm_hi;
        hi *= 2.0;
        at_hi = solve_kkt(a, hi, cons)?;
        norm_hi = at_hi.w.norm_squared();
    }
    if (norm_hi - b).abs() <= BISECT_TOL * b {
        return Ok(finish(at_hi, hi, true));
    }

    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let sol = solve_kkt(a, mid, cons)?;
        let norm = sol.w.norm_squared();
        let slack = 1e-9 * norm_lo;
        if norm > norm_lo + slack || norm < norm_hi - slack {
            return Err(Error::BisectionFailure(format!(
                "norm not monotone in mu: |w(mu={mid:.6e})|^2 = {norm:.6e} outside [{norm_hi:.6e}, {norm_lo:.6e}]"
            )));
        }
        if (norm - b).abs() <= BISECT_TOL * b {
            return Ok(finish(sol, mid, true));
        }
        if norm > b {
            lo = mid;
            norm_lo = norm;
        } else {
            hi = mid;
            norm_hi = norm;
            at_hi = sol;
        }
    }
    if (norm_hi - b).abs() <= BALL_TOL * b {
        return Ok(finish(at_hi, hi, true));
    }
    Err(Error::BisectionFailure(format!(
        "multiplier interval [{lo:.6e}, {hi:.6e}] collapsed with |w|^2 = {norm_hi:.6e}, b = {b:.6e}"
    )))
}

/// The lifted mainlobe constraint rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MainlobeRow {
    /// `Re(v0^H w) = 1`
    GainRe,
    /// `Im(v0^H w) = 0`
    GainIm,
    /// `Re(v_theta^H w) = 0`
    SlopeTheta,
    /// `Re(v_phi^H w) = 0`
    SlopePhi,
}

/// Mainlobe constraints after removal of dependent rows.
#[derive(Debug, Clone, PartialEq)]
pub struct MainlobeConstraints {
    pub set: EqualityConstraints,
    pub kept: Vec<MainlobeRow>,
    pub dropped: Vec<MainlobeRow>,
}

/// Lifted unit-gain rows plus, when given, the real-part slope rows.
///
/// Rows are admitted in order; one whose component orthogonal to the rows
/// already kept is below `1e-10 |C|` is dropped.
pub fn mainlobe_constraints(
    v0: &DVector<Complex64>,
    slopes: Option<(&DVector<Complex64>, &DVector<Complex64>)>,
) -> MainlobeConstraints {
    let (v0t, v0h) = lift_steering(v0);
    let mut candidates = vec![
        (MainlobeRow::GainRe, v0t, 1.0),
        (MainlobeRow::GainIm, v0h, 0.0),
    ];
    if let Some((vt, vp)) = slopes {
        candidates.push((MainlobeRow::SlopeTheta, lift_steering(vt).0, 0.0));
        candidates.push((MainlobeRow::SlopePhi, lift_steering(vp).0, 0.0));
    }
    let scale = candidates
        .iter()
        .map(|(_, c, _)| c.norm_squared())
        .sum::<f64>()
        .sqrt();

    let mut set = EqualityConstraints::empty(2 * v0.len());
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let (mut kept, mut dropped) = (Vec::new(), Vec::new());
    for (row, col, target) in candidates {
        let mut r = col.clone();
        for _ in 0..2 {
            for q in &basis {
                let p = q.dot(&r);
                r.axpy(-p, q, 1.0);
            }
        }
        let rn = r.norm();
        if rn > RANK_TOL * scale && basis.len() < col.len() {
            basis.push(r / rn);
            set.push(&col, target);
            kept.push(row);
        } else {
            log::warn!("mainlobe constraint {row:?} is linearly dependent and was dropped");
            dropped.push(row);
        }
    }
    MainlobeConstraints { set, kept, dropped }
}

/// Maximum-directivity weight under the mainlobe constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxDirectivity {
    pub weights: WeightVector,
    /// Linear `1 / (w^H A w)`.
    pub dmax: f64,
    pub constraints: MainlobeConstraints,
    pub diagonal_loading: f64,
}

/// Minimizes `w^H A w` subject to unit gain toward `v0` and, when `slopes`
/// is given, zero real-part slope of the pattern in theta and phi.
pub fn max_directivity(
    a: &DMatrix<Complex64>,
    v0: &DVector<Complex64>,
    slopes: Option<(&DVector<Complex64>, &DVector<Complex64>)>,
) -> Result<MaxDirectivity> {
    if a.nrows() != v0.len() {
        return Err(Error::LengthMismatch {
            expected: a.nrows(),
            found: v0.len(),
        });
    }
    let at = lift_matrix(a)?;
    let constraints = mainlobe_constraints(v0, slopes);
    let sol = solve_equality_qp_detailed(&at, &constraints.set)?;
    let w = unlift_weight(&sol.w);
    let q = hermitian_form(a, &w);
    Ok(MaxDirectivity {
        weights: WeightVector(w),
        dmax: 1.0 / q,
        constraints,
        diagonal_loading: sol.diagonal_loading,
    })
}
