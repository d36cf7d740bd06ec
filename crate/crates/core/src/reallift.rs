//! Real-valued images of complex weights, steering vectors and Hermitian
//! matrices, stacked `[Re; Im]`.
//!
//! With `w_tilde = [Re w; Im w]`:
//! * `Re(v^H w) = v_tilde . w_tilde` where `v_tilde = [Re v; Im v]`
//! * `Im(v^H w) = v_hat . w_tilde` where `v_hat = [-Im v; Re v]`
//! * `w^H A w = w_tilde^T A_tilde w_tilde` where
//!   `A_tilde = [[Re A, -Im A], [Im A, Re A]]`

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative asymmetry tolerated by [`lift_matrix`].
const HERMITIAN_TOL: f64 = 1e-12;

pub fn lift_weight(w: &DVector<Complex64>) -> DVector<f64> {
    let n = w.len();
    DVector::from_fn(2 * n, |i, _| if i < n { w[i].re } else { w[i - n].im })
}

pub fn unlift_weight(w: &DVector<f64>) -> DVector<Complex64> {
    assert!(w.len().is_multiple_of(2), "lifted vector has even length");
    let n = w.len() / 2;
    DVector::from_fn(n, |i, _| Complex64::new(w[i], w[i + n]))
}

/// `(v_tilde, v_hat)`.
pub fn lift_steering(v: &DVector<Complex64>) -> (DVector<f64>, DVector<f64>) {
    let n = v.len();
    let tilde = DVector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im });
    let hat = DVector::from_fn(2 * n, |i, _| if i < n { -v[i].im } else { v[i - n].re });
    (tilde, hat)
}

/// `A_tilde` for Hermitian `A`; rejects matrices that are not Hermitian.
pub fn lift_matrix(a: &DMatrix<Complex64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    let scale = a
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let asym = (a - a.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if asym > HERMITIAN_TOL * scale {
        return Err(Error::NonHermitian(asym));
    }
    Ok(DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = a[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_cases() {
        let one = DVector::from_element(1, Complex64::new(1.0, 0.0));
        assert_eq!(lift_weight(&one).as_slice(), &[1.0, 0.0]);
        let j = DVector::from_element(1, Complex64::new(0.0, 1.0));
        assert_eq!(lift_weight(&j).as_slice(), &[0.0, 1.0]);

        let v = DVector::from_element(1, Complex64::new(1.0, 1.0));
        let (t, h) = lift_steering(&v);
        assert_eq!(t.as_slice(), &[1.0, 1.0]);
        assert_eq!(h.as_slice(), &[-1.0, 1.0]);

        let a = DMatrix::from_element(1, 1, Complex64::new(2.0, 0.0));
        let at = lift_matrix(&a).unwrap();
        assert_eq!(at, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, 0.5),
                Complex64::new(0.5, 0.5),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(lift_matrix(&a), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn round_trip_small() {
        let w = DVector::from_vec(vec![
            Complex64::new(0.3, -1.2),
            Complex64::new(-4.0, 0.25),
            Complex64::new(1e-9, 7.0),
        ]);
        assert_eq!(unlift_weight(&lift_weight(&w)), w);
    }
}
