//! Small numerical helpers shared across modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Largest absolute entry of `u·u† − I`.
pub fn unitary_deviation(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    let prod = u * u.adjoint();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Fails with an invalid-argument error unless `u` is square and unitary to `tol`.
pub fn check_unitary(u: &DMatrix<Complex64>, tol: f64, what: &str) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::invalid(format!(
            "{what} must be square, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let dev = unitary_deviation(u);
    if !(dev <= tol) {
        return Err(Error::invalid(format!(
            "{what} is not unitary (max deviation {dev:.3e})"
        )));
    }
    Ok(())
}

/// Root of `f` on `[lo, hi]` by bisection. Requires a sign change at the ends.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 || (hi - lo) < x_tol {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Ratio in decibels, `10·log10(variance / reference)`.
pub fn to_decibel(variance: f64, reference: f64) -> Result<f64> {
    if !(variance > 0.0) || !(reference > 0.0) {
        return Err(Error::invalid(format!(
            "decibel ratio needs positive inputs, got variance {variance} and reference {reference}"
        )));
    }
    Ok(10.0 * (variance / reference).log10())
}
