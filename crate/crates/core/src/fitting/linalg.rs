//! Tiny dense solver for the normal equations of small fits.

use crate::scalar::Real;

/// Solves `a x = b` for a small square system by Gaussian elimination with
/// partial pivoting. Returns `None` when the matrix is numerically
/// singular.
pub fn solve<S: Real, const P: usize>(mut a: [[S; P]; P], mut b: [S; P]) -> Option<[S; P]> {
    for col in 0..P {
        let mut pivot = col;
        for row in col + 1..P {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() <= S::zero() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..P {
            let factor = a[row][col] / a[col][col];
            for k in col..P {
                a[row][k] = a[row][k] - factor * a[col][k];
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = [S::zero(); P];
    for col in (0..P).rev() {
        let mut acc = b[col];
        for k in col + 1..P {
            acc = acc - a[col][k] * x[k];
        }
        if !a[col][col].is_finite() || a[col][col] == S::zero() {
            return None;
        }
        x[col] = acc / a[col][col];
        if !x[col].is_finite() {
            return None;
        }
    }
    Some(x)
}
