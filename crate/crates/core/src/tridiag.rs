//! Eigenvalues of real symmetric tridiagonal matrices by Sturm-sequence
//! bisection.
//!
//! Only the lowest few eigenvalues are ever needed, so each one is isolated
//! independently. Absolute accuracy is a few ulps of the matrix norm.

/// Number of eigenvalues strictly below `x`.
fn count_below(diag: &[f64], off: &[f64], x: f64, pivot_floor: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    for i in 0..diag.len() {
        if i > 0 {
            q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        }
        if q == 0.0 {
            q = -pivot_floor;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `k` smallest eigenvalues, ascending.
///
/// `diag` has length n and `off` length n − 1 (the sub/super-diagonal).
///
/// # Panics
/// If `off.len() + 1 != diag.len()` or `k > diag.len()`.
pub fn smallest_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    assert!(!diag.is_empty() && off.len() + 1 == diag.len(), "bad tridiagonal shape");
    assert!(k <= diag.len(), "requested more eigenvalues than the dimension");
    let (lo0, hi0) = gershgorin(diag, off);
    let norm = lo0.abs().max(hi0.abs()).max(f64::MIN_POSITIVE);
    let pivot_floor = f64::EPSILON * norm;

    (0..k)
        .map(|idx| {
            // Smallest x with count_below(x) > idx.
            let mut lo = lo0 - pivot_floor;
            let mut hi = hi0 + pivot_floor;
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if count_below(diag, off, mid, pivot_floor) > idx {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        })
        .collect()
}
