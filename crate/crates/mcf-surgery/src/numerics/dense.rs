//! Dense linear solve for the small normal-equation systems behind
//! least-squares model fits. Row-major, destroys its inputs, n stays single
//! digit.

/// Solves the n-by-n system `a x = b` in place by Gaussian elimination with
/// partial pivoting; on success `b` holds the solution. Returns false when a
/// pivot falls below 1e-13 times the largest entry of `a`.
pub fn solve_dense(a: &mut [f64], b: &mut [f64]) -> bool {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = 1e-13 * scale.max(f64::MIN_POSITIVE);
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[piv * n + col].abs() {
                piv = row;
            }
        }
        if a[piv * n + col].abs() <= cut {
            return false;
        }
        if piv != col {
            for k in col..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col + 1..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            a[row * n + col] = 0.0;
            b[row] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col * n + k] * b[k];
        }
        b[col] = acc / a[col * n + col];
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_a_known_solution() {
        // needs pivoting: leading entry of the first row is zero
        let a0 = [
            0.0, 2.0, 1.0, -1.0, //
            3.0, -1.0, 4.0, 0.5, //
            1.0, 1.0, 1.0, 1.0, //
            -2.0, 0.3, 0.0, 5.0,
        ];
        let x = [1.5, -2.0, 0.25, 3.0];
        let mut b = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                b[i] += a0[i * 4 + j] * x[j];
            }
        }
        let mut a = a0;
        assert!(solve_dense(&mut a, &mut b));
        for i in 0..4 {
            assert!((b[i] - x[i]).abs() < 1e-12, "x[{i}] = {}", b[i]);
        }
    }

    #[test]
    fn reports_singular_systems() {
        let mut a = [1.0, 2.0, 2.0, 4.0];
        let mut b = [1.0, 2.0];
        assert!(!solve_dense(&mut a, &mut b));
    }
}
