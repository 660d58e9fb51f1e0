//! Tridiagonal solvers: plain Thomas elimination and the cyclic variant via
//! the Sherman-Morrison correction. Both solve in place through `rhs`.

/// Solve a tridiagonal system. `sub[i]` couples row i+1 to column i,
/// `sup[i]` couples row i to column i+1. Requires a nonsingular elimination
/// (diagonally dominant in all uses here).
pub fn solve_tridiag(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    assert!(n >= 1 && sub.len() == n - 1 && sup.len() == n - 1 && rhs.len() == n);
    let mut cp = vec![0.0; n.saturating_sub(1)];
    let mut denom = diag[0];
    assert!(denom != 0.0, "zero pivot");
    if n > 1 {
        cp[0] = sup[0] / denom;
    }
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag[i] - sub[i - 1] * cp[i - 1];
        assert!(denom != 0.0, "zero pivot");
        if i < n - 1 {
            cp[i] = sup[i] / denom;
        }
        rhs[i] = (rhs[i] - sub[i - 1] * rhs[i - 1]) / denom;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        rhs[i] -= cp[i] * rhs[i + 1];
    }
}

/// Cyclic tridiagonal solve: row i couples x[i-1], x[i], x[i+1] mod n.
/// `sub[0]` is row 0's coefficient on x[n-1]; `sup[n-1]` is row n-1's on x[0].
pub fn solve_cyclic_tridiag(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    assert!(n >= 3 && sub.len() == n && sup.len() == n && rhs.len() == n);
    let beta = sub[0];
    let alpha = sup[n - 1];
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] = diag[0] - gamma;
    d[n - 1] = diag[n - 1] - alpha * beta / gamma;
    let inner_sub = &sub[1..];
    let inner_sup = &sup[..n - 1];
    solve_tridiag(inner_sub, &d, inner_sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    solve_tridiag(inner_sub, &d, inner_sup, &mut u);
    let fact = (rhs[0] + beta * rhs[n - 1] / gamma) / (1.0 + u[0] + beta * u[n - 1] / gamma);
    for i in 0..n {
        rhs[i] -= fact * u[i];
    }
}
