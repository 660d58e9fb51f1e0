//! Finite-difference weights on arbitrary nodes (Fornberg's recurrence).

/// Weights for derivatives 0..=m at `x0` from values at nodes `x`.
/// Returns `w` with `w[k][j]` = weight of `f(x[j])` in the k-th derivative.
/// Nodes need not be sorted but must be distinct; exact for polynomials of
/// degree < x.len().
pub fn fd_weights(x0: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    assert!(n > m, "need more than m+1 nodes for the m-th derivative");
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - x0;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Derivative of order `k` at `x0` from scattered samples, one-shot.
pub fn fd_derivative(x0: f64, x: &[f64], y: &[f64], k: usize) -> f64 {
    let w = fd_weights(x0, x, k);
    w[k].iter().zip(y).map(|(wi, yi)| wi * yi).sum()
}
