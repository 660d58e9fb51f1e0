//! Cubic spline interpolation with clamped or periodic end conditions,
//! stored via knot second derivatives.

use super::tridiag::{solve_cyclic_tridiag, solve_tridiag};

#[derive(Clone, Debug)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
    /// Some(period): curve wraps from x[n-1] back to x[0] + period
    period: Option<f64>,
}

impl CubicSpline {
    /// Clamped spline with prescribed end slopes. Knots strictly increasing.
    pub fn clamped(x: Vec<f64>, y: Vec<f64>, slope_start: f64, slope_end: f64) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        debug_assert!(x.windows(2).all(|w| w[1] > w[0]));
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let mut diag = vec![0.0; n];
        let mut sub = vec![0.0; n - 1];
        let mut sup = vec![0.0; n - 1];
        let mut rhs = vec![0.0; n];
        diag[0] = h[0] / 3.0;
        sup[0] = h[0] / 6.0;
        rhs[0] = (y[1] - y[0]) / h[0] - slope_start;
        for i in 1..n - 1 {
            sub[i - 1] = h[i - 1] / 6.0;
            diag[i] = (h[i - 1] + h[i]) / 3.0;
            sup[i] = h[i] / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1];
        }
        sub[n - 2] = h[n - 2] / 6.0;
        diag[n - 1] = h[n - 2] / 3.0;
        rhs[n - 1] = slope_end - (y[n - 1] - y[n - 2]) / h[n - 2];
        solve_tridiag(&sub, &diag, &sup, &mut rhs);
        CubicSpline { x, y, m: rhs, period: None }
    }

    /// Periodic spline: the last interval wraps from x[n-1] to x[0] + period.
    /// y[n-1] is an independent knot value; y wraps to y[0].
    pub fn periodic(x: Vec<f64>, y: Vec<f64>, period: f64) -> Self {
        let n = x.len();
        assert!(n >= 3 && y.len() == n);
        assert!(period > x[n - 1] - x[0]);
        let mut h = vec![0.0; n];
        for i in 0..n - 1 {
            h[i] = x[i + 1] - x[i];
        }
        h[n - 1] = x[0] + period - x[n - 1];
        let slope = |i: usize| -> f64 {
            let ynext = if i + 1 == n { y[0] } else { y[i + 1] };
            (ynext - y[i]) / h[i]
        };
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let prev = (i + n - 1) % n;
            sub[i] = h[prev] / 6.0;
            diag[i] = (h[prev] + h[i]) / 3.0;
            sup[i] = h[i] / 6.0;
            rhs[i] = slope(i) - slope(prev);
        }
        solve_cyclic_tridiag(&sub, &diag, &sup, &mut rhs);
        CubicSpline { x, y, m: rhs, period: Some(period) }
    }

    fn locate(&self, t: f64) -> (usize, usize, f64, f64, f64) {
        let n = self.x.len();
        match self.period {
            None => {
                let t = t.clamp(self.x[0], self.x[n - 1]);
                let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
                    Ok(i) => i.min(n - 2),
                    Err(i) => i.saturating_sub(1).min(n - 2),
                };
                (i, i + 1, t - self.x[i], self.x[i + 1] - t, self.x[i + 1] - self.x[i])
            }
            Some(p) => {
                let mut t = (t - self.x[0]).rem_euclid(p) + self.x[0];
                if t >= self.x[0] + p {
                    t = self.x[0];
                }
                let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
                    Ok(i) => i,
                    Err(i) => i - 1,
                };
                if i == n - 1 {
                    let h = self.x[0] + p - self.x[n - 1];
                    (n - 1, 0, t - self.x[n - 1], self.x[n - 1] + h - t, h)
                } else {
                    (i, i + 1, t - self.x[i], self.x[i + 1] - t, self.x[i + 1] - self.x[i])
                }
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (i, j, dl, dr, h) = self.locate(t);
        let (a, b) = (dr / h, dl / h);
        a * self.y[i]
            + b * self.y[j]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[j]) * h * h / 6.0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let (i, j, dl, dr, h) = self.locate(t);
        let (a, b) = (dr / h, dl / h);
        (self.y[j] - self.y[i]) / h
            + (-(3.0 * a * a - 1.0) * self.m[i] + (3.0 * b * b - 1.0) * self.m[j]) * h / 6.0
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        let (i, j, dl, dr, h) = self.locate(t);
        (dr * self.m[i] + dl * self.m[j]) / h
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn clamped_reproduces_cubic_exactly() {
        let p = |t: f64| 2.0 - t + 0.5 * t * t - 0.25 * t * t * t;
        let dp = |t: f64| -1.0 + t - 0.75 * t * t;
        let x: Vec<f64> = (0..=20).map(|i| -1.0 + i as f64 * 0.15).collect();
        let y: Vec<f64> = x.iter().map(|&t| p(t)).collect();
        let s = CubicSpline::clamped(x.clone(), y, dp(-1.0), dp(2.0));
        for i in 0..=60 {
            let t = -1.0 + i as f64 * 0.05;
            assert_abs_diff_eq!(s.eval(t), p(t), epsilon = 1e-12);
            assert_abs_diff_eq!(s.deriv(t), dp(t), epsilon = 1e-11);
        }
    }

    #[test]
    fn periodic_reproduces_sine() {
        let n = 200;
        let tau = std::f64::consts::TAU;
        let x: Vec<f64> = (0..n).map(|i| i as f64 * tau / n as f64).collect();
        let y: Vec<f64> = x.iter().map(|&t| t.sin()).collect();
        let s = CubicSpline::periodic(x, y, tau);
        for i in 0..500 {
            let t = i as f64 * 0.017 - 3.0; // exercises the wrap in both directions
            assert_abs_diff_eq!(s.eval(t), t.sin(), epsilon = 1e-6);
            assert_abs_diff_eq!(s.deriv(t), t.cos(), epsilon = 1e-4);
            assert_abs_diff_eq!(s.deriv2(t), -t.sin(), epsilon = 1e-2);
        }
    }

    #[test]
    fn periodic_wrap_is_continuous() {
        let n = 50;
        let x: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let y: Vec<f64> = x.iter().map(|&t| (std::f64::consts::TAU * t).cos()).collect();
        let s = CubicSpline::periodic(x, y, 1.0);
        let eps = 1e-9;
        assert_abs_diff_eq!(s.eval(1.0 - eps), s.eval(0.0), epsilon = 1e-6);
        assert_abs_diff_eq!(s.deriv(1.0 - eps), s.deriv(0.0), epsilon = 1e-4);
    }
}
