//! Adaptive Simpson quadrature with Richardson extrapolation.

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Integrates f over [a,b] to roughly `rel_tol` relative accuracy
/// (`abs_floor` guards against endless refinement of near-zero integrals).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_floor: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    let tol = (whole.abs() * rel_tol).max(abs_floor);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_on_cubics() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12, 1e-300);
        // antiderivative x^4/4 - x^2 + x
        assert_abs_diff_eq!(v, (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0), epsilon = 1e-12);
    }

    #[test]
    fn sine_and_gaussian() {
        let v = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-11, 1e-300);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-10);
        let g = adaptive_simpson(|x| (-x * x).exp(), 0.0, 2.0, 1e-11, 1e-300);
        assert_abs_diff_eq!(g, 8.820813907624215e-1, epsilon = 1e-10);
    }

    #[test]
    fn handles_zero_width_and_tiny_integrals() {
        assert_eq!(adaptive_simpson(|x| x, 1.0, 1.0, 1e-10, 1e-300), 0.0);
        let v = adaptive_simpson(|x| (-x * x).exp(), 60.0, 70.0, 1e-8, 1e-14);
        assert!(v.abs() < 1e-12);
    }
}
