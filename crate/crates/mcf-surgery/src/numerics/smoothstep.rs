//! Polynomial smoothsteps used for profile construction and surgery blending.
//! `s2` is the quintic (C2 at the endpoints), `s3` the heptic (C3).

/// 6u^5 - 15u^4 + 10u^3, clamped outside [0,1].
pub fn s2(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    }
}

pub fn s2_d1(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        0.0
    } else {
        30.0 * u * u * (1.0 - u) * (1.0 - u)
    }
}

pub fn s2_d2(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        0.0
    } else {
        60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
    }
}

/// -20u^7 + 70u^6 - 84u^5 + 35u^4, clamped outside [0,1].
pub fn s3(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let u2 = u * u;
        u2 * u2 * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)))
    }
}

pub fn s3_d1(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        0.0
    } else {
        let w = u * (1.0 - u);
        140.0 * w * w * w
    }
}

pub fn s3_d2(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        0.0
    } else {
        let w = u * (1.0 - u);
        420.0 * w * w * (1.0 - 2.0 * u)
    }
}

pub fn s3_d3(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        0.0
    } else {
        840.0 * u * (1.0 - u) * (1.0 - 5.0 * u + 5.0 * u * u)
    }
}

/// Maps t in [a,b] to the unit argument; returns (u, du/dt).
pub fn unit_arg(t: f64, a: f64, b: f64) -> (f64, f64) {
    ((t - a) / (b - a), 1.0 / (b - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn endpoint_flatness() {
        for f in [s2, s3] {
            assert_eq!(f(0.0), 0.0);
            assert_eq!(f(1.0), 1.0);
        }
        for d in [s2_d1, s2_d2, s3_d1, s3_d2, s3_d3] {
            assert_abs_diff_eq!(d(1e-9), 0.0, epsilon = 1e-5);
            assert_abs_diff_eq!(d(1.0 - 1e-9), 0.0, epsilon = 1e-5);
        }
        assert_abs_diff_eq!(s2(0.5), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s3(0.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for i in 1..20 {
            let u = i as f64 * 0.047;
            assert_abs_diff_eq!(s2_d1(u), (s2(u + h) - s2(u - h)) / (2.0 * h), epsilon = 1e-8);
            assert_abs_diff_eq!(
                s2_d2(u),
                (s2(u + h) - 2.0 * s2(u) + s2(u - h)) / (h * h),
                epsilon = 1e-4
            );
            assert_abs_diff_eq!(s3_d1(u), (s3(u + h) - s3(u - h)) / (2.0 * h), epsilon = 1e-8);
            assert_abs_diff_eq!(
                s3_d2(u),
                (s3(u + h) - 2.0 * s3(u) + s3(u - h)) / (h * h),
                epsilon = 1e-4
            );
            assert_abs_diff_eq!(
                s3_d3(u),
                (s3_d2(u + h) - s3_d2(u - h)) / (2.0 * h),
                epsilon = 1e-4
            );
        }
    }
}
