//! Axisymmetric surfaces as generating curves in the (z, r) half-plane,
//! with pointwise curvature, area measures, and membership tests.
//!
//! Conventions fixed here and used everywhere else:
//! - 3D points are [x, y, z] with the rotation axis along z.
//! - Axis-to-axis curves run south pole to north pole (increasing z at the
//!   ends) and meet the axis orthogonally; the outward normal in the
//!   half-plane is (-r', z')/|T|.
//! - The profile principal curvature is (z''r' - r''z')/|T|^3 (positive 1/R
//!   on a sphere); the rotational one is z'/(r|T|) with the umbilic limit at
//!   the poles.

use crate::error::{Error, Result};
use crate::numerics::spline::CubicSpline;
use crate::numerics::stencil::fd_weights;

/// Adaptive-resolution bounds shared by construction, resampling, and the
/// flow integrator.
#[derive(Clone, Copy, Debug)]
pub struct ResolutionParams {
    pub h_min: f64,
    pub h_max: f64,
    /// resample when curvature * spacing exceeds this
    pub q_max: f64,
    /// spacing target: |A| * h aims for this after resampling
    pub q_target: f64,
}

impl Default for ResolutionParams {
    fn default() -> Self {
        ResolutionParams { h_min: 1e-5, h_max: 0.05, q_max: 0.2, q_target: 0.1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurveKind {
    AxisToAxis,
    /// z-periodic graph r(z); `period` is the z-period, not the arclength.
    PeriodicZ { period: f64 },
}

#[derive(Clone, Debug)]
pub struct GeneratingCurve {
    pub kind: CurveKind,
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    /// cumulative chord length, s[0] = 0
    pub s: Vec<f64>,
}

/// Per-sample differential geometry of the revolved surface.
#[derive(Clone, Copy, Debug)]
pub struct PointwiseGeometry {
    pub h: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda_prof: f64,
    pub lambda_rot: f64,
    /// outward unit normal in the (z, r) half-plane
    pub normal: [f64; 2],
    /// |dX/ds| against the stored chord parameter (near 1 after re-chording)
    pub speed: f64,
    /// |grad A| estimate from curvature derivatives along the curve
    pub grad_a: f64,
    /// |grad^2 A| estimate
    pub grad2_a: f64,
}

fn cumulative_chords(z: &[f64], r: &[f64]) -> Vec<f64> {
    let mut s = Vec::with_capacity(z.len());
    let mut acc = 0.0;
    s.push(0.0);
    for i in 1..z.len() {
        acc += ((z[i] - z[i - 1]).powi(2) + (r[i] - r[i - 1]).powi(2)).sqrt();
        s.push(acc);
    }
    s
}

impl GeneratingCurve {
    pub fn from_points(kind: CurveKind, z: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        let n = z.len();
        if n < 8 || r.len() != n {
            return Err(Error::InvalidParameters(format!(
                "curve needs at least 8 samples, got {n}"
            )));
        }
        match kind {
            CurveKind::AxisToAxis => {
                if r[0].abs() > 1e-12 || r[n - 1].abs() > 1e-12 {
                    return Err(Error::InvalidParameters(
                        "axis-to-axis curve must start and end at r = 0".into(),
                    ));
                }
                if r[1..n - 1].iter().any(|&v| v <= 0.0) {
                    return Err(Error::InvalidParameters(
                        "interior samples must have r > 0".into(),
                    ));
                }
            }
            CurveKind::PeriodicZ { period } => {
                if period <= 0.0 || r.iter().any(|&v| v <= 0.0) {
                    return Err(Error::InvalidParameters(
                        "periodic curve needs positive period and r > 0".into(),
                    ));
                }
            }
        }
        let mut z = z;
        let mut r = r;
        if kind == CurveKind::AxisToAxis {
            r[0] = 0.0;
            r[n - 1] = 0.0;
        }
        let s = cumulative_chords(&z, &r);
        let _ = &mut z;
        Ok(GeneratingCurve { kind, z, r, s })
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// Total arclength; for periodic curves includes the closing chord.
    pub fn closed_length(&self) -> f64 {
        match self.kind {
            CurveKind::AxisToAxis => *self.s.last().unwrap(),
            CurveKind::PeriodicZ { period } => {
                let n = self.n();
                let dz = self.z[0] + period - self.z[n - 1];
                let dr = self.r[0] - self.r[n - 1];
                self.s[n - 1] + (dz * dz + dr * dr).sqrt()
            }
        }
    }

    /// Stencil window around sample i: (s, index, sign-for-odd-fields).
    /// Interior samples get 5 centered nodes. Axis ends use 7 nodes with
    /// reflection through the pole (z and curvatures extend evenly, r oddly);
    /// the wider window keeps the rotational curvature accurate where the
    /// z'/r quotient loses digits. Periodic curves wrap.
    fn window(&self, i: usize) -> Vec<(f64, usize, f64)> {
        let n = self.n();
        match self.kind {
            CurveKind::PeriodicZ { .. } => {
                let len = self.closed_length();
                let mut w = Vec::with_capacity(5);
                for k in 0..5usize {
                    let j = (i + n + k - 2) % n;
                    let mut sj = self.s[j];
                    if i < 2 && k + i < 2 {
                        sj -= len;
                    }
                    if i >= n - 2 && (i + k) >= n + 2 {
                        sj += len;
                    }
                    w.push((sj, j, 1.0));
                }
                w
            }
            CurveKind::AxisToAxis => {
                if i >= 2 && i + 2 < n {
                    (i - 2..=i + 2).map(|j| (self.s[j], j, 1.0)).collect()
                } else if i < 2 {
                    // reflect through s = 0
                    (i as isize - 3..=i as isize + 3)
                        .map(|j| {
                            if j < 0 {
                                (-self.s[(-j) as usize], (-j) as usize, -1.0)
                            } else {
                                (self.s[j as usize], j as usize, 1.0)
                            }
                        })
                        .collect()
                } else {
                    // reflect through s = s_end
                    let se = self.s[n - 1];
                    (i as isize - 3..=i as isize + 3)
                        .map(|j| {
                            if j as usize >= n {
                                let m = (2 * (n as isize - 1) - j) as usize;
                                (2.0 * se - self.s[m], m, -1.0)
                            } else {
                                (self.s[j as usize], j as usize, 1.0)
                            }
                        })
                        .collect()
                }
            }
        }
    }

    /// First and second s-derivatives of a per-sample field.
    /// `odd` marks fields that flip sign under reflection through a pole.
    pub(crate) fn field_derivatives(&self, vals: &[f64], odd: bool) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        for i in 0..n {
            let w = self.window(i);
            let nodes: Vec<f64> = w.iter().map(|e| e.0).collect();
            let weights = fd_weights(self.s[i], &nodes, 2);
            let (mut a1, mut a2) = (0.0, 0.0);
            for (k, &(_, j, sign)) in w.iter().enumerate() {
                let v = if odd { sign * vals[j] } else { vals[j] };
                a1 += weights[1][k] * v;
                a2 += weights[2][k] * v;
            }
            d1[i] = a1;
            d2[i] = a2;
        }
        (d1, d2)
    }

    /// Pointwise curvature data for the revolved surface.
    pub fn geometry(&self) -> Result<Vec<PointwiseGeometry>> {
        let n = self.n();
        let axis = self.kind == CurveKind::AxisToAxis;
        let (lo, hi) = if axis { (1, n - 1) } else { (0, n) };
        for i in lo..hi {
            if self.r[i] <= 0.0 {
                return Err(Error::InteriorPinch { z: self.z[i], t: f64::NAN });
            }
        }
        // Periodic z carries one period of drift per wrap; differentiate the
        // detrended part and add the drift back. Axis z is used as-is.
        let (z1, z2) = match self.kind {
            CurveKind::AxisToAxis => self.field_derivatives(&self.z, false),
            CurveKind::PeriodicZ { period } => {
                let drift = period / self.closed_length();
                let w: Vec<f64> =
                    self.s.iter().zip(&self.z).map(|(si, zi)| zi - drift * si).collect();
                let (mut w1, w2) = self.field_derivatives(&w, false);
                for v in &mut w1 {
                    *v += drift;
                }
                (w1, w2)
            }
        };
        // r is odd across poles; parity is inert for periodic windows
        let (r1, r2) = self.field_derivatives(&self.r, true);
        let mut lam_p = vec![0.0; n];
        let mut lam_r = vec![0.0; n];
        let mut normals = vec![[0.0; 2]; n];
        let mut speeds = vec![0.0; n];
        for i in 0..n {
            let t2 = z1[i] * z1[i] + r1[i] * r1[i];
            let tn = t2.sqrt();
            if tn <= 0.0 || tn.is_nan() {
                return Err(Error::NumericalFailure(format!(
                    "degenerate tangent at sample {i}"
                )));
            }
            let lp = (z2[i] * r1[i] - r2[i] * z1[i]) / (t2 * tn);
            let lr = if axis && (i == 0 || i == n - 1) {
                lp
            } else {
                z1[i] / (self.r[i] * tn)
            };
            lam_p[i] = lp;
            lam_r[i] = lr;
            normals[i] = [-r1[i] / tn, z1[i] / tn];
            speeds[i] = tn;
        }
        let (lp1, lp2) = self.field_derivatives(&lam_p, false);
        // Codazzi: d(lambda_rot)/ds = (r'/r)(lambda_prof - lambda_rot)
        let mut lr1 = vec![0.0; n];
        for i in 0..n {
            lr1[i] = if axis && (i == 0 || i == n - 1) {
                0.0
            } else {
                (r1[i] / self.r[i]) * (lam_p[i] - lam_r[i])
            };
        }
        let (lr2, _) = self.field_derivatives(&lr1, true);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (lam_p[i], lam_r[i]);
            let (l1, l2) = if a <= b { (a, b) } else { (b, a) };
            out.push(PointwiseGeometry {
                h: l1 + l2,
                lambda1: l1,
                lambda2: l2,
                lambda_prof: a,
                lambda_rot: b,
                normal: normals[i],
                speed: speeds[i],
                grad_a: (lp1[i] * lp1[i] + 3.0 * lr1[i] * lr1[i]).sqrt(),
                grad2_a: (lp2[i] * lp2[i] + 3.0 * lr2[i] * lr2[i]).sqrt(),
            });
        }
        Ok(out)
    }

    /// Spline of z over arclength. Periodic curves carry the secular drift
    /// (one period of z per closed length) separately from the periodic part.
    pub fn spline_z(&self) -> CubicSpline {
        match self.kind {
            CurveKind::AxisToAxis => {
                CubicSpline::clamped(self.s.clone(), self.z.clone(), 0.0, 0.0)
            }
            CurveKind::PeriodicZ { period } => {
                let len = self.closed_length();
                let drift = period / len;
                let w: Vec<f64> = self.s.iter().zip(&self.z).map(|(si, zi)| zi - drift * si).collect();
                // store as periodic spline of the detrended part; eval adds drift back
                CubicSpline::periodic(self.s.clone(), w, len)
            }
        }
    }

    pub fn spline_r(&self) -> CubicSpline {
        match self.kind {
            CurveKind::AxisToAxis => {
                CubicSpline::clamped(self.s.clone(), self.r.clone(), 1.0, -1.0)
            }
            CurveKind::PeriodicZ { .. } => {
                CubicSpline::periodic(self.s.clone(), self.r.clone(), self.closed_length())
            }
        }
    }

    /// Evaluates (z, r) at arclength t through the spline reconstruction.
    pub fn point_at(&self, t: f64) -> (f64, f64) {
        match self.kind {
            CurveKind::AxisToAxis => (self.spline_z().eval(t), self.spline_r().eval(t)),
            CurveKind::PeriodicZ { period } => {
                let len = self.closed_length();
                let drift = period / len;
                (self.spline_z().eval(t) + drift * t, self.spline_r().eval(t))
            }
        }
    }

    fn max_abs_a(&self) -> Result<Vec<f64>> {
        Ok(self
            .geometry()?
            .iter()
            .map(|g| g.lambda1.abs().max(g.lambda2.abs()))
            .collect())
    }

    pub fn min_spacing(&self) -> f64 {
        self.s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    pub fn max_spacing(&self) -> f64 {
        let mut m = self.s.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        if let CurveKind::PeriodicZ { .. } = self.kind {
            m = m.max(self.closed_length() - self.s[self.n() - 1]);
        }
        m
    }

    /// True when spacing or curvature resolution has left the configured band.
    pub fn needs_resample(&self, res: &ResolutionParams) -> Result<bool> {
        if self.min_spacing() < 0.5 * res.h_min || self.max_spacing() > res.h_max {
            return Ok(true);
        }
        let a = self.max_abs_a()?;
        for i in 0..self.n() - 1 {
            let h = self.s[i + 1] - self.s[i];
            if a[i].max(a[i + 1]) * h > res.q_max {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Rebuilds the sample set so spacing tracks curvature: h ~ q_target/|A|
    /// clamped to [h_min, h_max], with bounded grading.
    pub fn resample(&self, res: &ResolutionParams) -> Result<GeneratingCurve> {
        let n = self.n();
        let a = self.max_abs_a()?;
        let mut target: Vec<f64> = a
            .iter()
            .map(|&ai| (res.q_target / ai.max(1e-12)).clamp(res.h_min, res.h_max))
            .collect();
        // grading sweeps keep |dh/ds| <= 0.3 so neighboring intervals stay comparable
        for i in 1..n {
            let ds = self.s[i] - self.s[i - 1];
            target[i] = target[i].min(target[i - 1] + 0.3 * ds);
        }
        for i in (0..n - 1).rev() {
            let ds = self.s[i + 1] - self.s[i];
            target[i] = target[i].min(target[i + 1] + 0.3 * ds);
        }
        let total = self.closed_length();
        // cumulative node density
        let mut dens = vec![0.0; n];
        for i in 1..n {
            let ds = self.s[i] - self.s[i - 1];
            dens[i] = dens[i - 1] + ds * 0.5 * (1.0 / target[i - 1] + 1.0 / target[i]);
        }
        let wrap_dens = match self.kind {
            CurveKind::AxisToAxis => dens[n - 1],
            CurveKind::PeriodicZ { .. } => {
                dens[n - 1] + (total - self.s[n - 1]) / target[n - 1]
            }
        };
        let count = wrap_dens.ceil().max(8.0) as usize;
        let sz = self.spline_z();
        let sr = self.spline_r();
        let drift = match self.kind {
            CurveKind::PeriodicZ { period } => period / total,
            CurveKind::AxisToAxis => 0.0,
        };
        let invert = |d: f64| -> f64 {
            // piecewise-linear inverse of the cumulative density
            match dens.partition_point(|&v| v < d) {
                0 => self.s[0],
                i if i >= n => {
                    // wrap segment (periodic only)
                    let extra = d - dens[n - 1];
                    self.s[n - 1] + extra * target[n - 1]
                }
                i => {
                    let f = (d - dens[i - 1]) / (dens[i] - dens[i - 1]);
                    self.s[i - 1] + f * (self.s[i] - self.s[i - 1])
                }
            }
        };
        let (mut z_new, mut r_new) = (Vec::new(), Vec::new());
        match self.kind {
            CurveKind::AxisToAxis => {
                for k in 0..=count {
                    let d = wrap_dens * k as f64 / count as f64;
                    let t = invert(d);
                    z_new.push(sz.eval(t));
                    r_new.push(sr.eval(t).max(0.0));
                }
                let m = z_new.len();
                z_new[0] = self.z[0];
                r_new[0] = 0.0;
                z_new[m - 1] = self.z[n - 1];
                r_new[m - 1] = 0.0;
                for v in r_new[1..m - 1].iter_mut() {
                    if *v <= 0.0 {
                        return Err(Error::InteriorPinch { z: 0.0, t: f64::NAN });
                    }
                }
            }
            CurveKind::PeriodicZ { .. } => {
                for k in 0..count {
                    let d = wrap_dens * k as f64 / count as f64;
                    let t = invert(d);
                    z_new.push(sz.eval(t) + drift * t);
                    r_new.push(sr.eval(t));
                }
            }
        }
        GeneratingCurve::from_points(self.kind, z_new, r_new)
    }

    /// Integrates f(s) * |x'(s)| by per-interval Simpson on the spline
    /// reconstruction (includes the wrap interval for periodic curves).
    pub(crate) fn integrate<F: Fn(f64, f64, f64) -> f64>(&self, f: F) -> f64 {
        let sz = self.spline_z();
        let sr = self.spline_r();
        let drift = match self.kind {
            CurveKind::PeriodicZ { period } => period / self.closed_length(),
            CurveKind::AxisToAxis => 0.0,
        };
        let eval = |t: f64| -> (f64, f64, f64) {
            let z = sz.eval(t) + drift * t;
            let r = sr.eval(t);
            let zp = sz.deriv(t) + drift;
            let rp = sr.deriv(t);
            (z, r, (zp * zp + rp * rp).sqrt())
        };
        let n = self.n();
        let segs: usize = match self.kind {
            CurveKind::AxisToAxis => n - 1,
            CurveKind::PeriodicZ { .. } => n,
        };
        // Adaptive per interval: region indicators make the integrand only
        // piecewise smooth, and fixed-node rules would leak O(h) errors at
        // region boundaries (breaking monotonicity of ball areas).
        let mut acc = 0.0;
        for i in 0..segs {
            let (s0, s1) = if i + 1 < n {
                (self.s[i], self.s[i + 1])
            } else {
                (self.s[n - 1], self.closed_length())
            };
            let g = |t: f64| {
                let (z, r, j) = eval(t);
                f(z, r, j) * j
            };
            acc += crate::numerics::quad::adaptive_simpson(g, s0, s1, 1e-10, 1e-14);
        }
        acc
    }
}

/// Region selector for area measurements. Ball centers are 3D points
/// [x, y, z]; off-axis centers get the exact partial-angle treatment.
#[derive(Clone, Copy, Debug)]
pub enum Region {
    Whole,
    Ball { center: [f64; 3], radius: f64 },
}

#[derive(Clone, Debug)]
pub struct ProfileSurface {
    pub components: Vec<GeneratingCurve>,
    pub time: f64,
}

impl ProfileSurface {
    pub fn new(components: Vec<GeneratingCurve>, time: f64) -> Self {
        ProfileSurface { components, time }
    }

    pub fn geometry(&self) -> Result<Vec<Vec<PointwiseGeometry>>> {
        self.components.iter().map(|c| c.geometry()).collect()
    }

    pub fn min_h(&self) -> Result<f64> {
        let mut m = f64::INFINITY;
        for g in self.geometry()? {
            for p in g {
                m = m.min(p.h);
            }
        }
        Ok(m)
    }

    pub fn max_h(&self) -> Result<f64> {
        let mut m = f64::NEG_INFINITY;
        for g in self.geometry()? {
            for p in g {
                m = m.max(p.h);
            }
        }
        Ok(m)
    }

    /// 2D Hausdorff area of the revolved boundary inside the region.
    pub fn area_measure(&self, region: Region) -> f64 {
        let tau = std::f64::consts::TAU;
        self.components
            .iter()
            .map(|c| match region {
                Region::Whole => c.integrate(|_z, r, _j| tau * r),
                Region::Ball { center, radius } => {
                    let z0 = center[2];
                    let d0 = (center[0] * center[0] + center[1] * center[1]).sqrt();
                    c.integrate(|z, r, _j| {
                        let dz2 = (z - z0) * (z - z0);
                        if d0 < 1e-14 {
                            if dz2 + r * r <= radius * radius {
                                tau * r
                            } else {
                                0.0
                            }
                        } else {
                            let c_ang =
                                (dz2 + r * r + d0 * d0 - radius * radius) / (2.0 * r * d0);
                            if c_ang <= -1.0 {
                                tau * r
                            } else if c_ang >= 1.0 {
                                0.0
                            } else {
                                2.0 * c_ang.acos() * r
                            }
                        }
                    })
                }
            })
            .sum()
    }

    /// Enclosed volume via the divergence theorem on the profile.
    pub fn volume(&self) -> f64 {
        self.components.iter().map(curve_volume).sum()
    }

    /// Membership in the closed solid region (any component).
    pub fn contains(&self, point: [f64; 3]) -> bool {
        let z = point[2];
        let d = (point[0] * point[0] + point[1] * point[1]).sqrt();
        self.components.iter().any(|c| curve_contains(c, z, d))
    }

    /// Positive inside: min over boundary of 2D half-plane distance, signed.
    pub fn signed_margin(&self, point: [f64; 3]) -> f64 {
        let z = point[2];
        let d = (point[0] * point[0] + point[1] * point[1]).sqrt();
        let mut dist = f64::INFINITY;
        for c in &self.components {
            for i in 0..c.n() - 1 {
                dist = dist.min(seg_dist(z, d, c.z[i], c.r[i], c.z[i + 1], c.r[i + 1]));
            }
            if let CurveKind::PeriodicZ { period } = c.kind {
                let n = c.n();
                for shift in [-period, 0.0, period] {
                    dist = dist.min(seg_dist(
                        z,
                        d,
                        c.z[n - 1] + shift,
                        c.r[n - 1],
                        c.z[0] + period + shift,
                        c.r[0],
                    ));
                }
            }
        }
        if self.contains(point) {
            dist
        } else {
            -dist
        }
    }

    /// Construction-time validation: embedded (no self- or cross-component
    /// intersections) and mean-convex.
    pub fn validate_embedded_mean_convex(&self) -> Result<()> {
        for (ci, c) in self.components.iter().enumerate() {
            if has_self_intersection(c) {
                return Err(Error::InvalidParameters(format!(
                    "component {ci} self-intersects"
                )));
            }
        }
        for i in 0..self.components.len() {
            for j in i + 1..self.components.len() {
                if curves_intersect(&self.components[i], &self.components[j]) {
                    return Err(Error::InvalidParameters(format!(
                        "components {i} and {j} intersect"
                    )));
                }
            }
        }
        let h = self.min_h()?;
        if h <= 0.0 {
            return Err(Error::InvalidParameters(format!(
                "profile is not mean-convex: min H = {h:.6}"
            )));
        }
        Ok(())
    }
}

/// Volume enclosed by one revolved curve (per period for periodic curves),
/// via the divergence theorem on the profile.
pub(crate) fn curve_volume(c: &GeneratingCurve) -> f64 {
    let pi = std::f64::consts::PI;
    let sz = c.spline_z();
    let drift = match c.kind {
        CurveKind::PeriodicZ { period } => period / c.closed_length(),
        CurveKind::AxisToAxis => 0.0,
    };
    let sr = c.spline_r();
    let n = c.n();
    let segs = match c.kind {
        CurveKind::AxisToAxis => n - 1,
        CurveKind::PeriodicZ { .. } => n,
    };
    let mut acc = 0.0;
    for i in 0..segs {
        let (s0, s1) = if i + 1 < n {
            (c.s[i], c.s[i + 1])
        } else {
            (c.s[n - 1], c.closed_length())
        };
        let sm = 0.5 * (s0 + s1);
        let f = |t: f64| {
            let r = sr.eval(t);
            r * r * (sz.deriv(t) + drift)
        };
        acc += (s1 - s0) / 6.0 * (f(s0) + 4.0 * f(sm) + f(s1));
    }
    pi * acc
}

fn curve_contains(c: &GeneratingCurve, z: f64, d: f64) -> bool {
    match c.kind {
        CurveKind::AxisToAxis => {
            // even-odd ray cast in +z from (z, d); the axis closure never crosses
            let mut inside = false;
            let n = c.n();
            for i in 0..n - 1 {
                let (ra, rb) = (c.r[i], c.r[i + 1]);
                if (ra > d) != (rb > d) {
                    let zc = c.z[i] + (d - ra) * (c.z[i + 1] - c.z[i]) / (rb - ra);
                    if zc > z {
                        inside = !inside;
                    }
                }
            }
            inside
        }
        CurveKind::PeriodicZ { period } => {
            // graph over z: reduce into one period and compare radii
            let z0 = c.z[0];
            let zr = (z - z0).rem_euclid(period) + z0;
            let n = c.n();
            let i = c.z.partition_point(|&v| v <= zr).clamp(1, n - 1) - 1;
            let (za, zb) = (c.z[i], if i + 1 < n { c.z[i + 1] } else { c.z[0] + period });
            let (ra, rb) = (c.r[i], if i + 1 < n { c.r[i + 1] } else { c.r[0] });
            let f = if zb > za { (zr - za) / (zb - za) } else { 0.0 };
            d <= ra + f * (rb - ra)
        }
    }
}

fn seg_dist(pz: f64, pr: f64, az: f64, ar: f64, bz: f64, br: f64) -> f64 {
    let (dz, dr) = (bz - az, br - ar);
    let l2 = dz * dz + dr * dr;
    let t = if l2 > 0.0 {
        (((pz - az) * dz + (pr - ar) * dr) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qz, qr) = (az + t * dz, ar + t * dr);
    ((pz - qz) * (pz - qz) + (pr - qr) * (pr - qr)).sqrt()
}

fn segs_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let orient = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
        (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
    };
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

fn has_self_intersection(c: &GeneratingCurve) -> bool {
    let n = c.n();
    for i in 0..n - 1 {
        for j in i + 2..n - 1 {
            if segs_cross(
                (c.z[i], c.r[i]),
                (c.z[i + 1], c.r[i + 1]),
                (c.z[j], c.r[j]),
                (c.z[j + 1], c.r[j + 1]),
            ) {
                return true;
            }
        }
    }
    false
}

fn curves_intersect(a: &GeneratingCurve, b: &GeneratingCurve) -> bool {
    let (az_min, az_max) = (
        a.z.iter().cloned().fold(f64::INFINITY, f64::min),
        a.z.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    for j in 0..b.n() - 1 {
        if b.z[j].max(b.z[j + 1]) < az_min || b.z[j].min(b.z[j + 1]) > az_max {
            continue;
        }
        for i in 0..a.n() - 1 {
            if segs_cross(
                (a.z[i], a.r[i]),
                (a.z[i + 1], a.r[i + 1]),
                (b.z[j], b.r[j]),
                (b.z[j + 1], b.r[j + 1]),
            ) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::SplitMix64;
    use crate::shapes::{build_profile, DumbbellShape, InitialData};

    const PI: f64 = std::f64::consts::PI;

    fn sphere(radius: f64, n: usize) -> ProfileSurface {
        build_profile(&InitialData::Sphere { radius }, Some(n), &ResolutionParams::default())
            .unwrap()
    }

    fn cylinder(radius: f64, length: f64, n: usize) -> ProfileSurface {
        build_profile(
            &InitialData::RoundCylinderPeriodic { radius, length },
            Some(n),
            &ResolutionParams::default(),
        )
        .unwrap()
    }

    fn dumbbell() -> ProfileSurface {
        build_profile(
            &InitialData::Dumbbell {
                neck_radius: 0.2,
                bell_radius: 1.0,
                half_separation: 2.0,
                shape: DumbbellShape::default(),
            },
            None,
            &ResolutionParams::default(),
        )
        .unwrap()
    }

    fn max_h_error(surface: &ProfileSurface, h_exact: f64) -> f64 {
        surface.geometry().unwrap()[0]
            .iter()
            .map(|g| (g.h - h_exact).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn unit_sphere_curvature_at_400_samples() {
        let s = sphere(1.0, 400);
        let geo = &s.geometry().unwrap()[0];
        for g in geo.iter() {
            assert!((g.h - 2.0).abs() <= 1e-6, "H = {}, err {:.3e}", g.h, (g.h - 2.0).abs());
            assert!((g.lambda1 - 1.0).abs() <= 1e-6);
            assert!((g.lambda2 - 1.0).abs() <= 1e-6);
            let norm = (g.normal[0] * g.normal[0] + g.normal[1] * g.normal[1]).sqrt();
            assert!((norm - 1.0).abs() <= 1e-12);
        }
        // outward: normal at the equator points away from the axis
        let mid = geo.len() / 2;
        assert!(geo[mid].normal[1] > 0.99);
    }

    #[test]
    fn sphere_curvature_scales_inversely_with_radius() {
        let s = sphere(2.0, 400);
        assert!(max_h_error(&s, 1.0) <= 1e-6);
        let geo = &s.geometry().unwrap()[0];
        for g in geo.iter() {
            assert!((g.lambda1 - 0.5).abs() <= 1e-6);
        }
    }

    #[test]
    fn sphere_curvature_converges_under_refinement() {
        let coarse = max_h_error(&sphere(1.0, 100), 2.0);
        let fine = max_h_error(&sphere(1.0, 200), 2.0);
        assert!(
            coarse / fine.max(1e-15) >= 3.0,
            "refinement gain {:.2} (coarse {:.3e}, fine {:.3e})",
            coarse / fine.max(1e-15),
            coarse,
            fine
        );
    }

    #[test]
    fn cylinder_has_one_flat_direction() {
        let c = cylinder(1.0, 2.0, 64);
        for g in c.geometry().unwrap()[0].iter() {
            assert!(g.lambda1.abs() <= 1e-9);
            assert!((g.lambda2 - 1.0).abs() <= 1e-9);
            assert!((g.h - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn sphere_gradient_estimates_vanish() {
        let s = sphere(1.0, 400);
        for g in s.geometry().unwrap()[0].iter() {
            assert!(g.grad_a.abs() <= 1e-3, "grad_a = {:.3e}", g.grad_a);
        }
    }

    #[test]
    fn areas_match_closed_forms() {
        let s = sphere(1.0, 400);
        assert!((s.area_measure(Region::Whole) - 4.0 * PI).abs() <= 4.0 * PI * 1e-6);
        let c = cylinder(1.0, 2.0, 200);
        assert!((c.area_measure(Region::Whole) - 4.0 * PI).abs() <= 4.0 * PI * 1e-9);
    }

    #[test]
    fn volumes_match_closed_forms() {
        let s = sphere(1.0, 400);
        assert!((s.volume() - 4.0 * PI / 3.0).abs() <= 1e-5);
        let c = cylinder(1.0, 2.0, 200);
        assert!((c.volume() - 2.0 * PI).abs() <= 1e-9);
    }

    #[test]
    fn ball_area_on_axis_matches_spherical_cap() {
        let s = sphere(1.0, 400);
        // |x - north|^2 <= rho^2 cuts the cap of height rho^2/2
        let rho: f64 = 0.3;
        let cap = 2.0 * PI * (rho * rho / 2.0);
        let got = s.area_measure(Region::Ball { center: [0.0, 0.0, 1.0], radius: rho });
        assert!((got - cap).abs() <= 1e-4 * cap, "got {got}, want {cap}");
    }

    #[test]
    fn ball_area_off_axis_matches_spherical_cap() {
        let s = sphere(1.0, 800);
        let rho: f64 = 0.5;
        let cap = 2.0 * PI * (rho * rho / 2.0);
        let got = s.area_measure(Region::Ball { center: [1.0, 0.0, 0.0], radius: rho });
        assert!((got - cap).abs() <= 2e-4 * cap, "got {got}, want {cap}");
    }

    #[test]
    fn ball_area_is_monotone_and_bounded() {
        let d = dumbbell();
        let whole = d.area_measure(Region::Whole);
        let mut prev = 0.0;
        for rho in [0.1, 0.3, 0.9, 2.7, 8.1] {
            let a = d.area_measure(Region::Ball { center: [0.0, 0.0, 0.3], radius: rho });
            assert!(a >= prev - whole * 1e-9, "rho {rho}: {a} < {prev}");
            assert!(a <= whole * (1.0 + 1e-9));
            prev = a;
        }
        assert!((prev - whole).abs() <= whole * 1e-9);
        // disjoint balls stay additive below the total (the bell arcs sit at
        // distance exactly 1 from the bell centers, so radius 1.2 sees them)
        let b1 = d.area_measure(Region::Ball { center: [0.0, 0.0, -2.0], radius: 1.2 });
        let b2 = d.area_measure(Region::Ball { center: [0.0, 0.0, 2.0], radius: 1.2 });
        assert!(b1 > 0.0 && b2 > 0.0);
        assert!(b1 + b2 <= whole * (1.0 + 1e-9));
    }

    #[test]
    fn containment_against_exact_shapes() {
        let s = sphere(1.0, 400);
        let c = cylinder(0.7, 2.0, 200);
        let mut rng = SplitMix64::new(7);
        for _ in 0..500 {
            let p = [
                rng.uniform(-1.4, 1.4),
                rng.uniform(-1.4, 1.4),
                rng.uniform(-2.4, 2.4),
            ];
            let rad = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if (rad - 1.0).abs() > 5e-3 {
                assert_eq!(s.contains(p), rad < 1.0, "sphere point {p:?}");
            }
            let d = (p[0] * p[0] + p[1] * p[1]).sqrt();
            if (d - 0.7).abs() > 5e-3 {
                assert_eq!(c.contains(p), d < 0.7, "cylinder point {p:?}");
            }
        }
    }

    #[test]
    fn dumbbell_containment_at_waist() {
        let d = dumbbell();
        assert!(d.contains([0.0, 0.0, 0.0]));
        assert!(d.contains([0.15, 0.0, 0.0]));
        assert!(!d.contains([0.25, 0.0, 0.0]));
        assert!(d.contains([0.0, 0.9, 2.0]));
        assert!(!d.contains([0.0, 1.05, 2.0]));
        assert!(!d.contains([0.0, 0.0, 3.1]));
    }

    #[test]
    fn signed_margin_tracks_distance() {
        let s = sphere(1.0, 400);
        assert!((s.signed_margin([0.0, 0.0, 0.0]) - 1.0).abs() <= 1e-4);
        assert!((s.signed_margin([0.0, 0.0, 2.0]) + 1.0).abs() <= 1e-4);
        assert!((s.signed_margin([0.5, 0.0, 0.0]) - 0.5).abs() <= 1e-4);
    }

    #[test]
    fn resampling_preserves_sphere_geometry() {
        let res = ResolutionParams { h_min: 1e-4, h_max: 0.04, q_max: 0.2, q_target: 0.1 };
        let s = sphere(1.0, 400);
        let again = s.components[0].resample(&res).unwrap();
        assert!(again.max_spacing() <= res.h_max * 1.001);
        assert!(again.min_spacing() >= res.h_min);
        let surf = ProfileSurface::new(vec![again], 0.0);
        assert!(max_h_error(&surf, 2.0) <= 1e-5);
        assert!(!surf.components[0].needs_resample(&res).unwrap());
    }

    #[test]
    fn resampling_respects_curvature_density() {
        let d = dumbbell();
        let res = ResolutionParams::default();
        let c = &d.components[0];
        assert!(!c.needs_resample(&res).unwrap());
        let geo = c.geometry().unwrap();
        for (i, g) in geo.iter().enumerate().take(c.n() - 1) {
            let h = c.s[i + 1] - c.s[i];
            let a = g.lambda1.abs().max(g.lambda2.abs());
            assert!(a * h <= res.q_max * 1.2, "sample {i}: |A|h = {:.3}", a * h);
        }
    }

    #[test]
    fn periodic_windows_wrap_cleanly() {
        let c = cylinder(1.0, 2.0, 64);
        let geo = c.geometry().unwrap();
        // uniform cylinder: wrap samples are as exact as interior ones
        assert!((geo[0][0].h - 1.0).abs() <= 1e-9);
        assert!((geo[0][63].h - 1.0).abs() <= 1e-9);
        let curve = &c.components[0];
        let (z_back, r_back) = curve.point_at(curve.closed_length());
        assert!((z_back - (curve.z[0] + 2.0)).abs() <= 1e-9);
        assert!((r_back - curve.r[0]).abs() <= 1e-9);
    }

    #[test]
    fn embeddedness_validation_rejects_crossings() {
        // figure-eight-ish curve in the half-plane
        let z = vec![-1.0, -0.5, 0.0, 0.5, 1.0, 0.5, 0.0, -0.5, -0.4, -1.0];
        let r = vec![0.0, 0.5, 0.8, 0.5, 0.3, 0.2, 0.6, 0.35, 0.2, 0.0];
        let c = GeneratingCurve::from_points(CurveKind::AxisToAxis, z, r).unwrap();
        let s = ProfileSurface::new(vec![c], 0.0);
        assert!(s.validate_embedded_mean_convex().is_err());
    }
}
