//! Smooth motion by mean curvature between surgeries.
//!
//! Each generating curve moves by the surface Laplacian of position, written
//! in profile coordinates: X_t = X_ss/|X_s|^2 + (r'/(r |X_s|^2)) X_s + (0, -1/r).
//! This equals -H nu plus a tangential reparameterization, and every stiff
//! piece (the second derivative, the axisymmetric first-order term whose
//! coefficient blows up like 1/s at the poles, and the rotational diagonal)
//! sits inside one tridiagonal solve per coordinate. Treating any of them
//! explicitly is unstable once dt exceeds the squared spacing, which the step
//! policy here deliberately allows.
//!
//! Crank-Nicolson needs the coefficients at the half step; frozen ones drop
//! the scheme to first order. They are advanced analytically: in a fixed
//! label the measure stretches at rate -H * lambda_prof, and the remaining
//! rates follow from differentiating the normal velocity field along the
//! curve. Extrapolating from the previous step would miss exactly this,
//! because re-chording resets the measure to one between steps.
//!
//! The rotational diagonal 1/r^2 is stiff at pole-adjacent nodes, where
//! Crank-Nicolson would ring with amplification near -1. Its weight slides
//! from centered to backward as dt/r^2 grows; the bias this introduces is
//! confined to nodes where the diagonal dwarfs the resolved dynamics.

use crate::error::{Error, Result};
use crate::numerics::tridiag::{solve_cyclic_tridiag, solve_tridiag};
use crate::surface::{
    curve_volume, CurveKind, GeneratingCurve, PointwiseGeometry, ProfileSurface,
    ResolutionParams,
};

#[derive(Clone, Copy, Debug)]
pub struct FlowParams {
    pub res: ResolutionParams,
    /// step cap: dt <= c_acc / max|A|^2
    pub c_acc: f64,
    /// step cap: dt <= c_adv * min_spacing / max|A|
    pub c_adv: f64,
    pub dt_max: f64,
    pub t_end: Option<f64>,
    /// stop when max H reaches this, landing on the crossing by bisection
    pub h_trigger: Option<f64>,
    /// relative tolerance on the length of the trigger-crossing step
    pub trigger_rel_tol: f64,
    /// steps between monitor rows and snapshot pushes
    pub monitor_stride: usize,
    /// how far back retained history must reach; 0 disables snapshots
    pub snapshot_depth: f64,
    pub snapshot_limit: usize,
    pub max_steps: usize,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            res: ResolutionParams::default(),
            c_acc: 0.02,
            c_adv: 0.5,
            dt_max: 1e-3,
            t_end: None,
            h_trigger: None,
            trigger_rel_tol: 1e-6,
            monitor_stride: 8,
            snapshot_depth: 0.0,
            snapshot_limit: 192,
            max_steps: 400_000,
        }
    }
}

/// One row of the coarse time series kept during a run.
#[derive(Clone, Copy, Debug)]
pub struct MonitorRow {
    pub t: f64,
    pub max_h: f64,
    pub min_h: f64,
    pub min_lambda1: f64,
    /// min over samples of lambda1/lambda2
    pub min_ratio: f64,
    /// max over samples of |A|/H
    pub max_a_over_h: f64,
    pub area: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopReason {
    Triggered { max_h: f64 },
    TimeReached,
    Extinct,
}

#[derive(Clone, Debug)]
pub struct FlowOutcome {
    pub surface: ProfileSurface,
    pub reason: StopReason,
    pub monitor: Vec<MonitorRow>,
    /// retained history, oldest first, denser toward the final time
    pub snapshots: Vec<ProfileSurface>,
    /// times at which components vanished
    pub extinctions: Vec<f64>,
    pub steps: usize,
}

struct CompState {
    curve: GeneratingCurve,
    geom: Vec<PointwiseGeometry>,
}

fn abs_a(g: &PointwiseGeometry) -> f64 {
    g.lambda1.abs().max(g.lambda2.abs())
}

/// Spacing and curvature-resolution check against already-computed geometry.
/// Intervals pinned at the h_min floor cannot refine further, so their
/// curvature violations do not count; the pinch guard owns that regime.
fn wants_resample(
    curve: &GeneratingCurve,
    geom: &[PointwiseGeometry],
    res: &ResolutionParams,
) -> bool {
    if curve.min_spacing() < 0.5 * res.h_min || curve.max_spacing() > res.h_max {
        return true;
    }
    for i in 0..curve.n() - 1 {
        let h = curve.s[i + 1] - curve.s[i];
        if h > 1.02 * res.h_min && abs_a(&geom[i]).max(abs_a(&geom[i + 1])) * h > res.q_max {
            return true;
        }
    }
    false
}

/// Crank-Nicolson advance of one field: solves
/// (I - dt/2 L_mat) x_new = x + dt/2 (L_rhs x) + dt f.
/// The two diagonals coincide for a centered step; an off-centered term puts
/// more of itself in `dmat` and less in `drhs`.
fn advance_line(
    x: &[f64],
    lsub: &[f64],
    drhs: &[f64],
    dmat: &[f64],
    lsup: &[f64],
    f: &[f64],
    dt: f64,
) -> Vec<f64> {
    let n = x.len();
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let mut lx = drhs[i] * x[i];
        if i > 0 {
            lx += lsub[i] * x[i - 1];
        }
        if i + 1 < n {
            lx += lsup[i] * x[i + 1];
        }
        rhs[i] = x[i] + 0.5 * dt * lx + dt * f[i];
    }
    let mut asub = vec![0.0; n - 1];
    let mut adia = vec![0.0; n];
    let mut asup = vec![0.0; n - 1];
    for i in 0..n {
        adia[i] = 1.0 - 0.5 * dt * dmat[i];
        if i > 0 {
            asub[i - 1] = -0.5 * dt * lsub[i];
        }
        if i + 1 < n {
            asup[i] = -0.5 * dt * lsup[i];
        }
    }
    solve_tridiag(&asub, &adia, &asup, &mut rhs);
    rhs
}

/// Cyclic variant; index arithmetic wraps mod n.
fn advance_ring(
    x: &[f64],
    lsub: &[f64],
    drhs: &[f64],
    dmat: &[f64],
    lsup: &[f64],
    f: &[f64],
    dt: f64,
) -> Vec<f64> {
    let n = x.len();
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let im = (i + n - 1) % n;
        let ip = (i + 1) % n;
        let lx = lsub[i] * x[im] + drhs[i] * x[i] + lsup[i] * x[ip];
        rhs[i] = x[i] + 0.5 * dt * lx + dt * f[i];
    }
    let asub: Vec<f64> = lsub.iter().map(|&v| -0.5 * dt * v).collect();
    let adia: Vec<f64> = dmat.iter().map(|&v| 1.0 - 0.5 * dt * v).collect();
    let asup: Vec<f64> = lsup.iter().map(|&v| -0.5 * dt * v).collect();
    solve_cyclic_tridiag(&asub, &adia, &asup, &mut rhs);
    rhs
}

/// One implicit step of a single component. `t_new` only stamps errors.
fn step_component(state: &CompState, dt: f64, t_new: f64) -> Result<GeneratingCurve> {
    let c = &state.curve;
    let g = &state.geom;
    let n = c.n();
    let s = &c.s;
    let axis = c.kind == CurveKind::AxisToAxis;
    let wrap = if axis { 0.0 } else { c.closed_length() - s[n - 1] };

    // normal velocity field; its derivative along the label drives the
    // coefficient rates below
    let mut vz = vec![0.0; n];
    let mut vr = vec![0.0; n];
    for i in 0..n {
        vz[i] = -g[i].h * g[i].normal[0];
        vr[i] = -g[i].h * g[i].normal[1];
    }

    // operator coefficients predicted at the half step: diffusion 1/|X_s|^2,
    // axisymmetric convection r'/(r |X_s|^2), rotational diagonal 1/r^2.
    // In the fixed label, |X_s| stretches at rate -H lambda_prof.
    let mut ae = vec![0.0; n];
    let mut be = vec![0.0; n];
    let mut ge = vec![0.0; n];
    for i in 0..n {
        let sp = g[i].speed;
        let t2 = sp * sp;
        let alpha = 1.0 / t2;
        if axis && (i == 0 || i == n - 1) {
            let adot = 2.0 * alpha * g[i].h * g[i].lambda_prof;
            ae[i] = (alpha + 0.5 * dt * adot).max(0.5 * alpha);
            continue;
        }
        let (im, ip) = if axis { (i - 1, i + 1) } else { ((i + n - 1) % n, (i + 1) % n) };
        let hm = if i == 0 { wrap } else { s[i] - s[i - 1] };
        let hp = if i + 1 == n { wrap } else { s[i + 1] - s[i] };
        let wm = -hp / (hm * (hm + hp));
        let w0 = (hp - hm) / (hm * hp);
        let wp = hm / (hp * (hm + hp));
        let zpdot = wm * vz[im] + w0 * vz[i] + wp * vz[ip];
        let rpdot = wm * vr[im] + w0 * vr[i] + wp * vr[ip];
        let zp = g[i].normal[1] * sp;
        let rp = -g[i].normal[0] * sp;
        let t2dot = 2.0 * (zp * zpdot + rp * rpdot);
        let r = c.r[i];
        let alpha_dot = -t2dot / (t2 * t2);
        let b = rp / (r * t2);
        let bdot = rpdot / (r * t2) - b * (vr[i] / r + t2dot / t2);
        let gg = 1.0 / (r * r);
        let gdot = -2.0 * vr[i] / (r * r * r);
        ae[i] = (alpha + 0.5 * dt * alpha_dot).max(0.5 * alpha);
        be[i] = b + 0.5 * dt * bdot;
        ge[i] = (gg + 0.5 * dt * gdot).clamp(0.5 * gg, 2.0 * gg);
    }

    let zeros = vec![0.0; n];
    let (z_new, r_new) = match c.kind {
        CurveKind::AxisToAxis => {
            let mut lsub = vec![0.0; n];
            let mut ldia = vec![0.0; n];
            let mut lsup = vec![0.0; n];
            for i in 1..n - 1 {
                let hm = s[i] - s[i - 1];
                let hp = s[i + 1] - s[i];
                let wd = 2.0 * ae[i] / (hm + hp);
                lsub[i] = wd / hm - be[i] * hp / (hm * (hm + hp));
                lsup[i] = wd / hp + be[i] * hm / (hp * (hm + hp));
                ldia[i] = -(2.0 * ae[i] / (hm * hp)) + be[i] * (hp - hm) / (hm * hp);
            }
            // r is pinned to the axis at both poles; interior rows carry the
            // rotational diagonal, off-centered where it is stiff
            let mut rdia_rhs = ldia.clone();
            let mut rdia_mat = ldia.clone();
            for i in 1..n - 1 {
                let x = dt * ge[i];
                let theta = 0.5 + 0.5 * x / (x + 2.0);
                rdia_rhs[i] -= 2.0 * (1.0 - theta) * ge[i];
                rdia_mat[i] -= 2.0 * theta * ge[i];
            }
            let r_new = advance_line(&c.r, &lsub, &rdia_rhs, &rdia_mat, &lsup, &zeros, dt);
            // pole row: z moves at twice the one-sided profile curvature; the
            // even reflection gives the second difference, and the
            // axisymmetric term contributes the same amount again in the limit
            let h0 = s[1] - s[0];
            let c0 = 4.0 * ae[0] / (h0 * h0);
            ldia[0] = -c0;
            lsup[0] = c0;
            let he = s[n - 1] - s[n - 2];
            let ce = 4.0 * ae[n - 1] / (he * he);
            lsub[n - 1] = ce;
            ldia[n - 1] = -ce;
            let z_new = advance_line(&c.z, &lsub, &ldia, &ldia, &lsup, &zeros, dt);
            (z_new, r_new)
        }
        CurveKind::PeriodicZ { period } => {
            let len = c.closed_length();
            let mut lsub = vec![0.0; n];
            let mut ldia = vec![0.0; n];
            let mut lsup = vec![0.0; n];
            for i in 0..n {
                let hm = if i == 0 { wrap } else { s[i] - s[i - 1] };
                let hp = if i + 1 == n { wrap } else { s[i + 1] - s[i] };
                let wd = 2.0 * ae[i] / (hm + hp);
                lsub[i] = wd / hm - be[i] * hp / (hm * (hm + hp));
                lsup[i] = wd / hp + be[i] * hm / (hp * (hm + hp));
                ldia[i] = -(2.0 * ae[i] / (hm * hp)) + be[i] * (hp - hm) / (hm * hp);
            }
            // solve z in detrended coordinates, where it is genuinely
            // periodic; the convection of the linear drift part is a known
            // source
            let drift = period / len;
            let wvals: Vec<f64> = s.iter().zip(&c.z).map(|(si, zi)| zi - drift * si).collect();
            let fz: Vec<f64> = be.iter().map(|&bi| bi * drift).collect();
            let w_new = advance_ring(&wvals, &lsub, &ldia, &ldia, &lsup, &fz, dt);
            let z_new: Vec<f64> =
                w_new.iter().zip(s.iter()).map(|(wi, si)| wi + drift * si).collect();
            let mut rdia_rhs = ldia.clone();
            let mut rdia_mat = ldia;
            for i in 0..n {
                let x = dt * ge[i];
                let theta = 0.5 + 0.5 * x / (x + 2.0);
                rdia_rhs[i] -= 2.0 * (1.0 - theta) * ge[i];
                rdia_mat[i] -= 2.0 * theta * ge[i];
            }
            let r_new = advance_ring(&c.r, &lsub, &rdia_rhs, &rdia_mat, &lsup, &zeros, dt);
            (z_new, r_new)
        }
    };

    if z_new.iter().chain(r_new.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure(format!(
            "non-finite coordinates after step to t = {t_new:.6}"
        )));
    }
    let (lo, hi) = if axis { (1, n - 1) } else { (0, n) };
    for i in lo..hi {
        if r_new[i] <= 0.0 {
            return Err(Error::InteriorPinch { z: z_new[i], t: t_new });
        }
    }
    GeneratingCurve::from_points(c.kind, z_new, r_new)
}

struct Stepped {
    comps: Vec<(GeneratingCurve, Vec<PointwiseGeometry>)>,
    max_h: f64,
}

fn step_all(comps: &[CompState], dt: f64, t_new: f64) -> Result<Stepped> {
    let mut out = Vec::with_capacity(comps.len());
    let mut max_h = f64::NEG_INFINITY;
    for cs in comps {
        let curve = step_component(cs, dt, t_new)?;
        let geom = curve.geometry()?;
        for g in &geom {
            max_h = max_h.max(g.h);
        }
        out.push((curve, geom));
    }
    Ok(Stepped { comps: out, max_h })
}

struct Stats {
    max_h: f64,
    min_h: f64,
    min_l1: f64,
    min_ratio: f64,
    max_a_over_h: f64,
    max_abs: f64,
    z_at_max_abs: f64,
    min_spacing: f64,
}

fn gather(comps: &[CompState]) -> Stats {
    let mut st = Stats {
        max_h: f64::NEG_INFINITY,
        min_h: f64::INFINITY,
        min_l1: f64::INFINITY,
        min_ratio: f64::INFINITY,
        max_a_over_h: f64::NEG_INFINITY,
        max_abs: 0.0,
        z_at_max_abs: 0.0,
        min_spacing: f64::INFINITY,
    };
    for cs in comps {
        st.min_spacing = st.min_spacing.min(cs.curve.min_spacing());
        for (i, g) in cs.geom.iter().enumerate() {
            st.max_h = st.max_h.max(g.h);
            st.min_h = st.min_h.min(g.h);
            st.min_l1 = st.min_l1.min(g.lambda1);
            st.min_ratio = st.min_ratio.min(g.lambda1 / g.lambda2);
            let a = (g.lambda1 * g.lambda1 + g.lambda2 * g.lambda2).sqrt();
            st.max_a_over_h = st.max_a_over_h.max(a / g.h);
            let ab = abs_a(g);
            if ab > st.max_abs {
                st.max_abs = ab;
                st.z_at_max_abs = cs.curve.z[i];
            }
        }
    }
    st
}

fn monitor_row(comps: &[CompState], t: f64, st: &Stats) -> MonitorRow {
    let tau = std::f64::consts::TAU;
    let area = comps.iter().map(|cs| cs.curve.integrate(|_z, r, _j| tau * r)).sum();
    MonitorRow {
        t,
        max_h: st.max_h,
        min_h: st.min_h,
        min_lambda1: st.min_l1,
        min_ratio: st.min_ratio,
        max_a_over_h: st.max_a_over_h,
        area,
    }
}

fn freeze(comps: &[CompState], t: f64) -> ProfileSurface {
    ProfileSurface::new(comps.iter().map(|cs| cs.curve.clone()).collect(), t)
}

/// Keeps the retained history short: recent states dense, older states thinned
/// so the gap around a sample stays a fixed fraction of its age. Drops history
/// past the retention depth but keeps one sample beyond the edge so the whole
/// window stays interpolable.
fn thin_snapshots(snaps: &mut Vec<ProfileSurface>, t: f64, depth: f64, limit: usize) {
    while snaps.len() >= 2 && snaps[1].time < t - depth {
        snaps.remove(0);
    }
    let mut factor = 0.2;
    loop {
        let mut i = 1;
        while i + 1 < snaps.len() {
            let gap = snaps[i + 1].time - snaps[i - 1].time;
            if gap <= factor * (t - snaps[i].time) {
                snaps.remove(i);
            } else {
                i += 1;
            }
        }
        if snaps.len() <= limit {
            break;
        }
        factor *= 2.0;
    }
}

/// Runs the smooth flow until the configured stop: a curvature trigger, a
/// target time, or total extinction. Components that shrink below the
/// resolvable volume are removed and their removal times recorded; curvature
/// the finest allowed mesh cannot resolve aborts with an interior pinch.
pub fn run_flow(surface: ProfileSurface, params: &FlowParams) -> Result<FlowOutcome> {
    let stride = params.monitor_stride.max(1);
    let vol_floor = (10.0 * params.res.h_min).powi(3);
    let mut t = surface.time;
    let mut comps = Vec::with_capacity(surface.components.len());
    for curve in surface.components {
        let curve =
            if curve.needs_resample(&params.res)? { curve.resample(&params.res)? } else { curve };
        let geom = curve.geometry()?;
        comps.push(CompState { curve, geom });
    }
    let mut monitor: Vec<MonitorRow> = Vec::new();
    let mut snaps: Vec<ProfileSurface> = Vec::new();
    let mut extinctions: Vec<f64> = Vec::new();
    let mut steps = 0usize;

    let finish = |comps: &[CompState],
                  t: f64,
                  reason: StopReason,
                  mut monitor: Vec<MonitorRow>,
                  mut snaps: Vec<ProfileSurface>,
                  extinctions: Vec<f64>,
                  steps: usize| {
        if !comps.is_empty() {
            let st = gather(comps);
            if monitor.last().is_none_or(|row| row.t < t) {
                monitor.push(monitor_row(comps, t, &st));
            }
            if params.snapshot_depth > 0.0 && snaps.last().is_none_or(|sn| sn.time < t) {
                snaps.push(freeze(comps, t));
            }
        }
        Ok(FlowOutcome {
            surface: freeze(comps, t),
            reason,
            monitor,
            snapshots: snaps,
            extinctions,
            steps,
        })
    };

    loop {
        // retire components the volume floor declares gone
        let mut k = 0;
        while k < comps.len() {
            if curve_volume(&comps[k].curve) < vol_floor {
                comps.remove(k);
                extinctions.push(t);
            } else {
                k += 1;
            }
        }
        if comps.is_empty() {
            return finish(&comps, t, StopReason::Extinct, monitor, snaps, extinctions, steps);
        }

        for cs in &mut comps {
            if wants_resample(&cs.curve, &cs.geom, &params.res) {
                cs.curve = cs.curve.resample(&params.res)?;
                cs.geom = cs.curve.geometry()?;
            }
        }

        let st = gather(&comps);
        if params.res.h_min * st.max_abs > 2.0 * params.res.q_max {
            return Err(Error::InteriorPinch { z: st.z_at_max_abs, t });
        }
        if let Some(trig) = params.h_trigger {
            if st.max_h >= trig {
                return finish(
                    &comps,
                    t,
                    StopReason::Triggered { max_h: st.max_h },
                    monitor,
                    snaps,
                    extinctions,
                    steps,
                );
            }
        }
        if let Some(te) = params.t_end {
            if t >= te - 1e-15 * te.abs().max(1.0) {
                return finish(&comps, t, StopReason::TimeReached, monitor, snaps, extinctions, steps);
            }
        }
        if steps >= params.max_steps {
            return Err(Error::NumericalFailure(format!(
                "step budget exhausted at t = {t:.6} (max H = {:.3})",
                st.max_h
            )));
        }

        if steps.is_multiple_of(stride) {
            monitor.push(monitor_row(&comps, t, &st));
            if params.snapshot_depth > 0.0 {
                snaps.push(freeze(&comps, t));
                thin_snapshots(&mut snaps, t, params.snapshot_depth, params.snapshot_limit);
            }
        }

        let mut dt = params
            .dt_max
            .min(params.c_acc / (st.max_abs * st.max_abs).max(1e-300))
            .min(params.c_adv * st.min_spacing / st.max_abs.max(1e-300));
        if let Some(te) = params.t_end {
            dt = dt.min(te - t);
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::NumericalFailure(format!("degenerate step dt = {dt:.3e}")));
        }

        let mut stepped = step_all(&comps, dt, t + dt)?;
        let mut hit = None;
        if let Some(trig) = params.h_trigger {
            if stepped.max_h >= trig {
                // the full step crosses the trigger; bisect its length so the
                // accepted state lands on the crossing from above
                let (mut lo, mut hi) = (0.0_f64, dt);
                for _ in 0..80 {
                    if hi - lo <= params.trigger_rel_tol * dt {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    match step_all(&comps, mid, t + mid) {
                        Ok(trial) if trial.max_h >= trig => hi = mid,
                        Ok(_) => lo = mid,
                        // overshooting into a pinch also counts as crossing
                        Err(Error::InteriorPinch { .. }) => hi = mid,
                        Err(e) => return Err(e),
                    }
                }
                stepped = step_all(&comps, hi, t + hi)?;
                dt = hi;
                hit = Some(stepped.max_h);
            }
        }

        for (cs, (curve, geom)) in comps.iter_mut().zip(stepped.comps) {
            cs.curve = curve;
            cs.geom = geom;
        }
        t += dt;
        steps += 1;

        if let Some(max_h) = hit {
            return finish(
                &comps,
                t,
                StopReason::Triggered { max_h },
                monitor,
                snaps,
                extinctions,
                steps,
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{build_profile, DumbbellShape, InitialData};
    use std::f64::consts::PI;

    fn sphere_n400(radius: f64) -> (ProfileSurface, ResolutionParams) {
        let res = ResolutionParams { h_max: PI * radius / 400.0 * 1.01, ..Default::default() };
        let surface = build_profile(&InitialData::Sphere { radius }, Some(401), &res).unwrap();
        (surface, res)
    }

    fn mean_radius(c: &GeneratingCurve) -> f64 {
        let n = c.n() as f64;
        c.z.iter().zip(&c.r).map(|(z, r)| (z * z + r * r).sqrt()).sum::<f64>() / n
    }

    fn radius_spread(c: &GeneratingCurve) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (z, r) in c.z.iter().zip(&c.r) {
            let d = (z * z + r * r).sqrt();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        hi - lo
    }

    #[test]
    #[ignore]
    fn dump_sphere_roundness_profile() {
        let (surface, res) = sphere_n400(1.0);
        let dt_max: f64 =
            std::env::var("DT_MAX").ok().and_then(|v| v.parse().ok()).unwrap_or(1e-3);
        let params = FlowParams { res, t_end: Some(0.024), dt_max, ..Default::default() };
        let out = run_flow(surface, &params).unwrap();
        let c = &out.surface.components[0];
        let exact = (1.0 - 4.0 * out.surface.time).sqrt();
        let n = c.n();
        let mut worst = (0usize, 0.0f64);
        for i in 0..n {
            let d = (c.z[i] * c.z[i] + c.r[i] * c.r[i]).sqrt() - exact;
            if d.abs() > worst.1.abs() {
                worst = (i, d);
            }
            if i < 12 || i > n - 13 || (i % 40 == 0) {
                println!("i={i:4} z={:+.6} r={:.6} dev={:+.3e}", c.z[i], c.r[i], d);
            }
        }
        println!("worst at i={} dev={:+.3e}, n={n}, steps={}", worst.0, worst.1, out.steps);
    }

    #[test]
    fn sphere_follows_the_radius_law() {
        let (mut surface, res) = sphere_n400(1.0);
        for k in 1..=10 {
            let tk = 0.024 * k as f64;
            let params = FlowParams { res, t_end: Some(tk), ..Default::default() };
            let out = run_flow(surface, &params).unwrap();
            assert_eq!(out.reason, StopReason::TimeReached);
            let c = &out.surface.components[0];
            let exact = (1.0 - 4.0 * out.surface.time).sqrt();
            let err = (mean_radius(c) - exact).abs();
            assert!(err <= 5e-4, "checkpoint {k}: radius error {err:.2e} (R = {exact:.4})");
            assert!(
                radius_spread(c) <= 2e-4,
                "checkpoint {k}: sphere lost roundness: spread {:.2e}",
                radius_spread(c)
            );
            surface = out.surface;
        }
    }

    #[test]
    fn sphere_extinction_time_matches_quarter_r_squared() {
        let (surface, res) = sphere_n400(1.0);
        let params = FlowParams { res, ..Default::default() };
        let out = run_flow(surface, &params).unwrap();
        assert_eq!(out.reason, StopReason::Extinct);
        assert_eq!(out.extinctions.len(), 1);
        let err = (out.extinctions[0] - 0.25).abs();
        assert!(err <= 1.25e-3, "extinction at {:.6}, err {err:.2e}", out.extinctions[0]);
        for w in out.monitor.windows(2) {
            assert!(
                w[1].area < w[0].area + 1e-9,
                "area grew: {} -> {} at t = {}",
                w[0].area,
                w[1].area,
                w[1].t
            );
        }
    }

    #[test]
    fn cylinder_follows_the_radius_law() {
        let res = ResolutionParams { h_max: 0.0051, ..Default::default() };
        let mut surface = build_profile(
            &InitialData::RoundCylinderPeriodic { radius: 1.0, length: 2.0 },
            Some(400),
            &res,
        )
        .unwrap();
        for k in 1..=10 {
            let tk = 0.045 * k as f64;
            let params = FlowParams { res, t_end: Some(tk), ..Default::default() };
            let out = run_flow(surface, &params).unwrap();
            assert_eq!(out.reason, StopReason::TimeReached);
            let c = &out.surface.components[0];
            let exact = (1.0 - 2.0 * out.surface.time).sqrt();
            let mean = c.r.iter().sum::<f64>() / c.n() as f64;
            let err = (mean - exact).abs();
            assert!(err <= 5e-4, "checkpoint {k}: radius error {err:.2e}");
            let spread = c.r.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                - c.r.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            assert!(spread <= 1e-9, "cylinder radius not uniform: {spread:.2e}");
            surface = out.surface;
        }
    }

    #[test]
    fn cylinder_errors_shrink_quadratically_with_the_step_caps() {
        let res = ResolutionParams { h_max: 0.0051, ..Default::default() };
        let exact = (1.0_f64 - 0.6).sqrt();
        let mut errs = Vec::new();
        for scale in [1.0, 0.5] {
            let surface = build_profile(
                &InitialData::RoundCylinderPeriodic { radius: 1.0, length: 2.0 },
                Some(400),
                &res,
            )
            .unwrap();
            let params = FlowParams {
                res,
                t_end: Some(0.3),
                c_acc: 0.02 * scale,
                c_adv: 0.5 * scale,
                dt_max: 0.05,
                ..Default::default()
            };
            let out = run_flow(surface, &params).unwrap();
            let c = &out.surface.components[0];
            let mean = c.r.iter().sum::<f64>() / c.n() as f64;
            errs.push((mean - exact).abs());
        }
        assert!(errs[0] < 5e-4 && errs[0] > 1e-12, "base error out of range: {:.2e}", errs[0]);
        let ratio = errs[0] / errs[1];
        assert!(ratio >= 3.0, "halving the caps cut the error only {ratio:.2}x");
    }

    #[test]
    fn dumbbell_reaches_the_trigger() {
        let surface = build_profile(
            &InitialData::Dumbbell {
                neck_radius: 0.2,
                bell_radius: 1.0,
                half_separation: 2.0,
                shape: DumbbellShape::default(),
            },
            None,
            &ResolutionParams::default(),
        )
        .unwrap();
        let params = FlowParams {
            h_trigger: Some(250.0),
            snapshot_depth: 1.5e-3,
            ..Default::default()
        };
        let out = run_flow(surface, &params).unwrap();
        let max_h = match out.reason {
            StopReason::Triggered { max_h } => max_h,
            other => panic!("expected a trigger, got {other:?}"),
        };
        assert!((250.0..=250.5).contains(&max_h), "landed at max H = {max_h:.4}");
        let t = out.surface.time;
        assert!(t > 0.015 && t < 0.025, "trigger time {t:.5}");
        let min_r = out.surface.components[0]
            .r
            .iter()
            .skip(1)
            .take(out.surface.components[0].n() - 2)
            .fold(f64::INFINITY, |a, &b| a.min(b));
        assert!(min_r > 2e-3 && min_r < 8e-3, "waist radius {min_r:.4}");
        assert!(out.snapshots.len() >= 10);
        let first = out.snapshots.first().unwrap().time;
        let last = out.snapshots.last().unwrap().time;
        assert!(first <= t - 1.5e-3, "history only reaches back to {first:.5}");
        assert!((last - t).abs() < 1e-12);
        for row in &out.monitor {
            assert!(row.min_h > 0.25, "mean convexity degraded: min H = {}", row.min_h);
        }
    }

    #[test]
    fn dumbbell_without_a_trigger_pinches() {
        let surface = build_profile(
            &InitialData::Dumbbell {
                neck_radius: 0.2,
                bell_radius: 1.0,
                half_separation: 2.0,
                shape: DumbbellShape::default(),
            },
            None,
            &ResolutionParams::default(),
        )
        .unwrap();
        let params = FlowParams::default();
        match run_flow(surface, &params) {
            Err(Error::InteriorPinch { z, t }) => {
                assert!(z.abs() < 0.5, "pinch at z = {z:.4}");
                assert!(t > 0.01 && t < 0.04, "pinch at t = {t:.5}");
            }
            other => panic!("expected an interior pinch, got {other:?}"),
        }
    }

    #[test]
    fn disjoint_spheres_stay_apart() {
        let res = ResolutionParams::default();
        let outer = build_profile(&InitialData::Sphere { radius: 1.0 }, None, &res).unwrap();
        let inner = build_profile(&InitialData::Sphere { radius: 0.45 }, None, &res).unwrap();
        let surface = ProfileSurface::new(
            vec![
                outer.components.into_iter().next().unwrap(),
                inner.components.into_iter().next().unwrap(),
            ],
            0.0,
        );
        let params = FlowParams { t_end: Some(0.045), ..Default::default() };
        let out = run_flow(surface, &params).unwrap();
        assert_eq!(out.reason, StopReason::TimeReached);
        assert_eq!(out.surface.components.len(), 2);
        let r_out = mean_radius(&out.surface.components[0]);
        let r_in = mean_radius(&out.surface.components[1]);
        let gap0 = 1.0 - 0.45;
        let gap = r_out - r_in;
        assert!(
            gap > gap0 + 0.15,
            "the gap between nested spheres should widen: {gap0:.3} -> {gap:.3}"
        );
    }
}
