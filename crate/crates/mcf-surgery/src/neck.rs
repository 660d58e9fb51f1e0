//! Neck detection and certification.
//!
//! A neck certificate states that, near an axis point and time and after
//! parabolic rescaling by the neck scale, the tracked flow matches the
//! shrinking round cylinder over the full backward window, in value and in
//! axial derivatives. Certificates are found by following each triggered
//! waist backward to the times when its curvature sits in the neck band, and
//! a minimal subset of the certified necks is chosen so that cutting them
//! separates the trigger set from the thick set.

use crate::error::{Error, Result};
use crate::numerics::dense::solve_dense;
use crate::surface::{CurveKind, GeneratingCurve, ProfileSurface};
use crate::surgery::SurgeryConfig;
use crate::track::FlowTrack;

/// Rescaled-radius band a window slice must stay inside while marching.
const BAND_LO: f64 = 0.33;
const BAND_HI: f64 = 3.0;
/// Snapshots slightly older than the unit backward window still count;
/// thinning never leaves a gap wider than this in rescaled time.
const TAU_SLACK: f64 = 0.35;
/// Required rescaled-time coverage: at least one snapshot at or before the
/// old edge and one near the certificate time.
const TAU_COVER_OLD: f64 = -0.95;
const TAU_COVER_NEW: f64 = -0.02;
/// Narrower windows than this say nothing about a neck.
const W_FLOOR: f64 = 0.5;
/// Fewest samples a window slice may hold and still support the fit.
const MIN_SAMPLES: usize = 8;
/// Window-width ladder ratio when the full marched width misses the goal.
const LADDER_STEP: f64 = 0.85;
/// Grid used to bound fit-polynomial derivatives over the window.
const DERIV_GRID: usize = 65;

/// A certified neck: near `center` at time `t0` and scale `r`, the rescaled
/// flow matches the shrinking round cylinder over the backward window to
/// within `delta_achieved`, measured in value and axial derivatives.
#[derive(Clone, Debug)]
pub struct NeckCertificate {
    pub center: [f64; 3],
    pub t0: f64,
    pub r: f64,
    /// worst deviation over all measured orders, times, and window points
    pub delta_achieved: f64,
    /// per-order deviations; `norms[k]` bounds the k-th axial derivative
    pub norms: Vec<f64>,
    /// rescaled half-width of the window actually certified
    pub half_width: f64,
    /// oldest rescaled time measured
    pub tau_lo: f64,
    pub times_sampled: usize,
}

/// A minimal set of certified necks whose removal separates the trigger set
/// from the thick set, together with a textual account of the check.
#[derive(Clone, Debug)]
pub struct SeparatingCollection {
    pub necks: Vec<NeckCertificate>,
    pub separation_witness: String,
}

/// Radius of the shrinking round cylinder at rescaled time `tau` <= 0.
fn model_radius(tau: f64) -> f64 {
    (1.0 - 2.0 * tau).max(0.0).sqrt()
}

/// Marches from sample `i0` in index direction `step` while z stays strictly
/// monotone, the rescaled radius stays in the band, and the rescaled axial
/// offset stays inside `w_target`. Returns rescaled (z, radius) pairs.
fn march(
    comp: &GeneratingCurve,
    i0: usize,
    step: isize,
    zc: f64,
    r: f64,
    w_target: f64,
) -> Vec<(f64, f64)> {
    let n = comp.n();
    let periodic = matches!(comp.kind, CurveKind::PeriodicZ { .. });
    let mut out = Vec::new();
    let mut idx = i0 as isize;
    let mut last_z = comp.z[i0];
    let mut dir = 0.0_f64;
    for _ in 1..n {
        idx += step;
        let i = if periodic {
            idx.rem_euclid(n as isize) as usize
        } else if idx < 0 || idx >= n as isize {
            break;
        } else {
            idx as usize
        };
        let dz = comp.z[i] - last_z;
        if dir == 0.0 {
            if dz == 0.0 {
                break;
            }
            dir = dz.signum();
        } else if dz * dir <= 0.0 {
            break;
        }
        let zt = (comp.z[i] - zc) / r;
        let rt = comp.r[i] / r;
        if zt.abs() > w_target || !(BAND_LO..=BAND_HI).contains(&rt) {
            break;
        }
        out.push((zt, rt));
        last_z = comp.z[i];
    }
    out
}

/// Extracts the cylinder-like graph around z = `zc` at scale `r` on one
/// snapshot: rescaled samples sorted by axial offset, plus the marched
/// half-width. None when no component offers a graph there.
fn graph_slice(
    surface: &ProfileSurface,
    zc: f64,
    r: f64,
    w_target: f64,
) -> Option<(Vec<(f64, f64)>, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for (ci, comp) in surface.components.iter().enumerate() {
        for i in 0..comp.n() {
            if comp.r[i] > 6.0 * r {
                continue;
            }
            let d = ((comp.z[i] - zc).powi(2) + comp.r[i].powi(2)).sqrt();
            if best.is_none_or(|(_, _, bd)| d < bd) {
                best = Some((ci, i, d));
            }
        }
    }
    let (ci, i0, d0) = best?;
    if d0 > 6.0 * r {
        return None;
    }
    let comp = &surface.components[ci];
    let rt0 = comp.r[i0] / r;
    if !(BAND_LO..=BAND_HI).contains(&rt0) {
        return None;
    }
    let mut samples = march(comp, i0, 1, zc, r, w_target);
    samples.push(((comp.z[i0] - zc) / r, rt0));
    samples.extend(march(comp, i0, -1, zc, r, w_target));
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let w_plus = samples.last().map_or(0.0, |s| s.0);
    let w_minus = -samples.first().map_or(0.0, |s| s.0);
    let w = w_plus.min(w_minus);
    if w <= 0.0 {
        return None;
    }
    Some((samples, w))
}

/// Least-squares quartic through (u, y) points, u in [-1, 1]. None when the
/// normal equations are singular.
fn quartic_fit(pts: &[(f64, f64)]) -> Option<[f64; 5]> {
    let mut a = [0.0_f64; 25];
    let mut b = [0.0_f64; 5];
    for &(u, y) in pts {
        let mut pw = [1.0_f64; 9];
        for j in 1..9 {
            pw[j] = pw[j - 1] * u;
        }
        for j in 0..5 {
            for k in 0..5 {
                a[5 * j + k] += pw[j + k];
            }
            b[j] += pw[j] * y;
        }
    }
    solve_dense(&mut a, &mut b).then_some(b)
}

/// Max of |d^k/dz^k p(z/w)| over the window, p given by coefficients in u.
fn poly_deriv_max(c: &[f64; 5], k: usize, w: f64) -> f64 {
    let mut m = 0.0_f64;
    for g in 0..DERIV_GRID {
        let u = -1.0 + 2.0 * g as f64 / (DERIV_GRID - 1) as f64;
        let mut v = 0.0;
        for (j, &cj) in c.iter().enumerate().skip(k) {
            let mut fall = 1.0;
            for d in 0..k {
                fall *= (j - d) as f64;
            }
            v += cj * fall * u.powi((j - k) as i32);
        }
        m = m.max(v.abs());
    }
    m / w.powi(k as i32)
}

enum EvalFailure {
    TooSparse,
    Degenerate,
}

/// Deviation norms over all slices restricted to |z| <= width: order 0 is the
/// pointwise gap to the model radius, orders >= 1 come from the window fit.
fn eval_window(
    slices: &[(f64, Vec<(f64, f64)>)],
    width: f64,
    k_max: usize,
) -> std::result::Result<Vec<f64>, EvalFailure> {
    let mut norms = vec![0.0_f64; k_max + 1];
    let cut = width * (1.0 + 1e-12);
    for (tau, samples) in slices {
        let rho = model_radius(*tau);
        let inside: Vec<(f64, f64)> = samples
            .iter()
            .filter(|s| s.0.abs() <= cut)
            .map(|s| (s.0 / width, s.1 - rho))
            .collect();
        if inside.len() < MIN_SAMPLES {
            return Err(EvalFailure::TooSparse);
        }
        for &(_, y) in &inside {
            norms[0] = norms[0].max(y.abs());
        }
        if k_max >= 1 {
            let c = quartic_fit(&inside).ok_or(EvalFailure::Degenerate)?;
            for (k, norm) in norms.iter_mut().enumerate().skip(1) {
                *norm = norm.max(poly_deriv_max(&c, k, width));
            }
        }
    }
    Ok(norms)
}

/// Certifies the neck at `center`/`t0`/`r` against the track's snapshots.
///
/// Snapshots with rescaled time in [-1 - slack, 0] are compared to the
/// shrinking round cylinder after rescaling; the certificate carries the
/// widest window (up to `w_target`) whose deviation stays within
/// `delta_goal`, or the best-effort window when none does. All measured
/// quantities are rescaled, so the certificate is scale-equivariant.
pub fn neck_certificate(
    track: &FlowTrack,
    center: [f64; 3],
    t0: f64,
    r: f64,
    k_max: usize,
    w_target: f64,
    delta_goal: f64,
) -> Result<NeckCertificate> {
    if !(r > 0.0 && w_target >= 1.0 && delta_goal > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "neck certificate needs r > 0, window >= 1, goal > 0; got ({r}, {w_target}, {delta_goal})"
        )));
    }
    if center[0].hypot(center[1]) > 1e-9 * r.max(1.0) {
        return Err(Error::OffAxis { z: center[2] });
    }
    let k_max = k_max.min(4);
    let zc = center[2];
    let rr = r * r;
    let eligible: Vec<(f64, &ProfileSurface)> = track
        .snapshots()
        .filter_map(|s| {
            let tau = (s.time - t0) / rr;
            (-1.0 - TAU_SLACK..=1e-9).contains(&tau).then_some((tau, s))
        })
        .collect();
    let tau_lo = eligible.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
    let tau_hi = eligible.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
    if eligible.len() < 3 || tau_lo > TAU_COVER_OLD || tau_hi < TAU_COVER_NEW {
        let have = track.snapshots().map(|s| s.time).fold(f64::INFINITY, f64::min);
        return Err(Error::WindowUncovered { needed: t0 - rr, have });
    }

    let mut slices = Vec::with_capacity(eligible.len());
    let mut w_march = w_target;
    for &(tau, surf) in &eligible {
        let (samples, w) = graph_slice(surf, zc, r, w_target).ok_or(Error::OffAxis { z: zc })?;
        w_march = w_march.min(w);
        slices.push((tau, samples));
    }
    if w_march < W_FLOOR {
        return Err(Error::OffAxis { z: zc });
    }

    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    let mut width = w_march;
    while width >= W_FLOOR {
        match eval_window(&slices, width, k_max) {
            Ok(norms) => {
                let delta = norms.iter().fold(0.0_f64, |m, &v| m.max(v));
                if delta <= delta_goal {
                    best = Some((delta, width, norms));
                    break;
                }
                if best.as_ref().is_none_or(|b| delta < b.0) {
                    best = Some((delta, width, norms));
                }
            }
            Err(EvalFailure::TooSparse) => break,
            Err(EvalFailure::Degenerate) => {}
        }
        width *= LADDER_STEP;
    }
    let (delta_achieved, half_width, norms) = best.ok_or_else(|| {
        Error::NumericalFailure(format!("no usable certificate window at z = {zc:.4}"))
    })?;
    Ok(NeckCertificate {
        center,
        t0,
        r,
        delta_achieved,
        norms,
        half_width,
        tau_lo,
        times_sampled: eligible.len(),
    })
}

/// Indices of interior local minima of the profile radius.
fn interior_minima(comp: &GeneratingCurve) -> Vec<usize> {
    let n = comp.n();
    let mut out = Vec::new();
    match comp.kind {
        CurveKind::AxisToAxis => {
            for i in 1..n - 1 {
                if comp.r[i] < comp.r[i - 1] && comp.r[i] <= comp.r[i + 1] {
                    out.push(i);
                }
            }
        }
        CurveKind::PeriodicZ { .. } => {
            for i in 0..n {
                if comp.r[i] < comp.r[(i + n - 1) % n] && comp.r[i] <= comp.r[(i + 1) % n] {
                    out.push(i);
                }
            }
        }
    }
    out
}

/// Distinct waists of a component. Adjacent radius minima merge into one
/// cluster while the ridge between them stays below twice the larger of the
/// two, which is what the long flat necks near a trigger look like; each
/// cluster is represented by its smallest-radius sample.
pub(crate) fn waist_representatives(comp: &GeneratingCurve) -> Vec<usize> {
    let minima = interior_minima(comp);
    if minima.is_empty() {
        return minima;
    }
    let n = comp.n();
    let ridge = |a: usize, b: usize| -> f64 {
        let mut m = 0.0_f64;
        let mut i = a;
        while i != b {
            i = (i + 1) % n;
            m = m.max(comp.r[i]);
        }
        m
    };
    let mut reps: Vec<usize> = Vec::new();
    let mut prev: Option<usize> = None;
    for &mi in &minima {
        match prev {
            Some(p) if ridge(p, mi) <= 2.0 * comp.r[p].max(comp.r[mi]) => {
                let rep = reps.last_mut().unwrap();
                if comp.r[mi] < comp.r[*rep] {
                    *rep = mi;
                }
            }
            _ => reps.push(mi),
        }
        prev = Some(mi);
    }
    if matches!(comp.kind, CurveKind::PeriodicZ { .. }) && reps.len() > 1 {
        let (first, last) = (minima[0], *minima.last().unwrap());
        if ridge(last, first) <= 2.0 * comp.r[last].max(comp.r[first]) {
            let tail = reps.pop().unwrap();
            if comp.r[tail] < comp.r[reps[0]] {
                reps[0] = tail;
            }
        }
    }
    reps
}

/// The waist representative on `snap` nearest to z = `zw` within `jump`, as
/// (z, radius, mean curvature).
fn nearest_waist(snap: &ProfileSurface, zw: f64, jump: f64) -> Result<Option<(f64, f64, f64)>> {
    let mut best = None;
    let mut best_d = jump;
    for comp in &snap.components {
        let reps = waist_representatives(comp);
        if reps.is_empty() {
            continue;
        }
        let geom = comp.geometry()?;
        for wi in reps {
            let d = (comp.z[wi] - zw).abs();
            if d <= best_d {
                best_d = d;
                best = Some((comp.z[wi], comp.r[wi], geom[wi].h));
            }
        }
    }
    Ok(best)
}

/// Finds certified necks for the surface recorded at time `t`.
///
/// Each waist of the recorded surface is followed backward through the
/// stored snapshots to the times when its curvature sits in the neck band;
/// the certificate is issued at the band time (so every certificate predates
/// `t` when the waist triggered above the band) with the waist radius as the
/// neck scale, and the best-quality band time is kept. Candidates that miss
/// the quality goal or the minimum window are dropped; near-coincident
/// survivors are deduplicated toward the better certificate.
pub fn find_necks(track: &FlowTrack, t: f64, config: &SurgeryConfig) -> Result<Vec<NeckCertificate>> {
    let trigger = track.snapshot_at(t).ok_or(Error::TimeUncovered { t })?;
    let tol = 1e-9 * t.abs().max(1.0);
    let history: Vec<&ProfileSurface> = track.snapshots().filter(|s| s.time <= t + tol).collect();
    let band_lo = config.h_neck / config.band_factor;
    let band_hi = config.h_neck * config.band_factor;
    let jump = 2.0 / config.h_neck;

    let mut found: Vec<NeckCertificate> = Vec::new();
    for comp in &trigger.components {
        for wi in waist_representatives(comp) {
            let mut zw = comp.z[wi];
            let mut best: Option<NeckCertificate> = None;
            for snap in history.iter().rev() {
                let Some((zs, rs, hs)) = nearest_waist(snap, zw, jump)? else {
                    break;
                };
                zw = zs;
                if hs < 0.8 * band_lo {
                    break;
                }
                if (band_lo..=band_hi).contains(&hs) {
                    if let Ok(cert) = neck_certificate(
                        track,
                        [0.0, 0.0, zs],
                        snap.time,
                        rs,
                        config.k_max(),
                        config.w_target(),
                        config.delta,
                    ) {
                        if best
                            .as_ref()
                            .is_none_or(|b| cert.delta_achieved < b.delta_achieved)
                        {
                            best = Some(cert);
                        }
                    }
                }
            }
            if let Some(c) = best {
                if c.delta_achieved <= config.delta && c.half_width >= config.w_min {
                    found.push(c);
                }
            }
        }
    }
    found.sort_by(|a, b| a.center[2].total_cmp(&b.center[2]));
    found.dedup_by(|a, b| {
        if (a.center[2] - b.center[2]).abs() <= a.r + b.r {
            if a.delta_achieved < b.delta_achieved {
                std::mem::swap(a, b);
            }
            true
        } else {
            false
        }
    });
    Ok(found)
}

/// Chooses a smallest subset of the candidate necks whose removal separates
/// the trigger set {H >= trigger floor} from the thick set {H <= thick
/// threshold} on `surface`.
///
/// Removal takes out the samples inside the ball of the cut radius around
/// each chosen center; what remains splits into runs along each component
/// (circular runs close up on periodic components). A subset separates when
/// no run carries samples of both sets, and chosen cuts must keep their
/// protected balls pairwise disjoint. Among smallest subsets the innermost
/// wins: least total distance from cut centers to the trigger set, ties
/// broken toward the leftmost center list. The empty subset is legal when
/// the surface is already separated; when no subset works the collection
/// does not exist.
pub fn minimal_separating_collection(
    candidates: &[NeckCertificate],
    surface: &ProfileSurface,
    config: &SurgeryConfig,
) -> Result<SeparatingCollection> {
    let n = candidates.len();
    if n > 16 {
        return Err(Error::InvalidParameters(format!(
            "{n} neck candidates; the subset search is capped at 16"
        )));
    }
    let geom = surface.geometry()?;
    let high_floor = config.high_floor();

    let mut high: Vec<(f64, f64)> = Vec::new();
    let mut thick_count = 0usize;
    for (ci, comp) in surface.components.iter().enumerate() {
        for (i, g) in geom[ci].iter().enumerate() {
            if g.h >= high_floor {
                high.push((comp.z[i], comp.r[i]));
            }
            if g.h <= config.h_thick {
                thick_count += 1;
            }
        }
    }

    // the component each candidate cuts; a candidate with no nearby sample of
    // comparable radius cuts nothing
    let comp_of: Vec<Option<usize>> = candidates
        .iter()
        .map(|c| {
            let reach = 6.0 * c.r + 2.0 / config.h_neck;
            let mut best: Option<(usize, f64)> = None;
            for (ci, comp) in surface.components.iter().enumerate() {
                for i in 0..comp.n() {
                    if comp.r[i] > 6.0 * c.r {
                        continue;
                    }
                    let d = ((comp.z[i] - c.center[2]).powi(2) + comp.r[i].powi(2)).sqrt();
                    if d <= reach && best.is_none_or(|(_, bd)| d < bd) {
                        best = Some((ci, d));
                    }
                }
            }
            best.map(|(ci, _)| ci)
        })
        .collect();
    let mapped = comp_of.iter().filter(|c| c.is_some()).count();

    let ball_disjoint = |mask: u32| -> bool {
        for a in 0..n {
            if mask & (1 << a) == 0 {
                continue;
            }
            for b in a + 1..n {
                if mask & (1 << b) == 0 {
                    continue;
                }
                let (ca, cb) = (&candidates[a], &candidates[b]);
                let gap = config.neck_ball(ca.r) + config.neck_ball(cb.r);
                if (ca.center[2] - cb.center[2]).abs() <= gap {
                    return false;
                }
            }
        }
        true
    };

    let separates = |mask: u32| -> bool {
        for (ci, comp) in surface.components.iter().enumerate() {
            let nn = comp.n();
            let kept: Vec<bool> = (0..nn)
                .map(|i| {
                    !(0..n).any(|j| {
                        mask & (1 << j) != 0 && comp_of[j] == Some(ci) && {
                            let c = &candidates[j];
                            let ball = config.gamma * c.r;
                            (comp.z[i] - c.center[2]).powi(2) + comp.r[i].powi(2) < ball * ball
                        }
                    })
                })
                .collect();
            let mut run = vec![usize::MAX; nn];
            let mut runs = 0usize;
            for i in 0..nn {
                if !kept[i] {
                    continue;
                }
                if i > 0 && kept[i - 1] {
                    run[i] = run[i - 1];
                } else {
                    run[i] = runs;
                    runs += 1;
                }
            }
            if matches!(comp.kind, CurveKind::PeriodicZ { .. }) && nn > 1 && kept[0] && kept[nn - 1]
            {
                let (head, tail) = (run[0], run[nn - 1]);
                if head != tail {
                    for id in run.iter_mut() {
                        if *id == tail {
                            *id = head;
                        }
                    }
                }
            }
            let mut has_high = vec![false; runs];
            let mut has_thick = vec![false; runs];
            for i in 0..nn {
                if !kept[i] {
                    continue;
                }
                let h = geom[ci][i].h;
                if h >= high_floor {
                    has_high[run[i]] = true;
                }
                if h <= config.h_thick {
                    has_thick[run[i]] = true;
                }
            }
            if (0..runs).any(|k| has_high[k] && has_thick[k]) {
                return false;
            }
        }
        true
    };

    let score = |mask: u32| -> f64 {
        (0..n)
            .filter(|j| mask & (1 << j) != 0)
            .map(|j| {
                let zc = candidates[j].center[2];
                high.iter()
                    .map(|&(z, r)| ((z - zc).powi(2) + r * r).sqrt())
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    };

    for size in 0..=n {
        let mut hits: Vec<(u32, f64)> = Vec::new();
        for mask in 0..1u32 << n {
            if mask.count_ones() as usize == size && ball_disjoint(mask) && separates(mask) {
                hits.push((mask, if size == 0 { 0.0 } else { score(mask) }));
            }
        }
        if hits.is_empty() {
            continue;
        }
        let best_score = hits.iter().map(|h| h.1).fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * best_score.abs().max(1.0);
        let tied: Vec<u32> = hits
            .iter()
            .filter(|h| h.1 <= best_score + tol)
            .map(|h| h.0)
            .collect();
        let centers = |mask: u32| -> Vec<f64> {
            let mut cs: Vec<f64> = (0..n)
                .filter(|j| mask & (1 << j) != 0)
                .map(|j| candidates[j].center[2])
                .collect();
            cs.sort_by(f64::total_cmp);
            cs
        };
        let winner = *tied
            .iter()
            .min_by(|&&a, &&b| {
                centers(a)
                    .iter()
                    .zip(centers(b))
                    .map(|(x, y)| x.total_cmp(&y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        let mut necks: Vec<NeckCertificate> = (0..n)
            .filter(|j| winner & (1 << j) != 0)
            .map(|j| candidates[j].clone())
            .collect();
        necks.sort_by(|a, b| a.center[2].total_cmp(&b.center[2]));

        let mut witness = format!(
            "trigger set: {} samples at H >= {high_floor:.3}; thick set: {thick_count} samples at H <= {:.3}; {mapped} of {n} candidates cut a component",
            high.len(),
            config.h_thick,
        );
        if size == 0 {
            witness.push_str("\nno cuts needed: no component run carries both sets");
        } else {
            let zs: Vec<String> = necks.iter().map(|c| format!("{:.4}", c.center[2])).collect();
            let rs: Vec<String> = necks.iter().map(|c| format!("{:.4}", c.r)).collect();
            witness.push_str(&format!(
                "\nsize {size} separates: cuts at z = [{}] with scales [{}]; every smaller subset fails",
                zs.join(", "),
                rs.join(", "),
            ));
        }
        if tied.len() > 1 {
            witness.push_str(&format!(
                "\nscore tie among {} subsets broken toward the leftmost centers",
                tied.len(),
            ));
        }
        return Ok(SeparatingCollection { necks, separation_witness: witness });
    }
    Err(Error::NoSeparatingCollection)
}
