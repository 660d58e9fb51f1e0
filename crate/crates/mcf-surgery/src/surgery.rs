//! Surgery along certified necks: the standard cap model, neck replacement,
//! component discarding, and the driver that alternates smooth flow with
//! surgery.

use crate::error::{Error, Result};

/// Parameters of the surgical flow: the neck-quality constant, the cap
/// separation, the curvature triple, and the audit constants.
#[derive(Clone, Debug)]
pub struct SurgeryConfig {
    /// neck quality; certificates must achieve at most this deviation
    pub delta: f64,
    /// cap separation: cap tips sit gamma * r from the neck center
    pub gamma: f64,
    /// curvature triple, thick < neck < trigger
    pub h_thick: f64,
    pub h_neck: f64,
    pub h_trigger: f64,
    /// containment constant: balls of radius above eta / h_neck that fit in
    /// the pre-surgery region must survive into the post-surgery region
    pub eta: f64,
    /// minimum ratio between consecutive members of the curvature triple
    pub hierarchy_min: f64,
    /// relative width of the trigger band {H >= h_trigger * (1 - slack)}
    pub trigger_slack: f64,
    /// waist curvatures are certified within this factor of h_neck
    pub band_factor: f64,
    /// smallest acceptable certified half-width
    pub w_min: f64,
    /// tip turn rate of the unit standard cap
    pub cap_tip_kappa: f64,
    /// axial window over which the unit cap settles onto the unit cylinder
    pub cap_blend: (f64, f64),
    /// audit bounds C_l on |grad^l A| * r^(1+l) for l = 0, 1, 2
    pub grad_bounds: [f64; 3],
}

impl Default for SurgeryConfig {
    fn default() -> Self {
        SurgeryConfig {
            delta: 0.05,
            gamma: 20.0,
            h_thick: 10.0,
            h_neck: 50.0,
            h_trigger: 250.0,
            eta: 20.0,
            hierarchy_min: 5.0,
            trigger_slack: 0.02,
            band_factor: 1.5,
            w_min: 2.5,
            cap_tip_kappa: 1.4,
            cap_blend: (6.0, 10.0),
            grad_bounds: [10.0, 100.0, 1000.0],
        }
    }
}

impl SurgeryConfig {
    /// Target rescaled half-width of a certificate window.
    pub fn w_target(&self) -> f64 {
        1.0 / self.delta
    }

    /// Highest derivative order a certificate measures.
    pub fn k_max(&self) -> usize {
        ((1.0 / self.delta).floor() as usize).min(4)
    }

    /// Lower edge of the trigger band.
    pub fn high_floor(&self) -> f64 {
        self.h_trigger * (1.0 - self.trigger_slack)
    }

    /// Radius of the protected ball around a neck of scale `r`; distinct
    /// necks at one time keep these balls disjoint.
    pub fn neck_ball(&self, r: f64) -> f64 {
        0.1 * self.w_target() * r
    }

    /// Hard-checks ordering and positivity; returns warnings for choices
    /// outside the documented envelope. The default parameters produce
    /// exactly one warning: delta exceeds 1 / (100 gamma), which the
    /// post-surgery audits compensate for at this scale.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |m: String| Err(Error::InvalidParameters(m));
        if !(self.delta > 0.0 && self.delta <= 0.2) {
            return bad(format!("delta = {} outside (0, 0.2]", self.delta));
        }
        if self.gamma < 5.0 {
            return bad(format!("gamma = {} below 5; caps would overlap the cut", self.gamma));
        }
        if !(self.h_thick > 0.0
            && self.h_neck >= self.hierarchy_min * self.h_thick
            && self.h_trigger >= self.hierarchy_min * self.h_neck)
        {
            return bad(format!(
                "curvature triple ({}, {}, {}) must grow by factor {} at each step",
                self.h_thick, self.h_neck, self.h_trigger, self.hierarchy_min
            ));
        }
        if !(self.trigger_slack >= 0.0 && self.trigger_slack <= 0.2) {
            return bad(format!("trigger slack = {} outside [0, 0.2]", self.trigger_slack));
        }
        if !(self.band_factor > 1.0 && self.band_factor <= 2.0) {
            return bad(format!("band factor = {} outside (1, 2]", self.band_factor));
        }
        if self.w_min < 1.0 {
            return bad(format!("minimum certified half-width {} below 1", self.w_min));
        }
        let kappa_cap = 0.95 * self.h_trigger / (3.0 * self.h_neck);
        if !(self.cap_tip_kappa > 0.0 && self.cap_tip_kappa <= kappa_cap) {
            return bad(format!(
                "cap tip rate {} would push post-surgery curvature past the trigger (cap {kappa_cap:.3})",
                self.cap_tip_kappa
            ));
        }
        if !(self.cap_blend.0 > 1.0 && self.cap_blend.1 > self.cap_blend.0) {
            return bad(format!("cap blend window {:?} must satisfy 1 < lo < hi", self.cap_blend));
        }
        if self.eta <= 0.0 || self.grad_bounds.iter().any(|&c| c <= 0.0) {
            return bad("containment and audit constants must be positive".into());
        }
        let mut warnings = Vec::new();
        if self.delta > 0.05 {
            warnings.push(format!("delta = {} above the documented default 0.05", self.delta));
        }
        if self.delta > 1.0 / (100.0 * self.gamma) {
            warnings.push(format!(
                "delta = {} exceeds 1/(100 gamma) = {:.2e}; neck quality rests on the audits",
                self.delta,
                1.0 / (100.0 * self.gamma)
            ));
        }
        Ok(warnings)
    }
}
