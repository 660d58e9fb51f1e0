//! Expensive shared test inputs, built once per test binary.

use once_cell::sync::Lazy;

use crate::shapes::{build_profile, DumbbellShape, InitialData};
use crate::smoothflow::{run_flow, FlowParams};
use crate::surface::ResolutionParams;
use crate::track::FlowTrack;

/// The default dumbbell run to its curvature trigger, with snapshot history
/// deep enough to certify backdated necks.
pub static DUMBBELL_TRIGGER: Lazy<FlowTrack> = Lazy::new(|| {
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
    .expect("dumbbell profile");
    let params = FlowParams {
        h_trigger: Some(250.0),
        snapshot_depth: 1.5e-3,
        ..Default::default()
    };
    FlowTrack::from_segment(run_flow(surface, &params).expect("dumbbell run to trigger"))
});
