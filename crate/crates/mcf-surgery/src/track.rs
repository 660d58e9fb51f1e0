//! The space-time track of a surgical flow: smooth segments interleaved with
//! surgery events. The surface recorded at an event time is the pre-surgery
//! state; the following segment starts from the post-surgery state at the
//! same time.

use crate::neck::SeparatingCollection;
use crate::smoothflow::FlowOutcome;
use crate::surface::ProfileSurface;

/// One post-surgery audit with its measured value against its bound.
#[derive(Clone, Debug)]
pub struct AuditItem {
    pub item: char,
    pub description: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

/// A component removed at an event, with its curvature range and area.
#[derive(Clone, Debug)]
pub struct DiscardedComponent {
    pub min_h: f64,
    pub max_h: f64,
    pub area: f64,
}

/// One surgery: the necks cut at `time`, the surfaces before and after, what
/// was discarded, and the audit outcomes.
#[derive(Clone, Debug)]
pub struct SurgeryEvent {
    /// surgery time; the flow restarts from `post` here
    pub time: f64,
    /// when the curvature trigger fired; at or after `time`, because the
    /// segment is rolled back to the certified neck scale before cutting
    pub trigger_time: f64,
    pub necks: SeparatingCollection,
    /// pre-surgery surface at `time`
    pub pre: ProfileSurface,
    /// after cap gluing, before discarding
    pub post_caps: ProfileSurface,
    /// what the next segment starts from
    pub post: ProfileSurface,
    pub discarded: Vec<DiscardedComponent>,
    pub checks: Vec<AuditItem>,
}

/// Timed snapshots plus surgery events, in time order.
#[derive(Clone, Debug, Default)]
pub struct FlowTrack {
    pub segments: Vec<FlowOutcome>,
    pub events: Vec<SurgeryEvent>,
}

impl FlowTrack {
    pub fn from_segment(segment: FlowOutcome) -> Self {
        FlowTrack { segments: vec![segment], events: Vec::new() }
    }

    /// All stored snapshots in time order.
    pub fn snapshots(&self) -> impl Iterator<Item = &ProfileSurface> {
        self.segments.iter().flat_map(|s| s.snapshots.iter())
    }

    /// Snapshot whose time matches `t` to a relative 1e-9. When a segment
    /// boundary puts two surfaces at the same time, the later (post-surgery)
    /// one wins.
    pub fn snapshot_at(&self, t: f64) -> Option<&ProfileSurface> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.snapshots().filter(|s| (s.time - t).abs() <= tol).last()
    }

    /// Final recorded surface.
    pub fn end_state(&self) -> Option<&ProfileSurface> {
        self.segments.last().map(|s| &s.surface)
    }
}
