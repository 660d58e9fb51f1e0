//! Mean curvature flow with surgery for rotationally symmetric closed
//! surfaces in R^3.
//!
//! A surface of revolution is tracked by its generating curve in the (z, r)
//! half-plane. Smooth mean curvature flow runs until the maximum mean
//! curvature reaches a trigger threshold; the flow then cuts certified
//! cylindrical necks, glues in standard caps, discards the high-curvature
//! components, and continues. A separate level-set solver evolves the same
//! initial data without surgery for comparison, and the analysis layer
//! measures Gaussian densities, curvature ratios, and model fits against the
//! canonical high-curvature geometries.

pub mod error;
pub mod neck;
pub mod numerics;
pub mod shapes;
pub mod smoothflow;
pub mod surface;
pub mod surgery;
pub mod track;

#[cfg(test)]
pub(crate) mod fixtures;

pub use error::{Error, Result};
