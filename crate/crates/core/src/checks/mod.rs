//! The five property verifiers.
//!
//! Each check returns a [`CheckOutcome`] whose message follows a fixed
//! template and whose metrics use a fixed key set per property.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::navmap::NavMapError;
use crate::scene::PropertyKind;

pub mod clearance;
pub mod navigable;
pub mod providers;
pub mod reach;
pub mod resolvers;
pub mod visible;

pub use clearance::{check_clearance, clearance_box, ClearanceBox, ClearanceOptions};
pub use navigable::check_navigable;
pub use providers::{FixtureProvider, FullSurfaceProvider, FunctionalPartProvider, PART_TOLERANCE};
pub use reach::{check_interactable, check_reachable, ReachTarget};
pub use resolvers::{resolve_zones, AnnotationResolver, DefaultResolver, ZoneResolver};
pub use visible::{check_visible, eye_positions, VisibilityConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error("agent pose {x:.3}, {z:.3} is not on a walkable pixel")]
    PoseNotWalkable { x: f64, z: f64 },
    #[error("reach source points are empty")]
    EmptyFloorPoints,
    #[error("reach target geometry is empty")]
    EmptyTarget,
    #[error("invalid visibility config: {0}")]
    InvalidVisibility(String),
    #[error(transparent)]
    NavMap(#[from] NavMapError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Metrics = BTreeMap<String, Value>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub property: PropertyKind,
    pub status: bool,
    pub message: String,
    pub metrics: Metrics,
}

impl CheckOutcome {
    pub fn new(
        property: PropertyKind,
        status: bool,
        message: impl Into<String>,
        metrics: Metrics,
    ) -> Self {
        Self {
            property,
            status,
            message: message.into(),
            metrics,
        }
    }

    pub fn metric_f64(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).and_then(Value::as_f64)
    }
}

/// Builds a metrics map from `(key, value)` pairs.
pub(crate) fn metrics<const N: usize>(pairs: [(&str, Value); N]) -> Metrics {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
