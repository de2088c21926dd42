use serde_json::json;

use super::providers::FunctionalPartProvider;
use super::{metrics, CheckError, CheckOutcome};
use crate::geometry::{
    min_distance_points_to_mesh, min_distance_points_to_points, PointCloud3, TriangleMesh, Vec3,
};
use crate::scene::{AgentProfile, AtomicAction, Posture, PropertyKind, SceneObject};

pub const MSG_NO_PART: &str = "No functional part identified for this interaction.";

/// Geometry whose distance to the agent's floor area is measured.
#[derive(Clone, Copy, Debug)]
pub enum ReachTarget<'a> {
    Mesh(&'a TriangleMesh),
    Points(&'a PointCloud3),
}

impl ReachTarget<'_> {
    fn is_empty(&self) -> bool {
        match self {
            ReachTarget::Mesh(m) => m.is_empty(),
            ReachTarget::Points(p) => p.is_empty(),
        }
    }

    /// Minimum distance from `floor` to the target lowered by `h`.
    fn lowered_distance(&self, floor: &PointCloud3, h: f64) -> Result<f64, CheckError> {
        let offset = Vec3::new(0.0, -h, 0.0);
        let d = match self {
            ReachTarget::Mesh(m) => min_distance_points_to_mesh(floor, &m.translated(offset))?,
            ReachTarget::Points(p) => min_distance_points_to_points(floor, &p.translated(offset))?,
        };
        Ok(d.distance)
    }
}

struct ReachResult {
    status: bool,
    via_crouch: bool,
    distance: f64,
}

fn evaluate(
    floor_points: &PointCloud3,
    target: ReachTarget<'_>,
    profile: &AgentProfile,
    posture: Posture,
) -> Result<(ReachResult, f64, f64), CheckError> {
    if floor_points.is_empty() {
        return Err(CheckError::EmptyFloorPoints);
    }
    if target.is_empty() {
        return Err(CheckError::EmptyTarget);
    }
    let heights = profile.effective_heights(posture);
    let standing = target.lowered_distance(floor_points, heights.shoulder)?;
    let crouched = target.lowered_distance(floor_points, heights.crouch)?;
    let r = profile.reach_radius;
    let result = if standing <= r {
        ReachResult {
            status: true,
            via_crouch: false,
            distance: standing,
        }
    } else if crouched <= r {
        ReachResult {
            status: true,
            via_crouch: true,
            distance: crouched,
        }
    } else {
        ReachResult {
            status: false,
            via_crouch: false,
            distance: standing.min(crouched),
        }
    };
    Ok((result, heights.shoulder, heights.crouch))
}

fn outcome(
    property: PropertyKind,
    pass_subject: &str,
    fail_subject: &str,
    res: ReachResult,
    shoulder: f64,
    crouch: f64,
    reach: f64,
) -> CheckOutcome {
    let message = match (res.status, res.via_crouch) {
        (true, false) => format!(
            "{pass_subject} reachable. Required distance: {:.2}m, Agent's reach: {reach:.2}m.",
            res.distance
        ),
        (true, true) => format!(
            "{pass_subject} reachable (via crouching). Required distance: {:.2}m, Agent's reach: {reach:.2}m.",
            res.distance
        ),
        (false, _) => format!(
            "{fail_subject} not reachable. Required distance: {:.2}m, exceeds Agent's reach: {reach:.2}m.",
            res.distance
        ),
    };
    let m = metrics([
        ("required_distance_m", json!(res.distance)),
        ("reach_m", json!(reach)),
        ("shoulder_height_m", json!(shoulder)),
        ("crouch_height_m", json!(crouch)),
        ("via_crouch", json!(res.via_crouch)),
    ]);
    CheckOutcome::new(property, res.status, message, m)
}

/// Tries the shoulder height first, then the crouch height; passes when the
/// lowered target comes within arm's reach of any floor point.
pub fn check_reachable(
    floor_points: &PointCloud3,
    target: ReachTarget<'_>,
    profile: &AgentProfile,
    posture: Posture,
) -> Result<CheckOutcome, CheckError> {
    let (res, shoulder, crouch) = evaluate(floor_points, target, profile, posture)?;
    Ok(outcome(
        PropertyKind::Reachable,
        "Object is",
        "Object",
        res,
        shoulder,
        crouch,
        profile.reach_radius,
    ))
}

/// Reach test against the functional part supplied by `provider`.
pub fn check_interactable(
    object: &SceneObject,
    action: AtomicAction,
    provider: &dyn FunctionalPartProvider,
    floor_points: &PointCloud3,
    profile: &AgentProfile,
    posture: Posture,
) -> Result<CheckOutcome, CheckError> {
    let empty = |msg: String| {
        let m = metrics([
            ("required_distance_m", serde_json::Value::Null),
            ("reach_m", json!(profile.reach_radius)),
            (
                "shoulder_height_m",
                json!(profile.effective_heights(posture).shoulder),
            ),
            (
                "crouch_height_m",
                json!(profile.effective_heights(posture).crouch),
            ),
            ("via_crouch", json!(false)),
        ]);
        CheckOutcome::new(PropertyKind::Interactable, false, msg, m)
    };
    let part = match provider.functional_part(object, action) {
        Ok(p) => p,
        Err(e) => return Ok(empty(format!("Functional part provider failed: {e}"))),
    };
    if part.is_empty() {
        return Ok(empty(MSG_NO_PART.to_string()));
    }
    let (res, shoulder, crouch) =
        evaluate(floor_points, ReachTarget::Points(&part), profile, posture)?;
    Ok(outcome(
        PropertyKind::Interactable,
        "Interactable volume is",
        "Interactable volume",
        res,
        shoulder,
        crouch,
        profile.reach_radius,
    ))
}
