use std::collections::BTreeSet;

use rand::Rng;
use serde_json::json;

use super::{metrics, CheckError, CheckOutcome};
use crate::geometry::InteractionZone;
use crate::navmap::{AgentPose, NavMap};
use crate::scene::PropertyKind;

pub const MSG_REACHED: &str = "A collision-free path was found to an interaction zone.";
pub const MSG_NON_WALKABLE: &str = "Target zones are entirely in non-walkable areas.";
pub const MSG_NO_ZONES: &str = "No interaction zones were resolved for the target object.";

/// Formats labels the way numpy prints an integer array: `[0 2]`.
fn label_list(labels: &BTreeSet<u32>) -> String {
    let parts: Vec<String> = labels.iter().map(u32::to_string).collect();
    format!("[{}]", parts.join(" "))
}

/// Checks that some zone shares walkable pixels with the agent's region.
///
/// On success the returned pose is a random pixel of the first zone whose
/// mask meets the region; on failure the input pose is returned unchanged.
pub fn check_navigable<R: Rng + ?Sized>(
    map: &NavMap,
    pose: &AgentPose,
    zones: &[InteractionZone],
    rng: &mut R,
) -> Result<(CheckOutcome, AgentPose), CheckError> {
    let labels = &map.labels().labels;
    let agent_region = match map.region_at(&pose.position) {
        Some(r) if r > 0 => r,
        _ => {
            return Err(CheckError::PoseNotWalkable {
                x: pose.position.x,
                z: pose.position.y,
            })
        }
    };
    let build = |status: bool, msg: String, targets: &BTreeSet<u32>, hits: usize| {
        let m = metrics([
            ("agent_region", json!(agent_region)),
            ("target_regions", json!(targets.iter().collect::<Vec<_>>())),
            ("zone_count", json!(zones.len())),
            ("intersection_pixels", json!(hits)),
        ]);
        CheckOutcome::new(PropertyKind::Navigable, status, msg, m)
    };
    if zones.is_empty() {
        return Ok((
            build(false, MSG_NO_ZONES.into(), &BTreeSet::new(), 0),
            *pose,
        ));
    }

    let mut targets = BTreeSet::new();
    let mut chosen: Option<Vec<usize>> = None;
    for zone in zones {
        let mask = map.rasterize_polygon(&zone.polygon);
        targets.extend(mask.iter().map(|&i| labels[i]));
        if chosen.is_none() {
            let hits: Vec<usize> = mask
                .into_iter()
                .filter(|&i| labels[i] == agent_region)
                .collect();
            if !hits.is_empty() {
                chosen = Some(hits);
            }
        }
    }

    if let Some(hits) = chosen {
        let pick = hits[rng.random_range(0..hits.len())];
        let new_pose = AgentPose {
            position: map.index_center(pick),
            posture: pose.posture,
        };
        return Ok((
            build(true, MSG_REACHED.into(), &targets, hits.len()),
            new_pose,
        ));
    }
    let msg = if targets.iter().all(|&l| l == 0) {
        MSG_NON_WALKABLE.to_string()
    } else {
        format!(
            "Agent and target zones are in different, disconnected walkable areas (Agent area: {agent_region}, Target areas: {}).",
            label_list(&targets)
        )
    };
    Ok((build(false, msg, &targets, 0), *pose))
}
