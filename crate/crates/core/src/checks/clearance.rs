use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{metrics, CheckOutcome};
use crate::geometry::{box_intersects, ground, Face, InteractionZone, OrientedBox};
use crate::scene::{PropertyKind, Scene, SceneObject};

/// Free volume in front of one face of an object.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClearanceBox {
    #[serde(rename = "box")]
    pub obb: OrientedBox,
    pub zone_face: Face,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClearanceOptions {
    /// Require all four bottom corners, not only the center, on the floor.
    pub strict_floor: bool,
}

/// Box matching the face's width and the object's height, extending outward
/// by the smaller horizontal extent of the object.
pub fn clearance_box(obb: &OrientedBox, face: Face) -> ClearanceBox {
    let (half_w, offset) = face.half_dims(obb);
    let half_d = obb.half_extents.x.min(obb.half_extents.z);
    let (normal, _) = face.local_frame();
    let center = obb.to_world(&(normal * (offset + half_d)));
    let half_extents = match face {
        Face::Front | Face::Back => crate::geometry::Vec3::new(half_w, obb.half_extents.y, half_d),
        Face::Left | Face::Right => crate::geometry::Vec3::new(half_d, obb.half_extents.y, half_w),
    };
    ClearanceBox {
        obb: OrientedBox {
            center,
            half_extents,
            yaw: obb.yaw,
        },
        zone_face: face,
    }
}

fn on_floor(scene: &Scene, b: &OrientedBox, strict: bool) -> bool {
    if strict {
        b.ground_corners().iter().all(|c| scene.floor_contains(c))
    } else {
        scene.floor_contains(&ground(&b.center))
    }
}

/// Whether a clearance box is free of obstacles and over the floor.
pub fn clearance_free(
    scene: &Scene,
    object: &SceneObject,
    cb: &ClearanceBox,
    options: ClearanceOptions,
) -> bool {
    let others: Vec<OrientedBox> = scene
        .objects
        .iter()
        .filter(|o| o.id != object.id)
        .map(|o| o.obb)
        .collect();
    !box_intersects(&cb.obb, &others, &scene.walls)
        && on_floor(scene, &cb.obb, options.strict_floor)
}

pub fn check_clearance(
    object: &SceneObject,
    zones: &[InteractionZone],
    scene: &Scene,
    options: ClearanceOptions,
) -> CheckOutcome {
    let free: Vec<Face> = zones
        .iter()
        .map(|z| clearance_box(&object.obb, z.face))
        .filter(|cb| clearance_free(scene, object, cb, options))
        .map(|cb| cb.zone_face)
        .collect();
    let k = free.len();
    let message = if k > 0 {
        format!("Found {k} collision-free interaction zones.")
    } else {
        format!(
            "No collision-free interaction zone: all {} clearance boxes are obstructed or off the floor.",
            zones.len()
        )
    };
    let m = metrics([
        ("zone_count", json!(k)),
        ("zones_tested", json!(zones.len())),
        (
            "free_faces",
            json!(free.iter().map(|f| f.as_str()).collect::<Vec<_>>()),
        ),
    ]);
    CheckOutcome::new(PropertyKind::Clearance, k > 0, message, m)
}
