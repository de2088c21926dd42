//! Small synthetic scenes with analytically known outcomes.
//!
//! All rooms are 4 x 4 m floor quads at `y = 0` centered on the origin with
//! no wall meshes; the floor edge acts as the boundary.

use std::sync::Arc;

use crate::checks::{AnnotationResolver, FixtureProvider};
use crate::geometry::{OrientedBox, TriangleMesh, Vec3};
use crate::navmap::AgentPose;
use crate::scene::{AtomicAction, Plan, PlanStep, Posture, Scene, SceneObject};

pub const ROOM_HALF: f64 = 2.0;

/// Axis-aligned floor rectangle at height `y`, facing up.
pub fn floor_rect(x0: f64, z0: f64, x1: f64, z1: f64, y: f64) -> TriangleMesh {
    TriangleMesh::new(
        vec![
            Vec3::new(x0, y, z0),
            Vec3::new(x1, y, z0),
            Vec3::new(x1, y, z1),
            Vec3::new(x0, y, z1),
        ],
        vec![[0, 2, 1], [0, 3, 2]],
    )
    .expect("valid floor rectangle")
}

pub fn room_floor() -> TriangleMesh {
    floor_rect(-ROOM_HALF, -ROOM_HALF, ROOM_HALF, ROOM_HALF, 0.0)
}

/// A box object whose bottom face sits at height `base`.
pub fn box_object(
    id: &str,
    category: &str,
    x: f64,
    z: f64,
    size: [f64; 3],
    base: f64,
    yaw: f64,
) -> SceneObject {
    let center = Vec3::new(x, base + size[1] / 2.0, z);
    let half = Vec3::new(size[0], size[1], size[2]) / 2.0;
    SceneObject::new(
        id,
        category,
        OrientedBox::new(center, half, yaw).expect("valid box"),
        None,
    )
    .expect("valid fixture object")
}

pub fn open_room(id: &str, objects: Vec<SceneObject>) -> Scene {
    Scene::new(id, room_floor(), vec![], objects).expect("valid fixture scene")
}

pub fn plan(agent: &str, task: &str, steps: &[(AtomicAction, &str)]) -> Plan {
    Plan {
        agent: agent.into(),
        task: task.into(),
        steps: steps
            .iter()
            .map(|&(action, id)| PlanStep {
                action,
                object_id: id.into(),
            })
            .collect(),
    }
}

/// A partition at `x in [0.8, 1.0]` runs from the `z = -2` edge to
/// `z = 2 - gap`, leaving a `gap`-wide opening. The target `cabinet`
/// (0.4 x 0.8 x 0.4, front facing +z) stands behind it at `(1.7, -1.0)`, far enough
/// from the partition that its side zone stays on the target side.
pub fn gap_room(gap: f64) -> Scene {
    let len = 2.0 * ROOM_HALF - gap;
    let divider = box_object(
        "divider",
        "partition",
        0.9,
        -ROOM_HALF + len / 2.0,
        [0.2, 1.0, len],
        0.0,
        0.0,
    );
    let cabinet = box_object("cabinet", "cabinet", 1.7, -1.0, [0.4, 0.8, 0.4], 0.0, 0.0);
    open_room(
        &format!("gap_room_{:.0}cm", gap * 100.0),
        vec![divider, cabinet],
    )
}

/// A 0.1 m thick board (0.6 x 0.4 footprint) whose underside is at `base`,
/// centered in an open room.
pub fn shelf_room(base: f64) -> Scene {
    let shelf = box_object("shelf", "shelf", 0.0, 0.0, [0.6, 0.1, 0.4], base, 0.0);
    open_room(&format!("shelf_room_{:.0}cm", base * 100.0), vec![shelf])
}

pub const WARDROBE_FRONT_Z: f64 = 0.25;
pub const WARDROBE_HEIGHT: f64 = 2.4;

/// A 0.8 x 2.4 x 0.5 wardrobe at the origin facing +z, with a handle of three
/// points 2 cm in front of its door at `handle_y`. When `tv_gap` is set, a
/// 0.8 x 0.4 x 0.1 wall-mounted TV hangs at 1.8-2.2 m, `tv_gap` in front of
/// the door.
pub fn wardrobe_room(
    handle_y: f64,
    tv_gap: Option<f64>,
) -> (Scene, FixtureProvider, AnnotationResolver) {
    let mut objects = vec![box_object(
        "wardrobe",
        "wardrobe",
        0.0,
        0.0,
        [0.8, WARDROBE_HEIGHT, 0.5],
        0.0,
        0.0,
    )];
    if let Some(d) = tv_gap {
        objects.push(box_object(
            "tv",
            "tv",
            0.0,
            WARDROBE_FRONT_Z + d + 0.05,
            [0.8, 0.4, 0.1],
            1.8,
            0.0,
        ));
    }
    let id = match tv_gap {
        Some(d) => format!("wardrobe_{:.0}cm_tv_{:.0}cm", handle_y * 100.0, d * 100.0),
        None => format!("wardrobe_{:.0}cm", handle_y * 100.0),
    };
    let mut parts = FixtureProvider::default();
    let handle = [-0.05, 0.0, 0.05]
        .map(|x| Vec3::new(x, handle_y, WARDROBE_FRONT_Z + 0.02))
        .to_vec();
    parts.insert("wardrobe", AtomicAction::Open, handle);
    let mut annotations = AnnotationResolver::default();
    annotations.insert(
        "wardrobe",
        AtomicAction::Open,
        vec![crate::geometry::Face::Front],
    );
    (open_room(&id, objects), parts, annotations)
}

/// A 0.6 x 0.4 x 0.1 painting hung at 1.0-1.4 m. When `enclosed`, a closed
/// display case 5-10 cm larger on every side surrounds it.
pub fn display_room(enclosed: bool, yaw: f64) -> Scene {
    let mut objects = vec![box_object(
        "painting",
        "painting",
        0.0,
        0.0,
        [0.6, 0.4, 0.1],
        1.0,
        yaw,
    )];
    if enclosed {
        objects.push(box_object(
            "case",
            "display_case",
            0.0,
            0.0,
            [0.8, 0.6, 0.3],
            0.9,
            yaw,
        ));
    }
    let id = format!(
        "display_{}_{:.0}",
        if enclosed { "enclosed" } else { "open" },
        yaw * 100.0
    );
    open_room(&id, objects)
}

/// A 0.8 x 1.0 x 0.5 crate at the origin with 0.1 m cubes around its two
/// bottom corners nearest the viewer, seen by an adult standing at
/// `(0, -1.5)`. Of the 9 targets times 5 eyes, exactly the 10 rays to those
/// two corners are blocked.
pub fn partial_view_room() -> (Scene, AgentPose) {
    let target = box_object("crate", "crate", 0.0, 0.0, [0.8, 1.0, 0.5], 0.0, 0.0);
    let left = box_object("block_l", "block", -0.4, -0.25, [0.1, 0.1, 0.1], -0.05, 0.0);
    let right = box_object("block_r", "block", 0.4, -0.25, [0.1, 0.1, 0.1], -0.05, 0.0);
    let pose = AgentPose {
        position: crate::geometry::Vec2::new(0.0, -1.5),
        posture: Posture::Standing,
    };
    (open_room("partial_view", vec![target, left, right]), pose)
}

/// One scene and plan of the audit suite, with optional backends.
#[derive(Clone, Debug)]
pub struct AuditCase {
    pub template: &'static str,
    pub scene: Arc<Scene>,
    pub plan: Plan,
    pub parts: Option<Arc<FixtureProvider>>,
    pub annotations: Option<Arc<AnnotationResolver>>,
}

pub const GAP_WIDTHS: [f64; 5] = [0.35, 0.50, 0.60, 0.75, 1.00];
pub const SHELF_BASES: [f64; 5] = [1.2, 1.9, 2.0, 2.1, 2.3];
pub const HANDLE_HEIGHTS: [f64; 5] = [1.0, 1.4, 1.9, 2.3, 0.3];
pub const TV_GAPS: [Option<f64>; 5] = [None, Some(0.2), None, Some(0.3), None];
pub const DISPLAY_ENCLOSED: [bool; 5] = [true, false, false, true, false];

/// The 20-scene audit suite: gap rooms, shelves, wardrobes and displays, five
/// variants each. Plans name the adult; the audit substitutes each profile.
pub fn audit_suite() -> Vec<AuditCase> {
    let mut cases = Vec::with_capacity(20);
    for g in GAP_WIDTHS {
        cases.push(AuditCase {
            template: "gap",
            scene: Arc::new(gap_room(g)),
            plan: plan(
                "adult",
                "reach the cabinet",
                &[(AtomicAction::NavigateTo, "cabinet")],
            ),
            parts: None,
            annotations: None,
        });
    }
    for b in SHELF_BASES {
        cases.push(AuditCase {
            template: "shelf",
            scene: Arc::new(shelf_room(b)),
            plan: plan(
                "adult",
                "take something from the shelf",
                &[
                    (AtomicAction::NavigateTo, "shelf"),
                    (AtomicAction::PickupFrom, "shelf"),
                ],
            ),
            parts: None,
            annotations: None,
        });
    }
    for (h, tv) in HANDLE_HEIGHTS.into_iter().zip(TV_GAPS) {
        let (scene, parts, annotations) = wardrobe_room(h, tv);
        cases.push(AuditCase {
            template: "wardrobe",
            scene: Arc::new(scene),
            plan: plan(
                "adult",
                "open the wardrobe",
                &[(AtomicAction::Open, "wardrobe")],
            ),
            parts: Some(Arc::new(parts)),
            annotations: Some(Arc::new(annotations)),
        });
    }
    for (k, enclosed) in DISPLAY_ENCLOSED.into_iter().enumerate() {
        cases.push(AuditCase {
            template: "display",
            scene: Arc::new(display_room(enclosed, 0.3 * k as f64)),
            plan: plan(
                "adult",
                "look at the painting",
                &[(AtomicAction::LookAt, "painting")],
            ),
            parts: None,
            annotations: None,
        });
    }
    cases
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_twenty_valid_scenes() {
        let suite = audit_suite();
        assert_eq!(suite.len(), 20);
        for c in &suite {
            c.plan.check_against(&c.scene).unwrap();
            for o in &c.scene.objects {
                assert!(o.mesh_within_box(1e-9), "{}", o.id);
            }
        }
        let mut ids: Vec<_> = suite.iter().map(|c| c.scene.id.clone()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 20);
    }

    #[test]
    fn gap_room_leaves_the_opening() {
        let s = gap_room(0.55);
        let d = &s.object("divider").unwrap().obb;
        assert!((d.center.z + d.half_extents.z - (ROOM_HALF - 0.55)).abs() < 1e-12);
        assert!((d.center.z - d.half_extents.z + ROOM_HALF).abs() < 1e-12);
    }

    #[test]
    fn handle_lies_within_part_tolerance() {
        let (scene, parts, _) = wardrobe_room(2.3, Some(0.2));
        let obb = scene
            .object("wardrobe")
            .unwrap()
            .obb
            .inflated(crate::checks::providers::PART_TOLERANCE);
        for (_, _, pts) in parts.entries() {
            assert!(pts.iter().all(|p| obb.contains_point(p, 0.0)));
        }
    }
}
