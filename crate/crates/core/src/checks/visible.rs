use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{metrics, CheckError, CheckOutcome};
use crate::geometry::{OcclusionSet, Vec3};
use crate::navmap::AgentPose;
use crate::scene::{AgentProfile, PropertyKind, Scene, SceneObject};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityConfig {
    pub threshold: f64,
    pub eye_samples: usize,
    pub eye_jitter_radius: f64,
}

impl Default for VisibilityConfig {
    fn default() -> Self {
        Self {
            threshold: 0.15,
            eye_samples: 5,
            eye_jitter_radius: 0.05,
        }
    }
}

impl VisibilityConfig {
    pub fn validate(&self) -> Result<(), CheckError> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(CheckError::InvalidVisibility(format!(
                "threshold must be in (0, 1), got {}",
                self.threshold
            )));
        }
        if self.eye_samples == 0 {
            return Err(CheckError::InvalidVisibility(
                "eye_samples must be at least 1".into(),
            ));
        }
        if !(self.eye_jitter_radius >= 0.0 && self.eye_jitter_radius.is_finite()) {
            return Err(CheckError::InvalidVisibility(format!(
                "eye_jitter_radius must be >= 0, got {}",
                self.eye_jitter_radius
            )));
        }
        Ok(())
    }

    /// The pass rule: strictly above the threshold.
    pub fn passes(&self, ratio: f64) -> bool {
        ratio > self.threshold
    }
}

/// Eye positions: the nominal eye first, then `n - 1` points evenly spaced
/// on a horizontal circle of radius `jitter` around it.
pub fn eye_positions(center: Vec3, n: usize, jitter: f64) -> Vec<Vec3> {
    let mut eyes = vec![center];
    let ring = n.saturating_sub(1);
    for k in 0..ring {
        let a = TAU * k as f64 / ring as f64;
        eyes.push(center + Vec3::new(jitter * a.cos(), 0.0, jitter * a.sin()));
    }
    eyes
}

/// Centroid plus the eight box corners.
pub fn visibility_targets(object: &SceneObject) -> [Vec3; 9] {
    let corners = object.obb.corners();
    std::array::from_fn(|i| {
        if i == 0 {
            object.obb.center
        } else {
            corners[i - 1]
        }
    })
}

/// Occluders for `target`: every other object, the walls and the floor.
pub fn occluders_for(scene: &Scene, target: &SceneObject) -> OcclusionSet {
    let meshes = scene
        .objects
        .iter()
        .filter(|o| o.id != target.id)
        .map(|o| o.mesh.clone())
        .chain(scene.walls.iter().cloned())
        .chain(std::iter::once(scene.floor.clone()));
    OcclusionSet::new(meshes)
}

pub fn check_visible(
    pose: &AgentPose,
    profile: &AgentProfile,
    target: &SceneObject,
    scene: &Scene,
    cfg: &VisibilityConfig,
) -> Result<CheckOutcome, CheckError> {
    cfg.validate()?;
    let eye_y = scene.floor_height() + profile.effective_heights(pose.posture).eye;
    let eye = Vec3::new(pose.position.x, eye_y, pose.position.y);
    let eyes = eye_positions(eye, cfg.eye_samples, cfg.eye_jitter_radius);
    let targets = visibility_targets(target);
    let occ = occluders_for(scene, target);

    let total = eyes.len() * targets.len();
    let clear = eyes
        .iter()
        .flat_map(|e| targets.iter().map(move |t| (e, t)))
        .filter(|(e, t)| !occ.blocked(e, t))
        .count();
    let ratio = clear as f64 / total as f64;
    let centroid_visible = !occ.blocked(&eye, &targets[0]);
    let status = cfg.passes(ratio);
    let centroid = if centroid_visible {
        "Visible"
    } else {
        "Occluded"
    };
    let pct = ratio * 100.0;
    let message = if status {
        format!("Object is robustly visible ({pct:.1}% clear, Centroid: {centroid}).")
    } else {
        format!("Object is not sufficiently visible ({pct:.1}% clear, Centroid: {centroid}).")
    };
    let m = metrics([
        ("visibility_ratio", json!(ratio)),
        ("centroid_visible", json!(centroid_visible)),
        ("clear_rays", json!(clear)),
        ("total_rays", json!(total)),
        ("threshold", json!(cfg.threshold)),
    ]);
    Ok(CheckOutcome::new(PropertyKind::Visible, status, message, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{OrientedBox, TriangleMesh, Vec2};
    use crate::scene::{builtin_profile, Posture};

    fn floor() -> TriangleMesh {
        TriangleMesh::new(
            vec![
                Vec3::new(-3.0, 0.0, -3.0),
                Vec3::new(3.0, 0.0, -3.0),
                Vec3::new(3.0, 0.0, 3.0),
                Vec3::new(-3.0, 0.0, 3.0),
            ],
            vec![[0, 2, 1], [0, 3, 2]],
        )
        .unwrap()
    }

    fn tv() -> SceneObject {
        SceneObject::new(
            "tv",
            "tv",
            OrientedBox::new(Vec3::new(0.0, 1.0, 2.0), Vec3::new(0.5, 0.3, 0.1), 0.0).unwrap(),
            None,
        )
        .unwrap()
    }

    fn pose() -> AgentPose {
        AgentPose {
            position: Vec2::new(0.0, -1.0),
            posture: Posture::Standing,
        }
    }

    #[test]
    fn unobstructed_is_fully_visible() {
        let scene = Scene::new("s", floor(), vec![], vec![tv()]).unwrap();
        let out = check_visible(
            &pose(),
            &builtin_profile("adult").unwrap(),
            &tv(),
            &scene,
            &VisibilityConfig::default(),
        )
        .unwrap();
        assert!(out.status);
        assert_eq!(out.metric_f64("visibility_ratio"), Some(1.0));
        assert_eq!(
            out.message,
            "Object is robustly visible (100.0% clear, Centroid: Visible)."
        );
    }

    #[test]
    fn full_wall_hides_everything() {
        let wall = TriangleMesh::from_box(
            &OrientedBox::new(Vec3::new(0.0, 1.5, 0.5), Vec3::new(3.0, 1.5, 0.05), 0.0).unwrap(),
        );
        let scene = Scene::new("s", floor(), vec![wall], vec![tv()]).unwrap();
        let out = check_visible(
            &pose(),
            &builtin_profile("adult").unwrap(),
            &tv(),
            &scene,
            &VisibilityConfig::default(),
        )
        .unwrap();
        assert!(!out.status);
        assert_eq!(out.metric_f64("visibility_ratio"), Some(0.0));
        assert_eq!(
            out.message,
            "Object is not sufficiently visible (0.0% clear, Centroid: Occluded)."
        );
    }

    #[test]
    fn threshold_is_strict() {
        let cfg = VisibilityConfig::default();
        assert!(!cfg.passes(0.15));
        assert!(cfg.passes(0.16));
        assert!(VisibilityConfig {
            eye_samples: 0,
            ..cfg
        }
        .validate()
        .is_err());
        assert!(VisibilityConfig {
            threshold: 1.0,
            ..cfg
        }
        .validate()
        .is_err());
    }

    #[test]
    fn eye_ring_layout() {
        let eyes = eye_positions(Vec3::new(1.0, 1.65, 2.0), 5, 0.05);
        assert_eq!(eyes.len(), 5);
        assert_eq!(eyes[0], Vec3::new(1.0, 1.65, 2.0));
        for e in &eyes[1..] {
            assert!(((e - eyes[0]).norm() - 0.05).abs() < 1e-12);
            assert_eq!(e.y, 1.65);
        }
        assert_eq!(eye_positions(Vec3::zeros(), 1, 0.05).len(), 1);
    }
}
