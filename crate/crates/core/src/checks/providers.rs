//! Sources of the functional-part point cloud used by the interactable check.

use std::collections::BTreeMap;

use crate::geometry::{PointCloud3, Vec3};
use crate::scene::{AtomicAction, SceneObject};

/// Functional-part points may leave the object box by at most this much.
pub const PART_TOLERANCE: f64 = 0.05;

pub trait FunctionalPartProvider: Send + Sync {
    /// Points of the part of `object` that `action` operates on. An empty
    /// cloud means no part was identified.
    fn functional_part(
        &self,
        object: &SceneObject,
        action: AtomicAction,
    ) -> Result<PointCloud3, String>;
}

/// Uses the whole object surface (vertices and triangle barycenters).
#[derive(Clone, Copy, Debug, Default)]
pub struct FullSurfaceProvider;

impl FunctionalPartProvider for FullSurfaceProvider {
    fn functional_part(
        &self,
        object: &SceneObject,
        _action: AtomicAction,
    ) -> Result<PointCloud3, String> {
        PointCloud3::new(object.mesh.surface_samples()).map_err(|e| e.to_string())
    }
}

/// Fixed point lists per `(object_id, action)`; missing entries are empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FixtureProvider {
    parts: BTreeMap<(String, AtomicAction), Vec<Vec3>>,
}

impl FixtureProvider {
    pub fn insert(
        &mut self,
        object_id: impl Into<String>,
        action: AtomicAction,
        points: Vec<Vec3>,
    ) {
        self.parts.insert((object_id.into(), action), points);
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, AtomicAction, &[Vec3])> {
        self.parts
            .iter()
            .map(|((id, a), p)| (id.as_str(), *a, p.as_slice()))
    }
}

impl FunctionalPartProvider for FixtureProvider {
    fn functional_part(
        &self,
        object: &SceneObject,
        action: AtomicAction,
    ) -> Result<PointCloud3, String> {
        let Some(points) = self.parts.get(&(object.id.clone(), action)) else {
            return Ok(PointCloud3::default());
        };
        let bound = object.obb.inflated(PART_TOLERANCE);
        if let Some(p) = points.iter().find(|p| !bound.contains_point(p, 1e-9)) {
            return Err(format!(
                "point [{:.3}, {:.3}, {:.3}] lies outside object '{}' by more than {PART_TOLERANCE} m",
                p.x, p.y, p.z, object.id
            ));
        }
        PointCloud3::new(points.clone()).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::OrientedBox;

    fn cabinet() -> SceneObject {
        let b = OrientedBox::new(Vec3::new(0.0, 0.5, 0.0), Vec3::repeat(0.5), 0.0).unwrap();
        SceneObject::new("cab", "cabinet", b, None).unwrap()
    }

    #[test]
    fn fixture_lookup_and_bounds() {
        let mut f = FixtureProvider::default();
        f.insert("cab", AtomicAction::Open, vec![Vec3::new(0.0, 0.9, 0.54)]);
        f.insert("cab", AtomicAction::Close, vec![Vec3::new(0.0, 0.9, 0.6)]);
        let obj = cabinet();
        assert_eq!(
            f.functional_part(&obj, AtomicAction::Open).unwrap().len(),
            1
        );
        assert!(f
            .functional_part(&obj, AtomicAction::Toggle)
            .unwrap()
            .is_empty());
        assert!(f.functional_part(&obj, AtomicAction::Close).is_err());
    }

    #[test]
    fn full_surface_of_box() {
        let part = FullSurfaceProvider
            .functional_part(&cabinet(), AtomicAction::Open)
            .unwrap();
        assert_eq!(part.len(), 8 + 12);
    }
}
