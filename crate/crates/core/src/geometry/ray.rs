//! Segment occlusion queries.

use super::{Aabb, TriangleMesh, Vec3};

/// Hits closer than this fraction of the segment to either endpoint are
/// ignored, so geometry touching the eye or the target does not occlude.
pub const HIT_TOLERANCE: f64 = 1e-6;

/// Segment parameter of the intersection with `tri`, if any.
///
/// Möller–Trumbore on `origin + t * dir`; edges are inclusive so rays
/// through shared edges cannot slip between adjacent triangles.
pub fn segment_triangle_hit(origin: &Vec3, dir: &Vec3, tri: &[Vec3; 3]) -> Option<f64> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let p = dir.cross(&e2);
    let det = e1.dot(&p);
    let scale = e1.norm() * e2.norm() * dir.norm();
    if det.abs() <= 1e-12 * scale {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - tri[0];
    let u = s.dot(&p) * inv;
    const EDGE: f64 = 1e-12;
    if !(-EDGE..=1.0 + EDGE).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < -EDGE || u + v > 1.0 + EDGE {
        return None;
    }
    Some(e2.dot(&q) * inv)
}

/// A fixed set of occluding meshes with per-mesh bounds for early rejection.
#[derive(Clone, Debug, Default)]
pub struct OcclusionSet {
    meshes: Vec<(Aabb, TriangleMesh)>,
}

impl OcclusionSet {
    pub fn new(meshes: impl IntoIterator<Item = TriangleMesh>) -> Self {
        let meshes = meshes
            .into_iter()
            .filter(|m| !m.is_empty())
            .map(|m| {
                let mut b = m.aabb();
                b.min = b.min.add_scalar(-1e-9);
                b.max = b.max.add_scalar(1e-9);
                (b, m)
            })
            .collect();
        Self { meshes }
    }

    pub fn is_empty(&self) -> bool {
        self.meshes.is_empty()
    }

    /// True iff some triangle crosses the open segment strictly between the
    /// endpoints.
    pub fn blocked(&self, origin: &Vec3, target: &Vec3) -> bool {
        let dir = target - origin;
        self.meshes.iter().any(|(bounds, mesh)| {
            bounds.hits_segment(origin, &dir)
                && mesh.triangles_iter().any(|tri| {
                    segment_triangle_hit(origin, &dir, &tri)
                        .is_some_and(|t| t > HIT_TOLERANCE && t < 1.0 - HIT_TOLERANCE)
                })
        })
    }
}

/// True iff any occluder triangle intersects the segment before the target.
pub fn ray_blocked(occluders: &[TriangleMesh], origin: &Vec3, target: &Vec3) -> bool {
    OcclusionSet::new(occluders.iter().cloned()).blocked(origin, target)
}
