//! Yaw-only oriented boxes and separating-axis overlap tests.

use serde::{Deserialize, Serialize};

use super::{GeometryError, TriangleMesh, Vec2, Vec3};

/// Overlap (in meters, along a separating-axis candidate) that still counts
/// as touching rather than intersecting.
pub const CONTACT_TOLERANCE: f64 = 1e-6;

/// Box with a vertical yaw rotation. Local `x` is the width axis, local `z`
/// the depth axis; the local `+z` face is the front.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientedBox {
    pub center: Vec3,
    pub half_extents: Vec3,
    pub yaw: f64,
}

impl OrientedBox {
    pub fn new(center: Vec3, half_extents: Vec3, yaw: f64) -> Result<Self, GeometryError> {
        let b = Self {
            center,
            half_extents,
            yaw,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !self
            .center
            .iter()
            .chain(self.half_extents.iter())
            .all(|c| c.is_finite())
            || !self.yaw.is_finite()
        {
            return Err(GeometryError::NonFinite("oriented box"));
        }
        if self.half_extents.iter().any(|&h| h <= 0.0) {
            return Err(GeometryError::InvalidBox(format!(
                "half extents must be positive, got [{}, {}, {}]",
                self.half_extents.x, self.half_extents.y, self.half_extents.z
            )));
        }
        Ok(())
    }

    /// World directions of the local x, y, z axes.
    pub fn axes(&self) -> [Vec3; 3] {
        let (s, c) = self.yaw.sin_cos();
        [Vec3::new(c, 0.0, -s), Vec3::y(), Vec3::new(s, 0.0, c)]
    }

    pub fn to_world(&self, local: &Vec3) -> Vec3 {
        let [ax, ay, az] = self.axes();
        self.center + ax * local.x + ay * local.y + az * local.z
    }

    pub fn to_local(&self, world: &Vec3) -> Vec3 {
        let d = world - self.center;
        let [ax, ay, az] = self.axes();
        Vec3::new(d.dot(&ax), d.dot(&ay), d.dot(&az))
    }

    /// Corners indexed by sign bits: bit 0 = +x, bit 1 = +y, bit 2 = +z.
    pub fn corners(&self) -> [Vec3; 8] {
        let h = self.half_extents;
        std::array::from_fn(|i| {
            let sx = if i & 1 != 0 { 1.0 } else { -1.0 };
            let sy = if i & 2 != 0 { 1.0 } else { -1.0 };
            let sz = if i & 4 != 0 { 1.0 } else { -1.0 };
            self.to_world(&Vec3::new(sx * h.x, sy * h.y, sz * h.z))
        })
    }

    /// Counter-clockwise (in x/z) ground-plane rectangle.
    pub fn ground_corners(&self) -> [Vec2; 4] {
        let h = self.half_extents;
        [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].map(|(sx, sz)| {
            let w = self.to_world(&Vec3::new(sx * h.x, 0.0, sz * h.z));
            Vec2::new(w.x, w.z)
        })
    }

    pub fn min_y(&self) -> f64 {
        self.center.y - self.half_extents.y
    }

    pub fn max_y(&self) -> f64 {
        self.center.y + self.half_extents.y
    }

    pub fn contains_point(&self, p: &Vec3, tolerance: f64) -> bool {
        let l = self.to_local(p);
        (0..3).all(|i| l[i].abs() <= self.half_extents[i] + tolerance)
    }

    pub fn inflated(&self, margin: f64) -> Self {
        Self {
            half_extents: self.half_extents.add_scalar(margin),
            ..*self
        }
    }

    fn projected_radius(&self, axis: &Vec3) -> f64 {
        let [ax, ay, az] = self.axes();
        self.half_extents.x * ax.dot(axis).abs()
            + self.half_extents.y * ay.dot(axis).abs()
            + self.half_extents.z * az.dot(axis).abs()
    }

    /// Separating-axis test between two boxes. Boxes whose overlap along
    /// some axis is at most [`CONTACT_TOLERANCE`] do not intersect.
    pub fn intersects_box(&self, other: &OrientedBox) -> bool {
        let a = self.axes();
        let b = other.axes();
        let t = other.center - self.center;
        let mut candidates: Vec<Vec3> = a.iter().chain(b.iter()).copied().collect();
        for ea in &a {
            for eb in &b {
                let c = ea.cross(eb);
                let n = c.norm();
                if n > 1e-9 {
                    candidates.push(c / n);
                }
            }
        }
        candidates.iter().all(|axis| {
            let overlap =
                self.projected_radius(axis) + other.projected_radius(axis) - t.dot(axis).abs();
            overlap > CONTACT_TOLERANCE
        })
    }

    /// Separating-axis test between the box and one triangle.
    pub fn intersects_triangle(&self, tri: &[Vec3; 3]) -> bool {
        let axes = self.axes();
        let edges = [tri[1] - tri[0], tri[2] - tri[1], tri[0] - tri[2]];
        let mut candidates: Vec<Vec3> = axes.to_vec();
        let normal = edges[0].cross(&edges[1]);
        if normal.norm() > 1e-12 {
            candidates.push(normal.normalize());
        }
        for e in &axes {
            for f in &edges {
                let c = e.cross(f);
                let n = c.norm();
                if n > 1e-9 {
                    candidates.push(c / n);
                }
            }
        }
        candidates.iter().all(|axis| {
            let c = self.center.dot(axis);
            let r = self.projected_radius(axis);
            let (lo, hi) = tri
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    let p = v.dot(axis);
                    (lo.min(p), hi.max(p))
                });
            if hi - lo <= CONTACT_TOLERANCE {
                // Triangle is flat along this axis: it must sit strictly inside the slab.
                return lo > c - r + CONTACT_TOLERANCE && hi < c + r - CONTACT_TOLERANCE;
            }
            let overlap = (c + r).min(hi) - (c - r).max(lo);
            overlap > CONTACT_TOLERANCE
        })
    }

    pub fn intersects_mesh(&self, mesh: &TriangleMesh) -> bool {
        let bound = super::Aabb::from_points(self.corners().iter());
        let mbound = mesh.aabb();
        let disjoint = (0..3).any(|i| bound.max[i] < mbound.min[i] || mbound.max[i] < bound.min[i]);
        if disjoint {
            return false;
        }
        mesh.triangles_iter().any(|t| self.intersects_triangle(&t))
    }
}

/// True iff `b` overlaps any of `others` or any triangle of `meshes`.
pub fn box_intersects(b: &OrientedBox, others: &[OrientedBox], meshes: &[TriangleMesh]) -> bool {
    others.iter().any(|o| b.intersects_box(o)) || meshes.iter().any(|m| b.intersects_mesh(m))
}
