//! Geometric primitives shared by every property check.
//!
//! World coordinates are Y-up and in meters. The ground plane is XZ; a
//! [`Vec2`] on the ground stores world `x` in `.x` and world `z` in `.y`.

pub mod bvh;
pub mod mesh;
pub mod obb;
pub mod polygon;
pub mod ray;
pub mod zones;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bvh::{min_distance_points_to_mesh, min_distance_points_to_points, Closest, DistanceTree};
pub use mesh::{translate_mesh, TriangleMesh};
pub use obb::{box_intersects, OrientedBox};
pub use polygon::{convex_hull, project_footprint, Polygon2};
pub use ray::{ray_blocked, OcclusionSet};
pub use zones::{face_zones, Face, InteractionZone, ZoneColor};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Vec2 = nalgebra::Vector2<f64>;

/// Triangles with less area than this are degenerate.
pub const AREA_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("triangle {triangle} references vertex {index}, but the mesh has {len} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: u32,
        len: usize,
    },
    #[error("triangle {0} is degenerate")]
    DegenerateTriangle(usize),
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Projects a world point onto the ground plane.
#[inline]
pub fn ground(p: &Vec3) -> Vec2 {
    Vec2::new(p.x, p.z)
}

/// A bag of world-space points: walkable floor samples or an interactable volume.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointCloud3 {
    pub points: Vec<Vec3>,
}

impl PointCloud3 {
    pub fn new(points: Vec<Vec3>) -> Result<Self, GeometryError> {
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(GeometryError::NonFinite("point cloud"));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn translated(&self, offset: Vec3) -> Self {
        Self {
            points: self.points.iter().map(|p| p + offset).collect(),
        }
    }
}

/// Axis-aligned bounds, used by the acceleration structures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Self {
            min: Vec3::repeat(f64::INFINITY),
            max: Vec3::repeat(f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn grow(&mut self, p: &Vec3) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn merge(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    /// Squared distance from `p` to the box (zero inside).
    pub fn distance_squared(&self, p: &Vec3) -> f64 {
        let mut d = 0.0;
        for i in 0..3 {
            let v = if p[i] < self.min[i] {
                self.min[i] - p[i]
            } else if p[i] > self.max[i] {
                p[i] - self.max[i]
            } else {
                0.0
            };
            d += v * v;
        }
        d
    }

    /// Slab test for the segment `origin + t * dir`, `t` in `[0, 1]`.
    pub fn hits_segment(&self, origin: &Vec3, dir: &Vec3) -> bool {
        let mut t0 = 0.0f64;
        let mut t1 = 1.0f64;
        for i in 0..3 {
            if dir[i].abs() < 1e-300 {
                if origin[i] < self.min[i] || origin[i] > self.max[i] {
                    return false;
                }
                continue;
            }
            let inv = 1.0 / dir[i];
            let mut a = (self.min[i] - origin[i]) * inv;
            let mut b = (self.max[i] - origin[i]) * inv;
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
            if t0 > t1 {
                return false;
            }
        }
        true
    }
}
