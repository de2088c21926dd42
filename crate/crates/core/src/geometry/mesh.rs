use serde::{Deserialize, Serialize};

use super::{Aabb, GeometryError, OrientedBox, Vec3, AREA_EPSILON};

/// Indexed triangle soup in world coordinates.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

impl TriangleMesh {
    /// Builds a mesh, rejecting out-of-range indices, non-finite vertices
    /// and triangles with area below [`AREA_EPSILON`].
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self, GeometryError> {
        let mesh = Self {
            vertices,
            triangles,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self
            .vertices
            .iter()
            .any(|v| !v.iter().all(|c| c.is_finite()))
        {
            return Err(GeometryError::NonFinite("mesh vertices"));
        }
        let len = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            for &index in tri {
                if index as usize >= len {
                    return Err(GeometryError::IndexOutOfRange {
                        triangle: t,
                        index,
                        len,
                    });
                }
            }
            if triangle_area(&self.triangle(t)) < AREA_EPSILON {
                return Err(GeometryError::DegenerateTriangle(t));
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn triangles_iter(&self) -> impl Iterator<Item = [Vec3; 3]> + '_ {
        (0..self.triangles.len()).map(move |t| self.triangle(t))
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter())
    }

    pub fn translated(&self, offset: Vec3) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| v + offset).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Closed 12-triangle mesh of a box, outward winding.
    pub fn from_box(obb: &OrientedBox) -> Self {
        let vertices = obb.corners().to_vec();
        // Corner index bits: x = 1, y = 2, z = 4 (set = positive side).
        const TRIS: [[u32; 3]; 12] = [
            [0, 4, 6],
            [0, 6, 2],
            [1, 3, 7],
            [1, 7, 5],
            [0, 1, 5],
            [0, 5, 4],
            [2, 6, 7],
            [2, 7, 3],
            [0, 2, 3],
            [0, 3, 1],
            [4, 5, 7],
            [4, 7, 6],
        ];
        Self {
            vertices,
            triangles: TRIS.to_vec(),
        }
    }

    /// Appends another mesh, reindexing its triangles.
    pub fn append(&mut self, other: &TriangleMesh) {
        let base = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(
            other
                .triangles
                .iter()
                .map(|t| [t[0] + base, t[1] + base, t[2] + base]),
        );
    }

    /// Deterministic surface samples: every vertex followed by every
    /// triangle barycenter.
    pub fn surface_samples(&self) -> Vec<Vec3> {
        let mut out = self.vertices.clone();
        out.extend(self.triangles_iter().map(|[a, b, c]| (a + b + c) / 3.0));
        out
    }

    pub fn surface_area(&self) -> f64 {
        self.triangles_iter().map(|t| triangle_area(&t)).sum()
    }
}

pub fn triangle_area(t: &[Vec3; 3]) -> f64 {
    0.5 * (t[1] - t[0]).cross(&(t[2] - t[0])).norm()
}

/// Pure vertex translation; topology is unchanged.
pub fn translate_mesh(mesh: &TriangleMesh, offset: Vec3) -> TriangleMesh {
    mesh.translated(offset)
}
