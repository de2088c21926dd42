//! Interaction zones: ground trapezoids flush with the vertical faces of a box.

use serde::{Deserialize, Serialize};

use super::{GeometryError, OrientedBox, Polygon2, Vec2, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Face {
    Front,
    Back,
    Left,
    Right,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::Front, Face::Right, Face::Back, Face::Left];

    /// Outward normal and in-face tangent in box-local coordinates.
    pub fn local_frame(self) -> (Vec3, Vec3) {
        match self {
            Face::Front => (Vec3::z(), Vec3::x()),
            Face::Back => (-Vec3::z(), -Vec3::x()),
            Face::Right => (Vec3::x(), -Vec3::z()),
            Face::Left => (-Vec3::x(), Vec3::z()),
        }
    }

    pub fn color(self) -> ZoneColor {
        match self {
            Face::Front => ZoneColor::Red,
            Face::Right => ZoneColor::Green,
            Face::Back => ZoneColor::Blue,
            Face::Left => ZoneColor::Yellow,
        }
    }

    /// `(half width along the face, distance from center to the face)`.
    pub fn half_dims(self, obb: &OrientedBox) -> (f64, f64) {
        let h = obb.half_extents;
        match self {
            Face::Front | Face::Back => (h.x, h.z),
            Face::Left | Face::Right => (h.z, h.x),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Face::Front => "front",
            Face::Back => "back",
            Face::Left => "left",
            Face::Right => "right",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneColor {
    Red,
    Green,
    Blue,
    Yellow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionZone {
    pub face: Face,
    /// Inner edge first (flush with the face), then the outer edge.
    pub polygon: Polygon2,
    pub color_tag: ZoneColor,
}

/// One trapezoid per vertical face, in [`Face::ALL`] order.
///
/// The inner edge is the face's ground projection; the outer edge lies
/// `depth` meters out and is `flare` times the face width.
pub fn face_zones(
    obb: &OrientedBox,
    depth: f64,
    flare: f64,
) -> Result<Vec<InteractionZone>, GeometryError> {
    if !(depth > 0.0 && depth.is_finite()) {
        return Err(GeometryError::InvalidParameter(format!(
            "zone depth must be positive, got {depth}"
        )));
    }
    if !(flare >= 1.0 && flare.is_finite()) {
        return Err(GeometryError::InvalidParameter(format!(
            "zone flare must be >= 1, got {flare}"
        )));
    }
    let floor_y = -obb.half_extents.y;
    let to_ground = |local: Vec3| {
        let w = obb.to_world(&Vec3::new(local.x, floor_y, local.z));
        Vec2::new(w.x, w.z)
    };
    Ok(Face::ALL
        .iter()
        .map(|&face| {
            let (n, t) = face.local_frame();
            let (half_w, offset) = face.half_dims(obb);
            let inner = n * offset;
            let outer = n * (offset + depth);
            let polygon = Polygon2::new(vec![
                to_ground(inner - t * half_w),
                to_ground(inner + t * half_w),
                to_ground(outer + t * (half_w * flare)),
                to_ground(outer - t * (half_w * flare)),
            ]);
            InteractionZone {
                face,
                polygon,
                color_tag: face.color(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box(yaw: f64) -> OrientedBox {
        OrientedBox::new(Vec3::new(0.0, 0.5, 0.0), Vec3::repeat(0.5), yaw).unwrap()
    }

    #[test]
    fn unit_box_gets_four_flush_rectangles() {
        let zones = face_zones(&unit_box(0.0), 0.75, 1.0).unwrap();
        assert_eq!(zones.len(), 4);
        for z in &zones {
            assert!((z.polygon.area() - 0.75).abs() < 1e-12, "{:?}", z.face);
            // Inner edge lies on the face line.
            let (a, b) = (z.polygon.vertices[0], z.polygon.vertices[1]);
            assert!(((a - b).norm() - 1.0).abs() < 1e-12);
            let mid = (a + b) / 2.0;
            assert!((mid.norm() - 0.5).abs() < 1e-12);
        }
        let front = zones.iter().find(|z| z.face == Face::Front).unwrap();
        assert_eq!(front.color_tag, ZoneColor::Red);
        for v in &front.polygon.vertices {
            assert!(v.y >= 0.5 - 1e-12 && v.y <= 1.25 + 1e-12);
        }
    }

    #[test]
    fn flare_widens_outer_edge() {
        let zones = face_zones(&unit_box(0.0), 0.75, 1.5).unwrap();
        for z in &zones {
            let outer = (z.polygon.vertices[2] - z.polygon.vertices[3]).norm();
            assert!((outer - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn zones_rotate_with_yaw() {
        let yaw = 0.7;
        let base = face_zones(&unit_box(0.0), 0.75, 1.2).unwrap();
        let rotated = face_zones(&unit_box(yaw), 0.75, 1.2).unwrap();
        let (s, c) = yaw.sin_cos();
        for (a, b) in base.iter().zip(&rotated) {
            assert_eq!(a.face, b.face);
            for (p, q) in a.polygon.vertices.iter().zip(&b.polygon.vertices) {
                // Ground coordinates are (x, z); rotation about +Y.
                let expected = Vec2::new(c * p.x + s * p.y, -s * p.x + c * p.y);
                assert!((expected - q).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(face_zones(&unit_box(0.0), 0.0, 1.0).is_err());
        assert!(face_zones(&unit_box(0.0), 0.5, 0.9).is_err());
    }
}
