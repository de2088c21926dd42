//! Scene JSON documents.
//!
//! ```json
//! {
//!   "id": "living_room",
//!   "floor": {"polygon": [[-2, -2], [2, -2], [2, 2], [-2, 2]], "y": 0.0},
//!   "walls": [{"position": [0, 1.25, 2.05], "yaw": 0, "size": [4, 2.5, 0.1]}],
//!   "objects": [
//!     {"id": "sofa_1", "category": "sofa", "position": [0, 0.4, 1], "yaw": 0,
//!      "size": [1.8, 0.8, 0.9], "mesh": "meshes/sofa.obj"}
//!   ]
//! }
//! ```
//!
//! `position` is the box center. Meshes are either OBJ paths (relative to
//! the scene file) or inline `{"vertices", "triangles"}` objects, in world
//! coordinates.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::obj::load_obj;
use super::{read_text, IoError};
use crate::geometry::{OrientedBox, TriangleMesh, Vec2, Vec3};
use crate::scene::{Scene, SceneObject, MESH_BOX_TOLERANCE};

const ROTATION_KEYS: [&str; 4] = ["rotation", "quaternion", "orientation", "rot"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeshSpec {
    Inline {
        vertices: Vec<[f64; 3]>,
        triangles: Vec<[u32; 3]>,
    },
    Obj {
        obj: String,
    },
    Polygon {
        polygon: Vec<[f64; 2]>,
        y: f64,
    },
    Box {
        position: [f64; 3],
        yaw: f64,
        size: [f64; 3],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObjectMesh {
    Path(String),
    Inline {
        vertices: Vec<[f64; 3]>,
        triangles: Vec<[u32; 3]>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub id: String,
    pub category: String,
    pub position: [f64; 3],
    #[serde(default)]
    pub yaw: f64,
    pub size: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<ObjectMesh>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    pub id: String,
    pub floor: MeshSpec,
    #[serde(default)]
    pub walls: Vec<MeshSpec>,
    #[serde(default)]
    pub objects: Vec<Value>,
}

#[derive(Clone, Debug)]
pub struct LoadedScene {
    pub scene: Scene,
    pub warnings: Vec<String>,
}

fn inline_mesh(vertices: &[[f64; 3]], triangles: &[[u32; 3]]) -> Result<TriangleMesh, String> {
    TriangleMesh::new(
        vertices.iter().map(|v| Vec3::from(*v)).collect(),
        triangles.to_vec(),
    )
    .map_err(|e| e.to_string())
}

fn box_of(position: [f64; 3], yaw: f64, size: [f64; 3]) -> Result<OrientedBox, String> {
    OrientedBox::new(Vec3::from(position), Vec3::from(size) / 2.0, yaw).map_err(|e| e.to_string())
}

fn convex_polygon_mesh(polygon: &[[f64; 2]], y: f64) -> Result<TriangleMesh, String> {
    if polygon.len() < 3 {
        return Err("polygon needs at least three vertices".into());
    }
    let pts: Vec<Vec2> = polygon.iter().map(|p| Vec2::new(p[0], p[1])).collect();
    let n = pts.len();
    let turn = |i: usize| {
        let (a, b, c) = (pts[i], pts[(i + 1) % n], pts[(i + 2) % n]);
        (b - a).perp(&(c - b))
    };
    let first = turn(0).signum();
    if (0..n).any(|i| turn(i) * first <= 0.0) {
        return Err("floor polygon must be strictly convex (use an inline mesh otherwise)".into());
    }
    let vertices = pts.iter().map(|p| Vec3::new(p.x, y, p.y)).collect();
    let triangles = (1..n as u32 - 1).map(|k| [0, k, k + 1]).collect();
    TriangleMesh::new(vertices, triangles).map_err(|e| e.to_string())
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn build_mesh(spec: &MeshSpec, base: &Path) -> Result<TriangleMesh, String> {
    match spec {
        MeshSpec::Inline {
            vertices,
            triangles,
        } => inline_mesh(vertices, triangles),
        MeshSpec::Obj { obj } => load_obj(&resolve(base, obj))
            .map(|(m, _)| m)
            .map_err(|e| e.to_string()),
        MeshSpec::Polygon { polygon, y } => convex_polygon_mesh(polygon, *y),
        MeshSpec::Box {
            position,
            yaw,
            size,
        } => box_of(*position, *yaw, *size).map(|b| TriangleMesh::from_box(&b)),
    }
}

fn build_object(
    raw: &Value,
    index: usize,
    base: &Path,
    problems: &mut Vec<String>,
) -> Option<SceneObject> {
    let label = raw.get("id").and_then(Value::as_str).map_or_else(
        || format!("objects[{index}]"),
        |id| format!("object `{id}`"),
    );
    if let Some(obj) = raw.as_object() {
        if let Some(k) = ROTATION_KEYS.iter().find(|k| obj.contains_key(**k)) {
            problems.push(format!(
                "{label}: field `{k}` is not supported; only a yaw angle about +Y (radians) is accepted"
            ));
            return None;
        }
    }
    let spec: ObjectSpec = match serde_json::from_value(raw.clone()) {
        Ok(s) => s,
        Err(e) => {
            problems.push(format!("{label}: {e}"));
            return None;
        }
    };
    let obb = match box_of(spec.position, spec.yaw, spec.size) {
        Ok(b) => b,
        Err(e) => {
            problems.push(format!("{label}: {e}"));
            return None;
        }
    };
    let mesh = match &spec.mesh {
        None => None,
        Some(ObjectMesh::Path(p)) => match load_obj(&resolve(base, p)) {
            Ok((m, _)) => Some(m),
            Err(e) => {
                problems.push(format!("{label}: mesh {e}"));
                return None;
            }
        },
        Some(ObjectMesh::Inline {
            vertices,
            triangles,
        }) => match inline_mesh(vertices, triangles) {
            Ok(m) => Some(m),
            Err(e) => {
                problems.push(format!("{label}: mesh {e}"));
                return None;
            }
        },
    };
    match SceneObject::new(spec.id, spec.category, obb, mesh) {
        Ok(o) => Some(o),
        Err(e) => {
            problems.push(format!("{label}: {e}"));
            None
        }
    }
}

/// Builds and validates a scene, reporting every problem found.
pub fn parse_scene(text: &str, path: &Path) -> Result<LoadedScene, IoError> {
    let file: SceneFile = serde_json::from_str(text)
        .map_err(|e| IoError::parse(path, Some(e.line()), e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut problems = Vec::new();
    let floor = build_mesh(&file.floor, base)
        .map_err(|e| problems.push(format!("floor: {e}")))
        .ok();
    let walls: Vec<TriangleMesh> = file
        .walls
        .iter()
        .enumerate()
        .filter_map(|(i, w)| {
            build_mesh(w, base)
                .map_err(|e| problems.push(format!("walls[{i}]: {e}")))
                .ok()
        })
        .collect();
    let objects: Vec<SceneObject> = file
        .objects
        .iter()
        .enumerate()
        .filter_map(|(i, raw)| build_object(raw, i, base, &mut problems))
        .collect();
    let mut seen = HashSet::new();
    for o in &objects {
        if !seen.insert(o.id.as_str()) {
            problems.push(format!("duplicate object id `{}`", o.id));
        }
    }
    if !problems.is_empty() {
        return Err(IoError::invalid(path, problems));
    }
    let floor = floor.expect("floor built when no problems were recorded");
    let warnings = objects
        .iter()
        .filter(|o| !o.mesh_within_box(MESH_BOX_TOLERANCE))
        .map(|o| {
            format!(
                "object `{}`: mesh extends {:.3} m beyond its box (tolerance {MESH_BOX_TOLERANCE} m)",
                o.id,
                o.mesh_box_excess()
            )
        })
        .collect();
    let scene = Scene::new(file.id, floor, walls, objects)
        .map_err(|e| IoError::invalid(path, vec![e.to_string()]))?;
    Ok(LoadedScene { scene, warnings })
}

pub fn load_scene(path: &Path) -> Result<LoadedScene, IoError> {
    parse_scene(&read_text(path)?, path)
}

fn mesh_arrays(m: &TriangleMesh) -> (Vec<[f64; 3]>, Vec<[u32; 3]>) {
    (
        m.vertices.iter().map(|v| [v.x, v.y, v.z]).collect(),
        m.triangles.clone(),
    )
}

/// Serializable form of a scene; box meshes are omitted, other meshes inlined.
pub fn scene_to_file(scene: &Scene) -> SceneFile {
    let (fv, ft) = mesh_arrays(&scene.floor);
    let objects = scene
        .objects
        .iter()
        .map(|o| {
            let mesh = (o.mesh != TriangleMesh::from_box(&o.obb)).then(|| {
                let (vertices, triangles) = mesh_arrays(&o.mesh);
                ObjectMesh::Inline {
                    vertices,
                    triangles,
                }
            });
            let spec = ObjectSpec {
                id: o.id.clone(),
                category: o.category.clone(),
                position: o.obb.center.into(),
                yaw: o.obb.yaw,
                size: (o.obb.half_extents * 2.0).into(),
                mesh,
            };
            serde_json::to_value(spec).expect("object spec serializes")
        })
        .collect();
    SceneFile {
        id: scene.id.clone(),
        floor: MeshSpec::Inline {
            vertices: fv,
            triangles: ft,
        },
        walls: scene
            .walls
            .iter()
            .map(|w| {
                let (vertices, triangles) = mesh_arrays(w);
                MeshSpec::Inline {
                    vertices,
                    triangles,
                }
            })
            .collect(),
        objects,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "id": "m",
        "floor": {"polygon": [[-2, -2], [2, -2], [2, 2], [-2, 2]], "y": 0.0},
        "objects": [{"id": "box", "category": "cabinet", "position": [0, 0.5, 0], "yaw": 0.3, "size": [1, 1, 0.5]}]
    }"#;

    #[test]
    fn minimal_scene_loads() {
        let loaded = parse_scene(MINIMAL, Path::new("m.json")).unwrap();
        assert_eq!(loaded.scene.objects.len(), 1);
        assert!(loaded.warnings.is_empty());
        assert!(loaded.scene.floor_contains(&Vec2::new(1.9, -1.9)));
        assert_eq!(
            loaded.scene.objects[0].obb.half_extents,
            Vec3::new(0.5, 0.5, 0.25)
        );
    }

    #[test]
    fn all_problems_are_reported() {
        let text = r#"{
            "id": "bad",
            "floor": {"polygon": [[0, 0], [1, 0], [1, 1], [0, 1]], "y": 0},
            "objects": [
                {"id": "a", "category": "c", "position": [0, 0, 0], "size": [1, 1, 1]},
                {"id": "a", "category": "c", "position": [1, 0, 0], "size": [1, 1, 1]},
                {"id": "q", "category": "c", "position": [0, 0, 0], "size": [1, 1, 1], "quaternion": [1, 0, 0, 0]},
                {"id": "z", "category": "c", "position": [0, 0, 0], "size": [1, 0, 1]},
                {"id": "m", "category": "c", "position": [0, 0, 0], "size": [1, 1, 1], "mesh": "missing.obj"}
            ]
        }"#;
        match parse_scene(text, Path::new("bad.json")) {
            Err(IoError::Invalid { problems, .. }) => {
                assert_eq!(problems.len(), 4, "{problems:?}");
                assert!(problems
                    .iter()
                    .any(|p| p.contains("duplicate object id `a`")));
                assert!(problems
                    .iter()
                    .any(|p| p.contains("quaternion") && p.contains("yaw")));
                assert!(problems.iter().any(|p| p.contains("`z`")));
                assert!(problems.iter().any(|p| p.contains("missing.obj")));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn oversized_mesh_warns() {
        let text = r#"{
            "id": "w",
            "floor": {"polygon": [[-2, -2], [2, -2], [2, 2], [-2, 2]], "y": 0.0},
            "objects": [{"id": "lamp", "category": "lamp", "position": [0, 0.5, 0], "size": [1, 1, 1],
                         "mesh": {"vertices": [[0, 0, 0], [1.0, 0, 0], [0, 1, 0]], "triangles": [[0, 1, 2]]}}]
        }"#;
        let loaded = parse_scene(text, Path::new("w.json")).unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        assert!(
            loaded.warnings[0].contains("0.500 m beyond"),
            "{}",
            loaded.warnings[0]
        );
    }

    #[test]
    fn non_convex_polygon_rejected() {
        let text = r#"{"id": "n", "floor": {"polygon": [[0, 0], [2, 0], [1, 0.2], [2, 2], [0, 2]], "y": 0}}"#;
        assert!(matches!(
            parse_scene(text, Path::new("n.json")),
            Err(IoError::Invalid { .. })
        ));
    }

    #[test]
    fn round_trip_through_file_form() {
        let loaded = parse_scene(MINIMAL, Path::new("m.json")).unwrap();
        let text = serde_json::to_string(&scene_to_file(&loaded.scene)).unwrap();
        let again = parse_scene(&text, Path::new("m.json")).unwrap();
        assert_eq!(again.scene, loaded.scene);
    }
}
