//! Minimal Wavefront OBJ reader: `v` and `f` records only.

use std::path::Path;

use super::{read_text, IoError};
use crate::geometry::mesh::triangle_area;
use crate::geometry::{TriangleMesh, Vec3, AREA_EPSILON};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ObjStats {
    pub faces: usize,
    pub dropped_degenerate: usize,
}

fn parse_index(token: &str, vertex_count: usize) -> Option<usize> {
    let first = token.split('/').next()?;
    let i: i64 = first.parse().ok()?;
    let idx = if i > 0 {
        i - 1
    } else if i < 0 {
        vertex_count as i64 + i
    } else {
        return None;
    };
    (0..vertex_count as i64)
        .contains(&idx)
        .then_some(idx as usize)
}

/// Parses OBJ text. Polygons are fan-triangulated and zero-area triangles
/// dropped; other record types are ignored.
pub fn parse_obj(text: &str, path: &Path) -> Result<(TriangleMesh, ObjStats), IoError> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut stats = ObjStats::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let coords: Vec<f64> = parts
                    .take(3)
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|e| {
                        IoError::parse(path, Some(n + 1), format!("bad vertex coordinate: {e}"))
                    })?;
                if coords.len() != 3 || coords.iter().any(|c| !c.is_finite()) {
                    return Err(IoError::parse(
                        path,
                        Some(n + 1),
                        "vertex needs three finite coordinates",
                    ));
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|t| parse_index(t, vertices.len()))
                    .collect::<Option<_>>()
                    .ok_or_else(|| IoError::parse(path, Some(n + 1), "face index out of range"))?;
                if idx.len() < 3 {
                    return Err(IoError::parse(
                        path,
                        Some(n + 1),
                        "face needs at least three vertices",
                    ));
                }
                stats.faces += 1;
                for k in 1..idx.len() - 1 {
                    let tri = [idx[0], idx[k], idx[k + 1]];
                    if triangle_area(&tri.map(|i| vertices[i])) <= AREA_EPSILON {
                        stats.dropped_degenerate += 1;
                        continue;
                    }
                    triangles.push(tri.map(|i| i as u32));
                }
            }
            _ => {}
        }
    }
    if triangles.is_empty() {
        return Err(IoError::parse(
            path,
            None,
            "mesh has no non-degenerate triangles",
        ));
    }
    let mesh = TriangleMesh::new(vertices, triangles)
        .map_err(|e| IoError::parse(path, None, e.to_string()))?;
    Ok((mesh, stats))
}

pub fn load_obj(path: &Path) -> Result<(TriangleMesh, ObjStats), IoError> {
    parse_obj(&read_text(path)?, path)
}
