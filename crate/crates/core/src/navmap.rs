//! Agent-conditioned navigation maps.
//!
//! The floor and every obstacle low enough to block the agent are
//! rasterized into a square occupancy grid, which is then eroded by a disk
//! of half the agent's clearance width. Walkable pixels are grouped into
//! 4-connected regions.

use std::collections::VecDeque;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::polygon::{point_in_polygon, point_in_triangle};
use crate::geometry::{ground, project_footprint, PointCloud3, Polygon2, Vec2, Vec3};
use crate::rng::{stream_rng, POSE_STREAM};
use crate::scene::{AgentProfile, Locomotion, Posture, Scene, SceneObject};

pub const DEFAULT_RESOLUTION: usize = 256;
pub const MIN_RESOLUTION: usize = 32;
pub const DEFAULT_MARGIN: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NavMapError {
    #[error("resolution {0} is below the minimum of {MIN_RESOLUTION}")]
    ResolutionTooSmall(usize),
    #[error("scene floor has zero projected area")]
    DegenerateFloor,
    #[error("navigation map has no walkable pixel")]
    NoWalkable,
    #[error("unknown region id {0}")]
    UnknownRegion(u32),
    #[error("invalid navigation map option: {0}")]
    InvalidOption(String),
}

/// How object footprints are rasterized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FootprintMode {
    /// Ground rectangle of the oriented box.
    #[default]
    Obb,
    /// Convex hull of the projected mesh vertices.
    MeshHull,
    /// Every projected mesh triangle (the true silhouette).
    MeshTriangles,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NavMapOptions {
    pub resolution: usize,
    /// Extra border around the floor bounding square, as a fraction of its side.
    pub margin: f64,
    pub footprint: FootprintMode,
    /// Objects whose base sits higher above the floor are ignored; defaults
    /// to the agent's total standing height.
    pub height_threshold: Option<f64>,
}

impl Default for NavMapOptions {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            margin: DEFAULT_MARGIN,
            footprint: FootprintMode::Obb,
            height_threshold: None,
        }
    }
}

/// 4-connected component labels: 0 is non-walkable, regions are `1..=count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionLabels {
    pub labels: Vec<u32>,
    /// `sizes[id - 1]` is the pixel count of region `id`.
    pub sizes: Vec<usize>,
}

impl RegionLabels {
    pub fn region_count(&self) -> usize {
        self.sizes.len()
    }

    /// Largest region, ties broken by the smaller id.
    pub fn largest(&self) -> Option<u32> {
        let mut best: Option<(u32, usize)> = None;
        for (i, &s) in self.sizes.iter().enumerate() {
            if best.is_none_or(|(_, bs)| s > bs) {
                best = Some((i as u32 + 1, s));
            }
        }
        best.map(|(id, _)| id)
    }
}

/// Labels 4-connected `true` pixels; ids follow the raster order of each
/// region's first pixel.
pub fn label_components(grid: &[bool], width: usize, height: usize) -> RegionLabels {
    assert_eq!(grid.len(), width * height);
    let mut labels = vec![0u32; grid.len()];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..grid.len() {
        if !grid[start] || labels[start] != 0 {
            continue;
        }
        let id = sizes.len() as u32 + 1;
        labels[start] = id;
        queue.push_back(start);
        let mut size = 0;
        while let Some(p) = queue.pop_front() {
            size += 1;
            let (r, c) = (p / width, p % width);
            let mut visit = |q: usize| {
                if grid[q] && labels[q] == 0 {
                    labels[q] = id;
                    queue.push_back(q);
                }
            };
            if r > 0 {
                visit(p - width);
            }
            if r + 1 < height {
                visit(p + width);
            }
            if c > 0 {
                visit(p - 1);
            }
            if c + 1 < width {
                visit(p + 1);
            }
        }
        sizes.push(size);
    }
    RegionLabels { labels, sizes }
}

const FAR: f64 = 1e12;

/// One-dimensional squared distance transform (lower envelope of parabolas).
fn distance_transform_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let intersect = |q: usize, p: usize| {
        let (qf, pf) = (q as f64, p as f64);
        ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf))
    };
    for q in 1..n {
        let mut s = intersect(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = intersect(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate().take(n) {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let dq = q as f64 - v[k] as f64;
        *out = dq * dq + f[v[k]];
    }
}

/// Exact squared Euclidean distance (in pixels) from every pixel to the
/// nearest `false` pixel, treating everything outside the grid as `false`.
pub fn squared_distance_to_blocked(grid: &[bool], width: usize, height: usize) -> Vec<f64> {
    let (pw, ph) = (width + 2, height + 2);
    let mut f = vec![0.0; pw * ph];
    for r in 0..height {
        for c in 0..width {
            if grid[r * width + c] {
                f[(r + 1) * pw + c + 1] = FAR;
            }
        }
    }
    let n = pw.max(ph);
    let (mut buf, mut out) = (vec![0.0; n], vec![0.0; n]);
    let (mut v, mut z) = (vec![0usize; n], vec![0.0; n + 1]);
    for c in 0..pw {
        for r in 0..ph {
            buf[r] = f[r * pw + c];
        }
        distance_transform_1d(&buf[..ph], &mut out[..ph], &mut v, &mut z);
        for r in 0..ph {
            f[r * pw + c] = out[r];
        }
    }
    for r in 0..ph {
        buf[..pw].copy_from_slice(&f[r * pw..(r + 1) * pw]);
        distance_transform_1d(&buf[..pw], &mut out[..pw], &mut v, &mut z);
        f[r * pw..(r + 1) * pw].copy_from_slice(&out[..pw]);
    }
    let mut result = Vec::with_capacity(width * height);
    for r in 0..height {
        for c in 0..width {
            result.push(f[(r + 1) * pw + c + 1]);
        }
    }
    result
}

/// Binary erosion by a disk of `radius` pixels: a pixel survives iff every
/// pixel within `radius` of it (outside the grid counts as blocked) is set.
pub fn erode_disk(grid: &[bool], width: usize, height: usize, radius: f64) -> Vec<bool> {
    let r2 = radius * radius;
    squared_distance_to_blocked(grid, width, height)
        .into_iter()
        .zip(grid)
        .map(|(d2, &g)| g && d2 > r2)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentPose {
    pub position: Vec2,
    pub posture: Posture,
}

/// Square occupancy grid; row index follows world `z`, column index world `x`.
#[derive(Clone, Debug)]
pub struct NavMap {
    resolution: usize,
    scale: f64,
    center: Vec2,
    floor_y: f64,
    floor_mask: Vec<bool>,
    grid: Vec<bool>,
    agent_name: String,
    locomotion: Locomotion,
    labels: OnceLock<RegionLabels>,
}

impl NavMap {
    /// Assembles a map from an explicit grid; mostly for tests and tools.
    #[allow(clippy::too_many_arguments)]
    pub fn from_grid(
        resolution: usize,
        scale: f64,
        center: Vec2,
        floor_y: f64,
        floor_mask: Vec<bool>,
        grid: Vec<bool>,
        agent_name: impl Into<String>,
        locomotion: Locomotion,
    ) -> Self {
        assert_eq!(grid.len(), resolution * resolution);
        assert_eq!(floor_mask.len(), grid.len());
        Self {
            resolution,
            scale,
            center,
            floor_y,
            floor_mask,
            grid,
            agent_name: agent_name.into(),
            locomotion,
            labels: OnceLock::new(),
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Meters per pixel.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    pub fn floor_y(&self) -> f64 {
        self.floor_y
    }

    pub fn agent_name(&self) -> &str {
        &self.agent_name
    }

    pub fn locomotion(&self) -> Locomotion {
        self.locomotion
    }

    /// Walkable pixels after obstacles and erosion.
    pub fn grid(&self) -> &[bool] {
        &self.grid
    }

    /// Floor coverage before obstacles and erosion.
    pub fn floor_mask(&self) -> &[bool] {
        &self.floor_mask
    }

    pub fn walkable_count(&self) -> usize {
        self.grid.iter().filter(|&&w| w).count()
    }

    /// Region labels, computed on first use.
    pub fn labels(&self) -> &RegionLabels {
        self.labels
            .get_or_init(|| label_components(&self.grid, self.resolution, self.resolution))
    }

    pub fn pixel_center(&self, row: usize, col: usize) -> Vec2 {
        let half = self.resolution as f64 / 2.0;
        Vec2::new(
            self.center.x + (col as f64 + 0.5 - half) * self.scale,
            self.center.y + (row as f64 + 0.5 - half) * self.scale,
        )
    }

    pub fn index_center(&self, index: usize) -> Vec2 {
        self.pixel_center(index / self.resolution, index % self.resolution)
    }

    /// `(row, col)` of the pixel containing `p`, if inside the grid.
    pub fn scene_to_image(&self, p: &Vec2) -> Option<(usize, usize)> {
        let half = self.resolution as f64 / 2.0;
        let col = ((p.x - self.center.x) / self.scale + half).floor();
        let row = ((p.y - self.center.y) / self.scale + half).floor();
        let n = self.resolution as f64;
        if col < 0.0 || row < 0.0 || col >= n || row >= n {
            return None;
        }
        Some((row as usize, col as usize))
    }

    pub fn image_to_scene(&self, row: usize, col: usize) -> Vec2 {
        self.pixel_center(row, col)
    }

    pub fn index_of(&self, p: &Vec2) -> Option<usize> {
        self.scene_to_image(p).map(|(r, c)| r * self.resolution + c)
    }

    /// Region id under `p` (0 when not walkable), `None` outside the grid.
    pub fn region_at(&self, p: &Vec2) -> Option<u32> {
        self.index_of(p).map(|i| self.labels().labels[i])
    }

    /// Range of pixel indices along one axis whose centers may fall in `[lo, hi]`.
    fn pixel_span(&self, lo: f64, hi: f64, origin: f64) -> Option<(usize, usize)> {
        let half = self.resolution as f64 / 2.0;
        let a = ((lo - origin) / self.scale + half - 0.5).ceil().max(0.0);
        let b = ((hi - origin) / self.scale + half - 0.5)
            .floor()
            .min(self.resolution as f64 - 1.0);
        (a <= b).then_some((a as usize, b as usize))
    }

    fn rasterize_with(&self, lo: Vec2, hi: Vec2, inside: impl Fn(&Vec2) -> bool) -> Vec<usize> {
        let (Some((c0, c1)), Some((r0, r1))) = (
            self.pixel_span(lo.x, hi.x, self.center.x),
            self.pixel_span(lo.y, hi.y, self.center.y),
        ) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for r in r0..=r1 {
            for c in c0..=c1 {
                if inside(&self.pixel_center(r, c)) {
                    out.push(r * self.resolution + c);
                }
            }
        }
        out
    }

    /// Indices of pixels whose centers lie inside `poly`, in raster order.
    pub fn rasterize_polygon(&self, poly: &Polygon2) -> Vec<usize> {
        match poly.bounds() {
            Some((lo, hi)) => self.rasterize_with(lo, hi, |p| point_in_polygon(p, &poly.vertices)),
            None => Vec::new(),
        }
    }

    pub fn rasterize_triangle(&self, tri: &[Vec2; 3]) -> Vec<usize> {
        let lo = tri[0].inf(&tri[1]).inf(&tri[2]);
        let hi = tri[0].sup(&tri[1]).sup(&tri[2]);
        self.rasterize_with(lo, hi, |p| point_in_triangle(p, tri))
    }

    /// World-space points on the floor at every pixel center of a region.
    pub fn walkable_points_3d(&self, region_id: u32) -> Result<PointCloud3, NavMapError> {
        let labels = self.labels();
        if region_id == 0 || region_id as usize > labels.region_count() {
            return Err(NavMapError::UnknownRegion(region_id));
        }
        let points = labels
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == region_id)
            .map(|(i, _)| {
                let g = self.index_center(i);
                Vec3::new(g.x, self.floor_y, g.y)
            })
            .collect();
        Ok(PointCloud3 { points })
    }
}

fn object_footprint_pixels(map: &NavMap, object: &SceneObject, mode: FootprintMode) -> Vec<usize> {
    match mode {
        FootprintMode::Obb => {
            map.rasterize_polygon(&Polygon2::new(object.obb.ground_corners().to_vec()))
        }
        FootprintMode::MeshHull => map.rasterize_polygon(&project_footprint(&object.mesh)),
        FootprintMode::MeshTriangles => object
            .mesh
            .triangles_iter()
            .flat_map(|t| map.rasterize_triangle(&[ground(&t[0]), ground(&t[1]), ground(&t[2])]))
            .collect(),
    }
}

/// Rasterizes the floor, stamps obstacles, and erodes by half the agent's
/// clearance width.
pub fn build_navmap(
    scene: &Scene,
    profile: &AgentProfile,
    options: &NavMapOptions,
) -> Result<NavMap, NavMapError> {
    let res = options.resolution;
    if res < MIN_RESOLUTION {
        return Err(NavMapError::ResolutionTooSmall(res));
    }
    if !(options.margin >= 0.0 && options.margin.is_finite()) {
        return Err(NavMapError::InvalidOption(format!(
            "margin must be >= 0, got {}",
            options.margin
        )));
    }
    let floor_tris: Vec<[Vec2; 3]> = scene
        .floor
        .triangles_iter()
        .map(|t| [ground(&t[0]), ground(&t[1]), ground(&t[2])])
        .collect();
    let projected_area: f64 = floor_tris
        .iter()
        .map(|t| 0.5 * ((t[1] - t[0]).perp(&(t[2] - t[0]))).abs())
        .sum();
    if floor_tris.is_empty() || projected_area < 1e-9 {
        return Err(NavMapError::DegenerateFloor);
    }
    let (lo, hi) = floor_tris.iter().flatten().fold(
        (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY)),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    );
    let side = (hi - lo).max() * (1.0 + options.margin);
    let scale = side / res as f64;
    let center = (lo + hi) / 2.0;
    let floor_y = scene.floor_height();

    let mut map = NavMap::from_grid(
        res,
        scale,
        center,
        floor_y,
        vec![false; res * res],
        vec![false; res * res],
        profile.name.clone(),
        profile.locomotion,
    );
    let mut floor_mask = vec![false; res * res];
    for t in &floor_tris {
        for i in map.rasterize_triangle(t) {
            floor_mask[i] = true;
        }
    }
    let mut grid = floor_mask.clone();
    let threshold = options
        .height_threshold
        .unwrap_or_else(|| profile.total_height());
    for object in &scene.objects {
        if object.obb.min_y() - floor_y > threshold {
            continue;
        }
        for i in object_footprint_pixels(&map, object, options.footprint) {
            grid[i] = false;
        }
    }
    let radius_px = profile.clearance_width / scale / 2.0;
    map.floor_mask = floor_mask;
    map.grid = erode_disk(&grid, res, res, radius_px);
    Ok(map)
}

/// Labels the map's walkable regions and returns them.
pub fn connected_regions(map: &NavMap) -> &RegionLabels {
    map.labels()
}

/// Seeded pixel from the largest region; wheeled agents start seated.
pub fn initial_pose(map: &NavMap, seed: u64) -> Result<AgentPose, NavMapError> {
    let labels = map.labels();
    let region = labels.largest().ok_or(NavMapError::NoWalkable)?;
    let pixels: Vec<usize> = labels
        .labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == region)
        .map(|(i, _)| i)
        .collect();
    let mut rng = stream_rng(seed, POSE_STREAM);
    let pick = pixels[rng.random_range(0..pixels.len())];
    let posture = match map.locomotion() {
        Locomotion::Wheel => Posture::Seated,
        Locomotion::Walk => Posture::Standing,
    };
    Ok(AgentPose {
        position: map.index_center(pick),
        posture,
    })
}

pub fn walkable_points_3d(map: &NavMap, region_id: u32) -> Result<PointCloud3, NavMapError> {
    map.walkable_points_3d(region_id)
}
