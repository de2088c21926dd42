//! Bounding-volume hierarchy for exact closest-distance queries.
//!
//! The tree only prunes subtrees whose box lies farther than the best
//! distance found so far, so every reported minimum is the same value a
//! brute-force scan over all primitives would produce.

use super::{Aabb, GeometryError, PointCloud3, TriangleMesh, Vec3};

const LEAF_SIZE: usize = 4;

#[derive(Clone, Debug)]
enum Primitive {
    Triangle([Vec3; 3]),
    Point(Vec3),
}

impl Primitive {
    fn bounds(&self) -> Aabb {
        match self {
            Primitive::Triangle(t) => Aabb::from_points(t.iter()),
            Primitive::Point(p) => Aabb { min: *p, max: *p },
        }
    }

    fn distance_squared(&self, p: &Vec3) -> f64 {
        match self {
            Primitive::Triangle(t) => (closest_point_on_triangle(p, t) - p).norm_squared(),
            Primitive::Point(q) => (q - p).norm_squared(),
        }
    }
}

#[derive(Clone, Debug)]
struct Node {
    bounds: Aabb,
    /// Leaf: `start..start + count` into `prims`; inner: `count == 0` and
    /// children at `start` and `start + 1`.
    start: usize,
    count: usize,
}

/// Closest-distance acceleration structure over triangles or points.
#[derive(Clone, Debug)]
pub struct DistanceTree {
    nodes: Vec<Node>,
    prims: Vec<Primitive>,
}

impl DistanceTree {
    pub fn from_mesh(mesh: &TriangleMesh) -> Self {
        Self::build(mesh.triangles_iter().map(Primitive::Triangle).collect())
    }

    pub fn from_points(points: &[Vec3]) -> Self {
        Self::build(points.iter().copied().map(Primitive::Point).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.prims.is_empty()
    }

    fn build(mut prims: Vec<Primitive>) -> Self {
        let mut nodes = Vec::with_capacity(2 * prims.len() / LEAF_SIZE + 1);
        if prims.is_empty() {
            return Self { nodes, prims };
        }
        let centers: Vec<Vec3> = prims.iter().map(|p| p.bounds().center()).collect();
        let mut order: Vec<usize> = (0..prims.len()).collect();
        nodes.push(Node {
            bounds: Aabb::empty(),
            start: 0,
            count: 0,
        });
        let mut stack = vec![(0usize, 0usize, prims.len())];
        while let Some((node, lo, hi)) = stack.pop() {
            let bounds = order[lo..hi]
                .iter()
                .fold(Aabb::empty(), |b, &i| b.merge(&prims[i].bounds()));
            nodes[node].bounds = bounds;
            if hi - lo <= LEAF_SIZE {
                nodes[node].start = lo;
                nodes[node].count = hi - lo;
                continue;
            }
            let cb = Aabb::from_points(order[lo..hi].iter().map(|&i| &centers[i]));
            let extent = cb.max - cb.min;
            let axis = if extent.x >= extent.y && extent.x >= extent.z {
                0
            } else if extent.y >= extent.z {
                1
            } else {
                2
            };
            let mid = (lo + hi) / 2;
            order[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
                centers[a][axis].total_cmp(&centers[b][axis])
            });
            let left = nodes.len();
            nodes.push(Node {
                bounds: Aabb::empty(),
                start: 0,
                count: 0,
            });
            nodes.push(Node {
                bounds: Aabb::empty(),
                start: 0,
                count: 0,
            });
            nodes[node].start = left;
            nodes[node].count = 0;
            stack.push((left, lo, mid));
            stack.push((left + 1, mid, hi));
        }
        // Reorder primitives so leaves index contiguous ranges.
        let mut slots: Vec<Option<Primitive>> = prims.drain(..).map(Some).collect();
        let prims = order
            .iter()
            .map(|&i| slots[i].take().expect("each index once"))
            .collect();
        Self { nodes, prims }
    }

    /// Squared distance from `p` to the nearest primitive, if it is below
    /// `bound_sq`.
    pub fn closest_squared(&self, p: &Vec3, bound_sq: f64) -> Option<f64> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = bound_sq;
        let mut found = false;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if node.bounds.distance_squared(p) >= best {
                continue;
            }
            if node.count > 0 {
                for prim in &self.prims[node.start..node.start + node.count] {
                    let d = prim.distance_squared(p);
                    if d < best {
                        best = d;
                        found = true;
                    }
                }
            } else {
                let (l, r) = (node.start, node.start + 1);
                let dl = self.nodes[l].bounds.distance_squared(p);
                let dr = self.nodes[r].bounds.distance_squared(p);
                // Visit the nearer child first (pushed last).
                if dl <= dr {
                    stack.push(r);
                    stack.push(l);
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        found.then_some(best)
    }

    /// Minimum distance over a query point set, with the arg-min index.
    pub fn closest_to_points(&self, points: &[Vec3]) -> Option<Closest> {
        let mut best = f64::INFINITY;
        let mut arg = None;
        for (i, p) in points.iter().enumerate() {
            if let Some(d) = self.closest_squared(p, best) {
                best = d;
                arg = Some(i);
            }
        }
        // Ties keep the earliest point.
        arg.map(|point_index| Closest {
            distance: best.sqrt(),
            point_index,
        })
    }
}

/// Result of a point-set distance query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Closest {
    pub distance: f64,
    pub point_index: usize,
}

/// Exact minimum Euclidean distance from any of `points` to `mesh`.
pub fn min_distance_points_to_mesh(
    points: &PointCloud3,
    mesh: &TriangleMesh,
) -> Result<Closest, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyInput("query points"));
    }
    if mesh.is_empty() {
        return Err(GeometryError::EmptyInput("mesh"));
    }
    Ok(DistanceTree::from_mesh(mesh)
        .closest_to_points(&points.points)
        .expect("non-empty inputs always produce a minimum"))
}

/// Exact minimum distance between two point sets.
pub fn min_distance_points_to_points(
    points: &PointCloud3,
    targets: &PointCloud3,
) -> Result<Closest, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyInput("query points"));
    }
    if targets.is_empty() {
        return Err(GeometryError::EmptyInput("target points"));
    }
    Ok(DistanceTree::from_points(&targets.points)
        .closest_to_points(&points.points)
        .expect("non-empty inputs always produce a minimum"))
}

/// Closest point on a triangle (Voronoi-region walk).
pub fn closest_point_on_triangle(p: &Vec3, t: &[Vec3; 3]) -> Vec3 {
    let [a, b, c] = *t;
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}
