//! Spatial acceleration structures: a kd-tree over vertices for radius
//! queries and an AABB tree over triangles for closest-point-on-surface
//! queries. Both are built once and then read-only, so they can be shared
//! across threads. The correctness contract for each query is the brute-force
//! result; the trees are purely an optimization.

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// kd-tree over a point set, splitting on the widest axis at the median.
pub struct VertexKdTree {
    points: Vec<Point3<f64>>,
    nodes: Vec<KdNode>,
    /// Point indices, permuted so each leaf owns a contiguous slice.
    order: Vec<usize>,
}

enum KdNode {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        left: usize,
        right: usize,
        lo: Point3<f64>,
        hi: Point3<f64>,
    },
}

const KD_LEAF_SIZE: usize = 16;

impl VertexKdTree {
    pub fn build(points: &[Point3<f64>]) -> VertexKdTree {
        let mut tree = VertexKdTree {
            points: points.to_vec(),
            nodes: Vec::new(),
            order: (0..points.len()).collect(),
        };
        if !points.is_empty() {
            let n = points.len();
            tree.build_node(0, n);
        }
        tree
    }

    fn bounds(&self, start: usize, end: usize) -> (Point3<f64>, Point3<f64>) {
        let mut lo = self.points[self.order[start]];
        let mut hi = lo;
        for &i in &self.order[start..end] {
            let p = self.points[i];
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        (lo, hi)
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let idx = self.nodes.len();
        if end - start <= KD_LEAF_SIZE {
            self.nodes.push(KdNode::Leaf { start, end });
            return idx;
        }
        let (lo, hi) = self.bounds(start, end);
        let extent = hi - lo;
        let axis = if extent.x >= extent.y && extent.x >= extent.z {
            0
        } else if extent.y >= extent.z {
            1
        } else {
            2
        };
        let mid = (start + end) / 2;
        let points = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a][axis].partial_cmp(&points[b][axis]).unwrap()
        });
        // Placeholder, patched after children are built.
        self.nodes.push(KdNode::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[idx] = KdNode::Split {
            left,
            right,
            lo,
            hi,
        };
        idx
    }

    /// Indices of all points with Euclidean distance <= radius from center,
    /// in ascending index order.
    pub fn radius_search(&self, center: &Point3<f64>, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if self.points.is_empty() {
            return out;
        }
        let r2 = radius * radius;
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            match &self.nodes[node] {
                KdNode::Leaf { start, end } => {
                    for &i in &self.order[*start..*end] {
                        if (self.points[i] - center).norm_squared() <= r2 {
                            out.push(i);
                        }
                    }
                }
                KdNode::Split {
                    left, right, lo, hi, ..
                } => {
                    if aabb_distance_squared(center, lo, hi) <= r2 {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn aabb_distance_squared(p: &Point3<f64>, lo: &Point3<f64>, hi: &Point3<f64>) -> f64 {
    let mut d2 = 0.0;
    for a in 0..3 {
        let d = if p[a] < lo[a] {
            lo[a] - p[a]
        } else if p[a] > hi[a] {
            p[a] - hi[a]
        } else {
            0.0
        };
        d2 += d * d;
    }
    d2
}

/// Closest point on triangle (a, b, c) to p. Standard region classification
/// over the barycentric parameterization.
pub fn closest_point_on_triangle(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> Point3<f64> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let denom = d1 - d3;
        let v = if denom.abs() > 0.0 { d1 / denom } else { 0.0 };
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let denom = d2 - d6;
        let w = if denom.abs() > 0.0 { d2 / denom } else { 0.0 };
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let denom = (d4 - d3) + (d5 - d6);
        let w = if denom.abs() > 0.0 { (d4 - d3) / denom } else { 0.0 };
        return b + (c - b) * w;
    }
    let denom = va + vb + vc;
    if denom.abs() == 0.0 {
        // Degenerate triangle; fall back to the nearest edge.
        let q1 = closest_point_on_segment(p, a, b);
        let q2 = closest_point_on_segment(p, a, c);
        return if (p - q1).norm_squared() <= (p - q2).norm_squared() {
            q1
        } else {
            q2
        };
    }
    let v = vb / denom;
    let w = vc / denom;
    a + ab * v + ac * w
}

fn closest_point_on_segment(p: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>) -> Point3<f64> {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// Barycentric coordinates of a point assumed on (or near) the triangle plane.
pub fn barycentric_coords(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> [f64; 3] {
    let v0 = b - a;
    let v1 = c - a;
    let v2 = p - a;
    let d00 = v0.dot(&v0);
    let d01 = v0.dot(&v1);
    let d11 = v1.dot(&v1);
    let d20 = v2.dot(&v0);
    let d21 = v2.dot(&v1);
    let denom = d00 * d11 - d01 * d01;
    if denom.abs() < 1e-300 {
        return [1.0, 0.0, 0.0];
    }
    let v = (d11 * d20 - d01 * d21) / denom;
    let w = (d00 * d21 - d01 * d20) / denom;
    [1.0 - v - w, v, w]
}

/// AABB tree over mesh triangles.
pub struct TriangleBvh {
    tris: Vec<[Point3<f64>; 3]>,
    nodes: Vec<BvhNode>,
    order: Vec<usize>,
}

struct BvhNode {
    lo: Point3<f64>,
    hi: Point3<f64>,
    // Leaf when left == usize::MAX; then (right, extra) hold the slice range.
    left: usize,
    right: usize,
    start: usize,
    end: usize,
}

const BVH_LEAF_SIZE: usize = 8;

impl TriangleBvh {
    pub fn build(mesh: &TriangleMesh) -> Result<TriangleBvh> {
        if mesh.triangles.is_empty() {
            return Err(Error::InvalidMesh(
                "closest-point query requires at least one triangle".into(),
            ));
        }
        let tris: Vec<[Point3<f64>; 3]> = (0..mesh.triangles.len())
            .map(|t| mesh.triangle_corners(t))
            .collect();
        let centroids: Vec<Point3<f64>> = tris
            .iter()
            .map(|t| Point3::from((t[0].coords + t[1].coords + t[2].coords) / 3.0))
            .collect();
        let mut bvh = TriangleBvh {
            order: (0..tris.len()).collect(),
            tris,
            nodes: Vec::new(),
        };
        let n = bvh.tris.len();
        bvh.build_node(0, n, &centroids);
        Ok(bvh)
    }

    fn slice_bounds(&self, start: usize, end: usize) -> (Point3<f64>, Point3<f64>) {
        let mut lo = self.tris[self.order[start]][0];
        let mut hi = lo;
        for &t in &self.order[start..end] {
            for corner in &self.tris[t] {
                for a in 0..3 {
                    lo[a] = lo[a].min(corner[a]);
                    hi[a] = hi[a].max(corner[a]);
                }
            }
        }
        (lo, hi)
    }

    fn build_node(&mut self, start: usize, end: usize, centroids: &[Point3<f64>]) -> usize {
        let idx = self.nodes.len();
        let (lo, hi) = self.slice_bounds(start, end);
        if end - start <= BVH_LEAF_SIZE {
            self.nodes.push(BvhNode {
                lo,
                hi,
                left: usize::MAX,
                right: 0,
                start,
                end,
            });
            return idx;
        }
        let extent = hi - lo;
        let axis = if extent.x >= extent.y && extent.x >= extent.z {
            0
        } else if extent.y >= extent.z {
            1
        } else {
            2
        };
        let mid = (start + end) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            centroids[a][axis].partial_cmp(&centroids[b][axis]).unwrap()
        });
        self.nodes.push(BvhNode {
            lo,
            hi,
            left: 0,
            right: 0,
            start,
            end,
        });
        let left = self.build_node(start, mid, centroids);
        let right = self.build_node(mid, end, centroids);
        self.nodes[idx].left = left;
        self.nodes[idx].right = right;
        idx
    }

    /// Closest point on the mesh surface to the query, with the index of the
    /// triangle that realizes it. Ties resolve to the lowest triangle index.
    pub fn closest_point(&self, query: &Point3<f64>) -> (Point3<f64>, usize) {
        let mut best_d2 = f64::INFINITY;
        let mut best_point = self.tris[0][0];
        let mut best_tri = usize::MAX;
        // Branch and bound over the tree, nearest child first.
        let mut stack: Vec<usize> = vec![0];
        while let Some(node_idx) = stack.pop() {
            let node = &self.nodes[node_idx];
            if aabb_distance_squared(query, &node.lo, &node.hi) > best_d2 {
                continue;
            }
            if node.left == usize::MAX {
                for &t in &self.order[node.start..node.end] {
                    let tri = &self.tris[t];
                    let p = closest_point_on_triangle(query, &tri[0], &tri[1], &tri[2]);
                    let d2 = (p - query).norm_squared();
                    if d2 < best_d2 || (d2 == best_d2 && t < best_tri) {
                        best_d2 = d2;
                        best_point = p;
                        best_tri = t;
                    }
                }
            } else {
                let dl = aabb_distance_squared(query, &self.nodes[node.left].lo, &self.nodes[node.left].hi);
                let dr = aabb_distance_squared(query, &self.nodes[node.right].lo, &self.nodes[node.right].hi);
                if dl <= dr {
                    stack.push(node.right);
                    stack.push(node.left);
                } else {
                    stack.push(node.left);
                    stack.push(node.right);
                }
            }
        }
        (best_point, best_tri)
    }
}

/// Brute-force radius search; the oracle for `VertexKdTree::radius_search`.
pub fn radius_search_brute(points: &[Point3<f64>], center: &Point3<f64>, radius: f64) -> Vec<usize> {
    let r2 = radius * radius;
    (0..points.len())
        .filter(|&i| (points[i] - center).norm_squared() <= r2)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Point3;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point3<f64>> {
        (0..n)
            .map(|_| {
                Point3::new(
                    rng.gen_range(-50.0..50.0),
                    rng.gen_range(-50.0..50.0),
                    rng.gen_range(-50.0..50.0),
                )
            })
            .collect()
    }

    #[test]
    fn radius_search_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let points = random_points(&mut rng, 500);
        let tree = VertexKdTree::build(&points);
        for _ in 0..50 {
            let c = Point3::new(
                rng.gen_range(-60.0..60.0),
                rng.gen_range(-60.0..60.0),
                rng.gen_range(-60.0..60.0),
            );
            let r = rng.gen_range(0.5..40.0);
            assert_eq!(tree.radius_search(&c, r), radius_search_brute(&points, &c, r));
        }
    }

    #[test]
    fn radius_search_edge_cases() {
        let points = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
        ];
        let tree = VertexKdTree::build(&points);
        // Unit-spaced line, R = 1.5 at v0.
        assert_eq!(tree.radius_search(&points[0], 1.5), vec![0, 1]);
        // Tiny radius at a vertex position.
        assert_eq!(tree.radius_search(&points[1], 1e-12), vec![1]);
        // Radius beyond the diameter captures everything.
        assert_eq!(tree.radius_search(&points[0], 100.0), vec![0, 1, 2]);
    }

    #[test]
    fn closest_point_on_vertex_and_projection() {
        let mesh = TriangleMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(3.0, 0.0, 0.0),
                Point3::new(0.0, 3.0, 0.0),
            ],
            vec![[0, 1, 2]],
            None,
        )
        .unwrap();
        let bvh = TriangleBvh::build(&mesh).unwrap();
        let (p, t) = bvh.closest_point(&Point3::new(3.0, 0.0, 0.0));
        assert_eq!(t, 0);
        assert!((p - Point3::new(3.0, 0.0, 0.0)).norm() < 1e-12);
        // Above the centroid: orthogonal projection to the plane.
        let (p, _) = bvh.closest_point(&Point3::new(1.0, 1.0, 5.0));
        assert!((p - Point3::new(1.0, 1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn closest_point_matches_brute_force_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // A random triangle soup.
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for i in 0..120 {
            let base = Point3::new(
                rng.gen_range(-30.0..30.0),
                rng.gen_range(-30.0..30.0),
                rng.gen_range(-30.0..30.0),
            );
            for _ in 0..3 {
                vertices.push(Point3::from(
                    base.coords
                        + nalgebra::Vector3::new(
                            rng.gen_range(-4.0..4.0),
                            rng.gen_range(-4.0..4.0),
                            rng.gen_range(-4.0..4.0),
                        ),
                ));
            }
            triangles.push([3 * i, 3 * i + 1, 3 * i + 2]);
        }
        let mesh = TriangleMesh::new(vertices, triangles, None).unwrap();
        let bvh = TriangleBvh::build(&mesh).unwrap();
        for _ in 0..500 {
            let q = Point3::new(
                rng.gen_range(-40.0..40.0),
                rng.gen_range(-40.0..40.0),
                rng.gen_range(-40.0..40.0),
            );
            let (p, t) = bvh.closest_point(&q);
            // Brute force over all triangles.
            let mut best = f64::INFINITY;
            for ti in 0..mesh.triangles.len() {
                let [a, b, c] = mesh.triangle_corners(ti);
                let cp = closest_point_on_triangle(&q, &a, &b, &c);
                best = best.min((cp - q).norm());
            }
            assert!(((p - q).norm() - best).abs() < 1e-9);
            // The returned point lies on the named triangle.
            let [a, b, c] = mesh.triangle_corners(t);
            let bc = barycentric_coords(&p, &a, &b, &c);
            for w in bc {
                assert!(w > -1e-9 && w < 1.0 + 1e-9);
            }
        }
    }
}
