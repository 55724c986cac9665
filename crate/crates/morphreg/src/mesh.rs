//! Triangle mesh representation and rigid transforms.
//!
//! Coordinates are millimeters throughout. The viewing convention for a
//! pose-normalized face is +z toward the viewer, +y up, +x to the subject's
//! left.

use nalgebra::{Matrix3, Point3, Vector3};

use crate::error::{Error, Result};

/// An indexed triangle mesh with optional per-vertex RGB color.
///
/// Color channels are stored as floats in `[0, 255]` so that averaged
/// textures keep fractional values.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Point3<f64>>,
    pub triangles: Vec<[usize; 3]>,
    pub colors: Option<Vec<[f64; 3]>>,
}

impl TriangleMesh {
    pub fn new(
        vertices: Vec<Point3<f64>>,
        triangles: Vec<[usize; 3]>,
        colors: Option<Vec<[f64; 3]>>,
    ) -> Result<Self> {
        let mesh = TriangleMesh {
            vertices,
            triangles,
            colors,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Check the structural invariants: indices in range, no repeated index
    /// within a triangle, color count matching vertex count.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for (ti, t) in self.triangles.iter().enumerate() {
            for &v in t {
                if v >= n {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {ti} references vertex {v} but mesh has {n} vertices"
                    )));
                }
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::InvalidMesh(format!(
                    "triangle {ti} repeats a vertex index: {t:?}"
                )));
            }
        }
        if let Some(colors) = &self.colors {
            if colors.len() != n {
                return Err(Error::InvalidMesh(format!(
                    "color count {} does not match vertex count {n}",
                    colors.len()
                )));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_corners(&self, t: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Axis-aligned bounding box as (min, max). Errors on an empty mesh.
    pub fn bounding_box(&self) -> Result<(Point3<f64>, Point3<f64>)> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidMesh("empty mesh has no bounding box".into()));
        }
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            for i in 0..3 {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        Ok((lo, hi))
    }

    /// Area-weighted vertex normals. Vertices without incident triangles get
    /// a zero normal.
    pub fn vertex_normals(&self) -> Vec<Vector3<f64>> {
        let mut normals = vec![Vector3::zeros(); self.vertices.len()];
        for t in &self.triangles {
            let [a, b, c] = *t;
            let ab = self.vertices[b] - self.vertices[a];
            let ac = self.vertices[c] - self.vertices[a];
            // Cross product length is twice the triangle area, so this sum is
            // area weighted without an explicit normalization per face.
            let n = ab.cross(&ac);
            normals[a] += n;
            normals[b] += n;
            normals[c] += n;
        }
        for n in &mut normals {
            let len = n.norm();
            if len > 0.0 {
                *n /= len;
            }
        }
        normals
    }

    /// Apply a rigid transform to every vertex, returning a new mesh.
    pub fn transformed(&self, t: &RigidTransform) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|p| t.apply(p)).collect(),
            triangles: self.triangles.clone(),
            colors: self.colors.clone(),
        }
    }
}

/// A rotation plus translation, `p -> R p + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let t = RigidTransform {
            rotation,
            translation,
        };
        t.validate()?;
        Ok(t)
    }

    /// Orthonormality and determinant checks, both at 1e-9.
    pub fn validate(&self) -> Result<()> {
        let should_be_identity = self.rotation.transpose() * self.rotation;
        let dev = (should_be_identity - Matrix3::identity()).abs().max();
        if dev > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "rotation is not orthonormal (max deviation {dev:.3e})"
            )));
        }
        let det = self.rotation.determinant();
        if (det - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "rotation determinant {det} is not +1"
            )));
        }
        Ok(())
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    pub fn apply_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    pub fn inverse(&self) -> RigidTransform {
        let rt = self.rotation.transpose();
        RigidTransform {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }
}
