//! Generalized Procrustes alignment of corresponded meshes and average-face
//! computation with averaged texture.
//!
//! Alignment is rigid only (rotation + translation, determinant +1): facial
//! size differences are biologically meaningful, so scale normalization is
//! opt-in.

use nalgebra::{Matrix3, Point3, Vector3};

use crate::error::{Error, Result};
use crate::mesh::{RigidTransform, TriangleMesh};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct GpaParams {
    /// Stop when the RMS per-vertex change of the mean drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Normalize each shape to unit centroid size before aligning.
    pub normalize_scale: bool,
}

impl Default for GpaParams {
    fn default() -> Self {
        GpaParams {
            tolerance: 1e-7,
            max_iterations: 100,
            normalize_scale: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpaResult {
    pub aligned: Vec<TriangleMesh>,
    /// Maps each input mesh onto its aligned copy.
    pub transforms: Vec<RigidTransform>,
    /// Vertex-wise mean of the aligned shapes.
    pub mean: Vec<Point3<f64>>,
    pub iterations: usize,
}

/// Rotation-only orthogonal Procrustes (Kabsch) aligning `from` to `to`,
/// both assumed centered; reflections excluded.
fn kabsch_rotation(from: &[Vector3<f64>], to: &[Vector3<f64>]) -> Result<Matrix3<f64>> {
    let mut h = Matrix3::zeros();
    for (f, t) in from.iter().zip(to) {
        h += t * f.transpose();
    }
    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut d = Matrix3::identity();
    let det = (u * v_t).determinant();
    if !det.is_finite() {
        return Err(Error::SingularSystem("degenerate cross-covariance in Procrustes".into()));
    }
    d[(2, 2)] = det.signum();
    Ok(u * d * v_t)
}

/// Iteratively align corresponded meshes to their evolving mean.
pub fn gpa_align(meshes: &[TriangleMesh], params: &GpaParams) -> Result<GpaResult> {
    if meshes.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "GPA needs at least 2 shapes, got {}",
            meshes.len()
        )));
    }
    let n = meshes[0].vertex_count();
    for (i, m) in meshes.iter().enumerate() {
        if m.vertex_count() != n {
            return Err(Error::InvalidMesh(format!(
                "shape {i} has {} vertices, expected {n}",
                m.vertex_count()
            )));
        }
    }

    // Center (and optionally scale) every shape once up front.
    let mut shapes: Vec<Vec<Vector3<f64>>> = Vec::with_capacity(meshes.len());
    let mut centroids: Vec<Vector3<f64>> = Vec::with_capacity(meshes.len());
    let mut scales: Vec<f64> = Vec::with_capacity(meshes.len());
    for m in meshes {
        let centroid = m.vertices.iter().map(|p| p.coords).sum::<Vector3<f64>>() / n as f64;
        let mut pts: Vec<Vector3<f64>> = m.vertices.iter().map(|p| p.coords - centroid).collect();
        let mut scale = 1.0;
        if params.normalize_scale {
            let size = pts.iter().map(|p| p.norm_squared()).sum::<f64>().sqrt();
            if size < 1e-12 {
                return Err(Error::SingularSystem("degenerate shape with zero size".into()));
            }
            scale = 1.0 / size;
            for p in &mut pts {
                *p *= scale;
            }
        }
        centroids.push(centroid);
        scales.push(scale);
        shapes.push(pts);
    }

    let mut rotations: Vec<Matrix3<f64>> = vec![Matrix3::identity(); meshes.len()];
    let mut mean: Vec<Vector3<f64>> = shapes[0].clone();
    let mut iterations = 0;
    for iter in 1..=params.max_iterations {
        iterations = iter;
        for (rot, shape) in rotations.iter_mut().zip(&shapes) {
            *rot = kabsch_rotation(shape, &mean)?;
        }
        let mut new_mean = vec![Vector3::zeros(); n];
        for (rot, shape) in rotations.iter().zip(&shapes) {
            for (acc, p) in new_mean.iter_mut().zip(shape) {
                *acc += rot * p;
            }
        }
        for acc in &mut new_mean {
            *acc /= meshes.len() as f64;
        }
        let rms = (mean
            .iter()
            .zip(&new_mean)
            .map(|(a, b)| (a - b).norm_squared())
            .sum::<f64>()
            / n as f64)
            .sqrt();
        mean = new_mean;
        if rms < params.tolerance {
            break;
        }
    }

    let mut aligned = Vec::with_capacity(meshes.len());
    let mut transforms = Vec::with_capacity(meshes.len());
    for (i, m) in meshes.iter().enumerate() {
        // p ↦ R·s·(p − c). The reported transform is the rigid part: exact
        // when scale normalization is off (s = 1).
        let vertices: Vec<Point3<f64>> = m
            .vertices
            .iter()
            .map(|p| Point3::from(rotations[i] * ((p.coords - centroids[i]) * scales[i])))
            .collect();
        aligned.push(TriangleMesh::new(vertices, m.triangles.clone(), m.colors.clone())?);
        transforms.push(RigidTransform::new(
            rotations[i],
            -(rotations[i] * centroids[i]),
        )?);
    }
    Ok(GpaResult {
        aligned,
        transforms,
        mean: mean.iter().map(|v| Point3::from(*v)).collect(),
        iterations,
    })
}

/// Vertex-wise and channel-wise arithmetic mean of corresponded meshes.
pub fn average_face(meshes: &[TriangleMesh]) -> Result<TriangleMesh> {
    let first = meshes
        .first()
        .ok_or_else(|| Error::InsufficientData("cannot average an empty list".into()))?;
    let n = first.vertex_count();
    for (i, m) in meshes.iter().enumerate() {
        if m.vertex_count() != n || m.triangles != first.triangles {
            return Err(Error::InvalidMesh(format!(
                "mesh {i} does not share the common triangulation"
            )));
        }
    }
    let mut vertices = vec![Vector3::zeros(); n];
    for m in meshes {
        for (acc, p) in vertices.iter_mut().zip(&m.vertices) {
            *acc += p.coords;
        }
    }
    let count = meshes.len() as f64;
    let vertices: Vec<Point3<f64>> = vertices.into_iter().map(|v| Point3::from(v / count)).collect();

    let colors = if meshes.iter().all(|m| m.colors.is_some()) {
        let mut acc = vec![[0.0f64; 3]; n];
        for m in meshes {
            for (a, c) in acc.iter_mut().zip(m.colors.as_ref().unwrap()) {
                for ch in 0..3 {
                    a[ch] += c[ch];
                }
            }
        }
        Some(
            acc.into_iter()
                .map(|c| [c[0] / count, c[1] / count, c[2] / count])
                .collect(),
        )
    } else {
        None
    };
    TriangleMesh::new(vertices, first.triangles.clone(), colors)
}
