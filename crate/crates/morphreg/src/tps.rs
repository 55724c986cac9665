//! Thin-plate-spline warping and the forward-only dense registration
//! protocol: the remeshed reference is TPS-warped onto each sample using the
//! named landmark pairs as fiducials, and every warped vertex is projected
//! to its closest point on the sample surface. All samples therefore share
//! the reference triangulation, giving vertex-level correspondence without
//! ever inverting the spline.
//!
//! Kernel: φ(r) = r, the biharmonic fundamental solution in three
//! dimensions. Interpolation is exact (no regularization) unless a ridge
//! term is requested.

use nalgebra::{DMatrix, Matrix3, Point3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::landmarks::LandmarkSet;
use crate::mesh::TriangleMesh;
use crate::spatial::{barycentric_coords, TriangleBvh};

/// A solved 3D thin-plate spline f(p) = A·p + t + Σᵢ wᵢ‖p − sᵢ‖.
#[derive(Debug, Clone, PartialEq)]
pub struct TpsTransform {
    pub source: Vec<Point3<f64>>,
    pub affine: Matrix3<f64>,
    pub translation: Vector3<f64>,
    pub weights: Vec<Vector3<f64>>,
}

/// Solve the exact-interpolation TPS from source to target fiducials.
pub fn solve_tps(source: &[Point3<f64>], target: &[Point3<f64>]) -> Result<TpsTransform> {
    solve_tps_regularized(source, target, 0.0)
}

/// TPS solve with an optional ridge term added to the kernel diagonal for
/// near-degenerate fiducial sets (0 = exact interpolation).
pub fn solve_tps_regularized(
    source: &[Point3<f64>],
    target: &[Point3<f64>],
    ridge: f64,
) -> Result<TpsTransform> {
    let n = source.len();
    if n != target.len() {
        return Err(Error::InvalidParameter(format!(
            "source has {n} landmarks, target has {}",
            target.len()
        )));
    }
    if n < 4 {
        return Err(Error::InsufficientData(format!(
            "TPS needs at least 4 fiducial pairs, got {n}"
        )));
    }
    let dim = n + 4;
    let mut system = DMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            system[(i, j)] = (source[i] - source[j]).norm();
        }
        system[(i, i)] += ridge;
        system[(i, n)] = 1.0;
        system[(i, n + 1)] = source[i].x;
        system[(i, n + 2)] = source[i].y;
        system[(i, n + 3)] = source[i].z;
        system[(n, i)] = 1.0;
        system[(n + 1, i)] = source[i].x;
        system[(n + 2, i)] = source[i].y;
        system[(n + 3, i)] = source[i].z;
    }
    let mut rhs = DMatrix::zeros(dim, 3);
    for i in 0..n {
        rhs[(i, 0)] = target[i].x;
        rhs[(i, 1)] = target[i].y;
        rhs[(i, 2)] = target[i].z;
    }
    let lu = system.full_piv_lu();
    let solution = lu.solve(&rhs).ok_or_else(|| {
        Error::SingularSystem(
            "TPS system is singular (coincident or coplanar fiducials)".into(),
        )
    })?;

    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        weights.push(Vector3::new(solution[(i, 0)], solution[(i, 1)], solution[(i, 2)]));
    }
    let translation = Vector3::new(solution[(n, 0)], solution[(n, 1)], solution[(n, 2)]);
    // Affine rows are the per-output-coordinate linear coefficients.
    let affine = Matrix3::new(
        solution[(n + 1, 0)], solution[(n + 2, 0)], solution[(n + 3, 0)],
        solution[(n + 1, 1)], solution[(n + 2, 1)], solution[(n + 3, 1)],
        solution[(n + 1, 2)], solution[(n + 2, 2)], solution[(n + 3, 2)],
    );
    Ok(TpsTransform {
        source: source.to_vec(),
        affine,
        translation,
        weights,
    })
}

impl TpsTransform {
    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        let mut out = self.affine * p.coords + self.translation;
        for (s, w) in self.source.iter().zip(&self.weights) {
            out += w * (p - s).norm();
        }
        Point3::from(out)
    }

    pub fn apply_all(&self, points: &[Point3<f64>]) -> Vec<Point3<f64>> {
        points.par_iter().map(|p| self.apply(p)).collect()
    }

    /// Worst violation of the side conditions Σw = 0 and Σw·sᵢ = 0.
    pub fn side_condition_residual(&self) -> f64 {
        let mut sum = Vector3::zeros();
        let mut moment = [Vector3::zeros(); 3];
        for (s, w) in self.source.iter().zip(&self.weights) {
            sum += w;
            moment[0] += w * s.x;
            moment[1] += w * s.y;
            moment[2] += w * s.z;
        }
        moment
            .iter()
            .fold(sum.amax(), |acc, m| acc.max(m.amax()))
    }
}

/// Remeshed samples in dense correspondence with a common reference.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCorrespondence {
    pub reference: TriangleMesh,
    pub samples: Vec<TriangleMesh>,
}

/// Register one sample: warp the reference by the TPS defined by the shared
/// named landmarks, project every warped vertex onto the sample surface, and
/// carry sample color along barycentrically. The output reuses the
/// reference triangulation.
pub fn register_surface(
    reference: &TriangleMesh,
    ref_landmarks: &LandmarkSet,
    sample: &TriangleMesh,
    sample_landmarks: &LandmarkSet,
) -> Result<TriangleMesh> {
    let mut source = Vec::new();
    let mut target = Vec::new();
    for (name, p) in ref_landmarks.iter() {
        if let Some(q) = sample_landmarks.get(name) {
            source.push(p);
            target.push(q);
        }
    }
    if source.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "only {} landmarks shared between reference and sample",
            source.len()
        )));
    }
    let tps = solve_tps(&source, &target)?;
    let bvh = TriangleBvh::build(sample)?;
    let projected: Vec<(Point3<f64>, usize)> = reference
        .vertices
        .par_iter()
        .map(|v| bvh.closest_point(&tps.apply(v)))
        .collect();

    let colors = sample.colors.as_ref().map(|colors| {
        projected
            .iter()
            .map(|(p, t)| {
                let [ia, ib, ic] = sample.triangles[*t];
                let [a, b, c] = sample.triangle_corners(*t);
                let w = barycentric_coords(p, &a, &b, &c);
                [
                    w[0] * colors[ia][0] + w[1] * colors[ib][0] + w[2] * colors[ic][0],
                    w[0] * colors[ia][1] + w[1] * colors[ib][1] + w[2] * colors[ic][1],
                    w[0] * colors[ia][2] + w[1] * colors[ib][2] + w[2] * colors[ic][2],
                ]
            })
            .collect()
    });
    TriangleMesh::new(
        projected.into_iter().map(|(p, _)| p).collect(),
        reference.triangles.clone(),
        colors,
    )
}

/// Register a whole corpus against one reference. Per-sample failures are
/// collected (by corpus index) without aborting the batch; successful
/// results keep corpus order.
pub fn build_dense_correspondence(
    reference: &TriangleMesh,
    ref_landmarks: &LandmarkSet,
    corpus: &[(TriangleMesh, LandmarkSet)],
) -> (DenseCorrespondence, Vec<(usize, Error)>) {
    let results: Vec<Result<TriangleMesh>> = corpus
        .par_iter()
        .map(|(mesh, landmarks)| register_surface(reference, ref_landmarks, mesh, landmarks))
        .collect();
    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(m) => samples.push(m),
            Err(e) => failures.push((i, e)),
        }
    }
    (
        DenseCorrespondence {
            reference: reference.clone(),
            samples,
        },
        failures,
    )
}
