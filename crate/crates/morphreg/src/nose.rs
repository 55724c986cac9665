//! Rotation-invariant nose tip detection and coarse pose normalization.
//!
//! Every vertex gets a local sphere fit over its radius-R neighborhood and
//! the statistic `f = e (r0 + |r - r0|)`, which bottoms out where the surface
//! is locally a sphere of radius close to `r0` — the nose tip. Pose is then
//! corrected by the Hotelling transform of the 50 mm ball around the tip.

use nalgebra::{Matrix3, Point3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{RigidTransform, TriangleMesh};
use crate::spatial::VertexKdTree;
use crate::sphere::{fit_sphere, SphereFit};

/// Per-vertex sphere-fit statistic field.
#[derive(Debug, Clone)]
pub struct RidField {
    /// `f = e (r0 + |r - r0|)`; `+inf` where the local fit failed.
    pub f: Vec<f64>,
    pub fits: Vec<Option<SphereFit>>,
    /// True where the fitted center lies behind the surface along the
    /// outward normal (locally convex toward the viewer).
    pub convex: Vec<bool>,
}

/// Compute the statistic for every vertex using its radius-R neighborhood.
///
/// Vertices with fewer than 4 neighbors or degenerate local fits get
/// `f = +inf` rather than failing the whole field.
pub fn rid_statistic(mesh: &TriangleMesh, radius: f64, r0: f64) -> Result<RidField> {
    if mesh.vertices.is_empty() {
        return Err(Error::InvalidMesh("rid statistic on empty mesh".into()));
    }
    if radius <= r0 {
        return Err(Error::InvalidParameter(format!(
            "neighborhood radius {radius} must exceed r0 = {r0}"
        )));
    }
    let tree = VertexKdTree::build(&mesh.vertices);
    let normals = mesh.vertex_normals();

    let results: Vec<(f64, Option<SphereFit>, bool)> = (0..mesh.vertices.len())
        .into_par_iter()
        .map(|i| {
            let neighbors = tree.radius_search(&mesh.vertices[i], radius);
            if neighbors.len() < 4 {
                return (f64::INFINITY, None, false);
            }
            let pts: Vec<Point3<f64>> = neighbors.iter().map(|&j| mesh.vertices[j]).collect();
            match fit_sphere(&pts) {
                Ok(fit) => {
                    let f = fit.residual * (r0 + (fit.radius - r0).abs());
                    let to_center = fit.center - mesh.vertices[i];
                    let convex = to_center.dot(&normals[i]) < 0.0;
                    (f, Some(fit), convex)
                }
                Err(_) => (f64::INFINITY, None, false),
            }
        })
        .collect();

    let mut field = RidField {
        f: Vec::with_capacity(results.len()),
        fits: Vec::with_capacity(results.len()),
        convex: Vec::with_capacity(results.len()),
    };
    for (f, fit, convex) in results {
        field.f.push(f);
        field.fits.push(fit);
        field.convex.push(convex);
    }
    Ok(field)
}

/// The convex vertex with globally minimal `f`; ties break to the lowest
/// vertex index.
pub fn locate_nose_tip(field: &RidField) -> Result<usize> {
    let mut best: Option<(f64, usize)> = None;
    for i in 0..field.f.len() {
        if !field.convex[i] || !field.f[i].is_finite() {
            continue;
        }
        match best {
            Some((bf, _)) if field.f[i] >= bf => {}
            _ => best = Some((field.f[i], i)),
        }
    }
    best.map(|(_, i)| i).ok_or_else(|| {
        Error::DetectionFailure("no convex vertex with a finite f value".into())
    })
}

/// Hotelling pose normalization around a located nose tip.
///
/// Principal axes of the vertex cloud within `region_mm` of the tip become
/// the new frame: largest variance -> y, second -> x, smallest -> z. The tip
/// moves to the origin. Axis signs are disambiguated so +z keeps pointing
/// toward the original viewer and +y stays up.
pub fn pose_normalize(
    mesh: &TriangleMesh,
    nose_tip: usize,
    region_mm: f64,
) -> Result<(TriangleMesh, RigidTransform)> {
    let tip = *mesh
        .vertices
        .get(nose_tip)
        .ok_or_else(|| Error::InvalidParameter(format!("nose tip index {nose_tip} out of range")))?;
    let tree = VertexKdTree::build(&mesh.vertices);
    let ball = tree.radius_search(&tip, region_mm);
    if ball.len() < 4 {
        return Err(Error::PoseFailure(format!(
            "only {} vertices within {region_mm} mm of the nose tip",
            ball.len()
        )));
    }

    let mean = ball
        .iter()
        .fold(Vector3::zeros(), |acc, &i| acc + mesh.vertices[i].coords)
        / ball.len() as f64;
    let mut cov = Matrix3::<f64>::zeros();
    for &i in &ball {
        let d = mesh.vertices[i].coords - mean;
        cov += d * d.transpose();
    }
    cov /= ball.len() as f64;

    let eig = nalgebra::SymmetricEigen::new(cov);
    // Sort axes by descending eigenvalue.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mut y_axis: Vector3<f64> = eig.eigenvectors.column(order[0]).into();
    let mut z_axis: Vector3<f64> = eig.eigenvectors.column(order[2]).into();

    // Keep +y up and +z toward the viewer relative to the input frame.
    if y_axis.dot(&Vector3::y()) < 0.0 {
        y_axis = -y_axis;
    }
    if z_axis.dot(&Vector3::z()) < 0.0 {
        z_axis = -z_axis;
    }
    let x_axis = y_axis.cross(&z_axis);

    // Rows of the rotation are the new axes: p' = R (p - tip).
    let rotation = Matrix3::from_rows(&[
        x_axis.transpose(),
        y_axis.transpose(),
        z_axis.transpose(),
    ]);
    let transform = RigidTransform::new(rotation, -(rotation * tip.coords))?;
    Ok((mesh.transformed(&transform), transform))
}
