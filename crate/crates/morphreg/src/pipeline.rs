//! End-to-end orchestration: model training, 17-landmark annotation of a raw
//! mesh, corpus registration against a remeshed reference, averaging, and
//! accuracy reporting.

use nalgebra::{Point3, Vector3};
use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::flatten::{fill_holes_bicubic, median_filter_3x3, project_to_grid, Grid2D};
use crate::gpa::{average_face, gpa_align, GpaResult};
use crate::heuristic::{fine_pose_from_six, locate_heuristic_landmarks};
use crate::landmarks::{LandmarkName, LandmarkSet};
use crate::mesh::{RigidTransform, TriangleMesh};
use crate::nose::{locate_nose_tip, pose_normalize, rid_statistic};
use crate::pca::{locate_salient_landmarks, train_landmark_model, LandmarkModel};
use crate::spherical::{remesh_spherical, RemeshReport};
use crate::tps::build_dense_correspondence;

/// Project, despeckle, and hole-fill a pose-normalized mesh into a 2.5D grid.
fn flatten_mesh(mesh: &TriangleMesh, spacing: f64) -> Result<Grid2D> {
    Ok(fill_holes_bicubic(&median_filter_3x3(&project_to_grid(mesh, spacing)?)))
}

/// Detect the nose tip and move the mesh into the coarse principal-axes
/// frame (tip at origin, face toward +z, up along +y).
pub fn coarse_normalize(
    mesh: &TriangleMesh,
    config: &Config,
) -> Result<(TriangleMesh, RigidTransform, usize)> {
    let field = rid_statistic(mesh, config.rid.ball_mm, config.rid.r0_mm)?;
    let tip = locate_nose_tip(&field)?;
    let (normalized, transform) = pose_normalize(mesh, tip, config.pose.region_mm)?;
    Ok((normalized, transform, tip))
}

/// Train the six salient-landmark detectors from meshes with ground-truth
/// (or manually placed) landmark sets given in each mesh's own frame.
///
/// Each face goes through the same coarse normalization the detector will
/// see at annotation time; its truth landmarks ride along into that frame.
pub fn train_models(
    corpus: &[(TriangleMesh, LandmarkSet)],
    config: &Config,
) -> Result<Vec<LandmarkModel>> {
    if corpus.len() < config.pca.k + 1 {
        return Err(Error::InsufficientData(format!(
            "training {} eigenvectors needs at least {} faces, got {}",
            config.pca.k,
            config.pca.k + 1,
            corpus.len()
        )));
    }
    let mut grids: Vec<(Grid2D, LandmarkSet)> = Vec::with_capacity(corpus.len());
    for (mesh, truth) in corpus {
        let (normalized, transform, _) = coarse_normalize(mesh, config)?;
        let grid = flatten_mesh(&normalized, config.flatten.spacing_mm)?;
        grids.push((grid, truth.transformed(&transform)));
    }
    let mut models = Vec::with_capacity(LandmarkName::SALIENT.len());
    for name in LandmarkName::SALIENT {
        let samples: Vec<(&Grid2D, Point3<f64>)> = grids
            .iter()
            .filter_map(|(g, lms)| lms.get(name).map(|p| (g, p)))
            .collect();
        models.push(train_landmark_model(
            &samples,
            name,
            config.pca.patch_size_mm,
            config.pca.k,
            config.pca.zone_margin_mm,
        )?);
    }
    Ok(models)
}

/// Outcome of annotating one face.
#[derive(Debug, Clone)]
pub struct Annotation {
    /// Landmarks mapped back to the input mesh's own frame.
    pub landmarks: LandmarkSet,
    /// Heuristic landmarks that could not be localized, with reasons.
    pub failures: Vec<(LandmarkName, String)>,
    /// Maps the input mesh into the fine (symmetry-aligned) frame.
    pub fine_transform: RigidTransform,
}

/// Fully automatic 17-landmark annotation of a raw mesh.
pub fn annotate_face(
    mesh: &TriangleMesh,
    models: &[LandmarkModel],
    config: &Config,
) -> Result<Annotation> {
    let (coarse_mesh, coarse_t, tip_idx) = coarse_normalize(mesh, config)?;
    let coarse_grid = flatten_mesh(&coarse_mesh, config.flatten.spacing_mm)?;
    let six_coarse = locate_salient_landmarks(&coarse_grid, models)?;

    let tip_coarse = coarse_mesh.vertices[tip_idx];
    let (fine_mesh, fine_rel) = fine_pose_from_six(&coarse_mesh, &six_coarse, &tip_coarse)?;
    let fine_grid = flatten_mesh(&fine_mesh, config.flatten.spacing_mm)?;
    let six_fine = six_coarse.transformed(&fine_rel);
    let tip_fine = fine_rel.apply(&tip_coarse);

    let heur = locate_heuristic_landmarks(
        &fine_mesh,
        &fine_grid,
        &six_fine,
        &tip_fine,
        &config.heuristics,
    )?;

    let fine_transform = fine_rel.compose(&coarse_t);
    let all_fine = six_fine.merged(&heur.landmarks);
    Ok(Annotation {
        landmarks: all_fine.transformed(&fine_transform.inverse()),
        failures: heur.failures,
        fine_transform,
    })
}

/// A reference surface resampled on the uniform spherical grid, ready for
/// corpus registration, expressed in its fine frame.
#[derive(Debug, Clone)]
pub struct Reference {
    pub mesh: TriangleMesh,
    pub landmarks: LandmarkSet,
    pub remesh_report: RemeshReport,
}

/// Remesh a face for use as the registration reference.
///
/// `landmarks` must be in the mesh's frame and include the nose tip. The
/// spherical grid is centered `remesh.center_z_mm` behind the tip; the
/// output stays in the input frame with landmarks carried over.
pub fn prepare_reference(
    mesh: &TriangleMesh,
    landmarks: &LandmarkSet,
    config: &Config,
) -> Result<Reference> {
    let tip = landmarks
        .get(LandmarkName::NoseTip)
        .ok_or_else(|| Error::InsufficientData("reference lacks a nose tip landmark".into()))?;
    let center = Vector3::new(tip.x, tip.y, tip.z + config.remesh.center_z_mm);
    let shift = RigidTransform::new(nalgebra::Matrix3::identity(), -center)?;
    let (remeshed, report) = remesh_spherical(&mesh.transformed(&shift), &config.remesh.params())?;
    Ok(Reference {
        mesh: remeshed.transformed(&shift.inverse()),
        landmarks: landmarks.clone(),
        remesh_report: report,
    })
}

/// Dense registration of a landmarked corpus against a prepared reference.
#[derive(Debug)]
pub struct Registration {
    pub reference: Reference,
    /// Corresponded samples sharing the reference triangulation, in corpus
    /// order with failed samples removed.
    pub samples: Vec<TriangleMesh>,
    /// Corpus indices that failed, with the error.
    pub failures: Vec<(usize, Error)>,
}

pub fn register_corpus(
    reference: Reference,
    corpus: &[(TriangleMesh, LandmarkSet)],
) -> Registration {
    let (correspondence, failures) =
        build_dense_correspondence(&reference.mesh, &reference.landmarks, corpus);
    Registration {
        reference,
        samples: correspondence.samples,
        failures,
    }
}

/// GPA-align a registration's samples and average them.
pub fn average_registration(
    registration: &Registration,
    config: &Config,
) -> Result<(TriangleMesh, GpaResult)> {
    let gpa = gpa_align(&registration.samples, &config.gpa)?;
    let average = average_face(&gpa.aligned)?;
    Ok((average, gpa))
}

/// Second registration pass: re-register the corpus against the first
/// pass's average face, transferring the reference landmarks through the
/// shared triangulation.
pub fn second_pass(
    registration: &Registration,
    average: &TriangleMesh,
    corpus: &[(TriangleMesh, LandmarkSet)],
) -> Result<Registration> {
    // A landmark at reference vertex v corresponds to vertex v of the
    // average, because every corresponded mesh shares the triangulation.
    let mut avg_landmarks = LandmarkSet::new();
    for (name, p) in registration.reference.landmarks.iter() {
        let v = registration
            .reference
            .mesh
            .vertices
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (*a - p).norm().total_cmp(&(*b - p).norm()))
            .map(|(i, _)| i)
            .ok_or_else(|| Error::InvalidMesh("empty reference mesh".into()))?;
        avg_landmarks.insert(name, average.vertices[v])?;
    }
    let reference = Reference {
        mesh: average.clone(),
        landmarks: avg_landmarks,
        remesh_report: registration.reference.remesh_report,
    };
    Ok(register_corpus(reference, corpus))
}

/// Per-landmark accuracy statistics over a corpus, in millimeters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandmarkErrorRow {
    pub landmark: String,
    /// Faces where both prediction and truth carry this landmark.
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub rms: f64,
}

/// Compare predicted landmark sets against ground truth, face by face.
pub fn evaluate_landmarks(
    pairs: &[(&LandmarkSet, &LandmarkSet)],
) -> Vec<LandmarkErrorRow> {
    LandmarkName::ALL
        .iter()
        .map(|&name| {
            let errors: Vec<f64> = pairs
                .iter()
                .filter_map(|(pred, truth)| {
                    Some((pred.get(name)? - truth.get(name)?).norm())
                })
                .collect();
            let count = errors.len();
            let (mean, sd, rms) = if count == 0 {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                let mean = errors.iter().sum::<f64>() / count as f64;
                let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / count as f64;
                let msq = errors.iter().map(|e| e * e).sum::<f64>() / count as f64;
                (mean, var.sqrt(), msq.sqrt())
            };
            LandmarkErrorRow {
                landmark: name.label().to_string(),
                count,
                mean,
                sd,
                rms,
            }
        })
        .collect()
}

/// Render an evaluation as an aligned text table.
pub fn format_error_table(rows: &[LandmarkErrorRow]) -> String {
    let width = rows
        .iter()
        .map(|r| r.landmark.len())
        .chain(std::iter::once("Landmark".len()))
        .max()
        .unwrap_or(8);
    let mut out = format!(
        "{:<width$}  {:>5}  {:>9}  {:>9}  {:>9}\n",
        "Landmark", "N", "Mean", "SD", "RMS"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<width$}  {:>5}  {:>9.3}  {:>9.3}  {:>9.3}\n",
            r.landmark, r.count, r.mean, r.sd, r.rms
        ));
    }
    out
}
