//! Statistical eigenspace detection of the six most salient landmarks
//! (inner/outer eye corners and lip corners) on flattened depth/gray grids.
//!
//! A patch is a 21×21 mm window whose per-cell depth (zero-mean, unit norm)
//! and gray intensity (unit norm) are interleaved into one vector of length
//! 2s². Per landmark, a PCA model over training patches keeps the top k
//! eigenvectors; detection scans a rectangular zone and picks the cell whose
//! patch minimizes reconstruction-error × Mahalanobis-distance, gated to
//! ±3√λ eigenspace coefficients.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector, Point3, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flatten::Grid2D;
use crate::landmarks::{LandmarkName, LandmarkSet};

/// Interleaved (depth, gray) patch vector of length 2s².
#[derive(Debug, Clone, PartialEq)]
pub struct PatchVector(pub DVector<f64>);

/// Extract the patch centered at cell (cx, cy); `None` when the window
/// leaves the grid, touches invalid cells, or has degenerate (constant)
/// depth or gray content.
pub fn extract_patch(grid: &Grid2D, cx: usize, cy: usize, s: usize) -> Option<PatchVector> {
    debug_assert!(s % 2 == 1, "patch size must be odd");
    let half = s / 2;
    if cx < half || cy < half || cx + half >= grid.nx || cy + half >= grid.ny {
        return None;
    }
    let mut z = Vec::with_capacity(s * s);
    let mut gray = Vec::with_capacity(s * s);
    for iy in cy - half..=cy + half {
        for ix in cx - half..=cx + half {
            if !grid.is_valid(ix, iy) {
                return None;
            }
            let k = grid.idx(ix, iy);
            z.push(grid.z[k]);
            gray.push(grid.gray[k]);
        }
    }
    let n = (s * s) as f64;
    let z_mean = z.iter().sum::<f64>() / n;
    for v in &mut z {
        *v -= z_mean;
    }
    let z_norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    let gray_norm = gray.iter().map(|v| v * v).sum::<f64>().sqrt();
    if z_norm < 1e-9 || gray_norm < 1e-9 {
        return None;
    }
    let mut values = DVector::zeros(2 * s * s);
    for i in 0..s * s {
        values[2 * i] = z[i] / z_norm;
        values[2 * i + 1] = gray[i] / gray_norm;
    }
    Some(PatchVector(values))
}

/// Axis-aligned search zone in world xy millimeters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneRect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

/// Trained eigenspace model for one landmark.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkModel {
    pub name: LandmarkName,
    /// Patch side length in cells (odd).
    pub patch_size: usize,
    pub k: usize,
    pub mean_patch: DVector<f64>,
    /// Descending, nonnegative.
    pub eigenvalues: Vec<f64>,
    /// 2s² × k, orthonormal columns.
    pub eigenvectors: DMatrix<f64>,
    pub zone: ZoneRect,
}

/// Score of one candidate patch against a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchScore {
    /// Squared reconstruction error ‖P − P′‖².
    pub reconstruction_error: f64,
    /// √(Σ ωᵢ²/λᵢ).
    pub mahalanobis: f64,
    /// Every |ωᵢ| ≤ 3√λᵢ.
    pub in_bounds: bool,
}

impl PatchScore {
    pub fn product(&self) -> f64 {
        self.reconstruction_error * self.mahalanobis
    }
}

/// Train an eigenspace model from flattened faces with annotated positions.
/// `s` is the patch side in cells, `k` the number of kept components, and
/// `zone_margin` the dilation (mm) of the training bounding rectangle.
pub fn train_landmark_model(
    training: &[(&Grid2D, Point3<f64>)],
    name: LandmarkName,
    s: usize,
    k: usize,
    zone_margin: f64,
) -> Result<LandmarkModel> {
    if s.is_multiple_of(2) || s < 3 {
        return Err(Error::InvalidParameter(format!("patch size {s} must be odd and >= 3")));
    }
    let mut patches: Vec<DVector<f64>> = Vec::new();
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for (grid, pos) in training {
        let Some((cx, cy)) = grid.nearest_cell(pos.x, pos.y) else {
            continue;
        };
        if let Some(PatchVector(v)) = extract_patch(grid, cx, cy, s) {
            patches.push(v);
            xs.push(pos.x);
            ys.push(pos.y);
        }
    }
    let m = patches.len();
    if m < k + 1 {
        return Err(Error::InsufficientData(format!(
            "{m} usable training patches for {name}, need at least {}",
            k + 1
        )));
    }
    let dim = 2 * s * s;
    let mut mean = DVector::zeros(dim);
    for p in &patches {
        mean += p;
    }
    mean /= m as f64;

    // Snapshot (Gram) eigendecomposition: with centered patches as the
    // columns of A, the eigenvectors of AᵀA map to those of the covariance
    // AAᵀ/(m−1) without forming the dim×dim matrix.
    let mut a = DMatrix::zeros(dim, m);
    for (j, p) in patches.iter().enumerate() {
        a.set_column(j, &(p - &mean));
    }
    let gram = a.transpose() * &a;
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());

    if eig.eigenvalues[order[0]] <= 1e-12 {
        return Err(Error::DegenerateFit(
            "degenerate covariance: training patches are identical".into(),
        ));
    }

    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = DMatrix::zeros(dim, k);
    for (col, &oi) in order.iter().take(k).enumerate() {
        let mu = eig.eigenvalues[oi].max(0.0);
        eigenvalues.push(mu / (m as f64 - 1.0));
        if mu > 1e-12 {
            let mut u = &a * eig.eigenvectors.column(oi);
            u /= mu.sqrt();
            // Deterministic sign: the largest-magnitude component is positive.
            let lead = u
                .iter()
                .cloned()
                .max_by(|p, q| p.abs().partial_cmp(&q.abs()).unwrap())
                .unwrap();
            if lead < 0.0 {
                u = -u;
            }
            eigenvectors.set_column(col, &u);
        }
        // A zero column for exhausted variance keeps shapes stable; scores
        // then ignore the component via its zero eigenvalue.
    }

    let minmax = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (x0, x1) = minmax(&xs);
    let (y0, y1) = minmax(&ys);
    Ok(LandmarkModel {
        name,
        patch_size: s,
        k,
        mean_patch: mean,
        eigenvalues,
        eigenvectors,
        zone: ZoneRect {
            min: [x0 - zone_margin, y0 - zone_margin],
            max: [x1 + zone_margin, y1 + zone_margin],
        },
    })
}

/// Project a patch into the model eigenspace and score it.
pub fn score_patch(model: &LandmarkModel, patch: &PatchVector) -> Result<PatchScore> {
    if patch.0.len() != model.mean_patch.len() {
        return Err(Error::InvalidParameter(format!(
            "patch length {} does not match model dimension {}",
            patch.0.len(),
            model.mean_patch.len()
        )));
    }
    let centered = &patch.0 - &model.mean_patch;
    let w = model.eigenvectors.transpose() * &centered;
    let residual = &centered - &model.eigenvectors * &w;
    let e = residual.norm_squared();
    let mut d2 = 0.0;
    let mut in_bounds = true;
    for i in 0..model.k {
        let lambda = model.eigenvalues[i];
        if lambda > 1e-15 {
            d2 += w[i] * w[i] / lambda;
            if w[i].abs() > 3.0 * lambda.sqrt() {
                in_bounds = false;
            }
        }
    }
    Ok(PatchScore {
        reconstruction_error: e,
        mahalanobis: d2.sqrt(),
        in_bounds,
    })
}

/// Scan each model's zone on a flattened face and return the best cell per
/// landmark as a 3D point. Cells failing the ±3√λ gate are skipped unless no
/// cell passes, in which case the ungated argmin is used and the landmark is
/// flagged low-confidence.
pub fn locate_salient_landmarks(grid: &Grid2D, models: &[LandmarkModel]) -> Result<LandmarkSet> {
    let mut found = LandmarkSet::new();
    for model in models {
        let (ix0, iy0) = clamp_cell(grid, model.zone.min[0], model.zone.min[1]);
        let (ix1, iy1) = clamp_cell(grid, model.zone.max[0], model.zone.max[1]);
        if ix1 < ix0 || iy1 < iy0 {
            return Err(Error::DetectionFailure(format!(
                "{}: search zone lies outside the grid",
                model.name
            )));
        }
        let cells: Vec<(usize, usize)> = (iy0..=iy1)
            .flat_map(|iy| (ix0..=ix1).map(move |ix| (ix, iy)))
            .collect();
        let scores: Vec<Option<PatchScore>> = cells
            .par_iter()
            .map(|&(ix, iy)| {
                extract_patch(grid, ix, iy, model.patch_size)
                    .map(|p| score_patch(model, &p).expect("dimensions match"))
            })
            .collect();

        // Row-major-first tie break: strict < over the scan order.
        let argmin = |gated: bool| -> Option<usize> {
            let mut best: Option<(usize, f64)> = None;
            for (i, score) in scores.iter().enumerate() {
                let Some(sc) = score else { continue };
                if gated && !sc.in_bounds {
                    continue;
                }
                let p = sc.product();
                if best.is_none_or(|(_, bp)| p < bp) {
                    best = Some((i, p));
                }
            }
            best.map(|(i, _)| i)
        };
        let (winner, low_confidence) = match argmin(true) {
            Some(i) => (i, false),
            None => match argmin(false) {
                Some(i) => (i, true),
                None => {
                    return Err(Error::DetectionFailure(format!(
                        "{}: no valid patch in the search zone",
                        model.name
                    )))
                }
            },
        };
        let (ix, iy) = cells[winner];
        let [x, y] = grid.cell_center(ix, iy);
        let z = grid.z[grid.idx(ix, iy)];
        found.insert(model.name, Point3::new(x, y, z))?;
        if low_confidence {
            found.set_low_confidence(model.name, true);
        }
    }
    Ok(found)
}

fn clamp_cell(grid: &Grid2D, x: f64, y: f64) -> (usize, usize) {
    let fx = ((x - grid.origin[0]) / grid.spacing).round();
    let fy = ((y - grid.origin[1]) / grid.spacing).round();
    (
        fx.clamp(0.0, (grid.nx - 1) as f64) as usize,
        fy.clamp(0.0, (grid.ny - 1) as f64) as usize,
    )
}

const MODEL_MAGIC: &[u8; 4] = b"MRLM";
const MODEL_VERSION: u32 = 1;

/// Persist trained models as little-endian binary: magic, version, count,
/// then per model the landmark label, patch size, k, zone, eigenvalues,
/// mean patch, and eigenvector columns.
pub fn save_models(models: &[LandmarkModel], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);
    w.write_all(MODEL_MAGIC).map_err(io_err)?;
    w.write_all(&MODEL_VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&(models.len() as u32).to_le_bytes()).map_err(io_err)?;
    for m in models {
        let label = m.name.label().as_bytes();
        w.write_all(&(label.len() as u32).to_le_bytes()).map_err(io_err)?;
        w.write_all(label).map_err(io_err)?;
        w.write_all(&(m.patch_size as u32).to_le_bytes()).map_err(io_err)?;
        w.write_all(&(m.k as u32).to_le_bytes()).map_err(io_err)?;
        for v in [m.zone.min[0], m.zone.min[1], m.zone.max[0], m.zone.max[1]] {
            w.write_all(&v.to_le_bytes()).map_err(io_err)?;
        }
        for &v in &m.eigenvalues {
            w.write_all(&v.to_le_bytes()).map_err(io_err)?;
        }
        for v in m.mean_patch.iter() {
            w.write_all(&v.to_le_bytes()).map_err(io_err)?;
        }
        for col in 0..m.k {
            for v in m.eigenvectors.column(col).iter() {
                w.write_all(&v.to_le_bytes()).map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}

pub fn load_models(path: &Path) -> Result<Vec<LandmarkModel>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let bad = |what: &str| Error::Parse {
        path: path.to_path_buf(),
        element: "model file".into(),
        message: what.to_string(),
    };
    let mut u32_buf = [0u8; 4];
    let mut f64_buf = [0u8; 8];
    macro_rules! read_u32 {
        () => {{
            r.read_exact(&mut u32_buf).map_err(|e| Error::io(path, e))?;
            u32::from_le_bytes(u32_buf)
        }};
    }
    macro_rules! read_f64 {
        () => {{
            r.read_exact(&mut f64_buf).map_err(|e| Error::io(path, e))?;
            f64::from_le_bytes(f64_buf)
        }};
    }
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
    if &magic != MODEL_MAGIC {
        return Err(bad("bad magic"));
    }
    if read_u32!() != MODEL_VERSION {
        return Err(bad("unsupported version"));
    }
    let count = read_u32!() as usize;
    let mut models = Vec::with_capacity(count);
    for _ in 0..count {
        let label_len = read_u32!() as usize;
        if label_len > 256 {
            return Err(bad("implausible label length"));
        }
        let mut label = vec![0u8; label_len];
        r.read_exact(&mut label).map_err(|e| Error::io(path, e))?;
        let label = String::from_utf8(label).map_err(|_| bad("label not UTF-8"))?;
        let name = LandmarkName::from_label(&label).ok_or_else(|| bad("unknown landmark label"))?;
        let s = read_u32!() as usize;
        let k = read_u32!() as usize;
        if s.is_multiple_of(2) || s == 0 || s > 201 || k == 0 || k > 4096 {
            return Err(bad("implausible patch size or component count"));
        }
        let zone = ZoneRect {
            min: [read_f64!(), read_f64!()],
            max: [read_f64!(), read_f64!()],
        };
        let mut eigenvalues = Vec::with_capacity(k);
        for _ in 0..k {
            eigenvalues.push(read_f64!());
        }
        let dim = 2 * s * s;
        let mut mean_patch = DVector::zeros(dim);
        for i in 0..dim {
            mean_patch[i] = read_f64!();
        }
        let mut eigenvectors = DMatrix::zeros(dim, k);
        for col in 0..k {
            for row in 0..dim {
                eigenvectors[(row, col)] = read_f64!();
            }
        }
        models.push(LandmarkModel {
            name,
            patch_size: s,
            k,
            mean_patch,
            eigenvalues,
            eigenvectors,
            zone,
        });
    }
    Ok(models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// A small synthetic grid with a Gaussian bump + gray blob at `center`,
    /// plus a per-face smooth undulation so the patch family has full rank.
    fn bump_grid(center: [f64; 2], amp: f64, phase: f64) -> Grid2D {
        let mut g = Grid2D::new([0.0, 0.0], 1.0, 61, 61);
        for iy in 0..61 {
            for ix in 0..61 {
                let k = g.idx(ix, iy);
                let dx = ix as f64 - center[0];
                let dy = iy as f64 - center[1];
                let r2 = dx * dx + dy * dy;
                let ripple = 0.3 * (0.37 * ix as f64 + phase).sin() * (0.29 * iy as f64 + 2.0 * phase).cos();
                g.z[k] = amp * (-r2 / 40.0).exp() + 0.01 * ix as f64 + ripple;
                g.gray[k] = 100.0 + 80.0 * (-r2 / 60.0).exp() + 5.0 * (0.23 * ix as f64 - phase).sin();
                g.valid[k] = true;
            }
        }
        g
    }

    fn training_set() -> Vec<(Grid2D, Point3<f64>)> {
        (0..24)
            .map(|i| {
                let cx = 28.0 + (i % 5) as f64;
                let cy = 29.0 + (i % 3) as f64;
                let amp = 4.0 + 0.25 * (i % 7) as f64;
                (bump_grid([cx, cy], amp, 0.7 * i as f64), Point3::new(cx, cy, 0.0))
            })
            .collect()
    }

    fn train(k: usize) -> LandmarkModel {
        let grids = training_set();
        let refs: Vec<(&Grid2D, Point3<f64>)> = grids.iter().map(|(g, p)| (g, *p)).collect();
        train_landmark_model(&refs, LandmarkName::NoseTip, 21, k, 10.0).unwrap()
    }

    #[test]
    fn patch_layout_and_normalization() {
        let g = bump_grid([30.0, 30.0], 5.0, 0.0);
        let PatchVector(v) = extract_patch(&g, 30, 30, 21).unwrap();
        assert_eq!(v.len(), 882);
        let z_sum: f64 = (0..441).map(|i| v[2 * i]).sum();
        let z_norm: f64 = (0..441).map(|i| v[2 * i] * v[2 * i]).sum::<f64>().sqrt();
        let y_norm: f64 = (0..441).map(|i| v[2 * i + 1] * v[2 * i + 1]).sum::<f64>().sqrt();
        assert!(z_sum.abs() < 1e-9);
        assert_relative_eq!(z_norm, 1.0, epsilon = 1e-9);
        assert_relative_eq!(y_norm, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_and_out_of_bounds_patches_unavailable() {
        let mut g = Grid2D::new([0.0, 0.0], 1.0, 41, 41);
        for k in 0..41 * 41 {
            g.z[k] = 7.0; // constant depth
            g.gray[k] = 100.0;
            g.valid[k] = true;
        }
        assert!(extract_patch(&g, 20, 20, 21).is_none(), "constant z degenerate");
        assert!(extract_patch(&g, 5, 20, 21).is_none(), "window out of bounds");
        let center = g.idx(20, 20);
        g.z[center] = 9.0;
        let neighbor = g.idx(22, 20);
        g.valid[neighbor] = false;
        assert!(extract_patch(&g, 20, 20, 21).is_none(), "invalid cell in window");
    }

    #[test]
    fn eigenvectors_orthonormal_and_eigenvalues_sorted() {
        let model = train(8);
        let gram = model.eigenvectors.transpose() * &model.eigenvectors;
        for i in 0..8 {
            for j in 0..8 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - expect).abs() < 1e-8, "U'U[{i},{j}] = {}", gram[(i, j)]);
            }
        }
        for w in model.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(model.eigenvalues.iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn matches_dense_covariance_oracle() {
        // Recompute the leading eigenpairs from the explicit 882×882
        // covariance matrix and compare with the snapshot route.
        let grids = training_set();
        let refs: Vec<(&Grid2D, Point3<f64>)> = grids.iter().map(|(g, p)| (g, *p)).collect();
        let model = train(4);

        let patches: Vec<DVector<f64>> = refs
            .iter()
            .map(|(g, p)| {
                let (cx, cy) = g.nearest_cell(p.x, p.y).unwrap();
                extract_patch(g, cx, cy, 21).unwrap().0
            })
            .collect();
        let m = patches.len();
        let mut mean = DVector::zeros(882);
        for p in &patches {
            mean += p;
        }
        mean /= m as f64;
        let mut cov = DMatrix::zeros(882, 882);
        for p in &patches {
            let c = p - &mean;
            cov += &c * c.transpose();
        }
        cov /= m as f64 - 1.0;
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..882).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
        for (c, &rank) in order.iter().take(4).enumerate() {
            let lambda = eig.eigenvalues[rank];
            assert_relative_eq!(model.eigenvalues[c], lambda, epsilon = 1e-8, max_relative = 1e-8);
            let dense = eig.eigenvectors.column(rank);
            let snap = model.eigenvectors.column(c);
            let dot = dense.dot(&snap).abs();
            assert!(dot > 1.0 - 1e-8, "component {c} misaligned, |dot| = {dot}");
        }
    }

    #[test]
    fn mean_patch_scores_zero() {
        let model = train(8);
        let score = score_patch(&model, &PatchVector(model.mean_patch.clone())).unwrap();
        assert!(score.reconstruction_error < 1e-18);
        assert!(score.mahalanobis < 1e-9);
        assert!(score.in_bounds);
        assert_eq!(score.product(), 0.0);
    }

    #[test]
    fn gate_triggers_beyond_three_sigma() {
        let model = train(8);
        let shifted = &model.mean_patch
            + model.eigenvectors.column(0) * (4.0 * model.eigenvalues[0].sqrt());
        let score = score_patch(&model, &PatchVector(shifted)).unwrap();
        assert!(!score.in_bounds);
    }

    #[test]
    fn in_span_reconstruction_is_exact_with_full_rank() {
        let grids = training_set();
        let refs: Vec<(&Grid2D, Point3<f64>)> = grids.iter().map(|(g, p)| (g, *p)).collect();
        let m = refs.len();
        let model = train_landmark_model(&refs, LandmarkName::NoseTip, 21, m - 1, 10.0).unwrap();
        for (g, p) in &refs {
            let (cx, cy) = g.nearest_cell(p.x, p.y).unwrap();
            let patch = extract_patch(g, cx, cy, 21).unwrap();
            let score = score_patch(&model, &patch).unwrap();
            assert!(score.reconstruction_error < 1e-9, "e = {}", score.reconstruction_error);
        }
    }

    #[test]
    fn identical_patches_rejected() {
        let base = bump_grid([30.0, 30.0], 5.0, 0.0);
        let grids: Vec<(Grid2D, Point3<f64>)> =
            (0..10).map(|_| (base.clone(), Point3::new(30.0, 30.0, 0.0))).collect();
        let refs: Vec<(&Grid2D, Point3<f64>)> = grids.iter().map(|(g, p)| (g, *p)).collect();
        let err = train_landmark_model(&refs, LandmarkName::NoseTip, 21, 4, 10.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateFit(_)));
    }

    #[test]
    fn self_detection_recovers_training_annotation() {
        let model = train(8);
        let grids = training_set();
        for (grid, pos) in grids.iter().take(4) {
            let found = locate_salient_landmarks(grid, std::slice::from_ref(&model)).unwrap();
            let got = found.get(LandmarkName::NoseTip).unwrap();
            assert!(
                (got.x - pos.x).abs() <= 1.0 && (got.y - pos.y).abs() <= 1.0,
                "detected ({}, {}) vs annotation ({}, {})",
                got.x,
                got.y,
                pos.x,
                pos.y
            );
        }
    }

    #[test]
    fn cleared_zone_is_detection_failure() {
        let model = train(8);
        let mut grid = bump_grid([30.0, 30.0], 5.0, 0.0);
        for v in grid.valid.iter_mut() {
            *v = false;
        }
        let err = locate_salient_landmarks(&grid, std::slice::from_ref(&model)).unwrap_err();
        assert!(matches!(err, Error::DetectionFailure(_)));
    }

    #[test]
    fn model_round_trip_through_file() {
        let model = train(8);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("models.bin");
        save_models(std::slice::from_ref(&model), &path).unwrap();
        let loaded = load_models(&path).unwrap();
        assert_eq!(loaded.len(), 1);
        assert_eq!(loaded[0], model);
    }
}
