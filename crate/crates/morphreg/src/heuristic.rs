//! Fine pose correction from the six salient landmarks, then heuristic
//! localization of the ten remaining landmarks plus nose-tip refinement.
//!
//! All heuristics operate on a flattened grid recomputed in the fine frame:
//! profile-angle scans for the nose creases, Cr chroma validation for the
//! lip line, two-way local symmetry for nasion and pogonion, and steep
//! depth slopes for the earlobe tips. Every threshold is a calibration
//! parameter collected in [`HeuristicParams`].

use nalgebra::{Matrix3, Point3, SymmetricEigen, Vector3};

use crate::error::{Error, Result};
use crate::flatten::Grid2D;
use crate::landmarks::{LandmarkName, LandmarkSet};
use crate::mesh::{RigidTransform, TriangleMesh};
use crate::spatial::TriangleBvh;
use crate::sphere::fit_sphere;

/// Calibration constants for the heuristic stage (millimeters unless noted).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct HeuristicParams {
    /// Chord half-length for profile angle measurement.
    pub angle_window: f64,
    /// Minimum Cr contrast across the lip line.
    pub cr_margin: f64,
    /// |dz/dy| threshold marking earlobe edges (dimensionless).
    pub earlobe_slope: f64,
    /// Half-size of the symmetry-score window.
    pub symmetry_half_window: f64,
    /// Radius of the nose refit neighborhood.
    pub refit_ball: f64,
    /// How far below the tip the subnasale scan reaches.
    pub subnasale_drop: f64,
    /// How far below the subnasale the lip scan reaches.
    pub lip_scan: f64,
    /// Alare scan row, relative to the refined nose tip.
    pub alare_row_offset: f64,
    /// Lateral extent of the alare scan, from the mid line outward.
    pub alare_scan_max: f64,
    /// Ear search starts this far outside the outer eye corners.
    pub ear_min_offset: f64,
    /// Ear search band in y, relative to the nose tip.
    pub ear_y_range: [f64; 2],
    /// Local minima shallower than π − this cutoff (radians) are ignored.
    pub angle_sharpness: f64,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams {
            angle_window: 3.0,
            cr_margin: 5.0,
            earlobe_slope: 2.0,
            symmetry_half_window: 7.0,
            refit_ball: 10.0,
            subnasale_drop: 20.0,
            lip_scan: 40.0,
            alare_row_offset: -6.0,
            alare_scan_max: 25.0,
            ear_min_offset: 12.0,
            ear_y_range: [-25.0, 10.0],
            angle_sharpness: 0.15,
        }
    }
}

/// An ordered polyline sampled along a grid row or column.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    /// (arc position, surface point); arc strictly increasing.
    pub samples: Vec<(f64, Point3<f64>)>,
}

impl ProfileCurve {
    pub fn new(samples: Vec<(f64, Point3<f64>)>) -> Result<ProfileCurve> {
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter(
                "profile arc positions must be strictly increasing".into(),
            ));
        }
        Ok(ProfileCurve { samples })
    }

    fn span(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.0 - a.0,
            _ => 0.0,
        }
    }

    /// Linear interpolation along the polyline at an arc position.
    fn point_at(&self, arc: f64) -> Option<Point3<f64>> {
        let first = self.samples.first()?;
        if arc < first.0 {
            return None;
        }
        for w in self.samples.windows(2) {
            if arc <= w[1].0 {
                let t = (arc - w[0].0) / (w[1].0 - w[0].0);
                return Some(Point3::from(w[0].1.coords.lerp(&w[1].1.coords, t)));
            }
        }
        None
    }

    /// Chord angle at sample i with arms of length `window`, when both arms
    /// fit inside the profile.
    pub fn angle_at(&self, i: usize, window: f64) -> Option<f64> {
        let (arc, p) = self.samples[i];
        let a = self.point_at(arc - window)?;
        let b = self.point_at(arc + window)?;
        let u = a - p;
        let v = b - p;
        let nu = u.norm();
        let nv = v.norm();
        if nu < 1e-12 || nv < 1e-12 {
            return None;
        }
        Some((u.dot(&v) / (nu * nv)).clamp(-1.0, 1.0).acos())
    }
}

/// Arc position of the sharpest chord angle. A profile with no measurable
/// corner (all angles near π) returns its first measurable sample flagged
/// low-confidence.
pub fn inflection_minimum_angle(profile: &ProfileCurve, window: f64) -> Result<(f64, bool)> {
    if profile.span() < 3.0 * window {
        return Err(Error::InsufficientData(format!(
            "profile span {:.2} shorter than three angle windows",
            profile.span()
        )));
    }
    let mut best: Option<(f64, f64)> = None;
    let mut first_measurable: Option<f64> = None;
    for i in 0..profile.samples.len() {
        if let Some(angle) = profile.angle_at(i, window) {
            let arc = profile.samples[i].0;
            first_measurable.get_or_insert(arc);
            if best.is_none_or(|(_, a)| angle < a) {
                best = Some((arc, angle));
            }
        }
    }
    match best {
        Some((arc, angle)) if angle < std::f64::consts::PI - 1e-3 => Ok((arc, false)),
        _ => first_measurable
            .map(|arc| (arc, true))
            .ok_or_else(|| Error::InsufficientData("no measurable profile sample".into())),
    }
}

/// Re-pose the mesh so the least-squares plane of the six salient landmarks
/// becomes the xy plane (normal toward the viewer), with y along the
/// projection of the lip-midpoint → eye-midpoint line and the nose tip at
/// the origin.
pub fn fine_pose_from_six(
    mesh: &TriangleMesh,
    six: &LandmarkSet,
    nose_tip: &Point3<f64>,
) -> Result<(TriangleMesh, RigidTransform)> {
    let mut pts: Vec<Point3<f64>> = Vec::with_capacity(6);
    for name in LandmarkName::SALIENT {
        let p = six.get(name).ok_or_else(|| {
            Error::InsufficientData(format!("fine pose requires landmark {name}"))
        })?;
        pts.push(p);
    }
    let centroid = Point3::from(pts.iter().map(|p| p.coords).sum::<Vector3<f64>>() / 6.0);
    let mut cov = Matrix3::zeros();
    for p in &pts {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    if eig.eigenvalues[order[1]] < 1e-9 * eig.eigenvalues[order[2]].max(1.0) {
        return Err(Error::PoseFailure(
            "six landmarks are collinear; plane fit is rank-deficient".into(),
        ));
    }
    let mut z_axis: Vector3<f64> = eig.eigenvectors.column(order[0]).into();
    if z_axis.z < 0.0 {
        z_axis = -z_axis;
    }
    z_axis.normalize_mut();

    let eye_mid = (pts[0].coords + pts[1].coords + pts[2].coords + pts[3].coords) / 4.0;
    let lip_mid = (pts[4].coords + pts[5].coords) / 2.0;
    let up = eye_mid - lip_mid;
    let mut y_axis = up - z_axis * up.dot(&z_axis);
    if y_axis.norm() < 1e-9 {
        return Err(Error::PoseFailure(
            "eye/lip midline is perpendicular to the landmark plane".into(),
        ));
    }
    y_axis.normalize_mut();
    let x_axis = y_axis.cross(&z_axis);

    let rotation = Matrix3::from_rows(&[x_axis.transpose(), y_axis.transpose(), z_axis.transpose()]);
    let transform = RigidTransform::new(rotation, -(rotation * nose_tip.coords))?;
    Ok((mesh.transformed(&transform), transform))
}

/// Result of the heuristic stage: the landmarks that could be localized and
/// a note for each one that could not.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicResult {
    pub landmarks: LandmarkSet,
    pub failures: Vec<(LandmarkName, String)>,
}

/// Localize the ten heuristic landmarks and refine the nose tip. Inputs are
/// in the fine frame; `grid` must be flattened from `mesh` in that frame.
/// Failures are per-landmark: missing features (for instance cropped ears)
/// yield partial results rather than errors.
pub fn locate_heuristic_landmarks(
    mesh: &TriangleMesh,
    grid: &Grid2D,
    six: &LandmarkSet,
    nose_tip: &Point3<f64>,
    params: &HeuristicParams,
) -> Result<HeuristicResult> {
    let bvh = TriangleBvh::build(mesh)?;
    let mut out = LandmarkSet::new();
    let mut failures: Vec<(LandmarkName, String)> = Vec::new();
    let place = |set: &mut LandmarkSet, name: LandmarkName, p: Point3<f64>, low: bool| {
        let (snapped, _) = bvh.closest_point(&p);
        set.insert(name, snapped).expect("finite landmark");
        if low {
            set.set_low_confidence(name, true);
        }
    };

    // --- Nose tip refinement -------------------------------------------
    let tip = refine_nose_tip(grid, nose_tip, params);
    let (tip, tip_low) = match tip {
        Some(p) => (p, false),
        None => (*nose_tip, true),
    };
    place(&mut out, LandmarkName::NoseTip, tip, tip_low);
    let tip = out.get(LandmarkName::NoseTip).unwrap();

    // --- Subnasale ------------------------------------------------------
    let sub_profile = vertical_profile(grid, tip.x, tip.y - 2.0, tip.y - params.subnasale_drop);
    let subnasale = sub_profile.as_ref().ok(). and_then(|profile| {
        inflection_minimum_angle(profile, params.angle_window)
            .ok()
            .and_then(|(arc, low)| profile.point_at(arc).map(|p| (p, low)))
    });
    match subnasale {
        Some((p, low)) => place(&mut out, LandmarkName::Subnasale, p, low),
        None => failures.push((LandmarkName::Subnasale, "no usable mid profile below the tip".into())),
    }

    // --- Alares ---------------------------------------------------------
    let row = tip.y + params.alare_row_offset;
    for (name, sign) in [(LandmarkName::LeftAlare, 1.0), (LandmarkName::RightAlare, -1.0)] {
        let x0 = tip.x + sign * 2.0;
        let x1 = tip.x + sign * params.alare_scan_max;
        let found = horizontal_profile(grid, row, x0.min(x1), x0.max(x1)).ok().and_then(|profile| {
            inflection_minimum_angle(&profile, params.angle_window)
                .ok()
                .and_then(|(arc, low)| profile.point_at(arc).map(|p| (p, low)))
        });
        match found {
            Some((p, low)) => place(&mut out, name, p, low),
            None => failures.push((name, "no usable nose-side profile".into())),
        }
    }

    // --- Lip line -------------------------------------------------------
    let sub_y = out.get(LandmarkName::Subnasale).map(|p| p.y).unwrap_or(tip.y - 12.0);
    match lip_landmarks(grid, tip.x, sub_y, params) {
        Ok(lips) => {
            for (name, p, low) in lips.found {
                place(&mut out, name, p, low);
            }
            failures.extend(lips.failures);
        }
        Err(e) => {
            for name in [LandmarkName::UpperLip, LandmarkName::LipCenter, LandmarkName::LowerLip] {
                failures.push((name, e.to_string()));
            }
        }
    }

    // --- Nasion ---------------------------------------------------------
    let eye_mid = eye_midpoint(six);
    match eye_mid {
        Some(mid) => {
            let window = ([mid.x - 8.0, mid.y + 1.0], [mid.x + 8.0, mid.y + 10.0]);
            match best_symmetry_cell(grid, window, params.symmetry_half_window, VerticalShape::Trough) {
                Some(p) => place(&mut out, LandmarkName::Nasion, p, false),
                None => failures.push((LandmarkName::Nasion, "no valid symmetry window".into())),
            }
        }
        None => failures.push((LandmarkName::Nasion, "eye corners unavailable".into())),
    }

    // --- Pogonion -------------------------------------------------------
    let below = out
        .get(LandmarkName::LowerLip)
        .map(|p| p.y)
        .unwrap_or(tip.y - 38.0);
    let window = ([tip.x - 8.0, below - 25.0], [tip.x + 8.0, below - 8.0]);
    // Symmetry centers the mid line; the chin's flanks are asymmetric in y
    // (steep toward the jaw, flat toward the lip), so y comes from the
    // anterior-most cell of that column instead.
    let pogonion = best_symmetry_cell(grid, window, params.symmetry_half_window, VerticalShape::Crest)
        .map(|p| crest_of_column(grid, p, window.0[1], window.1[1]));
    match pogonion {
        Some(p) => place(&mut out, LandmarkName::Pogonion, p, false),
        None => failures.push((LandmarkName::Pogonion, "no valid symmetry window".into())),
    }

    // --- Earlobes -------------------------------------------------------
    let outer_x = six
        .get(LandmarkName::LeftEyeOuterCorner)
        .map(|p| p.x.abs())
        .into_iter()
        .chain(six.get(LandmarkName::RightEyeOuterCorner).map(|p| p.x.abs()))
        .fold(42.0, f64::max);
    for (name, sign) in [
        (LandmarkName::LeftEarlobeTip, 1.0),
        (LandmarkName::RightEarlobeTip, -1.0),
    ] {
        match earlobe_tip(grid, sign, outer_x + params.ear_min_offset, tip.y, params) {
            Some(p) => place(&mut out, name, p, false),
            None => failures.push((name, "no steep ear edge found".into())),
        }
    }

    Ok(HeuristicResult { landmarks: out, failures })
}

fn refine_nose_tip(grid: &Grid2D, tip: &Point3<f64>, params: &HeuristicParams) -> Option<Point3<f64>> {
    let r = params.refit_ball;
    let mut cells: Vec<(usize, usize)> = Vec::new();
    let mut points: Vec<Point3<f64>> = Vec::new();
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            if !grid.is_valid(ix, iy) {
                continue;
            }
            let [x, y] = grid.cell_center(ix, iy);
            if (x - tip.x).powi(2) + (y - tip.y).powi(2) <= r * r {
                cells.push((ix, iy));
                points.push(Point3::new(x, y, grid.z[grid.idx(ix, iy)]));
            }
        }
    }
    let fit = fit_sphere(&points).ok()?;
    // The sphere's topmost z; the tip is the surface point matching it best.
    let z_top = fit.center.z + fit.radius;
    let mut best: Option<(f64, Point3<f64>)> = None;
    for (&(ix, iy), p) in cells.iter().zip(&points) {
        let _ = (ix, iy);
        let err = (p.z - z_top).abs();
        if best.is_none_or(|(b, _)| err < b) {
            best = Some((err, *p));
        }
    }
    best.map(|(_, p)| p)
}

fn vertical_profile(grid: &Grid2D, x: f64, y_hi: f64, y_lo: f64) -> Result<ProfileCurve> {
    let step = grid.spacing;
    let mut samples = Vec::new();
    let n = ((y_hi - y_lo) / step).floor() as usize;
    for i in 0..=n {
        let y = y_hi - i as f64 * step;
        if let Some(z) = grid.sample_z(x, y) {
            // Arc runs downward so positions increase.
            samples.push((y_hi - y, Point3::new(x, y, z)));
        }
    }
    ProfileCurve::new(samples)
}

fn horizontal_profile(grid: &Grid2D, y: f64, x0: f64, x1: f64) -> Result<ProfileCurve> {
    let step = grid.spacing;
    let mut samples = Vec::new();
    let n = ((x1 - x0) / step).floor() as usize;
    for i in 0..=n {
        let x = x0 + i as f64 * step;
        if let Some(z) = grid.sample_z(x, y) {
            samples.push((x - x0, Point3::new(x, y, z)));
        }
    }
    ProfileCurve::new(samples)
}

struct LipOutcome {
    found: Vec<(LandmarkName, Point3<f64>, bool)>,
    failures: Vec<(LandmarkName, String)>,
}

/// Local angle minima on the mid profile below the subnasale, validated by
/// Cr contrast: lips are redder than skin, so Cr below the upper lip line
/// exceeds Cr above it (mirrored for the lower line).
fn lip_landmarks(grid: &Grid2D, x: f64, sub_y: f64, params: &HeuristicParams) -> Result<LipOutcome> {
    let profile = vertical_profile(grid, x, sub_y - 2.0, sub_y - params.lip_scan)?;
    if profile.span() < 3.0 * params.angle_window {
        return Err(Error::InsufficientData("lip profile too short".into()));
    }
    let angles: Vec<Option<f64>> = (0..profile.samples.len())
        .map(|i| profile.angle_at(i, params.angle_window))
        .collect();
    let mut minima: Vec<(usize, f64)> = Vec::new();
    for i in 1..angles.len().saturating_sub(1) {
        let (Some(prev), Some(here), Some(next)) = (angles[i - 1], angles[i], angles[i + 1]) else {
            continue;
        };
        if here < prev && here <= next && here < std::f64::consts::PI - params.angle_sharpness {
            minima.push((i, here));
        }
    }

    let cr_contrast = |y: f64| -> Option<f64> {
        let below = grid.sample_cr(x, y - 2.5)?;
        let above = grid.sample_cr(x, y + 2.5)?;
        Some(below - above)
    };

    let mut found = Vec::new();
    let mut failures = Vec::new();
    let pick = |want_red_below: bool| -> Option<Point3<f64>> {
        minima
            .iter()
            .filter(|&&(i, _)| {
                let y = profile.samples[i].1.y;
                match cr_contrast(y) {
                    Some(c) if want_red_below => c >= params.cr_margin,
                    Some(c) => -c >= params.cr_margin,
                    None => false,
                }
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|&(i, _)| profile.samples[i].1)
    };

    let upper = pick(true);
    let lower = pick(false);
    match upper {
        Some(p) => found.push((LandmarkName::UpperLip, p, false)),
        None => failures.push((LandmarkName::UpperLip, "no angle minimum with red-below Cr contrast".into())),
    }
    match lower {
        Some(p) => found.push((LandmarkName::LowerLip, p, false)),
        None => failures.push((LandmarkName::LowerLip, "no angle minimum with red-above Cr contrast".into())),
    }
    match (upper, lower) {
        (Some(u), Some(l)) => {
            let mid = Point3::from((u.coords + l.coords) / 2.0);
            let snapped_y = mid.y;
            let z = grid.sample_z(x, snapped_y).unwrap_or(mid.z);
            found.push((LandmarkName::LipCenter, Point3::new(x, snapped_y, z), false));
        }
        _ => failures.push((LandmarkName::LipCenter, "requires both lip lines".into())),
    }
    Ok(LipOutcome { found, failures })
}

fn eye_midpoint(six: &LandmarkSet) -> Option<Point3<f64>> {
    let names = [
        LandmarkName::RightEyeOuterCorner,
        LandmarkName::RightEyeInnerCorner,
        LandmarkName::LeftEyeInnerCorner,
        LandmarkName::LeftEyeOuterCorner,
    ];
    let mut sum = Vector3::zeros();
    for name in names {
        sum += six.get(name)?.coords;
    }
    Some(Point3::from(sum / 4.0))
}

/// Two-way symmetry score at a cell: negative mean absolute depth difference
/// between the window and its left-right mirror plus its up-down mirror.
/// `None` when any required cell is invalid or out of range.
pub fn symmetry_score(grid: &Grid2D, cx: usize, cy: usize, half_cells: usize) -> Option<f64> {
    if cx < half_cells || cy < half_cells || cx + half_cells >= grid.nx || cy + half_cells >= grid.ny
    {
        return None;
    }
    let h = half_cells as i64;
    let mut total = 0.0;
    let mut count = 0usize;
    for dy in -h..=h {
        for dx in -h..=h {
            let a = cell_z(grid, cx as i64 + dx, cy as i64 + dy)?;
            let lr = cell_z(grid, cx as i64 - dx, cy as i64 + dy)?;
            let ud = cell_z(grid, cx as i64 + dx, cy as i64 - dy)?;
            total += (a - lr).abs() + (a - ud).abs();
            count += 2;
        }
    }
    Some(-total / count as f64)
}

fn cell_z(grid: &Grid2D, ix: i64, iy: i64) -> Option<f64> {
    if ix < 0 || iy < 0 || ix >= grid.nx as i64 || iy >= grid.ny as i64 {
        return None;
    }
    let (ix, iy) = (ix as usize, iy as usize);
    if !grid.is_valid(ix, iy) {
        return None;
    }
    Some(grid.z[grid.idx(ix, iy)])
}

/// Vertical curvature class a symmetry search requires of its winner:
/// pogonion sits on a crest (locally convex in y), the nasion saddle in a
/// trough (locally concave in y).
#[derive(Clone, Copy, PartialEq, Eq)]
enum VerticalShape {
    Crest,
    Trough,
}

/// Mean second difference of z along y over the window; negative on a crest.
fn vertical_curvature(grid: &Grid2D, cx: usize, cy: usize, half_cells: usize) -> Option<f64> {
    let h = half_cells as i64;
    let center = cell_z(grid, cx as i64, cy as i64)?;
    let mut total = 0.0;
    for dy in 1..=h {
        total += cell_z(grid, cx as i64, cy as i64 + dy)?
            + cell_z(grid, cx as i64, cy as i64 - dy)?
            - 2.0 * center;
    }
    Some(total / h as f64)
}

fn best_symmetry_cell(
    grid: &Grid2D,
    window: ([f64; 2], [f64; 2]),
    half_window: f64,
    shape: VerticalShape,
) -> Option<Point3<f64>> {
    let half_cells = (half_window / grid.spacing).round() as usize;
    let (lo, hi) = window;
    let (ix0, iy0) = grid.nearest_cell(
        lo[0].max(grid.origin[0]),
        lo[1].max(grid.origin[1]),
    )?;
    let (ix1, iy1) = grid.nearest_cell(
        hi[0].min(grid.origin[0] + grid.spacing * (grid.nx - 1) as f64),
        hi[1].min(grid.origin[1] + grid.spacing * (grid.ny - 1) as f64),
    )?;
    let mut best: Option<(f64, usize, usize)> = None;
    for iy in iy0..=iy1 {
        for ix in ix0..=ix1 {
            let Some(curv) = vertical_curvature(grid, ix, iy, half_cells) else {
                continue;
            };
            let wanted = match shape {
                VerticalShape::Crest => curv < 0.0,
                VerticalShape::Trough => curv > 0.0,
            };
            if !wanted {
                continue;
            }
            if let Some(score) = symmetry_score(grid, ix, iy, half_cells) {
                if best.is_none_or(|(b, _, _)| score > b) {
                    best = Some((score, ix, iy));
                }
            }
        }
    }
    best.map(|(_, ix, iy)| {
        let [x, y] = grid.cell_center(ix, iy);
        Point3::new(x, y, grid.z[grid.idx(ix, iy)])
    })
}

/// The highest-z cell of the grid column through `p` within a y range.
fn crest_of_column(grid: &Grid2D, p: Point3<f64>, y_lo: f64, y_hi: f64) -> Point3<f64> {
    let Some((ix, _)) = grid.nearest_cell(p.x, p.y) else {
        return p;
    };
    let mut best = p;
    for iy in 0..grid.ny {
        let [x, y] = grid.cell_center(ix, iy);
        if y < y_lo || y > y_hi || !grid.is_valid(ix, iy) {
            continue;
        }
        let z = grid.z[grid.idx(ix, iy)];
        if z > best.z {
            best = Point3::new(x, y, z);
        }
    }
    best
}

/// Lowest-y cell on one side whose |dz/dy| exceeds the slope threshold;
/// ties on the same row resolved by the steepest slope.
fn earlobe_tip(
    grid: &Grid2D,
    sign: f64,
    min_abs_x: f64,
    tip_y: f64,
    params: &HeuristicParams,
) -> Option<Point3<f64>> {
    let y_lo = tip_y + params.ear_y_range[0];
    let y_hi = tip_y + params.ear_y_range[1];
    let mut best: Option<(f64, f64, usize, usize)> = None; // (y, |slope|, ix, iy)
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let [x, y] = grid.cell_center(ix, iy);
            if x * sign < min_abs_x || y < y_lo || y > y_hi {
                continue;
            }
            let Some(slope) = grid.dz_dy(ix, iy) else { continue };
            if slope.abs() < params.earlobe_slope {
                continue;
            }
            let better = match best {
                None => true,
                Some((by, bs, _, _)) => y < by - 1e-12 || ((y - by).abs() <= 1e-12 && slope.abs() > bs),
            };
            if better {
                best = Some((y, slope.abs(), ix, iy));
            }
        }
    }
    best.map(|(_, _, ix, iy)| {
        let [x, y] = grid.cell_center(ix, iy);
        Point3::new(x, y, grid.z[grid.idx(ix, iy)])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square_mesh(z: impl Fn(f64, f64) -> f64) -> TriangleMesh {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let n = 21usize;
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (i as f64 - 10.0, j as f64 - 10.0);
                vertices.push(Point3::new(x, y, z(x, y)));
            }
        }
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                let v = j * n + i;
                triangles.push([v, v + 1, v + n + 1]);
                triangles.push([v, v + n + 1, v + n]);
            }
        }
        TriangleMesh::new(vertices, triangles, None).unwrap()
    }

    fn six_at(points: [(f64, f64, f64); 6]) -> LandmarkSet {
        let mut set = LandmarkSet::new();
        for (name, (x, y, z)) in LandmarkName::SALIENT.into_iter().zip(points) {
            set.insert(name, Point3::new(x, y, z)).unwrap();
        }
        set
    }

    #[test]
    fn v_profile_corner_found_exactly() {
        let samples: Vec<(f64, Point3<f64>)> = (0..41)
            .map(|i| {
                let s = i as f64 * 0.5;
                let z = (s - 10.0).abs(); // 90° corner at arc 10
                (s, Point3::new(0.0, -s, z))
            })
            .collect();
        let profile = ProfileCurve::new(samples).unwrap();
        let (arc, low) = inflection_minimum_angle(&profile, 3.0).unwrap();
        assert_relative_eq!(arc, 10.0, epsilon = 1e-9);
        assert!(!low);
    }

    #[test]
    fn straight_profile_low_confidence() {
        let samples: Vec<(f64, Point3<f64>)> =
            (0..30).map(|i| (i as f64, Point3::new(0.0, -(i as f64), 2.0))).collect();
        let profile = ProfileCurve::new(samples).unwrap();
        let (arc, low) = inflection_minimum_angle(&profile, 3.0).unwrap();
        assert!(low);
        assert_relative_eq!(arc, 3.0, epsilon = 1e-9); // first sample with both arms
    }

    #[test]
    fn short_profile_rejected() {
        let samples: Vec<(f64, Point3<f64>)> =
            (0..5).map(|i| (i as f64, Point3::new(0.0, 0.0, 0.0))).collect();
        let profile = ProfileCurve::new(samples).unwrap();
        assert!(inflection_minimum_angle(&profile, 3.0).is_err());
    }

    #[test]
    fn fine_pose_identity_for_level_landmarks() {
        let mesh = square_mesh(|_, _| 0.0);
        let six = six_at([
            (-4.0, 3.0, 0.0),
            (-1.5, 3.0, 0.0),
            (1.5, 3.0, 0.0),
            (4.0, 3.0, 0.0),
            (-2.0, -3.0, 0.0),
            (2.0, -3.0, 0.0),
        ]);
        let (_, t) = fine_pose_from_six(&mesh, &six, &Point3::origin()).unwrap();
        let d = (t.rotation - Matrix3::identity()).abs().max();
        assert!(d < 1e-6, "rotation deviates by {d}");
        assert!(t.translation.norm() < 1e-9);
    }

    #[test]
    fn fine_pose_undoes_roll() {
        let mesh = square_mesh(|x, y| 0.05 * (x * x - y * y));
        let six = six_at([
            (-4.0, 3.0, 0.0),
            (-1.5, 3.0, 0.0),
            (1.5, 3.0, 0.0),
            (4.0, 3.0, 0.0),
            (-2.0, -3.0, 0.0),
            (2.0, -3.0, 0.0),
        ]);
        let (reference, _) = fine_pose_from_six(&mesh, &six, &Point3::origin()).unwrap();

        let roll = nalgebra::Rotation3::from_euler_angles(0.0, 0.0, 10f64.to_radians());
        let rigid = RigidTransform::new(*roll.matrix(), Vector3::new(1.0, -2.0, 3.0)).unwrap();
        let rolled_mesh = mesh.transformed(&rigid);
        let rolled_six = six.transformed(&rigid);
        let tip = rigid.apply(&Point3::origin());
        let (recovered, _) = fine_pose_from_six(&rolled_mesh, &rolled_six, &tip).unwrap();
        for (a, b) in reference.vertices.iter().zip(&recovered.vertices) {
            assert!((a - b).norm() < 1e-6);
        }
    }

    #[test]
    fn fine_pose_rejects_collinear() {
        let mesh = square_mesh(|_, _| 0.0);
        let six = six_at([
            (-5.0, 0.0, 0.0),
            (-3.0, 0.0, 0.0),
            (-1.0, 0.0, 0.0),
            (1.0, 0.0, 0.0),
            (3.0, 0.0, 0.0),
            (5.0, 0.0, 0.0),
        ]);
        let err = fine_pose_from_six(&mesh, &six, &Point3::origin()).unwrap_err();
        assert!(matches!(err, Error::PoseFailure(_)));
    }

    #[test]
    fn symmetry_score_mirror_invariant() {
        let mut grid = Grid2D::new([-10.0, -10.0], 1.0, 21, 21);
        for iy in 0..21 {
            for ix in 0..21 {
                let k = grid.idx(ix, iy);
                let (x, y) = (ix as f64 - 10.0, iy as f64 - 10.0);
                grid.z[k] = 0.1 * x * x - 0.07 * y * y + 0.3 * (0.8 * x).sin() * y;
                grid.valid[k] = true;
            }
        }
        let score = symmetry_score(&grid, 10, 10, 5).unwrap();
        // Mirror the grid about the center column; the score at the center
        // must not change.
        let mut mirrored = grid.clone();
        for iy in 0..21 {
            for ix in 0..21 {
                let k = mirrored.idx(ix, iy);
                mirrored.z[k] = grid.z[grid.idx(20 - ix, iy)];
            }
        }
        let mirrored_score = symmetry_score(&mirrored, 10, 10, 5).unwrap();
        assert_relative_eq!(score, mirrored_score, epsilon = 1e-9);
    }

    #[test]
    fn symmetry_peak_on_even_saddle() {
        // Saddle centered at (2, -1): even in both axes about its center.
        let mut grid = Grid2D::new([-15.0, -15.0], 1.0, 31, 31);
        for iy in 0..31 {
            for ix in 0..31 {
                let k = grid.idx(ix, iy);
                let (x, y) = (ix as f64 - 15.0, iy as f64 - 15.0);
                grid.z[k] = 0.2 * (x - 2.0).powi(2) - 0.15 * (y + 1.0).powi(2);
                grid.valid[k] = true;
            }
        }
        let p = best_symmetry_cell(&grid, ([-6.0, -8.0], [8.0, 6.0]), 5.0, VerticalShape::Crest).unwrap();
        assert_relative_eq!(p.x, 2.0, epsilon = 1e-9);
        assert_relative_eq!(p.y, -1.0, epsilon = 1e-9);
    }
}
