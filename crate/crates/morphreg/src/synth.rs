//! Seeded parametric generator of face-like test meshes with exact
//! ground-truth landmarks and synthetic per-vertex texture.
//!
//! The surface is a height field z = g(x, y) over an oval footprint, built in
//! a frontal frame with the nose apex at the origin (+z toward the viewer,
//! +y up, +x to the subject's left). Features:
//!
//! - a smooth dome with receding sides for the head,
//! - a near-spherical nose cap of configurable radius (slightly tapered so
//!   the apex is a strict maximum of local sphericity),
//! - a nose bridge ridge ending in a nasion saddle, brow ridges,
//! - eye sockets with dark almond texture patches (corner landmarks),
//! - two lip bulges with a stomion groove and a high-Cr lip texture whose
//!   border coincides with the bulge creases,
//! - an ellipsoidal chin bump and ear flaps with a steep-sloped lobe edge.
//!
//! Ground-truth landmark positions are analytic functions of the parameters
//! (a few are 1D roots/extrema of the analytic profile, solved to machine
//! precision), emitted alongside the mesh and transformed consistently with
//! any pose offset. Identical parameters give bit-identical output.

use nalgebra::{Point3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::landmarks::{LandmarkName, LandmarkSet};
use crate::mesh::{RigidTransform, TriangleMesh};
use crate::rand_util::standard_normal;

/// Generator parameters. All lengths in millimeters, angles in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceParams {
    pub seed: u64,
    /// Global scale factor, 0.9..1.1.
    pub scale: f64,
    /// Nose cap radius, 10.0..14.0 (near the detector's default r0 = 12).
    pub nose_radius: f64,
    /// Apex height above the local face base, 8.0..12.5.
    pub nose_height: f64,
    /// Eye socket depression depth, 1.5..4.0.
    pub eye_socket_depth: f64,
    /// Eye center offset from the midline, 26.0..32.0.
    pub eye_center_x: f64,
    /// Eye almond half width, 12.0..15.0.
    pub eye_half_width: f64,
    /// Mouth half width, 18.0..26.0.
    pub mouth_half_width: f64,
    /// Lateral head width factor, 0.9..1.1.
    pub cheek_width: f64,
    /// Chin bump height, 5.0..10.0.
    pub chin_height: f64,
    /// Brow ridge height, 1.5..3.5.
    pub brow_height: f64,
    /// One-sided cheek bump amplitude, 0.0..1.5.
    pub asymmetry: f64,
    /// Gaussian vertex noise sigma per coordinate, 0.0..0.5.
    pub noise_sigma: f64,
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    pub roll_deg: f64,
    pub translation: Vector3<f64>,
    /// Skin tint added to the base skin color, each channel -15..15.
    pub skin_tint: [f64; 3],
    pub include_ears: bool,
    /// Sampling step of the generated mesh grid, 0.8..2.0.
    pub mesh_step: f64,
}

impl FaceParams {
    /// Draw a plausible parameter set deterministically from a seed.
    pub fn from_seed(seed: u64) -> FaceParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = rng.gen_range(0.97..1.03);
        let nose_radius = rng.gen_range(10.8..13.2);
        FaceParams {
            seed,
            scale,
            nose_radius,
            // Proportional to the radius so the cap always meets the base
            // below the tip (the subnasale crease exists for every face).
            nose_height: nose_radius * rng.gen_range(0.80..0.88),
            eye_socket_depth: rng.gen_range(2.0..3.2),
            eye_center_x: rng.gen_range(27.5..30.5),
            eye_half_width: rng.gen_range(12.5..14.5),
            mouth_half_width: rng.gen_range(19.0..25.0),
            cheek_width: rng.gen_range(0.96..1.04),
            chin_height: rng.gen_range(6.0..9.0),
            brow_height: rng.gen_range(2.0..3.0),
            asymmetry: rng.gen_range(0.0..0.6),
            noise_sigma: 0.05,
            yaw_deg: rng.gen_range(-6.0..6.0),
            pitch_deg: rng.gen_range(-6.0..6.0),
            roll_deg: rng.gen_range(-6.0..6.0),
            translation: Vector3::new(
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
            ),
            skin_tint: [
                rng.gen_range(-8.0..8.0),
                rng.gen_range(-8.0..8.0),
                rng.gen_range(-8.0..8.0),
            ],
            include_ears: true,
            mesh_step: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(&str, f64, f64, f64); 13] = [
            ("scale", self.scale, 0.9, 1.1),
            ("nose_radius", self.nose_radius, 10.0, 14.0),
            ("nose_height", self.nose_height, 8.0, 12.5),
            ("eye_socket_depth", self.eye_socket_depth, 1.5, 4.0),
            ("eye_center_x", self.eye_center_x, 26.0, 32.0),
            ("eye_half_width", self.eye_half_width, 12.0, 15.0),
            ("mouth_half_width", self.mouth_half_width, 18.0, 26.0),
            ("cheek_width", self.cheek_width, 0.9, 1.1),
            ("chin_height", self.chin_height, 5.0, 10.0),
            ("brow_height", self.brow_height, 1.5, 3.5),
            ("asymmetry", self.asymmetry, 0.0, 1.5),
            ("noise_sigma", self.noise_sigma, 0.0, 0.5),
            ("mesh_step", self.mesh_step, 0.8, 2.0),
        ];
        for (name, value, lo, hi) in checks {
            if !(lo..=hi).contains(&value) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {value} outside [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

/// Seed list echoing the training-set size of 80 faces.
pub fn train_corpus_seeds() -> Vec<u64> {
    (0..80).map(|i| 1_000 + i).collect()
}

/// Seed list for the 50-face evaluation corpus, disjoint from training.
pub fn test_corpus_seeds() -> Vec<u64> {
    (0..50).map(|i| 20_000 + i).collect()
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// The analytic face surface in the frontal frame before scale/pose/noise.
pub struct FaceSurface {
    p: FaceParams,
    /// z of the nose apex before the final shift; subtracted so apex = 0.
    apex_raw: f64,
    /// z of the base surface directly under the apex.
    base_at_origin: f64,
}

impl FaceSurface {
    pub fn new(params: &FaceParams) -> FaceSurface {
        let mut s = FaceSurface {
            p: params.clone(),
            apex_raw: 0.0,
            base_at_origin: 0.0,
        };
        s.base_at_origin = s.base(0.0, 0.0);
        s.apex_raw = s.base_at_origin + s.p.nose_height;
        s
    }

    fn footprint_half_axes(&self) -> (f64, f64, f64) {
        // (half width, half height, footprint center y)
        (86.0 * self.p.cheek_width, 92.0, 5.0)
    }

    pub fn inside_footprint(&self, x: f64, y: f64) -> bool {
        let (fw, fh, yc) = self.footprint_half_axes();
        let u = x / fw;
        let v = (y - yc) / fh;
        u * u + v * v <= 1.0
    }

    /// Base surface: dome + receding sides + all features except the nose cap.
    fn base(&self, x: f64, y: f64) -> f64 {
        let p = &self.p;
        let dx = 94.0 * p.cheek_width;
        let dy = 102.0;
        let yc = 5.0;
        let arg = 1.0 - (x / dx).powi(2) - ((y - yc) / dy).powi(2);
        let dome = 55.0 * (arg.max(0.0).sqrt() - 1.0);

        // The head curves away laterally.
        let sidecut = -28.0 * smoothstep((x.abs() - 30.0) / 45.0);

        // Nose bridge ridge running up toward the nasion.
        let ridge = 4.0 * (-(x / 5.5).powi(2)).exp() * (-((y - 14.0) / 11.0).powi(2)).exp();

        // Nasion dip.
        let dip = -2.0 * (-((y - 31.0) / 5.0).powi(2) - (x / 9.0).powi(2)).exp();

        // Brow ridges.
        let brow = p.brow_height
            * (-((y - 42.0) / 5.0).powi(2)).exp()
            * (-(x / 34.0).powi(4)).exp();

        // Eye sockets.
        let socket = |cx: f64| -> f64 {
            -p.eye_socket_depth
                * (-(((x - cx) / 11.0).powi(2) + ((y - 28.0) / 6.0).powi(2))).exp()
        };
        let sockets = socket(p.eye_center_x) + socket(-p.eye_center_x);

        // Lip bulges with elliptical cross sections; the sqrt profile makes
        // sharp creases at y = -22, -30, -38 on the midline.
        let lens = (1.0 - (x / p.mouth_half_width).powi(2)).max(0.0).sqrt();
        let lip_bulge = |center: f64, height: f64| -> f64 {
            let v = (y - center) / 4.0;
            if v.abs() < 1.0 {
                height * lens * (1.0 - v * v).sqrt()
            } else {
                0.0
            }
        };
        // Philtrum and mentolabial grooves at the outer lip creases: narrow
        // furrows that make the lip boundaries geometrically salient, as on
        // real faces.
        let groove = |center: f64| -> f64 {
            -1.3 * lens * (-((y - center) / 1.6).powi(2)).exp()
        };
        let lips = lip_bulge(-26.0, 2.2) + lip_bulge(-34.0, 2.6) + groove(-22.0) + groove(-38.0);

        // Chin bump.
        let chin = p.chin_height * (-((x / 14.0).powi(2) + ((y + 58.0) / 6.0).powi(2))).exp();

        // One-sided cheek bump used as the asymmetry control.
        let asym = p.asymmetry * (-(((x - 45.0) / 12.0).powi(2) + ((y + 15.0) / 12.0).powi(2))).exp();

        // Ears.
        let ears = if p.include_ears {
            self.ear(x, y)
        } else {
            0.0
        };

        dome + sidecut + ridge + dip + brow + sockets + lips + chin + asym + ears
    }

    fn ear_center_x(&self) -> f64 {
        74.0 * self.p.cheek_width
    }

    fn ear_lower_edge(&self, u: f64) -> f64 {
        // Curved lower edge, lowest right under the ear center.
        -14.0 + 6.0 * (u / 10.0).powi(2)
    }

    fn ear(&self, x: f64, y: f64) -> f64 {
        let u = x.abs() - self.ear_center_x();
        if u.abs() > 14.0 {
            return 0.0;
        }
        let lateral = (-(u / 6.0).powi(2)).exp();
        let y_lo = self.ear_lower_edge(u);
        let ramp = smoothstep((y - y_lo) / 2.5);
        let fade = (-((y + 6.0) / 14.0).powi(2)).exp();
        9.0 * lateral * ramp * fade
    }

    /// The near-spherical nose cap; `None` outside its disk.
    fn cap(&self, x: f64, y: f64) -> Option<f64> {
        let rn = self.p.nose_radius;
        let s2 = x * x + y * y;
        if s2 >= rn * rn {
            return None;
        }
        // A slight quartic taper makes the apex the strict sphericity optimum.
        let taper = 0.25 * (s2 / 100.0).powi(2);
        Some(self.apex_raw - rn + (rn * rn - s2).sqrt() - taper)
    }

    /// Height field with the apex shifted to z = 0.
    pub fn height(&self, x: f64, y: f64) -> f64 {
        let base = self.base(x, y);
        let z = match self.cap(x, y) {
            Some(cap) => base.max(cap),
            None => base,
        };
        z - self.apex_raw
    }

    /// Per-vertex RGB texture in [0, 255].
    pub fn color(&self, x: f64, y: f64) -> [f64; 3] {
        let p = &self.p;
        let skin = [
            (222.0 + p.skin_tint[0]).clamp(0.0, 255.0),
            (171.0 + p.skin_tint[1]).clamp(0.0, 255.0),
            (150.0 + p.skin_tint[2]).clamp(0.0, 255.0),
        ];
        // Lips: border coincides with the lip bulge creases on the midline.
        let lens = (1.0 - (x / p.mouth_half_width).powi(2)).max(0.0).sqrt();
        if (y + 30.0).abs() <= 8.0 * lens && lens > 0.0 {
            return [176.0, 62.0, 80.0];
        }
        // Eye almonds.
        let almond = |cx: f64| -> bool {
            ((x - cx) / p.eye_half_width).powi(2) + ((y - 28.0) / 5.0).powi(2) <= 1.0
        };
        if almond(p.eye_center_x) || almond(-p.eye_center_x) {
            return [82.0, 70.0, 66.0];
        }
        // Brow bands.
        if (y - 42.0).abs() <= 3.5 && (16.0..=44.0).contains(&x.abs()) {
            return [98.0, 72.0, 60.0];
        }
        skin
    }

    /// y of the crease where the nose cap meets the base on the midline,
    /// below the tip (the subnasale).
    fn subnasale_y(&self) -> f64 {
        // cap(0, y) - base(0, y) changes sign between the apex and the cap rim.
        let f = |y: f64| self.cap(0.0, y).unwrap() - self.base(0.0, y);
        let mut lo = -(self.p.nose_radius - 1e-6); // near rim: cap far below base
        let mut hi = -2.0; // near apex: cap above base
        debug_assert!(f(hi) > 0.0 && f(lo) < 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// x of the cap/base crease on the horizontal scan row (the alare).
    fn alare_x(&self, row_y: f64) -> f64 {
        let f = |x: f64| match self.cap(x, row_y) {
            Some(c) => c - self.base(x, row_y),
            None => -1.0,
        };
        let mut lo = 2.0;
        let mut hi = self.p.nose_radius - 1e-6;
        debug_assert!(f(lo) > 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// y minimizing the midline height in the nasion window.
    fn nasion_y(&self) -> f64 {
        golden_extremum(|y| self.height(0.0, y), 24.0, 40.0, false)
    }

    /// y maximizing the midline height in the chin window.
    fn pogonion_y(&self) -> f64 {
        golden_extremum(|y| self.height(0.0, y), -70.0, -46.0, true)
    }

    /// Ground-truth landmarks in the frontal frame (before scale/pose).
    pub fn landmarks(&self) -> LandmarkSet {
        let p = &self.p;
        let mut set = LandmarkSet::new();
        let mut put = |name: LandmarkName, x: f64, y: f64| {
            let z = self.height(x, y);
            set.insert(name, Point3::new(x, y, z)).expect("finite landmark");
        };

        put(LandmarkName::NoseTip, 0.0, 0.0);

        let inner = p.eye_center_x - p.eye_half_width;
        let outer = p.eye_center_x + p.eye_half_width;
        // Subject's right is -x in this frame.
        put(LandmarkName::RightEyeOuterCorner, -outer, 28.0);
        put(LandmarkName::RightEyeInnerCorner, -inner, 28.0);
        put(LandmarkName::LeftEyeInnerCorner, inner, 28.0);
        put(LandmarkName::LeftEyeOuterCorner, outer, 28.0);
        put(LandmarkName::RightLipCorner, -p.mouth_half_width, -30.0);
        put(LandmarkName::LeftLipCorner, p.mouth_half_width, -30.0);

        let y_sub = self.subnasale_y();
        put(LandmarkName::Subnasale, 0.0, y_sub);
        let x_al = self.alare_x(ALARE_ROW_Y);
        put(LandmarkName::RightAlare, -x_al, ALARE_ROW_Y);
        put(LandmarkName::LeftAlare, x_al, ALARE_ROW_Y);
        put(LandmarkName::UpperLip, 0.0, -22.0);
        put(LandmarkName::LipCenter, 0.0, -30.0);
        put(LandmarkName::LowerLip, 0.0, -38.0);
        put(LandmarkName::Nasion, 0.0, self.nasion_y());
        put(LandmarkName::Pogonion, 0.0, self.pogonion_y());

        if p.include_ears {
            let ex = self.ear_center_x();
            let y_lobe = self.ear_lower_edge(0.0) + 1.25;
            put(LandmarkName::RightEarlobeTip, -ex, y_lobe);
            put(LandmarkName::LeftEarlobeTip, ex, y_lobe);
        }
        set
    }
}

/// The row (relative to the nose tip) scanned horizontally for the alares.
pub const ALARE_ROW_Y: f64 = -6.0;

fn golden_extremum(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, maximize: bool) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let sign = if maximize { -1.0 } else { 1.0 };
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = sign * f(c);
    let mut fd = sign * f(d);
    for _ in 0..120 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = sign * f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = sign * f(d);
        }
    }
    0.5 * (a + b)
}

/// Generate a deterministic synthetic face and its ground-truth landmarks.
pub fn generate_face(params: &FaceParams) -> Result<(TriangleMesh, LandmarkSet)> {
    params.validate()?;
    let surface = FaceSurface::new(params);
    let step = params.mesh_step;

    let (fw, fh, yc) = surface.footprint_half_axes();
    let nx = (fw / step).ceil() as i64;
    let ny_lo = ((yc - fh) / step).floor() as i64;
    let ny_hi = ((yc + fh) / step).ceil() as i64;

    let mut jitter_rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_mul(0x9E37_79B9).wrapping_add(1));
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut colors: Vec<[f64; 3]> = Vec::new();
    let mut index = vec![vec![usize::MAX; (2 * nx + 1) as usize]; (ny_hi - ny_lo + 1) as usize];

    for j in ny_lo..=ny_hi {
        for i in -nx..=nx {
            let gx = i as f64 * step;
            let gy = j as f64 * step;
            // Jitter is drawn for every grid node to keep the stream layout
            // independent of the footprint, but only applied inside it.
            let jx = jitter_rng.gen_range(-0.3..0.3);
            let jy = jitter_rng.gen_range(-0.3..0.3);
            if !surface.inside_footprint(gx, gy) {
                continue;
            }
            // The node at the apex stays unjittered so the ground-truth nose
            // tip is an actual mesh vertex for noiseless faces.
            let (x, y) = if i == 0 && j == 0 {
                (0.0, 0.0)
            } else {
                (gx + jx, gy + jy)
            };
            let z = surface.height(x, y);
            index[(j - ny_lo) as usize][(i + nx) as usize] = vertices.len();
            vertices.push(Point3::new(x, y, z));
            colors.push(surface.color(x, y));
        }
    }

    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for j in ny_lo..ny_hi {
        for i in -nx..nx {
            let v00 = index[(j - ny_lo) as usize][(i + nx) as usize];
            let v10 = index[(j - ny_lo) as usize][(i + 1 + nx) as usize];
            let v01 = index[(j + 1 - ny_lo) as usize][(i + nx) as usize];
            let v11 = index[(j + 1 - ny_lo) as usize][(i + 1 + nx) as usize];
            if v00 != usize::MAX && v10 != usize::MAX && v11 != usize::MAX && v01 != usize::MAX {
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
    }

    let mut landmarks = surface.landmarks();

    // Global scale.
    if params.scale != 1.0 {
        for v in &mut vertices {
            v.coords *= params.scale;
        }
        let scaled: Vec<(LandmarkName, Point3<f64>)> = landmarks
            .iter()
            .map(|(n, p)| (n, Point3::from(p.coords * params.scale)))
            .collect();
        let mut set = LandmarkSet::new();
        for (n, p) in scaled {
            set.insert(n, p)?;
        }
        landmarks = set;
    }

    // Vertex noise (ground truth stays at the noiseless surface).
    if params.noise_sigma > 0.0 {
        let mut noise_rng =
            ChaCha8Rng::seed_from_u64(params.seed.wrapping_mul(0x85EB_CA6B).wrapping_add(2));
        for v in &mut vertices {
            v.x += params.noise_sigma * standard_normal(&mut noise_rng);
            v.y += params.noise_sigma * standard_normal(&mut noise_rng);
            v.z += params.noise_sigma * standard_normal(&mut noise_rng);
        }
    }

    // Rigid pose offset, applied to mesh and landmarks alike.
    let rot = Rotation3::from_euler_angles(
        params.pitch_deg.to_radians(),
        params.yaw_deg.to_radians(),
        params.roll_deg.to_radians(),
    );
    let pose = RigidTransform::new(*rot.matrix(), params.translation)?;
    for v in &mut vertices {
        *v = pose.apply(v);
    }
    let landmarks = landmarks.transformed(&pose);

    let mesh = TriangleMesh::new(vertices, triangles, Some(colors))?;
    Ok((mesh, landmarks))
}
