//! Acceptance suite: one test per release criterion: each prints a single
//! `ACCEPTANCE <n> ... PASS` line when its gate holds.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Matrix3, Point3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use morphreg::config::Config;
use morphreg::flatten::{fill_holes_bicubic, median_filter_3x3, project_to_grid};
use morphreg::gpa::{average_face, gpa_align, GpaParams};
use morphreg::landmarks::{LandmarkName, LandmarkSet};
use morphreg::mesh::{RigidTransform, TriangleMesh};
use morphreg::nose::{locate_nose_tip, rid_statistic};
use morphreg::pca::{locate_salient_landmarks, score_patch, LandmarkModel, PatchVector};
use morphreg::pipeline::{
    annotate_face, coarse_normalize, prepare_reference, train_models,
};
use morphreg::spatial::{barycentric_coords, TriangleBvh};
use morphreg::sphere::fit_sphere;
use morphreg::spherical::{
    boundary_loop_count, inverse_parameterize, remesh_spherical, spherical_parameterize,
    RemeshParams,
};
use morphreg::synth::{generate_face, test_corpus_seeds, train_corpus_seeds, FaceParams};
use morphreg::tps::{register_surface, solve_tps};

fn pass(n: usize, what: &str) {
    println!("ACCEPTANCE {n} ({what}): PASS");
}

// ---------------------------------------------------------------------------
// Shared fixtures (built once per process)

fn train_corpus() -> &'static Vec<(TriangleMesh, LandmarkSet)> {
    static CORPUS: OnceLock<Vec<(TriangleMesh, LandmarkSet)>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        train_corpus_seeds()
            .into_iter()
            .map(|s| generate_face(&FaceParams::from_seed(s)).expect("training face"))
            .collect()
    })
}

fn test_corpus() -> &'static Vec<(TriangleMesh, LandmarkSet)> {
    static CORPUS: OnceLock<Vec<(TriangleMesh, LandmarkSet)>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        test_corpus_seeds()
            .into_iter()
            .map(|s| generate_face(&FaceParams::from_seed(s)).expect("test face"))
            .collect()
    })
}

fn trained_models() -> &'static Vec<LandmarkModel> {
    static MODELS: OnceLock<Vec<LandmarkModel>> = OnceLock::new();
    MODELS.get_or_init(|| {
        train_models(train_corpus(), &Config::default()).expect("training succeeds")
    })
}

fn random_rigid(rng: &mut ChaCha8Rng) -> RigidTransform {
    let rot = Rotation3::from_euler_angles(
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        rng.gen_range(-1.2..1.2),
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
    );
    let t = Vector3::new(
        rng.gen_range(-100.0..100.0),
        rng.gen_range(-100.0..100.0),
        rng.gen_range(-100.0..100.0),
    );
    RigidTransform::new(*rot.matrix(), t).unwrap()
}

/// Independent sphere-fit oracle: generic SVD least squares on the
/// overdetermined linearized system, no normal equations.
fn oracle_sphere(points: &[Point3<f64>]) -> (Point3<f64>, f64) {
    let m = points.len();
    let mut b = DMatrix::<f64>::zeros(m, 4);
    let mut a = DVector::<f64>::zeros(m);
    for (i, p) in points.iter().enumerate() {
        b[(i, 0)] = p.x;
        b[(i, 1)] = p.y;
        b[(i, 2)] = p.z;
        b[(i, 3)] = 1.0;
        a[i] = p.coords.norm_squared();
    }
    let w = b.svd(true, true).solve(&a, 1e-14).unwrap();
    let center = Point3::new(w[0] / 2.0, w[1] / 2.0, w[2] / 2.0);
    let radius = (w[3] + center.coords.norm_squared()).sqrt();
    (center, radius)
}

// ---------------------------------------------------------------------------

#[test]
fn acceptance_01_sphere_fit_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..1000 {
        let center = Point3::new(
            rng.gen_range(-50.0..50.0),
            rng.gen_range(-50.0..50.0),
            rng.gen_range(-50.0..50.0),
        );
        let radius = rng.gen_range(2.0..40.0);
        let points: Vec<Point3<f64>> = (0..100)
            .map(|_| {
                let v = Vector3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
                .normalize();
                center + radius * v
            })
            .collect();
        let fit = fit_sphere(&points).expect("nondegenerate sphere sample");
        assert!((fit.center - center).norm() < 1e-9, "center off by {}", (fit.center - center).norm());
        assert!((fit.radius - radius).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
        let (oc, or) = oracle_sphere(&points);
        assert!((fit.center - oc).norm() < 1e-8);
        assert!((fit.radius - or).abs() < 1e-8);
    }
    pass(1, "sphere-fit exactness and oracle agreement, 1000 instances");
}

#[test]
fn acceptance_02_rotation_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for seed in 3000..3020u64 {
        let (mesh, _) = generate_face(&FaceParams::from_seed(seed)).unwrap();
        let field = rid_statistic(&mesh, 14.0, 12.0).unwrap();
        let tip = locate_nose_tip(&field).unwrap();

        let moved = mesh.transformed(&random_rigid(&mut rng));
        let moved_field = rid_statistic(&moved, 14.0, 12.0).unwrap();
        let moved_tip = locate_nose_tip(&moved_field).unwrap();
        assert_eq!(tip, moved_tip, "seed {seed}: tip vertex changed under rigid motion");

        for (i, (&f0, &f1)) in field.f.iter().zip(&moved_field.f).enumerate() {
            if !f0.is_finite() || !f1.is_finite() {
                assert_eq!(f0.is_finite(), f1.is_finite());
                continue;
            }
            let rel = (f1 - f0).abs() / f0.abs().max(1e-12);
            assert!(rel < 1e-6, "seed {seed} vertex {i}: relative change {rel}");
        }
    }
    pass(2, "rotation invariance of the nose statistic, 20 faces");
}

#[test]
fn acceptance_03_nose_tip_accuracy() {
    let mut total = 0.0;
    for (mesh, truth) in test_corpus() {
        let field = rid_statistic(mesh, 14.0, 12.0).unwrap();
        let tip = mesh.vertices[locate_nose_tip(&field).unwrap()];
        total += (tip - truth.get(LandmarkName::NoseTip).unwrap()).norm();
    }
    let mean = total / test_corpus().len() as f64;
    assert!(mean <= 2.0, "nose tip mean error {mean:.3} mm exceeds 2 mm");
    pass(3, &format!("nose-tip mean error {mean:.3} mm <= 2 mm on 50 test faces"));
}

#[test]
fn acceptance_04_pca_landmark_suite() {
    let models = trained_models();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for model in models {
        // Orthonormal eigenvectors.
        let gram = model.eigenvectors.transpose() * &model.eigenvectors;
        let identity = DMatrix::<f64>::identity(model.k, model.k);
        assert!((gram - identity).norm() < 1e-8, "{}: eigenvectors not orthonormal", model.name);

        // In-span reconstruction: mean + any eigenvector combination has
        // (near-)zero reconstruction error.
        let mut v = model.mean_patch.clone();
        for j in 0..model.k {
            v += model.eigenvectors.column(j) * rng.gen_range(-2.0..2.0) * model.eigenvalues[j].sqrt();
        }
        let score = score_patch(model, &PatchVector(v)).unwrap();
        assert!(score.reconstruction_error < 1e-9, "{}: in-span e = {}", model.name, score.reconstruction_error);

        // The mean patch scores e = 0, d = 0.
        let score = score_patch(model, &PatchVector(model.mean_patch.clone())).unwrap();
        assert!(score.reconstruction_error < 1e-12 && score.mahalanobis < 1e-12);
    }

    // Detection accuracy of the six salient landmarks on the test corpus.
    let config = Config::default();
    let mut total = 0.0;
    let mut count = 0usize;
    for (mesh, truth) in test_corpus() {
        let (normalized, transform, _) = coarse_normalize(mesh, &config).unwrap();
        let grid = fill_holes_bicubic(&median_filter_3x3(&project_to_grid(&normalized, 1.0).unwrap()));
        let detected = locate_salient_landmarks(&grid, models).unwrap();
        let truth = truth.transformed(&transform);
        for (name, p) in detected.iter() {
            total += (p - truth.get(name).unwrap()).norm();
            count += 1;
        }
    }
    let mean = total / count as f64;
    assert!(mean <= 2.0, "six-landmark mean error {mean:.3} mm exceeds 2 mm");
    pass(4, &format!("PCA eigen properties and six-landmark mean {mean:.3} mm <= 2 mm"));
}

#[test]
fn acceptance_05_heuristic_landmark_suite() {
    let config = Config::default();
    let models = trained_models();
    let heuristic_names = [
        LandmarkName::NoseTip,
        LandmarkName::Nasion,
        LandmarkName::RightAlare,
        LandmarkName::LeftAlare,
        LandmarkName::LipCenter,
        LandmarkName::UpperLip,
        LandmarkName::LowerLip,
        LandmarkName::Subnasale,
        LandmarkName::Pogonion,
        LandmarkName::RightEarlobeTip,
        LandmarkName::LeftEarlobeTip,
    ];
    let mut total = 0.0;
    let mut count = 0usize;
    for (mesh, truth) in test_corpus() {
        let annotation = annotate_face(mesh, models, &config).unwrap();
        for name in heuristic_names {
            let (Some(p), Some(g)) = (annotation.landmarks.get(name), truth.get(name)) else {
                continue;
            };
            total += (p - g).norm();
            count += 1;
        }
    }
    let mean = total / count as f64;
    assert!(mean <= 3.0, "heuristic mean error {mean:.3} mm exceeds 3 mm");

    // Partial-result contract: a face without ears still annotates, with
    // the earlobes reported as failures instead of landmarks.
    let mut params = FaceParams::from_seed(777);
    params.include_ears = false;
    let (cropped, _) = generate_face(&params).unwrap();
    let annotation = annotate_face(&cropped, models, &config).unwrap();
    assert!(!annotation.landmarks.contains(LandmarkName::RightEarlobeTip));
    assert!(!annotation.landmarks.contains(LandmarkName::LeftEarlobeTip));
    let failed: Vec<LandmarkName> = annotation.failures.iter().map(|(n, _)| *n).collect();
    assert!(failed.contains(&LandmarkName::RightEarlobeTip));
    assert!(failed.contains(&LandmarkName::LeftEarlobeTip));
    assert!(annotation.landmarks.len() >= 15);
    pass(5, &format!("heuristic mean {mean:.3} mm <= 3 mm, partial results on cropped ears"));
}

#[test]
fn acceptance_06_tps_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..20 {
        let source: Vec<Point3<f64>> = (0..17)
            .map(|_| {
                Point3::new(
                    rng.gen_range(-60.0..60.0),
                    rng.gen_range(-60.0..60.0),
                    rng.gen_range(-30.0..30.0),
                )
            })
            .collect();
        let target: Vec<Point3<f64>> = source
            .iter()
            .map(|p| {
                Point3::new(
                    p.x + rng.gen_range(-5.0..5.0),
                    p.y + rng.gen_range(-5.0..5.0),
                    p.z + rng.gen_range(-5.0..5.0),
                )
            })
            .collect();
        let tps = solve_tps(&source, &target).unwrap();
        for (s, t) in source.iter().zip(&target) {
            assert!((tps.apply(s) - t).norm() < 1e-9, "fiducial interpolation broken");
        }
        assert!(tps.side_condition_residual() < 1e-8);

        // Identity and pure translation are reproduced exactly everywhere.
        let identity = solve_tps(&source, &source).unwrap();
        let shift = Vector3::new(3.0, -4.0, 5.0);
        let translated: Vec<Point3<f64>> = source.iter().map(|p| p + shift).collect();
        let translation = solve_tps(&source, &translated).unwrap();
        for _ in 0..10 {
            let q = Point3::new(
                rng.gen_range(-80.0..80.0),
                rng.gen_range(-80.0..80.0),
                rng.gen_range(-40.0..40.0),
            );
            assert!((identity.apply(&q) - q).norm() < 1e-9);
            assert!((translation.apply(&q) - (q + shift)).norm() < 1e-9);
        }
    }

    // Registered vertices land on the sample surface.
    let mut config = Config::default();
    config.remesh.step = 0.01;
    let (ref_mesh, ref_lms) = generate_face(&FaceParams::from_seed(50)).unwrap();
    let (sample, sample_lms) = generate_face(&FaceParams::from_seed(51)).unwrap();
    let reference = prepare_reference(&ref_mesh, &ref_lms, &config).unwrap();
    let registered =
        register_surface(&reference.mesh, &reference.landmarks, &sample, &sample_lms).unwrap();
    let bvh = TriangleBvh::build(&sample).unwrap();
    for v in &registered.vertices {
        assert!((bvh.closest_point(v).0 - v).norm() < 1e-9, "registered vertex off-surface");
    }
    pass(6, "TPS interpolation, side conditions, exact special cases, on-surface output");
}

#[test]
fn acceptance_07_reference_robustness() {
    // Register each test face against two different references; compare the
    // two dense correspondences at anatomically matched locations.
    let mut config = Config::default();
    config.remesh.step = 0.01;
    let (mesh_a, lms_a) = generate_face(&FaceParams::from_seed(90)).unwrap();
    let (mesh_b, lms_b) = generate_face(&FaceParams::from_seed(91)).unwrap();
    let ref_a = prepare_reference(&mesh_a, &lms_a, &config).unwrap();
    let ref_b = prepare_reference(&mesh_b, &lms_b, &config).unwrap();

    // Express reference A's vertices on reference B's surface, and record
    // for each the interpolation weights over B's triangulation.
    let a_on_b = register_surface(&ref_a.mesh, &ref_a.landmarks, &ref_b.mesh, &ref_b.landmarks)
        .unwrap();
    let bvh_b = TriangleBvh::build(&ref_b.mesh).unwrap();
    let weights: Vec<(usize, [f64; 3])> = a_on_b
        .vertices
        .iter()
        .map(|v| {
            let (p, t) = bvh_b.closest_point(v);
            let [a, b, c] = ref_b.mesh.triangle_corners(t);
            (t, barycentric_coords(&p, &a, &b, &c))
        })
        .collect();

    let mut disagreements: Vec<f64> = Vec::new();
    for (sample, sample_lms) in test_corpus().iter() {
        let via_a = register_surface(&ref_a.mesh, &ref_a.landmarks, sample, sample_lms).unwrap();
        let via_b = register_surface(&ref_b.mesh, &ref_b.landmarks, sample, sample_lms).unwrap();
        for (i, (t, w)) in weights.iter().enumerate() {
            let [ia, ib, ic] = ref_b.mesh.triangles[*t];
            let through_b = Point3::from(
                via_b.vertices[ia].coords * w[0]
                    + via_b.vertices[ib].coords * w[1]
                    + via_b.vertices[ic].coords * w[2],
            );
            disagreements.push((via_a.vertices[i] - through_b).norm());
        }
    }
    disagreements.sort_by(|a, b| a.total_cmp(b));
    let median = disagreements[disagreements.len() / 2];
    assert!(median < 1.5, "median reference disagreement {median:.3} mm exceeds 1.5 mm");
    pass(7, &format!("median disagreement between references {median:.3} mm < 1.5 mm"));
}

#[test]
fn acceptance_08_spherical_remesh() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..1000 {
        let p = Point3::new(
            rng.gen_range(-80.0..80.0),
            rng.gen_range(-80.0..80.0),
            rng.gen_range(5.0..150.0),
        );
        let (rho, theta, phi) = spherical_parameterize(&p).unwrap();
        assert!((inverse_parameterize(rho, theta, phi) - p).norm() < 1e-12);
    }

    let (mesh, lms) = generate_face(&FaceParams::from_seed(15)).unwrap();
    let tip = lms.get(LandmarkName::NoseTip).unwrap();
    let shift = RigidTransform::new(
        Matrix3::identity(),
        -Vector3::new(tip.x, tip.y, tip.z - 80.0),
    )
    .unwrap();
    let centered = mesh.transformed(&shift);
    let (remeshed, _) = remesh_spherical(&centered, &RemeshParams::default()).unwrap();

    let bvh = TriangleBvh::build(&centered).unwrap();
    let hausdorff = remeshed
        .vertices
        .iter()
        .map(|v| (bvh.closest_point(v).0 - v).norm())
        .fold(0.0f64, f64::max);
    assert!(hausdorff < 0.5, "surface deviation {hausdorff:.3} mm exceeds 0.5 mm");
    assert_eq!(boundary_loop_count(&remeshed).unwrap(), 1, "not a single-boundary manifold");
    pass(8, &format!("spherical round trip, deviation {hausdorff:.3} mm < 0.5 mm, one boundary"));
}

#[test]
fn acceptance_09_gpa_average() {
    // Rigid copies align to numerical precision.
    let (base, _) = generate_face(&FaceParams::from_seed(30)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let corpus: Vec<TriangleMesh> = (0..4)
        .map(|_| base.transformed(&random_rigid(&mut rng)))
        .collect();
    let result = gpa_align(&corpus, &GpaParams::default()).unwrap();
    let n = base.vertex_count() as f64;
    for pair in result.aligned.windows(2) {
        let rms = (pair[0]
            .vertices
            .iter()
            .zip(&pair[1].vertices)
            .map(|(a, b)| (a - b).norm_squared())
            .sum::<f64>()
            / n)
            .sqrt();
        assert!(rms < 1e-6, "rigid copies misaligned by RMS {rms}");
    }

    // Objective is non-increasing over iteration counts.
    let mixed: Vec<TriangleMesh> = (0..4)
        .map(|i| {
            let (m, lms) = generate_face(&FaceParams::from_seed(31 + i)).unwrap();
            let tip = lms.get(LandmarkName::NoseTip).unwrap();
            let shift = RigidTransform::new(
                Matrix3::identity(),
                -Vector3::new(tip.x, tip.y, tip.z - 80.0),
            )
            .unwrap();
            let (r, _) = remesh_spherical(
                &m.transformed(&shift),
                &RemeshParams { step: 0.02, oval: Some((0.8, 0.8)), ..RemeshParams::default() },
            )
            .unwrap();
            r
        })
        .collect();
    let counts: Vec<usize> = mixed.iter().map(|m| m.vertex_count()).collect();
    assert!(counts.windows(2).all(|w| w[0] == w[1]), "fixture needs equal vertex counts: {counts:?}");
    let objective = |iters: usize| -> f64 {
        let r = gpa_align(
            &mixed,
            &GpaParams { tolerance: 0.0, max_iterations: iters, normalize_scale: false },
        )
        .unwrap();
        r.aligned
            .iter()
            .map(|m| {
                m.vertices
                    .iter()
                    .zip(&r.mean)
                    .map(|(a, b)| (a - b).norm_squared())
                    .sum::<f64>()
            })
            .sum()
    };
    let mut prev = f64::INFINITY;
    for iters in 1..=6 {
        let obj = objective(iters);
        assert!(obj <= prev + 1e-9, "objective increased: {prev} -> {obj}");
        prev = obj;
    }

    // Averaging noisy rigid copies recovers the base within the 1/sqrt(N)
    // noise bound.
    let sigma = 0.3;
    let n_copies = 12usize;
    let noisy: Vec<TriangleMesh> = (0..n_copies)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(5000 + k as u64);
            let mut copy = base.clone();
            for v in &mut copy.vertices {
                for c in 0..3 {
                    // Box-Muller standard normal.
                    let u1: f64 = rng.gen_range(1e-12..1.0);
                    let u2: f64 = rng.gen_range(0.0..1.0);
                    v[c] += sigma
                        * (-2.0 * u1.ln()).sqrt()
                        * (2.0 * std::f64::consts::PI * u2).cos();
                }
            }
            copy.transformed(&random_rigid(&mut rng))
        })
        .collect();
    let result = gpa_align(&noisy, &GpaParams::default()).unwrap();
    let average = average_face(&result.aligned).unwrap();
    // Compare shapes irrespective of global pose: align the average to the
    // centered base with one more Procrustes step via GPA on the pair.
    let pair = gpa_align(&[average, base.clone()], &GpaParams::default()).unwrap();
    let rms = (pair.aligned[0]
        .vertices
        .iter()
        .zip(&pair.aligned[1].vertices)
        .map(|(a, b)| (a - b).norm_squared())
        .sum::<f64>()
        / n)
        .sqrt();
    let bound = 2.0 * sigma * (3.0 / n_copies as f64).sqrt();
    assert!(rms < bound, "average off base by RMS {rms:.4} mm, bound {bound:.4} mm");
    pass(9, &format!("GPA alignment, monotone objective, noise-averaged RMS {rms:.4} < {bound:.4} mm"));
}

#[test]
fn acceptance_10_end_to_end_determinism() {
    let bin = env!("CARGO_BIN_EXE_morphreg");
    let root = tempfile::tempdir().unwrap();
    let config_path = root.path().join("config.toml");
    std::fs::write(&config_path, "[remesh]\nstep = 0.01\n").unwrap();

    let run = |dir: &std::path::Path| {
        let status = |args: &[&str]| {
            let out = std::process::Command::new(bin)
                .args(args)
                .output()
                .expect("pipeline command runs");
            assert!(
                out.status.success(),
                "command {args:?} failed: {}",
                String::from_utf8_lossy(&out.stderr)
            );
        };
        std::fs::create_dir_all(dir).unwrap();
        let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
        let config = config_path.to_string_lossy().into_owned();
        status(&["synth", "--count", "20", "--seed", "1000", "--out", &p("train")]);
        status(&["synth", "--count", "12", "--seed", "20000", "--out", &p("test")]);
        status(&["train", "--corpus", &p("train"), "--models", &p("models.bin")]);
        let meshes: Vec<String> = (20000..20012)
            .map(|s| dir.join("test").join(format!("face_{s}.ply")).to_string_lossy().into_owned())
            .collect();
        let models_path = p("models.bin");
        let pred_path = p("pred");
        let mut args = vec!["annotate", "--models", &models_path, "--out", &pred_path];
        args.extend(meshes.iter().map(|s| s.as_str()));
        status(&args);
        let reference = dir.join("test").join("face_20000.ply").to_string_lossy().into_owned();
        status(&[
            "--config", &config,
            "register",
            "--reference", &reference,
            "--corpus", &p("test"),
            "--out", &p("reg"),
        ]);
        status(&["average", "--corpus", &p("reg"), "--out", &p("average.ply")]);
        status(&[
            "evaluate",
            "--predicted", &p("pred"),
            "--truth", &p("test"),
            "--report", &p("report.json"),
        ]);
    };

    let start = std::time::Instant::now();
    let dir1 = root.path().join("run1");
    let dir2 = root.path().join("run2");
    run(&dir1);
    run(&dir2);
    let elapsed = start.elapsed();

    // Every produced landmark JSON, mesh, and report must be byte-identical.
    let mut compared = 0usize;
    let mut stack = vec![std::path::PathBuf::new()];
    while let Some(rel) = stack.pop() {
        for entry in std::fs::read_dir(dir1.join(&rel)).unwrap() {
            let entry = entry.unwrap();
            let rel_child = rel.join(entry.file_name());
            if entry.file_type().unwrap().is_dir() {
                stack.push(rel_child);
            } else {
                let a = std::fs::read(dir1.join(&rel_child)).unwrap();
                let b = std::fs::read(dir2.join(&rel_child))
                    .unwrap_or_else(|_| panic!("{} missing from run 2", rel_child.display()));
                assert_eq!(a, b, "{} differs between runs", rel_child.display());
                compared += 1;
            }
        }
    }
    assert!(compared >= 80, "expected a full output tree, compared only {compared} files");
    assert!(
        elapsed.as_secs() < 15 * 60,
        "two pipeline runs took {elapsed:?}, budget 15 min"
    );
    pass(10, &format!("two runs byte-identical across {compared} files in {elapsed:.0?}"));
}
