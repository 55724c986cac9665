//! Batch command-line front end: synthesize corpora, train landmark models,
//! annotate faces, register them densely, average, and evaluate accuracy.
//!
//! All logic lives in the library; this binary only parses arguments, wires
//! files to library calls, and maps errors to stable exit codes
//! (0 success, 2 I/O, 3 precondition, 4 numerical failure).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use morphreg::config::Config;
use morphreg::io::{load_mesh, save_mesh};
use morphreg::pca::{load_models, save_models};
use morphreg::pipeline::{
    annotate_face, average_registration, evaluate_landmarks, format_error_table,
    prepare_reference, register_corpus, second_pass, train_models,
};
use morphreg::synth::{generate_face, FaceParams};
use morphreg::{Error, LandmarkSet, TriangleMesh};

#[derive(Parser)]
#[command(
    name = "morphreg",
    about = "Automatic landmarking and dense registration of 3D facial meshes",
    version
)]
struct Cli {
    /// Optional TOML config; missing keys take built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus with ground-truth landmarks.
    Synth {
        /// Number of faces.
        #[arg(long, default_value_t = 10)]
        count: u64,
        /// First seed; face i uses seed base + i.
        #[arg(long, default_value_t = 1000)]
        seed: u64,
        /// Output directory for face_<seed>.ply + face_<seed>.landmarks.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the six salient-landmark detectors from a landmarked corpus.
    Train {
        /// Directory of .ply/.obj meshes with matching .landmarks.json files.
        #[arg(long)]
        corpus: PathBuf,
        /// Output model file.
        #[arg(long)]
        models: PathBuf,
    },
    /// Annotate 17 landmarks on each given mesh.
    Annotate {
        /// Trained model file from `train`.
        #[arg(long)]
        models: PathBuf,
        /// Output directory for <stem>.landmarks.json files.
        #[arg(long)]
        out: PathBuf,
        /// Mesh files to annotate.
        #[arg(required = true)]
        meshes: Vec<PathBuf>,
    },
    /// Densely register a landmarked corpus against a reference face.
    Register {
        /// Reference mesh; a .landmarks.json beside it must exist.
        #[arg(long)]
        reference: PathBuf,
        /// Directory of landmarked sample meshes.
        #[arg(long)]
        corpus: PathBuf,
        /// Output directory for corresponded meshes.
        #[arg(long)]
        out: PathBuf,
        /// Re-register against the pass-1 average face.
        #[arg(long)]
        second_pass: bool,
    },
    /// Align corresponded meshes and write their average face.
    Average {
        /// Directory of corresponded meshes (shared triangulation).
        #[arg(long)]
        corpus: PathBuf,
        /// Output mesh path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare predicted landmark files against ground truth.
    Evaluate {
        /// Directory of predicted .landmarks.json files.
        #[arg(long)]
        predicted: PathBuf,
        /// Directory of ground-truth .landmarks.json files (same file names).
        #[arg(long)]
        truth: PathBuf,
        /// Optional machine-readable JSON report path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(c) => c,
            Err(e) => return fail(e),
        },
        None => Config::default(),
    };
    match run(cli.command, &config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("morphreg: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn run(command: Command, config: &Config) -> Result<(), Error> {
    match command {
        Command::Synth { count, seed, out } => cmd_synth(count, seed, &out),
        Command::Train { corpus, models } => cmd_train(&corpus, &models, config),
        Command::Annotate { models, out, meshes } => cmd_annotate(&models, &out, &meshes, config),
        Command::Register { reference, corpus, out, second_pass } => {
            cmd_register(&reference, &corpus, &out, second_pass, config)
        }
        Command::Average { corpus, out } => cmd_average(&corpus, &out, config),
        Command::Evaluate { predicted, truth, report } => {
            cmd_evaluate(&predicted, &truth, report.as_deref())
        }
    }
}

fn cmd_synth(count: u64, seed_base: u64, out: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    for seed in seed_base..seed_base + count {
        let (mesh, landmarks) = generate_face(&FaceParams::from_seed(seed))?;
        save_mesh(&mesh, &out.join(format!("face_{seed}.ply")))?;
        landmarks.save_json(&out.join(format!("face_{seed}.landmarks.json")))?;
    }
    println!("wrote {count} faces to {}", out.display());
    Ok(())
}

/// Meshes in a directory paired with their `.landmarks.json` files.
fn load_landmarked_corpus(dir: &Path) -> Result<Vec<(PathBuf, TriangleMesh, LandmarkSet)>, Error> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("ply") | Some("obj")
            )
        })
        .collect();
    entries.sort();
    let mut corpus = Vec::with_capacity(entries.len());
    for path in entries {
        let landmarks = LandmarkSet::load_json(&landmarks_path_for(&path))?;
        let mesh = load_mesh(&path)?;
        corpus.push((path, mesh, landmarks));
    }
    if corpus.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no landmarked meshes found in {}",
            dir.display()
        )));
    }
    Ok(corpus)
}

fn landmarks_path_for(mesh_path: &Path) -> PathBuf {
    mesh_path.with_extension("landmarks.json")
}

fn cmd_train(corpus_dir: &Path, models_path: &Path, config: &Config) -> Result<(), Error> {
    let corpus: Vec<_> = load_landmarked_corpus(corpus_dir)?
        .into_iter()
        .map(|(_, m, l)| (m, l))
        .collect();
    let models = train_models(&corpus, config)?;
    save_models(&models, models_path)?;
    println!("trained {} models from {} faces:", models.len(), corpus.len());
    for model in &models {
        let leading: Vec<String> = model.eigenvalues.iter().take(4).map(|v| format!("{v:.3}")).collect();
        println!("  {:<22} leading eigenvalues {}", model.name.label(), leading.join(", "));
    }
    Ok(())
}

fn cmd_annotate(
    models_path: &Path,
    out: &Path,
    meshes: &[PathBuf],
    config: &Config,
) -> Result<(), Error> {
    let models = load_models(models_path)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut succeeded = 0usize;
    let mut last_error: Option<Error> = None;
    for path in meshes {
        let result = load_mesh(path).and_then(|mesh| annotate_face(&mesh, &models, config));
        match result {
            Ok(annotation) => {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("face");
                annotation
                    .landmarks
                    .save_json(&out.join(format!("{stem}.landmarks.json")))?;
                let note = if annotation.failures.is_empty() {
                    String::new()
                } else {
                    let names: Vec<&str> =
                        annotation.failures.iter().map(|(n, _)| n.label()).collect();
                    format!(" (missing: {})", names.join(", "))
                };
                println!("{}: {} landmarks{note}", path.display(), annotation.landmarks.len());
                succeeded += 1;
            }
            Err(e) => {
                eprintln!("{}: failed: {e}", path.display());
                last_error = Some(e);
            }
        }
    }
    println!("annotated {succeeded}/{} faces", meshes.len());
    match (succeeded, last_error) {
        (0, Some(e)) => Err(e),
        _ => Ok(()),
    }
}

fn cmd_register(
    reference_path: &Path,
    corpus_dir: &Path,
    out: &Path,
    run_second_pass: bool,
    config: &Config,
) -> Result<(), Error> {
    let ref_mesh = load_mesh(reference_path)?;
    let ref_landmarks = LandmarkSet::load_json(&landmarks_path_for(reference_path))?;
    let reference = prepare_reference(&ref_mesh, &ref_landmarks, config)?;
    println!(
        "reference remeshed to {} vertices ({} fold-overs)",
        reference.mesh.vertex_count(),
        reference.remesh_report.fold_overs
    );

    let corpus = load_landmarked_corpus(corpus_dir)?;
    let named: Vec<(TriangleMesh, LandmarkSet)> =
        corpus.iter().map(|(_, m, l)| (m.clone(), l.clone())).collect();
    let registration = register_corpus(reference, &named);
    report_registration_failures(&corpus, &registration.failures);

    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    save_mesh(&registration.reference.mesh, &out.join("reference.ply"))?;
    let mut kept = corpus
        .iter()
        .enumerate()
        .filter(|(i, _)| !registration.failures.iter().any(|(j, _)| j == i))
        .map(|(_, (p, _, _))| p.clone());
    for sample in &registration.samples {
        let path = kept.next().expect("sample count matches");
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("face");
        save_mesh(sample, &out.join(format!("{stem}.corr.ply")))?;
    }
    println!("pass 1: {} corresponded meshes", registration.samples.len());

    if run_second_pass {
        let (average, _) = average_registration(&registration, config)?;
        let pass2 = second_pass(&registration, &average, &named)?;
        report_registration_failures(&corpus, &pass2.failures);
        let pass2_dir = out.join("pass2");
        std::fs::create_dir_all(&pass2_dir).map_err(|e| Error::io(&pass2_dir, e))?;
        save_mesh(&average, &pass2_dir.join("pass1_average.ply"))?;
        let mut kept = corpus
            .iter()
            .enumerate()
            .filter(|(i, _)| !pass2.failures.iter().any(|(j, _)| j == i))
            .map(|(_, (p, _, _))| p.clone());
        let mut displacement = 0.0f64;
        let mut compared = 0usize;
        for sample in &pass2.samples {
            let path = kept.next().expect("sample count matches");
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("face");
            save_mesh(sample, &pass2_dir.join(format!("{stem}.corr.ply")))?;
        }
        // Displacement between passes, over samples present in both.
        for (p1, p2) in registration.samples.iter().zip(&pass2.samples) {
            if p1.vertex_count() == p2.vertex_count() {
                let mean: f64 = p1
                    .vertices
                    .iter()
                    .zip(&p2.vertices)
                    .map(|(a, b)| (a - b).norm())
                    .sum::<f64>()
                    / p1.vertex_count() as f64;
                displacement += mean;
                compared += 1;
            }
        }
        if compared > 0 {
            println!(
                "pass 2: {} meshes, mean vertex displacement vs pass 1: {:.3} mm",
                pass2.samples.len(),
                displacement / compared as f64
            );
        }
    }
    Ok(())
}

fn report_registration_failures(
    corpus: &[(PathBuf, TriangleMesh, LandmarkSet)],
    failures: &[(usize, Error)],
) {
    for (i, e) in failures {
        eprintln!("{}: registration failed: {e}", corpus[*i].0.display());
    }
}

fn cmd_average(corpus_dir: &Path, out: &Path, config: &Config) -> Result<(), Error> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir)
        .map_err(|e| Error::io(corpus_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("ply") | Some("obj")))
        .collect();
    paths.sort();
    if paths.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "averaging needs at least 2 meshes, found {} in {}",
            paths.len(),
            corpus_dir.display()
        )));
    }
    let meshes: Vec<TriangleMesh> = paths.iter().map(|p| load_mesh(p)).collect::<Result<_, _>>()?;
    let gpa = morphreg::gpa::gpa_align(&meshes, &config.gpa)?;
    let average = morphreg::gpa::average_face(&gpa.aligned)?;
    save_mesh(&average, out)?;
    println!(
        "averaged {} meshes in {} GPA iterations -> {}",
        meshes.len(),
        gpa.iterations,
        out.display()
    );
    Ok(())
}

fn cmd_evaluate(predicted: &Path, truth: &Path, report: Option<&Path>) -> Result<(), Error> {
    let mut names: Vec<PathBuf> = std::fs::read_dir(predicted)
        .map_err(|e| Error::io(predicted, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".landmarks.json"))
        .collect();
    names.sort();
    let mut pairs: Vec<(LandmarkSet, LandmarkSet)> = Vec::new();
    for pred_path in &names {
        let file_name = pred_path.file_name().expect("filtered on file name");
        let truth_path = truth.join(file_name);
        pairs.push((
            LandmarkSet::load_json(pred_path)?,
            LandmarkSet::load_json(&truth_path)?,
        ));
    }
    if pairs.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no predicted landmark files in {}",
            predicted.display()
        )));
    }
    let refs: Vec<(&LandmarkSet, &LandmarkSet)> = pairs.iter().map(|(p, t)| (p, t)).collect();
    let rows = evaluate_landmarks(&refs);
    print!("{}", format_error_table(&rows));
    if let Some(path) = report {
        let json = serde_json::to_string_pretty(&rows)
            .map_err(|e| Error::Config(format!("report serialization: {e}")))?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}
