//! Build an average face: register a small corpus against a reference,
//! align the corresponded meshes by generalized Procrustes analysis, and
//! average vertices and colors.

use morphreg::config::Config;
use morphreg::io::save_mesh;
use morphreg::pipeline::{average_registration, prepare_reference, register_corpus, second_pass};
use morphreg::synth::{generate_face, FaceParams};

fn main() -> Result<(), morphreg::Error> {
    let mut config = Config::default();
    config.remesh.step = 0.01;

    let corpus: Vec<_> = (60..68u64)
        .map(|seed| generate_face(&FaceParams::from_seed(seed)))
        .collect::<Result<Vec<_>, _>>()?;

    let reference = prepare_reference(&corpus[0].0, &corpus[0].1, &config)?;
    let registration = register_corpus(reference, &corpus);
    println!(
        "pass 1: {} of {} registered",
        registration.samples.len(),
        corpus.len()
    );

    let (average, gpa) = average_registration(&registration, &config)?;
    println!(
        "GPA converged in {} iterations; average face has {} vertices",
        gpa.iterations,
        average.vertex_count()
    );

    // Second pass against the average reduces reference bias.
    let pass2 = second_pass(&registration, &average, &corpus)?;
    let (average2, _) = average_registration(&pass2, &config)?;
    let shift: f64 = average
        .vertices
        .iter()
        .zip(&average2.vertices)
        .map(|(a, b)| (a - b).norm())
        .sum::<f64>()
        / average.vertex_count() as f64;
    println!("pass-2 average moved {shift:.3} mm per vertex on average");

    let out = std::env::args().nth(1).unwrap_or_else(|| "average_face.ply".into());
    save_mesh(&average2, std::path::Path::new(&out))?;
    println!("average face written to {out}");
    Ok(())
}
