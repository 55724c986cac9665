//! Generate a small synthetic face corpus with ground-truth landmarks.
//!
//! Usage: cargo run --example synthesize_corpus [out_dir]

use morphreg::io::save_mesh;
use morphreg::synth::{generate_face, FaceParams};

fn main() -> Result<(), morphreg::Error> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "corpus_out".into());
    let out = std::path::Path::new(&out);
    std::fs::create_dir_all(out).map_err(|e| morphreg::Error::io(out, e))?;

    for seed in 42..52u64 {
        let params = FaceParams::from_seed(seed);
        let (mesh, landmarks) = generate_face(&params)?;
        save_mesh(&mesh, &out.join(format!("face_{seed}.ply")))?;
        landmarks.save_json(&out.join(format!("face_{seed}.landmarks.json")))?;
        println!(
            "seed {seed}: {} vertices, {} triangles, nose radius {:.1} mm, {} landmarks",
            mesh.vertex_count(),
            mesh.triangles.len(),
            params.nose_radius,
            landmarks.len()
        );
    }
    println!("corpus written to {}", out.display());
    Ok(())
}
