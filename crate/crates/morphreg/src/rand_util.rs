//! Deterministic Gaussian sampling on top of any `Rng`.

use rand::Rng;

/// Standard normal draw via Box-Muller. Two uniforms per call keeps the
/// stream layout simple and reproducible.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
