//! Least-squares sphere fitting.
//!
//! Minimizes the algebraic residual sum over `|‖p − O‖² − r²|` by the linear
//! normal-equation system in the parameter vector
//! `W = [2a, 2b, 2c, r² − (a² + b² + c²)]`, then recovers the radius as
//! `r = sqrt(W₄ + (W₁² + W₂² + W₃²)/4)`. The reported residual is
//! `e = sqrt(E) / M` with `E` the summed squared algebraic residuals.

use nalgebra::{Matrix4, Point3, Vector3, Vector4};

use crate::error::{Error, Result};

/// A fitted sphere: center, radius and mean algebraic fitting residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereFit {
    pub center: Point3<f64>,
    pub radius: f64,
    /// `sqrt(E) / M`; zero for noiseless spherical input.
    pub residual: f64,
}

/// Fit a sphere to at least four non-coplanar points.
pub fn fit_sphere(points: &[Point3<f64>]) -> Result<SphereFit> {
    let m = points.len();
    if m < 4 {
        return Err(Error::InsufficientData(format!(
            "sphere fit requires at least 4 points, got {m}"
        )));
    }

    // Shift into the centroid frame for conditioning; the fitted sphere is
    // translation equivariant so the solution is unaffected.
    let centroid = points
        .iter()
        .fold(Vector3::zeros(), |acc, p| acc + p.coords)
        / m as f64;

    // Normal equations: (B Bᵀ) W = B A with B rows [x y z 1] and A = ‖p‖².
    let mut bbt = Matrix4::<f64>::zeros();
    let mut ba = Vector4::<f64>::zeros();
    for p in points {
        let q = p.coords - centroid;
        let row = Vector4::new(q.x, q.y, q.z, 1.0);
        let a = q.norm_squared();
        bbt += row * row.transpose();
        ba += row * a;
    }

    // Coplanar/collinear input makes B rank deficient.
    let lu = bbt.full_piv_lu();
    let spread: f64 = points
        .iter()
        .map(|p| (p.coords - centroid).norm_squared())
        .sum::<f64>()
        / m as f64;
    let scale = (spread.max(1e-30)).powi(2) * m as f64;
    if lu.determinant().abs() <= 1e-12 * scale * scale {
        return Err(Error::DegenerateFit(
            "points are coplanar or collinear; sphere is not determined".into(),
        ));
    }
    let w = lu.solve(&ba).ok_or_else(|| {
        Error::DegenerateFit("singular normal equations in sphere fit".into())
    })?;

    let center_local = Vector3::new(w[0], w[1], w[2]) / 2.0;
    let radicand = w[3] + (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) / 4.0;
    if radicand < 0.0 {
        return Err(Error::DegenerateFit(format!(
            "negative radicand {radicand:.3e} in radius recovery"
        )));
    }
    let radius = radicand.sqrt();
    let center = Point3::from(center_local + centroid);

    let r2 = radius * radius;
    let e_sum: f64 = points
        .iter()
        .map(|p| {
            let eps = ((p - center).norm_squared() - r2).abs();
            eps * eps
        })
        .sum();
    Ok(SphereFit {
        center,
        radius,
        residual: e_sum.sqrt() / m as f64,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    use crate::rand_util::standard_normal;

    pub fn sphere_points(
        rng: &mut ChaCha8Rng,
        center: Point3<f64>,
        radius: f64,
        n: usize,
        sigma: f64,
    ) -> Vec<Point3<f64>> {
        (0..n)
            .map(|_| {
                let dir = Vector3::new(
                    standard_normal(rng),
                    standard_normal(rng),
                    standard_normal(rng),
                )
                .normalize();
                let r = radius + sigma * standard_normal(rng);
                center + dir * r
            })
            .collect()
    }

    #[test]
    fn exact_sphere_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let center = Point3::new(1.0, -2.0, 3.0);
        let pts = sphere_points(&mut rng, center, 11.0, 100, 0.0);
        let fit = fit_sphere(&pts).unwrap();
        assert!((fit.center - center).norm() < 1e-9);
        assert!((fit.radius - 11.0).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn cube_circumsphere() {
        let mut pts = Vec::new();
        for &x in &[-1.0, 1.0] {
            for &y in &[-1.0, 1.0] {
                for &z in &[-1.0, 1.0] {
                    pts.push(Point3::new(x, y, z));
                }
            }
        }
        let fit = fit_sphere(&pts).unwrap();
        assert!(fit.center.coords.norm() < 1e-9);
        assert!((fit.radius - 3.0_f64.sqrt()).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn noisy_sphere_radius_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let center = Point3::new(4.0, 5.0, -6.0);
        let pts = sphere_points(&mut rng, center, 12.0, 500, 0.1);
        let fit = fit_sphere(&pts).unwrap();
        assert!((fit.radius - 12.0).abs() < 0.05, "radius {}", fit.radius);
        // Cross-check against the SVD oracle at the same data.
        let oracle = super::oracle::fit_sphere_svd(&pts);
        assert!((fit.center - oracle.center).norm() < 1e-8);
        assert!((fit.radius - oracle.radius).abs() < 1e-8);
    }

    #[test]
    fn coplanar_points_rejected() {
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                pts.push(Point3::new(i as f64, j as f64, 0.0));
            }
        }
        assert!(matches!(fit_sphere(&pts), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn too_few_points_rejected() {
        let pts = vec![Point3::origin(); 3];
        assert!(matches!(fit_sphere(&pts), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn matches_svd_oracle_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let center = Point3::new(
                rng.gen_range(-20.0..20.0),
                rng.gen_range(-20.0..20.0),
                rng.gen_range(-20.0..20.0),
            );
            let radius = rng.gen_range(2.0..30.0);
            let n = rng.gen_range(10..80);
            let sigma = rng.gen_range(0.0..0.2);
            let pts = sphere_points(&mut rng, center, radius, n, sigma);
            let fit = fit_sphere(&pts).unwrap();
            let oracle = super::oracle::fit_sphere_svd(&pts);
            assert!((fit.center - oracle.center).norm() < 1e-8);
            assert!((fit.radius - oracle.radius).abs() < 1e-8);
            assert!((fit.residual - oracle.residual).abs() < 1e-8);
        }
    }
}
