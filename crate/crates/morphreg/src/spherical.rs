//! Spherical parameterization with √2 aspect compensation, oval trimming,
//! and uniform-grid resampling into a well-structured reference mesh.
//!
//! A face posed with +z toward the viewer unfolds into a nearly flat patch
//! in (θ, φ); resampling that patch on a uniform angular grid and mapping
//! back to Cartesian space yields a regular triangulation whose connectivity
//! is shared by every face remeshed the same way.

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Forward parameterization: ρ = √(2x²+y²+z²), θ = asin(y/ρ),
/// φ = atan2(√2·x, z); φ is 0 by convention at the poles.
pub fn spherical_parameterize(p: &Point3<f64>) -> Result<(f64, f64, f64)> {
    let rho = (2.0 * p.x * p.x + p.y * p.y + p.z * p.z).sqrt();
    if rho < 1e-12 {
        return Err(Error::InvalidParameter(
            "spherical parameterization undefined at the origin".into(),
        ));
    }
    let theta = (p.y / rho).clamp(-1.0, 1.0).asin();
    let phi = if theta.cos().abs() < 1e-12 {
        0.0
    } else {
        (SQRT2 * p.x).atan2(p.z)
    };
    Ok((rho, theta, phi))
}

/// Inverse of [`spherical_parameterize`].
pub fn inverse_parameterize(rho: f64, theta: f64, phi: f64) -> Point3<f64> {
    let y = rho * theta.sin();
    let x = rho * theta.cos() * phi.sin() / SQRT2;
    let z = rho * theta.cos() * phi.cos();
    Point3::new(x, y, z)
}

/// Controls for [`remesh_spherical`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct RemeshParams {
    /// Angular grid spacing in radians for both θ and φ.
    pub step: f64,
    /// Trim oval half-axes (θ, φ); `None` derives them from the vertex
    /// distribution (95th percentile of |θ| and |φ|, shrunk by 5%).
    pub oval: Option<(f64, f64)>,
    /// ρ disagreement (mm) above which an overwrite counts as a fold-over.
    pub fold_tolerance: f64,
}

impl Default for RemeshParams {
    fn default() -> Self {
        RemeshParams {
            step: 0.005,
            oval: None,
            fold_tolerance: 1.0,
        }
    }
}

/// Diagnostics from a remesh run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RemeshReport {
    /// Grid nodes written more than once with inconsistent ρ.
    pub fold_overs: usize,
}

/// Resample a mesh on a uniform (θ, φ) grid inside a trim oval
/// (θ/a)² + (φ/b)² ≤ 1, keeping the outermost (maximum ρ) layer, and
/// triangulate the grid regularly. Per-vertex color is interpolated the
/// same way when present.
pub fn remesh_spherical(
    mesh: &TriangleMesh,
    params: &RemeshParams,
) -> Result<(TriangleMesh, RemeshReport)> {
    if params.step <= 0.0 || !params.step.is_finite() {
        return Err(Error::InvalidParameter(format!("remesh step {}", params.step)));
    }
    let spherical: Vec<(f64, f64, f64)> = mesh
        .vertices
        .iter()
        .map(spherical_parameterize)
        .collect::<Result<_>>()?;

    let (a, b) = match params.oval {
        Some((a, b)) => {
            if a <= 0.0 || b <= 0.0 {
                return Err(Error::InvalidParameter("trim oval half-axes must be positive".into()));
            }
            (a, b)
        }
        None => {
            let percentile = |mut v: Vec<f64>| -> f64 {
                v.sort_by(|p, q| p.partial_cmp(q).unwrap());
                v[((v.len() - 1) as f64 * 0.95).round() as usize]
            };
            let a = percentile(spherical.iter().map(|s| s.1.abs()).collect()) * 0.95;
            let b = percentile(spherical.iter().map(|s| s.2.abs()).collect()) * 0.95;
            if a <= 0.0 || b <= 0.0 {
                return Err(Error::InvalidParameter("degenerate trim oval".into()));
            }
            (a, b)
        }
    };

    // Grid node (i, j) sits at (θ, φ) = (i, j) * step, i and j signed.
    let ni = (a / params.step).floor() as i64;
    let nj = (b / params.step).floor() as i64;
    let width = (2 * nj + 1) as usize;
    let height = (2 * ni + 1) as usize;
    let inside = |i: i64, j: i64| -> bool {
        let t = i as f64 * params.step / a;
        let p = j as f64 * params.step / b;
        t * t + p * p <= 1.0
    };
    let node_index = |i: i64, j: i64| -> usize { (i + ni) as usize * width + (j + nj) as usize };

    let mut rho_map: Vec<Option<f64>> = vec![None; width * height];
    let mut color_map: Vec<[f64; 3]> = vec![[0.0; 3]; width * height];
    let mut fold_overs = 0usize;

    for tri in &mesh.triangles {
        let [ia, ib, ic] = *tri;
        let (_, ta, pa) = spherical[ia];
        let (_, tb, pb) = spherical[ib];
        let (_, tc, pc) = spherical[ic];
        // Skip triangles that straddle the φ branch cut behind the head.
        let phi_span = pa.max(pb).max(pc) - pa.min(pb).min(pc);
        if phi_span > std::f64::consts::PI {
            continue;
        }
        let i0 = ((ta.min(tb).min(tc)) / params.step).ceil() as i64;
        let i1 = ((ta.max(tb).max(tc)) / params.step).floor() as i64;
        let j0 = ((pa.min(pb).min(pc)) / params.step).ceil() as i64;
        let j1 = ((pa.max(pb).max(pc)) / params.step).floor() as i64;
        for i in i0.max(-ni)..=i1.min(ni) {
            for j in j0.max(-nj)..=j1.min(nj) {
                if !inside(i, j) {
                    continue;
                }
                let (t, p) = (i as f64 * params.step, j as f64 * params.step);
                let det = (tb - ta) * (pc - pa) - (tc - ta) * (pb - pa);
                if det.abs() < 1e-18 {
                    continue;
                }
                let wb = ((t - ta) * (pc - pa) - (tc - ta) * (p - pa)) / det;
                let wc = ((tb - ta) * (p - pa) - (t - ta) * (pb - pa)) / det;
                let wa = 1.0 - wb - wc;
                let eps = -1e-9;
                if wa < eps || wb < eps || wc < eps {
                    continue;
                }
                let rho = wa * spherical[ia].0 + wb * spherical[ib].0 + wc * spherical[ic].0;
                let k = node_index(i, j);
                if let Some(existing) = rho_map[k] {
                    if (existing - rho).abs() > params.fold_tolerance {
                        fold_overs += 1;
                    }
                    if rho <= existing {
                        continue;
                    }
                }
                rho_map[k] = Some(rho);
                if let Some(colors) = &mesh.colors {
                    for ch in 0..3 {
                        color_map[k][ch] =
                            wa * colors[ia][ch] + wb * colors[ib][ch] + wc * colors[ic][ch];
                    }
                }
            }
        }
    }

    // Collect valid nodes into a vertex list and triangulate full cells.
    let mut vertex_of_node: Vec<usize> = vec![usize::MAX; width * height];
    let mut vertices = Vec::new();
    let mut colors = Vec::new();
    for i in -ni..=ni {
        for j in -nj..=nj {
            let k = node_index(i, j);
            if let Some(rho) = rho_map[k] {
                vertex_of_node[k] = vertices.len();
                vertices.push(inverse_parameterize(rho, i as f64 * params.step, j as f64 * params.step));
                colors.push(color_map[k]);
            }
        }
    }
    if vertices.is_empty() {
        return Err(Error::InsufficientData("trim oval contains no resampled surface".into()));
    }
    let mut triangles = Vec::new();
    for i in -ni..ni {
        for j in -nj..nj {
            let v00 = vertex_of_node[node_index(i, j)];
            let v01 = vertex_of_node[node_index(i, j + 1)];
            let v10 = vertex_of_node[node_index(i + 1, j)];
            let v11 = vertex_of_node[node_index(i + 1, j + 1)];
            if v00 != usize::MAX && v01 != usize::MAX && v11 != usize::MAX && v10 != usize::MAX {
                triangles.push([v00, v01, v11]);
                triangles.push([v00, v11, v10]);
            }
        }
    }
    let has_colors = mesh.colors.is_some();
    let out = TriangleMesh::new(vertices, triangles, has_colors.then_some(colors))?;
    Ok((out, RemeshReport { fold_overs }))
}

/// Count boundary loops of a triangle mesh, verifying edge-manifoldness
/// (every edge borders at most two triangles) along the way.
pub fn boundary_loop_count(mesh: &TriangleMesh) -> Result<usize> {
    use std::collections::BTreeMap;
    let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for tri in &mesh.triangles {
        for e in 0..3 {
            let (u, v) = (tri[e], tri[(e + 1) % 3]);
            let key = (u.min(v), u.max(v));
            *edge_count.entry(key).or_insert(0) += 1;
        }
    }
    if edge_count.values().any(|&c| c > 2) {
        return Err(Error::InvalidMesh("non-manifold edge shared by over two triangles".into()));
    }
    // Walk boundary edges into loops.
    let mut nexts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&(u, v), &c) in &edge_count {
        if c == 1 {
            nexts.entry(u).or_default().push(v);
            nexts.entry(v).or_default().push(u);
        }
    }
    if nexts.values().any(|n| n.len() != 2) {
        return Err(Error::InvalidMesh("boundary does not form simple loops".into()));
    }
    let mut visited: std::collections::BTreeSet<usize> = Default::default();
    let mut loops = 0;
    let starts: Vec<usize> = nexts.keys().cloned().collect();
    for start in starts {
        if visited.contains(&start) {
            continue;
        }
        loops += 1;
        let mut prev = start;
        let mut here = nexts[&start][0];
        visited.insert(start);
        while here != start {
            visited.insert(here);
            let n = &nexts[&here];
            let next = if n[0] == prev { n[1] } else { n[0] };
            prev = here;
            here = next;
        }
    }
    Ok(loops)
}
