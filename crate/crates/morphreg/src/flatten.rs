//! 3D→2D flattening: co-registered depth / gray / Cr grids at millimeter
//! resolution, with z-buffered projection, decision-based median de-noising,
//! and bicubic hole filling.

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// Gray-scale intensity y = 0.30 r + 0.59 g + 0.11 b.
pub fn rgb_to_gray(r: f64, g: f64, b: f64) -> f64 {
    0.30 * r + 0.59 * g + 0.11 * b
}

/// Full-range Cr chroma channel.
pub fn rgb_to_cr(r: f64, g: f64, b: f64) -> f64 {
    128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
}

/// A uniform square grid over the xy plane carrying depth, gray intensity,
/// and Cr chroma, with a shared validity mask. Cell `(ix, iy)` covers the
/// point `origin + spacing * (ix, iy)`; rows are stored iy-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub origin: [f64; 2],
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
    pub z: Vec<f64>,
    pub gray: Vec<f64>,
    pub cr: Vec<f64>,
    pub valid: Vec<bool>,
}

impl Grid2D {
    pub fn new(origin: [f64; 2], spacing: f64, nx: usize, ny: usize) -> Grid2D {
        let n = nx * ny;
        Grid2D {
            origin,
            spacing,
            nx,
            ny,
            z: vec![0.0; n],
            gray: vec![0.0; n],
            cr: vec![128.0; n],
            valid: vec![false; n],
        }
    }

    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nx && iy < self.ny);
        iy * self.nx + ix
    }

    #[inline]
    pub fn is_valid(&self, ix: usize, iy: usize) -> bool {
        self.valid[self.idx(ix, iy)]
    }

    /// World xy coordinates of a cell center.
    pub fn cell_center(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.origin[0] + self.spacing * ix as f64,
            self.origin[1] + self.spacing * iy as f64,
        ]
    }

    /// Nearest cell to a world xy position, if inside the grid.
    pub fn nearest_cell(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fx = (x - self.origin[0]) / self.spacing;
        let fy = (y - self.origin[1]) / self.spacing;
        let ix = fx.round();
        let iy = fy.round();
        if ix < 0.0 || iy < 0.0 || ix >= self.nx as f64 || iy >= self.ny as f64 {
            return None;
        }
        Some((ix as usize, iy as usize))
    }

    /// Bilinear depth sample at a world xy position; requires the four
    /// surrounding cells to be valid.
    pub fn sample_z(&self, x: f64, y: f64) -> Option<f64> {
        self.sample(&self.z, x, y)
    }

    pub fn sample_gray(&self, x: f64, y: f64) -> Option<f64> {
        self.sample(&self.gray, x, y)
    }

    pub fn sample_cr(&self, x: f64, y: f64) -> Option<f64> {
        self.sample(&self.cr, x, y)
    }

    fn sample(&self, field: &[f64], x: f64, y: f64) -> Option<f64> {
        let fx = (x - self.origin[0]) / self.spacing;
        let fy = (y - self.origin[1]) / self.spacing;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let ix = fx.floor() as usize;
        let iy = fy.floor() as usize;
        let (ix1, iy1) = (
            (ix + 1).min(self.nx.checked_sub(1)?),
            (iy + 1).min(self.ny.checked_sub(1)?),
        );
        if ix >= self.nx || iy >= self.ny {
            return None;
        }
        for (cx, cy) in [(ix, iy), (ix1, iy), (ix, iy1), (ix1, iy1)] {
            if !self.is_valid(cx, cy) {
                return None;
            }
        }
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let f00 = field[self.idx(ix, iy)];
        let f10 = field[self.idx(ix1, iy)];
        let f01 = field[self.idx(ix, iy1)];
        let f11 = field[self.idx(ix1, iy1)];
        Some(f00 * (1.0 - tx) * (1.0 - ty) + f10 * tx * (1.0 - ty) + f01 * (1.0 - tx) * ty + f11 * tx * ty)
    }

    /// Central-difference depth slope along y at a cell, if the neighbors
    /// exist and are valid.
    pub fn dz_dy(&self, ix: usize, iy: usize) -> Option<f64> {
        if iy == 0 || iy + 1 >= self.ny {
            return None;
        }
        if !self.is_valid(ix, iy - 1) || !self.is_valid(ix, iy + 1) {
            return None;
        }
        Some((self.z[self.idx(ix, iy + 1)] - self.z[self.idx(ix, iy - 1)]) / (2.0 * self.spacing))
    }
}

/// Orthographically project a mesh onto a fresh grid along -z, keeping the
/// outermost (maximum z) layer per cell. Colors, when present, are
/// barycentrically interpolated into the gray and Cr channels; meshes
/// without color get a uniform mid-gray.
pub fn project_to_grid(mesh: &TriangleMesh, spacing: f64) -> Result<Grid2D> {
    if spacing <= 0.0 || !spacing.is_finite() {
        return Err(Error::InvalidParameter(format!("grid spacing {spacing}")));
    }
    let (lo, hi) = mesh.bounding_box()?;
    let nx = ((hi.x - lo.x) / spacing).ceil() as usize + 1;
    let ny = ((hi.y - lo.y) / spacing).ceil() as usize + 1;
    let mut grid = Grid2D::new([lo.x, lo.y], spacing, nx, ny);

    for t in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle_corners(t);
        let min_x = a.x.min(b.x).min(c.x);
        let max_x = a.x.max(b.x).max(c.x);
        let min_y = a.y.min(b.y).min(c.y);
        let max_y = a.y.max(b.y).max(c.y);
        let ix0 = (((min_x - lo.x) / spacing).ceil().max(0.0)) as usize;
        let ix1 = (((max_x - lo.x) / spacing).floor()) as usize;
        let iy0 = (((min_y - lo.y) / spacing).ceil().max(0.0)) as usize;
        let iy1 = (((max_y - lo.y) / spacing).floor()) as usize;
        for iy in iy0..=iy1.min(ny.saturating_sub(1)) {
            for ix in ix0..=ix1.min(nx.saturating_sub(1)) {
                let [px, py] = grid.cell_center(ix, iy);
                let Some((wa, wb, wc)) = barycentric_xy(&a, &b, &c, px, py) else {
                    continue;
                };
                let z = wa * a.z + wb * b.z + wc * c.z;
                let k = grid.idx(ix, iy);
                if grid.valid[k] && grid.z[k] >= z {
                    continue;
                }
                grid.valid[k] = true;
                grid.z[k] = z;
                let (gray, cr) = match &mesh.colors {
                    Some(colors) => {
                        let [ia, ib, ic] = mesh.triangles[t];
                        let mix = |ch: usize| {
                            wa * colors[ia][ch] + wb * colors[ib][ch] + wc * colors[ic][ch]
                        };
                        let (r, g, b) = (mix(0), mix(1), mix(2));
                        (rgb_to_gray(r, g, b), rgb_to_cr(r, g, b))
                    }
                    None => (128.0, 128.0),
                };
                grid.gray[k] = gray;
                grid.cr[k] = cr;
            }
        }
    }
    Ok(grid)
}

/// Barycentric weights of (px, py) in the xy projection of a triangle, or
/// `None` when outside or the projection is degenerate.
fn barycentric_xy(
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
    px: f64,
    py: f64,
) -> Option<(f64, f64, f64)> {
    let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if det.abs() < 1e-12 {
        return None;
    }
    let wb = ((px - a.x) * (c.y - a.y) - (c.x - a.x) * (py - a.y)) / det;
    let wc = ((b.x - a.x) * (py - a.y) - (px - a.x) * (b.y - a.y)) / det;
    let wa = 1.0 - wb - wc;
    let eps = -1e-9;
    if wa >= eps && wb >= eps && wc >= eps {
        Some((wa, wb, wc))
    } else {
        None
    }
}

/// Decision-based 3×3 median filter: a cell is replaced by the median of its
/// valid 3×3 neighborhood only when it is the strict extremum of that
/// neighborhood (a suspected impulse). Depth, gray, and Cr are treated
/// independently; validity is unchanged.
pub fn median_filter_3x3(grid: &Grid2D) -> Grid2D {
    let mut out = grid.clone();
    for iy in 1..grid.ny.saturating_sub(1) {
        for ix in 1..grid.nx.saturating_sub(1) {
            if !grid.is_valid(ix, iy) {
                continue;
            }
            let mut neighbors: Vec<usize> = Vec::with_capacity(8);
            let mut all_valid = true;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (jx, jy) = ((ix as i64 + dx) as usize, (iy as i64 + dy) as usize);
                    if grid.is_valid(jx, jy) {
                        neighbors.push(grid.idx(jx, jy));
                    } else {
                        all_valid = false;
                    }
                }
            }
            if !all_valid {
                continue;
            }
            let k = grid.idx(ix, iy);
            for (field_idx, field) in [&grid.z, &grid.gray, &grid.cr].into_iter().enumerate() {
                let center = field[k];
                let lo = neighbors.iter().map(|&i| field[i]).fold(f64::INFINITY, f64::min);
                let hi = neighbors
                    .iter()
                    .map(|&i| field[i])
                    .fold(f64::NEG_INFINITY, f64::max);
                if center > hi || center < lo {
                    let mut values: Vec<f64> = neighbors.iter().map(|&i| field[i]).collect();
                    values.push(center);
                    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let median = values[values.len() / 2];
                    match field_idx {
                        0 => out.z[k] = median,
                        1 => out.gray[k] = median,
                        _ => out.cr[k] = median,
                    }
                }
            }
        }
    }
    out
}

/// Fill interior holes by bicubic interpolation: for each invalid cell, fit a
/// Lagrange cubic through the two nearest valid cells on each side along its
/// row and along its column, and average the directional estimates. Cells
/// without two-sided support in either direction (footprint boundary) stay
/// invalid. All channels fill in lockstep.
pub fn fill_holes_bicubic(grid: &Grid2D) -> Grid2D {
    const REACH: i64 = 6;
    let mut out = grid.clone();
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            if grid.is_valid(ix, iy) {
                continue;
            }
            let row_nodes = cubic_support(grid, ix as i64, iy as i64, 1, 0, REACH);
            let col_nodes = cubic_support(grid, ix as i64, iy as i64, 0, 1, REACH);
            if row_nodes.is_none() && col_nodes.is_none() {
                continue;
            }
            let k = grid.idx(ix, iy);
            for (field_idx, field) in [&grid.z, &grid.gray, &grid.cr].into_iter().enumerate() {
                let mut acc = 0.0;
                let mut count = 0.0;
                for nodes in [&row_nodes, &col_nodes].into_iter().flatten() {
                    acc += lagrange_at_zero(nodes, field);
                    count += 1.0;
                }
                let value = acc / count;
                match field_idx {
                    0 => out.z[k] = value,
                    1 => out.gray[k] = value,
                    _ => out.cr[k] = value,
                }
            }
            out.valid[k] = true;
        }
    }
    out
}

/// The two nearest valid cells on each side of (cx, cy) along (dx, dy), as
/// (signed offset, linear index), or `None` if either side lacks support.
fn cubic_support(
    grid: &Grid2D,
    cx: i64,
    cy: i64,
    dx: i64,
    dy: i64,
    reach: i64,
) -> Option<[(f64, usize); 4]> {
    let mut found: Vec<(f64, usize)> = Vec::with_capacity(4);
    for dir in [-1i64, 1] {
        let mut got = 0;
        for step in 1..=reach {
            let jx = cx + dir * step * dx;
            let jy = cy + dir * step * dy;
            if jx < 0 || jy < 0 || jx >= grid.nx as i64 || jy >= grid.ny as i64 {
                break;
            }
            if grid.is_valid(jx as usize, jy as usize) {
                found.push((dir as f64 * step as f64, grid.idx(jx as usize, jy as usize)));
                got += 1;
                if got == 2 {
                    break;
                }
            }
        }
        if got < 2 {
            return None;
        }
    }
    Some([found[0], found[1], found[2], found[3]])
}

fn lagrange_at_zero(nodes: &[(f64, usize); 4], field: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..4 {
        let (xi, ki) = nodes[i];
        let mut w = 1.0;
        for (j, &(xj, _)) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            w *= (0.0 - xj) / (xi - xj);
        }
        total += w * field[ki];
    }
    total
}
