//! OBJ and PLY mesh file formats.
//!
//! OBJ supports `v x y z [r g b]` (colors in 0..1 per the common vertex-color
//! extension) and `f` lines. PLY supports ASCII and binary-little-endian with
//! x/y/z float or double properties and optional uchar red/green/blue.
//! Meshes written by this crate use binary-little-endian PLY with double
//! coordinates so a round trip stays within 1e-6 mm.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

/// Load a mesh from OBJ or PLY, chosen by file extension (falling back to
/// content sniffing for unknown extensions).
pub fn load_mesh(path: &Path) -> Result<TriangleMesh> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("obj") => load_obj(path),
        Some("ply") => load_ply(path),
        _ => {
            let mut head = [0u8; 3];
            let mut f = File::open(path).map_err(|e| Error::io(path, e))?;
            let n = f.read(&mut head).map_err(|e| Error::io(path, e))?;
            if n >= 3 && &head == b"ply" {
                load_ply(path)
            } else {
                load_obj(path)
            }
        }
    }
}

/// Save a mesh, format chosen by extension: `.obj` or `.ply` (binary).
pub fn save_mesh(mesh: &TriangleMesh, path: &Path) -> Result<()> {
    if mesh.vertices.is_empty() {
        return Err(Error::InvalidMesh(
            "refusing to write a mesh with no vertices".into(),
        ));
    }
    mesh.validate()?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("obj") => save_obj(mesh, path),
        _ => save_ply(mesh, path),
    }
}

fn load_obj(path: &Path) -> Result<TriangleMesh> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut vertices = Vec::new();
    let mut colors: Vec<[f64; 3]> = Vec::new();
    let mut triangles = Vec::new();
    let parse_err = |element: &str, message: String| Error::Parse {
        path: path.into(),
        element: element.into(),
        message,
    };

    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let nums: Vec<f64> = parts
                    .map(|s| {
                        s.parse::<f64>().map_err(|e| {
                            parse_err(&format!("line {}", lineno + 1), e.to_string())
                        })
                    })
                    .collect::<Result<_>>()?;
                if nums.len() != 3 && nums.len() != 6 {
                    return Err(parse_err(
                        &format!("line {}", lineno + 1),
                        format!("vertex line has {} numbers, expected 3 or 6", nums.len()),
                    ));
                }
                vertices.push(Point3::new(nums[0], nums[1], nums[2]));
                if nums.len() == 6 {
                    colors.push([nums[3] * 255.0, nums[4] * 255.0, nums[5] * 255.0]);
                }
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|tok| {
                        let first = tok.split('/').next().unwrap_or(tok);
                        first
                            .parse::<isize>()
                            .map_err(|e| parse_err(&format!("line {}", lineno + 1), e.to_string()))
                            .and_then(|i| {
                                if i >= 1 {
                                    Ok((i - 1) as usize)
                                } else {
                                    Err(parse_err(
                                        &format!("line {}", lineno + 1),
                                        format!("unsupported face index {i}"),
                                    ))
                                }
                            })
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(parse_err(
                        &format!("line {}", lineno + 1),
                        "face with fewer than 3 vertices".into(),
                    ));
                }
                // Fan-triangulate polygons.
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }

    let colors = if colors.is_empty() {
        None
    } else if colors.len() == vertices.len() {
        Some(colors)
    } else {
        return Err(parse_err(
            "vertex colors",
            format!(
                "{} of {} vertices carry colors",
                colors.len(),
                vertices.len()
            ),
        ));
    };
    TriangleMesh::new(vertices, triangles, colors).map_err(|e| match e {
        Error::InvalidMesh(msg) => parse_err("geometry", msg),
        other => other,
    })
}

fn save_obj(mesh: &TriangleMesh, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);
    for (i, v) in mesh.vertices.iter().enumerate() {
        match &mesh.colors {
            Some(colors) => {
                let c = colors[i];
                writeln!(
                    w,
                    "v {:.17} {:.17} {:.17} {:.17} {:.17} {:.17}",
                    v.x,
                    v.y,
                    v.z,
                    c[0] / 255.0,
                    c[1] / 255.0,
                    c[2] / 255.0
                )
                .map_err(io_err)?;
            }
            None => writeln!(w, "v {:.17} {:.17} {:.17}", v.x, v.y, v.z).map_err(io_err)?,
        }
    }
    for t in &mesh.triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PlyFormat {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PlyScalar {
    Char,
    Uchar,
    Short,
    Ushort,
    Int,
    Uint,
    Float,
    Double,
}

impl PlyScalar {
    fn parse(name: &str) -> Option<PlyScalar> {
        Some(match name {
            "char" | "int8" => PlyScalar::Char,
            "uchar" | "uint8" => PlyScalar::Uchar,
            "short" | "int16" => PlyScalar::Short,
            "ushort" | "uint16" => PlyScalar::Ushort,
            "int" | "int32" => PlyScalar::Int,
            "uint" | "uint32" => PlyScalar::Uint,
            "float" | "float32" => PlyScalar::Float,
            "double" | "float64" => PlyScalar::Double,
            _ => return None,
        })
    }

    fn size(&self) -> usize {
        match self {
            PlyScalar::Char | PlyScalar::Uchar => 1,
            PlyScalar::Short | PlyScalar::Ushort => 2,
            PlyScalar::Int | PlyScalar::Uint | PlyScalar::Float => 4,
            PlyScalar::Double => 8,
        }
    }

    fn read_le(&self, bytes: &[u8]) -> f64 {
        match self {
            PlyScalar::Char => bytes[0] as i8 as f64,
            PlyScalar::Uchar => bytes[0] as f64,
            PlyScalar::Short => i16::from_le_bytes([bytes[0], bytes[1]]) as f64,
            PlyScalar::Ushort => u16::from_le_bytes([bytes[0], bytes[1]]) as f64,
            PlyScalar::Int => i32::from_le_bytes(bytes[..4].try_into().unwrap()) as f64,
            PlyScalar::Uint => u32::from_le_bytes(bytes[..4].try_into().unwrap()) as f64,
            PlyScalar::Float => f32::from_le_bytes(bytes[..4].try_into().unwrap()) as f64,
            PlyScalar::Double => f64::from_le_bytes(bytes[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug, Clone)]
enum PlyProperty {
    Scalar { name: String, ty: PlyScalar },
    List { count: PlyScalar, item: PlyScalar },
}

#[derive(Debug, Clone)]
struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<PlyProperty>,
}

fn load_ply(path: &Path) -> Result<TriangleMesh> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let parse_err = |element: &str, message: String| Error::Parse {
        path: path.into(),
        element: element.into(),
        message,
    };

    // Header is always ASCII lines.
    let read_line = |reader: &mut BufReader<File>| -> Result<String> {
        let mut line = String::new();
        reader.read_line(&mut line).map_err(|e| Error::io(path, e))?;
        Ok(line.trim_end().to_string())
    };

    let magic = read_line(&mut reader)?;
    if magic.trim() != "ply" {
        return Err(parse_err("header", "missing 'ply' magic".into()));
    }
    let mut format = None;
    let mut elements: Vec<PlyElement> = Vec::new();
    loop {
        let line = read_line(&mut reader)?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("format") => {
                format = match parts.next() {
                    Some("ascii") => Some(PlyFormat::Ascii),
                    Some("binary_little_endian") => Some(PlyFormat::BinaryLittleEndian),
                    other => {
                        return Err(parse_err(
                            "format",
                            format!("unsupported ply format {other:?}"),
                        ))
                    }
                };
            }
            Some("element") => {
                let name = parts
                    .next()
                    .ok_or_else(|| parse_err("element", "missing name".into()))?;
                let count: usize = parts
                    .next()
                    .ok_or_else(|| parse_err("element", "missing count".into()))?
                    .parse()
                    .map_err(|e: std::num::ParseIntError| parse_err("element", e.to_string()))?;
                elements.push(PlyElement {
                    name: name.into(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| parse_err("property", "property before element".into()))?;
                let first = parts
                    .next()
                    .ok_or_else(|| parse_err("property", "missing type".into()))?;
                if first == "list" {
                    let count_ty = parts
                        .next()
                        .and_then(PlyScalar::parse)
                        .ok_or_else(|| parse_err("property", "bad list count type".into()))?;
                    let item_ty = parts
                        .next()
                        .and_then(PlyScalar::parse)
                        .ok_or_else(|| parse_err("property", "bad list item type".into()))?;
                    parts
                        .next()
                        .ok_or_else(|| parse_err("property", "missing name".into()))?;
                    element.properties.push(PlyProperty::List {
                        count: count_ty,
                        item: item_ty,
                    });
                } else {
                    let ty = PlyScalar::parse(first)
                        .ok_or_else(|| parse_err("property", format!("unknown type {first}")))?;
                    let name = parts
                        .next()
                        .ok_or_else(|| parse_err("property", "missing name".into()))?;
                    element
                        .properties
                        .push(PlyProperty::Scalar { name: name.into(), ty });
                }
            }
            Some("end_header") => break,
            Some("comment") | Some("obj_info") | None => {}
            Some(other) => {
                return Err(parse_err("header", format!("unknown keyword {other}")));
            }
        }
    }
    let format = format.ok_or_else(|| parse_err("header", "missing format line".into()))?;

    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut colors: Vec<[f64; 3]> = Vec::new();
    let mut has_color = false;
    let mut triangles: Vec<[usize; 3]> = Vec::new();

    for element in &elements {
        let is_vertex = element.name == "vertex";
        let is_face = element.name == "face";
        for row in 0..element.count {
            // Read one row of property values.
            let mut scalars: Vec<(String, f64)> = Vec::new();
            let mut list: Vec<f64> = Vec::new();
            match format {
                PlyFormat::Ascii => {
                    let line = read_line(&mut reader)?;
                    let mut toks = line.split_whitespace();
                    for prop in &element.properties {
                        match prop {
                            PlyProperty::Scalar { name, .. } => {
                                let v: f64 = toks
                                    .next()
                                    .ok_or_else(|| {
                                        parse_err(&element.name, format!("row {row} truncated"))
                                    })?
                                    .parse()
                                    .map_err(|e: std::num::ParseFloatError| {
                                        parse_err(&element.name, e.to_string())
                                    })?;
                                scalars.push((name.clone(), v));
                            }
                            PlyProperty::List { .. } => {
                                let n: usize = toks
                                    .next()
                                    .ok_or_else(|| {
                                        parse_err(&element.name, format!("row {row} truncated"))
                                    })?
                                    .parse()
                                    .map_err(|e: std::num::ParseIntError| {
                                        parse_err(&element.name, e.to_string())
                                    })?;
                                for _ in 0..n {
                                    let v: f64 = toks
                                        .next()
                                        .ok_or_else(|| {
                                            parse_err(&element.name, format!("row {row} truncated"))
                                        })?
                                        .parse()
                                        .map_err(|e: std::num::ParseFloatError| {
                                            parse_err(&element.name, e.to_string())
                                        })?;
                                    list.push(v);
                                }
                            }
                        }
                    }
                }
                PlyFormat::BinaryLittleEndian => {
                    let mut buf = [0u8; 8];
                    for prop in &element.properties {
                        match prop {
                            PlyProperty::Scalar { name, ty } => {
                                reader
                                    .read_exact(&mut buf[..ty.size()])
                                    .map_err(|e| Error::io(path, e))?;
                                scalars.push((name.clone(), ty.read_le(&buf)));
                            }
                            PlyProperty::List { count, item, .. } => {
                                reader
                                    .read_exact(&mut buf[..count.size()])
                                    .map_err(|e| Error::io(path, e))?;
                                let n = count.read_le(&buf) as usize;
                                for _ in 0..n {
                                    reader
                                        .read_exact(&mut buf[..item.size()])
                                        .map_err(|e| Error::io(path, e))?;
                                    list.push(item.read_le(&buf));
                                }
                            }
                        }
                    }
                }
            }

            if is_vertex {
                let find = |key: &str| scalars.iter().find(|(n, _)| n == key).map(|(_, v)| *v);
                let (x, y, z) = match (find("x"), find("y"), find("z")) {
                    (Some(x), Some(y), Some(z)) => (x, y, z),
                    _ => {
                        return Err(parse_err(
                            "vertex",
                            format!("row {row} lacks x/y/z properties"),
                        ))
                    }
                };
                vertices.push(Point3::new(x, y, z));
                if let (Some(r), Some(g), Some(b)) = (find("red"), find("green"), find("blue")) {
                    has_color = true;
                    colors.push([r, g, b]);
                }
            } else if is_face {
                if list.len() < 3 {
                    return Err(parse_err(
                        "face",
                        format!("row {row} has {} vertices", list.len()),
                    ));
                }
                let idx: Vec<usize> = list.iter().map(|v| *v as usize).collect();
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
        }
    }

    let colors = if has_color { Some(colors) } else { None };
    TriangleMesh::new(vertices, triangles, colors).map_err(|e| match e {
        Error::InvalidMesh(msg) => parse_err("geometry", msg),
        other => other,
    })
}

/// Write binary-little-endian PLY with double coordinates; colors rounded to
/// uchar when present.
fn save_ply(mesh: &TriangleMesh, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);

    let mut header = String::new();
    header.push_str("ply\nformat binary_little_endian 1.0\n");
    header.push_str(&format!("element vertex {}\n", mesh.vertices.len()));
    header.push_str("property double x\nproperty double y\nproperty double z\n");
    if mesh.colors.is_some() {
        header.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    }
    header.push_str(&format!("element face {}\n", mesh.triangles.len()));
    header.push_str("property list uchar int vertex_indices\nend_header\n");
    w.write_all(header.as_bytes()).map_err(io_err)?;

    for (i, v) in mesh.vertices.iter().enumerate() {
        for c in &[v.x, v.y, v.z] {
            w.write_all(&c.to_le_bytes()).map_err(io_err)?;
        }
        if let Some(colors) = &mesh.colors {
            for ch in colors[i] {
                w.write_all(&[ch.round().clamp(0.0, 255.0) as u8]).map_err(io_err)?;
            }
        }
    }
    for t in &mesh.triangles {
        w.write_all(&[3u8]).map_err(io_err)?;
        for &i in t {
            w.write_all(&(i as i32).to_le_bytes()).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_obj() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tri.obj");
        std::fs::write(&path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n").unwrap();
        let mesh = load_mesh(&path).unwrap();
        assert_eq!(mesh.vertex_count(), 3);
        assert_eq!(mesh.triangles, vec![[0, 1, 2]]);
        assert!(mesh.colors.is_none());
    }

    #[test]
    fn obj_out_of_range_face_is_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.obj");
        std::fs::write(&path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 99\n").unwrap();
        let err = load_mesh(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("98") || msg.contains("99"), "{msg}");
    }

    #[test]
    fn ascii_ply_with_colors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tri.ply");
        std::fs::write(
            &path,
            "ply\nformat ascii 1.0\nelement vertex 3\n\
             property float x\nproperty float y\nproperty float z\n\
             property uchar red\nproperty uchar green\nproperty uchar blue\n\
             element face 1\nproperty list uchar int vertex_indices\nend_header\n\
             0 0 0 255 0 0\n1 0 0 0 255 0\n0 1 0 0 0 255\n3 0 1 2\n",
        )
        .unwrap();
        let mesh = load_mesh(&path).unwrap();
        assert_eq!(mesh.vertex_count(), 3);
        let colors = mesh.colors.unwrap();
        assert_eq!(colors.len(), 3);
        assert_eq!(colors[0], [255.0, 0.0, 0.0]);
    }

    #[test]
    fn binary_ply_round_trip_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.ply");
        let mesh = TriangleMesh::new(
            vec![
                Point3::new(0.123456789, -55.5, 103.25),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 1e-7),
            ],
            vec![[0, 1, 2]],
            Some(vec![[12.0, 34.0, 56.0], [0.0, 0.0, 0.0], [255.0, 255.0, 255.0]]),
        )
        .unwrap();
        save_mesh(&mesh, &path).unwrap();
        let back = load_mesh(&path).unwrap();
        assert_eq!(back.triangles, mesh.triangles);
        for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
            assert!((a - b).norm() < 1e-6);
        }
        assert_eq!(back.colors, mesh.colors);
    }

    #[test]
    fn obj_round_trip_with_colors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.obj");
        let mesh = TriangleMesh::new(
            vec![
                Point3::new(0.5, 1.5, -2.5),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
            Some(vec![[10.0, 20.0, 30.0]; 3]),
        )
        .unwrap();
        save_mesh(&mesh, &path).unwrap();
        let back = load_mesh(&path).unwrap();
        for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
            assert!((a - b).norm() < 1e-6);
        }
        let colors = back.colors.unwrap();
        for (a, b) in colors.iter().zip(mesh.colors.as_ref().unwrap()) {
            for i in 0..3 {
                assert!((a[i] - b[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn refuses_empty_mesh() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.ply");
        let mesh = TriangleMesh {
            vertices: vec![],
            triangles: vec![],
            colors: None,
        };
        assert!(save_mesh(&mesh, &path).is_err());
    }
}
