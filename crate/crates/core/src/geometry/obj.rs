//! Wavefront OBJ reading and writing. Only `v` and `f` records matter;
//! `vn`, `vt`, groups and materials are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::{MeshLoad, TriangleMesh, Vec3};
use crate::error::{Error, Result};

/// Loads an OBJ file, fan-triangulating polygons and dropping degenerate
/// triangles.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<MeshLoad> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    parse_obj(&text, path)
}

pub fn parse_obj(text: &str, path: &Path) -> Result<MeshLoad> {
    let err = |line: usize, message: String| Error::ObjParse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let coords: Vec<f64> = parts
                    .take(3)
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| err(line_no, format!("bad vertex coordinate: {e}")))?;
                if coords.len() != 3 {
                    return Err(err(line_no, "vertex needs three coordinates".into()));
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut face = Vec::new();
                for tok in parts {
                    let head = tok.split('/').next().unwrap_or("");
                    let raw_idx: i64 = head
                        .parse()
                        .map_err(|_| err(line_no, format!("bad face index `{tok}`")))?;
                    let resolved = match raw_idx {
                        0 => return Err(err(line_no, "face index 0 is invalid".into())),
                        i if i > 0 => i - 1,
                        i => vertices.len() as i64 + i,
                    };
                    if resolved < 0 || resolved >= vertices.len() as i64 {
                        return Err(err(line_no, format!("face index {raw_idx} out of range")));
                    }
                    face.push(resolved as u32);
                }
                if face.len() < 3 {
                    return Err(err(line_no, "face needs at least three vertices".into()));
                }
                for k in 1..face.len() - 1 {
                    triangles.push([face[0], face[k], face[k + 1]]);
                }
            }
            _ => {}
        }
    }

    if triangles.is_empty() {
        return Err(Error::EmptyMesh(path.display().to_string()));
    }
    let load = TriangleMesh::build(vertices, triangles).map_err(|e| match e {
        Error::EmptyMesh(_) => Error::EmptyMesh(path.display().to_string()),
        other => other,
    })?;
    if load.dropped_degenerate > 0 {
        log::warn!(
            "{}: dropped {} degenerate triangle(s)",
            path.display(),
            load.dropped_degenerate
        );
    }
    Ok(load)
}

/// Serializes a mesh as OBJ text with full float precision.
pub fn write_obj(mesh: &TriangleMesh) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 40);
    writeln!(
        out,
        "# {} vertices, {} triangles",
        mesh.vertices.len(),
        mesh.triangles.len()
    )
    .unwrap();
    for v in &mesh.vertices {
        writeln!(out, "v {} {} {}", v.x, v.y, v.z).unwrap();
    }
    for t in &mesh.triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    out
}
