//! Triangulated boundary of a three-dimensional body, written as ASCII OFF.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use congruent_core::{SphereFunction, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct MeshExport {
    pub label: String,
    pub vertices: Vec<[f64; 3]>,
    /// Counter-clockwise seen from outside.
    pub faces: Vec<[usize; 3]>,
}

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("mesh export needs n = 3, got n = {0}")]
    UnsupportedDimension(usize),
    #[error("subdivision level {0} is too large (at most 8)")]
    Level(u32),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub const MAX_LEVEL: u32 = 8;

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / r, p[1] / r, p[2] / r]
}

/// Unit icosphere: the icosahedron with `level` rounds of midpoint subdivision.
/// Has `10·4^level + 2` vertices and `20·4^level` faces.
pub fn icosphere(level: u32) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .into_iter()
    .map(normalize)
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    (verts, faces)
}

/// Boundary points `f(θ)·θ` over the icosphere directions.
pub fn mesh_body<F: SphereFunction + ?Sized>(
    body: &F,
    label: &str,
    level: u32,
) -> Result<MeshExport, MeshError> {
    if body.dim() != 3 {
        return Err(MeshError::UnsupportedDimension(body.dim()));
    }
    if level > MAX_LEVEL {
        return Err(MeshError::Level(level));
    }
    let (dirs, faces) = icosphere(level);
    let vertices = dirs
        .iter()
        .map(|d| {
            let theta = Vector::new(d).expect("finite").normalized().expect("unit");
            let r = body.value(&theta);
            [r * theta[0], r * theta[1], r * theta[2]]
        })
        .collect();
    Ok(MeshExport {
        label: label.into(),
        vertices,
        faces,
    })
}

pub fn to_off(mesh: &MeshExport) -> String {
    let mut s = String::new();
    s.push_str("OFF\n");
    writeln!(s, "{} {} 0", mesh.vertices.len(), mesh.faces.len()).unwrap();
    for v in &mesh.vertices {
        writeln!(s, "{:.12} {:.12} {:.12}", v[0], v[1], v[2]).unwrap();
    }
    for f in &mesh.faces {
        writeln!(s, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
    }
    s
}

pub fn export_mesh<F: SphereFunction + ?Sized>(
    body: &F,
    label: &str,
    level: u32,
    path: &Path,
) -> Result<(), MeshError> {
    let mesh = mesh_body(body, label, level)?;
    std::fs::write(path, to_off(&mesh)).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })
}
