use std::collections::HashMap;

use super::{Aabb, Pose, Vec3};
use crate::error::{Error, Result};

/// Triangles with area at or below this are dropped at load time [m²].
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Indexed triangle mesh in object-local coordinates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    /// Optional per-triangle material density [kg/m³].
    pub densities: Option<Vec<f64>>,
}

/// Result of building a mesh with the degenerate-triangle filter.
#[derive(Clone, Debug)]
pub struct MeshLoad {
    pub mesh: TriangleMesh,
    pub dropped_degenerate: usize,
}

/// Signed-tetrahedron volume with orientation and closure flags.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeEstimate {
    /// Absolute enclosed volume [m³].
    pub volume: f64,
    /// Set when the signed sum was negative (inward-facing winding).
    pub inverted: bool,
    /// False when some edge is not shared by exactly two triangles.
    pub watertight: bool,
}

impl TriangleMesh {
    /// Validates indices and drops triangles whose area is ≤ 1e-12 m².
    pub fn build(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<MeshLoad> {
        let n = vertices.len() as u32;
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&i| i >= n)) {
            return Err(Error::InvalidArgument(format!(
                "triangle {t:?} references a vertex out of range (have {n})"
            )));
        }
        let before = triangles.len();
        let kept: Vec<[u32; 3]> = triangles
            .into_iter()
            .filter(|t| {
                let [a, b, c] = t.map(|i| vertices[i as usize]);
                0.5 * (b - a).cross(&(c - a)).norm() > DEGENERATE_AREA
            })
            .collect();
        let dropped_degenerate = before - kept.len();
        if kept.is_empty() {
            return Err(Error::EmptyMesh("mesh".into()));
        }
        Ok(MeshLoad {
            mesh: TriangleMesh {
                vertices,
                triangles: kept,
                densities: None,
            },
            dropped_degenerate,
        })
    }

    /// Like [`TriangleMesh::build`] but discards the drop count.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        Self::build(vertices, triangles).map(|l| l.mesh)
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, i: usize) -> [Vec3; 3] {
        self.triangles[i].map(|k| self.vertices[k as usize])
    }

    /// Outward unit normal implied by counter-clockwise winding.
    pub fn face_normal(&self, i: usize) -> Vec3 {
        let [a, b, c] = self.corners(i);
        (b - a).cross(&(c - a)).normalize()
    }

    pub fn triangle_area(&self, i: usize) -> f64 {
        let [a, b, c] = self.corners(i);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len()).map(|i| self.triangle_area(i)).sum()
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter())
    }

    /// Signed volume (positive for outward winding).
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i as usize]);
                a.dot(&b.cross(&c))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn volume(&self) -> VolumeEstimate {
        let signed = self.signed_volume();
        VolumeEstimate {
            volume: signed.abs(),
            inverted: signed < 0.0,
            watertight: self.is_watertight(),
        }
    }

    /// Volume-weighted centroid; falls back to the vertex mean for flat or
    /// open meshes.
    pub fn centroid(&self) -> Vec3 {
        let mut acc = Vec3::zeros();
        let mut vol = 0.0;
        for t in &self.triangles {
            let [a, b, c] = t.map(|i| self.vertices[i as usize]);
            let v = a.dot(&b.cross(&c)) / 6.0;
            acc += (a + b + c) * (v / 4.0);
            vol += v;
        }
        if vol.abs() > 1e-15 {
            acc / vol
        } else {
            self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
        }
    }

    /// Every undirected edge used by exactly two triangles, after welding
    /// coincident vertices.
    pub fn is_watertight(&self) -> bool {
        let weld = self.weld_map();
        let mut edges: HashMap<(u32, u32), u32> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let a = weld[t[k] as usize];
                let b = weld[t[(k + 1) % 3] as usize];
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        edges.values().all(|&c| c == 2)
    }

    /// Maps each vertex to a canonical representative among vertices at the
    /// same position (quantized to 1e-9 m).
    fn weld_map(&self) -> Vec<u32> {
        let mut seen: HashMap<[i64; 3], u32> = HashMap::new();
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let key = [v.x, v.y, v.z].map(|c| (c * 1e9).round() as i64);
                *seen.entry(key).or_insert(i as u32)
            })
            .collect()
    }

    /// Number of connected components of the triangle adjacency graph.
    pub fn connected_components(&self) -> usize {
        let weld = self.weld_map();
        let mut parent: Vec<u32> = (0..self.vertices.len() as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for t in &self.triangles {
            let r0 = find(&mut parent, weld[t[0] as usize]);
            for &v in &t[1..] {
                let r = find(&mut parent, weld[v as usize]);
                if r != r0 {
                    parent[r as usize] = r0;
                }
            }
        }
        let mut roots: Vec<u32> = self
            .triangles
            .iter()
            .map(|t| find(&mut parent, weld[t[0] as usize]))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Copy with every vertex mapped through `pose ∘ scale`.
    pub fn transformed(&self, pose: &Pose, scale: f64) -> TriangleMesh {
        TriangleMesh {
            vertices: self
                .vertices
                .iter()
                .map(|v| pose.transform_point(&(v * scale)))
                .collect(),
            triangles: self.triangles.clone(),
            densities: self.densities.clone(),
        }
    }

    /// Reverses the winding of every triangle.
    pub fn flipped(&self) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|t| [t[0], t[2], t[1]]).collect(),
            densities: self.densities.clone(),
        }
    }

    /// Concatenates meshes into one (components stay disconnected).
    pub fn merged(parts: &[TriangleMesh]) -> TriangleMesh {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for p in parts {
            let base = vertices.len() as u32;
            vertices.extend_from_slice(&p.vertices);
            triangles.extend(p.triangles.iter().map(|t| t.map(|i| i + base)));
        }
        TriangleMesh {
            vertices,
            triangles,
            densities: None,
        }
    }

    pub fn min_z(&self) -> f64 {
        self.vertices.iter().map(|v| v.z).fold(f64::INFINITY, f64::min)
    }
}
