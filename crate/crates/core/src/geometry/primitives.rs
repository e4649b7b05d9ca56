//! Procedural closed meshes: boxes, icospheres, solids of revolution,
//! extruded polygons and masked height-field blocks.

use std::collections::HashMap;
use std::f64::consts::TAU;

use super::{TriangleMesh, Vec3};

/// Axis-aligned box centered at the origin.
pub fn cuboid(half: Vec3) -> TriangleMesh {
    let (x, y, z) = (half.x, half.y, half.z);
    let vertices = vec![
        Vec3::new(-x, -y, -z),
        Vec3::new(x, -y, -z),
        Vec3::new(x, y, -z),
        Vec3::new(-x, y, -z),
        Vec3::new(-x, -y, z),
        Vec3::new(x, -y, z),
        Vec3::new(x, y, z),
        Vec3::new(-x, y, z),
    ];
    let triangles = vec![
        [0, 3, 2],
        [0, 2, 1],
        [4, 5, 6],
        [4, 6, 7],
        [0, 1, 5],
        [0, 5, 4],
        [1, 2, 6],
        [1, 6, 5],
        [2, 3, 7],
        [2, 7, 6],
        [3, 0, 4],
        [3, 4, 7],
    ];
    TriangleMesh {
        vertices,
        triangles,
        densities: None,
    }
}

/// Box spanning `min..max`.
pub fn cuboid_between(min: Vec3, max: Vec3) -> TriangleMesh {
    let mut m = cuboid((max - min) * 0.5);
    let c = (min + max) * 0.5;
    for v in &mut m.vertices {
        *v += c;
    }
    m
}

/// Subdivided icosahedron projected onto a sphere; `10·4ⁿ+2` vertices and
/// `20·4ⁿ` triangles.
pub fn icosphere(radius: f64, subdivisions: u32) -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(a, b, c)| Vec3::new(a, b, c).normalize())
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
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
    for _ in 0..subdivisions {
        let mut cache: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, verts: &mut Vec<Vec3>| -> u32 {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                verts.push(((verts[a as usize] + verts[b as usize]) * 0.5).normalize());
                verts.len() as u32 - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    for v in &mut vertices {
        *v *= radius;
    }
    TriangleMesh {
        vertices,
        triangles: faces,
        densities: None,
    }
}

/// Solid of revolution about +z. `profile` holds `(radius, z)` pairs; points
/// with radius 0 become poles. A `closed` profile also joins last to first
/// (e.g. a torus cross-section).
pub fn revolve(profile: &[(f64, f64)], segments: usize, closed: bool) -> TriangleMesh {
    let mut vertices = Vec::new();
    let mut rings: Vec<Vec<u32>> = Vec::new();
    for &(r, z) in profile {
        if r <= 0.0 {
            vertices.push(Vec3::new(0.0, 0.0, z));
            rings.push(vec![vertices.len() as u32 - 1]);
        } else {
            let start = vertices.len() as u32;
            for k in 0..segments {
                let a = TAU * k as f64 / segments as f64;
                vertices.push(Vec3::new(r * a.cos(), r * a.sin(), z));
            }
            rings.push((start..start + segments as u32).collect());
        }
    }
    let mut triangles = Vec::new();
    let pairs = if closed { profile.len() } else { profile.len() - 1 };
    for i in 0..pairs {
        let a = &rings[i];
        let b = &rings[(i + 1) % profile.len()];
        for k in 0..segments {
            let k1 = (k + 1) % segments;
            match (a.len(), b.len()) {
                (1, 1) => {}
                (1, _) => triangles.push([a[0], b[k1], b[k]]),
                (_, 1) => triangles.push([a[k], a[k1], b[0]]),
                _ => {
                    triangles.push([a[k], a[k1], b[k1]]);
                    triangles.push([a[k], b[k1], b[k]]);
                }
            }
        }
    }
    orient_outward(TriangleMesh {
        vertices,
        triangles,
        densities: None,
    })
}

pub fn cylinder(radius: f64, height: f64, segments: usize) -> TriangleMesh {
    let h = height / 2.0;
    revolve(&[(0.0, -h), (radius, -h), (radius, h), (0.0, h)], segments, false)
}

pub fn cone(radius: f64, height: f64, segments: usize) -> TriangleMesh {
    let h = height / 2.0;
    revolve(&[(0.0, -h), (radius, -h), (0.0, h)], segments, false)
}

/// Open-topped cup: outer wall, rim, inner wall and an inner floor.
pub fn cup(outer: f64, inner: f64, height: f64, floor: f64, segments: usize) -> TriangleMesh {
    let h = height / 2.0;
    revolve(
        &[
            (0.0, -h),
            (outer, -h),
            (outer, h),
            (inner, h),
            (inner, -h + floor),
            (0.0, -h + floor),
        ],
        segments,
        false,
    )
}

pub fn torus(major: f64, minor: f64, segments: usize, sides: usize) -> TriangleMesh {
    let profile: Vec<(f64, f64)> = (0..sides)
        .map(|k| {
            let a = TAU * k as f64 / sides as f64;
            (major + minor * a.cos(), minor * a.sin())
        })
        .collect();
    revolve(&profile, segments, true)
}

/// Extrudes a convex counter-clockwise polygon between `z0` and `z1`.
pub fn extrude(polygon: &[(f64, f64)], z0: f64, z1: f64) -> TriangleMesh {
    let n = polygon.len() as u32;
    let mut vertices: Vec<Vec3> = polygon.iter().map(|&(x, y)| Vec3::new(x, y, z0)).collect();
    vertices.extend(polygon.iter().map(|&(x, y)| Vec3::new(x, y, z1)));
    let mut triangles = Vec::new();
    for k in 1..n - 1 {
        triangles.push([0, k + 1, k]);
        triangles.push([n, n + k, n + k + 1]);
    }
    for k in 0..n {
        let k1 = (k + 1) % n;
        triangles.push([k, k1, n + k1]);
        triangles.push([k, n + k1, n + k]);
    }
    orient_outward(TriangleMesh {
        vertices,
        triangles,
        densities: None,
    })
}

/// Block made of grid columns: every solid cell spans `bottom..height(x, y)`
/// where heights are sampled at grid nodes, so the top surface is a
/// piecewise-linear height field. Non-solid cells become through-holes with
/// vertical walls.
pub struct HeightField<'a> {
    pub origin: (f64, f64),
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
    pub bottom: f64,
    pub height: &'a dyn Fn(f64, f64) -> f64,
    pub solid: &'a dyn Fn(f64, f64) -> bool,
}

impl HeightField<'_> {
    pub fn build(&self) -> TriangleMesh {
        let (nx, ny) = (self.nx, self.ny);
        let node_xy = |i: usize, j: usize| {
            (
                self.origin.0 + i as f64 * self.cell,
                self.origin.1 + j as f64 * self.cell,
            )
        };
        let is_solid = |i: isize, j: isize| -> bool {
            if i < 0 || j < 0 || i >= nx as isize || j >= ny as isize {
                return false;
            }
            let (x, y) = node_xy(i as usize, j as usize);
            (self.solid)(x + 0.5 * self.cell, y + 0.5 * self.cell)
        };
        let stride = nx + 1;
        let mut vertices = Vec::with_capacity(2 * stride * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                let (x, y) = node_xy(i, j);
                vertices.push(Vec3::new(x, y, (self.height)(x, y)));
            }
        }
        let bottom_base = vertices.len() as u32;
        for j in 0..=ny {
            for i in 0..=nx {
                let (x, y) = node_xy(i, j);
                vertices.push(Vec3::new(x, y, self.bottom));
            }
        }
        let top = |i: usize, j: usize| (j * stride + i) as u32;
        let bot = |i: usize, j: usize| bottom_base + (j * stride + i) as u32;

        let mut triangles = Vec::new();
        let mut quad = |a: u32, b: u32, c: u32, d: u32, outward: Vec3, verts: &[Vec3]| {
            let n = (verts[b as usize] - verts[a as usize]).cross(&(verts[c as usize] - verts[a as usize]));
            if n.dot(&outward) >= 0.0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, c, b]);
                triangles.push([a, d, c]);
            }
        };
        for j in 0..ny {
            for i in 0..nx {
                if !is_solid(i as isize, j as isize) {
                    continue;
                }
                let (ii, jj) = (i as isize, j as isize);
                quad(
                    top(i, j),
                    top(i + 1, j),
                    top(i + 1, j + 1),
                    top(i, j + 1),
                    Vec3::z(),
                    &vertices,
                );
                quad(
                    bot(i, j),
                    bot(i + 1, j),
                    bot(i + 1, j + 1),
                    bot(i, j + 1),
                    -Vec3::z(),
                    &vertices,
                );
                if !is_solid(ii - 1, jj) {
                    quad(
                        top(i, j),
                        top(i, j + 1),
                        bot(i, j + 1),
                        bot(i, j),
                        -Vec3::x(),
                        &vertices,
                    );
                }
                if !is_solid(ii + 1, jj) {
                    quad(
                        top(i + 1, j),
                        top(i + 1, j + 1),
                        bot(i + 1, j + 1),
                        bot(i + 1, j),
                        Vec3::x(),
                        &vertices,
                    );
                }
                if !is_solid(ii, jj - 1) {
                    quad(
                        top(i, j),
                        top(i + 1, j),
                        bot(i + 1, j),
                        bot(i, j),
                        -Vec3::y(),
                        &vertices,
                    );
                }
                if !is_solid(ii, jj + 1) {
                    quad(
                        top(i, j + 1),
                        top(i + 1, j + 1),
                        bot(i + 1, j + 1),
                        bot(i, j + 1),
                        Vec3::y(),
                        &vertices,
                    );
                }
            }
        }
        compact(TriangleMesh {
            vertices,
            triangles,
            densities: None,
        })
    }
}

/// Drops unreferenced vertices.
pub fn compact(mesh: TriangleMesh) -> TriangleMesh {
    let mut remap = vec![u32::MAX; mesh.vertices.len()];
    let mut vertices = Vec::new();
    let triangles = mesh
        .triangles
        .iter()
        .map(|t| {
            t.map(|i| {
                if remap[i as usize] == u32::MAX {
                    remap[i as usize] = vertices.len() as u32;
                    vertices.push(mesh.vertices[i as usize]);
                }
                remap[i as usize]
            })
        })
        .collect();
    TriangleMesh {
        vertices,
        triangles,
        densities: mesh.densities,
    }
}

fn orient_outward(mesh: TriangleMesh) -> TriangleMesh {
    if mesh.signed_volume() < 0.0 {
        mesh.flipped()
    } else {
        mesh
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn icosphere_counts() {
        let s = icosphere(1.0, 3);
        assert_eq!(s.vertices.len(), 642);
        assert_eq!(s.triangle_count(), 1280);
        assert!(s.is_watertight());
    }

    #[test]
    fn revolved_solids_are_closed_and_outward() {
        for m in [
            cylinder(0.03, 0.08, 48),
            cone(0.03, 0.05, 32),
            cup(0.04, 0.035, 0.08, 0.005, 40),
            torus(0.04, 0.01, 40, 16),
        ] {
            assert!(m.is_watertight());
            assert!(m.signed_volume() > 0.0);
        }
        let c = cylinder(1.0, 2.0, 256).volume().volume;
        assert!((c - 2.0 * PI).abs() / (2.0 * PI) < 1e-3);
    }

    #[test]
    fn height_field_with_hole_is_closed() {
        let hf = HeightField {
            origin: (-0.03, -0.03),
            cell: 0.002,
            nx: 30,
            ny: 30,
            bottom: 0.0,
            height: &|x, _| 0.01 + 0.002 * (x * 100.0).sin(),
            solid: &|x, y| x * x + y * y > 0.008f64.powi(2),
        };
        let m = hf.build();
        assert!(m.is_watertight());
        assert!(m.signed_volume() > 0.0);
        assert_eq!(m.connected_components(), 1);
    }

    #[test]
    fn extruded_hexagon_volume() {
        let hex: Vec<(f64, f64)> = (0..6)
            .map(|k| {
                let a = TAU * k as f64 / 6.0;
                (a.cos(), a.sin())
            })
            .collect();
        let m = extrude(&hex, 0.0, 1.0);
        let expected = 3.0 * 3f64.sqrt() / 2.0;
        assert!((m.volume().volume - expected).abs() < 1e-12);
        assert!(m.is_watertight());
    }
}
