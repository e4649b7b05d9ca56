//! Incremental 3-D convex hull, used only for its enclosed volume.

use super::Vec3;

struct Face {
    v: [usize; 3],
    normal: Vec3,
    offset: f64,
    alive: bool,
}

impl Face {
    fn new(points: &[Vec3], v: [usize; 3]) -> Self {
        let [a, b, c] = v.map(|i| points[i]);
        let normal = (b - a).cross(&(c - a));
        let n = normal.norm();
        let normal = if n > 0.0 { normal / n } else { normal };
        Face {
            v,
            offset: normal.dot(&a),
            normal,
            alive: true,
        }
    }

    fn distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Volume of the convex hull of `points`. Returns 0 for coplanar input.
pub fn convex_hull_volume(points: &[Vec3]) -> f64 {
    if points.len() < 4 {
        return 0.0;
    }
    let scale = points.iter().fold(0.0f64, |m, p| m.max(p.abs().max())).max(1e-12);
    let eps = 1e-10 * scale;

    // Initial tetrahedron from extreme points.
    let i0 = 0;
    let i1 = (0..points.len())
        .max_by(|&a, &b| {
            (points[a] - points[i0])
                .norm_squared()
                .total_cmp(&(points[b] - points[i0]).norm_squared())
        })
        .unwrap();
    let line = points[i1] - points[i0];
    let i2 = (0..points.len())
        .max_by(|&a, &b| {
            line.cross(&(points[a] - points[i0]))
                .norm_squared()
                .total_cmp(&line.cross(&(points[b] - points[i0])).norm_squared())
        })
        .unwrap();
    let plane_n = line.cross(&(points[i2] - points[i0]));
    if plane_n.norm() <= eps * scale {
        return 0.0;
    }
    let i3 = (0..points.len())
        .max_by(|&a, &b| {
            plane_n
                .dot(&(points[a] - points[i0]))
                .abs()
                .total_cmp(&plane_n.dot(&(points[b] - points[i0])).abs())
        })
        .unwrap();
    if plane_n.normalize().dot(&(points[i3] - points[i0])).abs() <= eps {
        return 0.0;
    }

    let mut faces: Vec<Face> = Vec::new();
    let centroid = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut f = Face::new(points, tri);
        if f.distance(&centroid) > 0.0 {
            f = Face::new(points, [tri[0], tri[2], tri[1]]);
        }
        faces.push(f);
    }

    for (pi, p) in points.iter().enumerate() {
        if [i0, i1, i2, i3].contains(&pi) {
            continue;
        }
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.distance(p) > eps)
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            continue;
        }
        // Horizon: directed edges of visible faces whose twin is not visible.
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for &fi in &visible {
            let v = faces[fi].v;
            for k in 0..3 {
                edges.push((v[k], v[(k + 1) % 3]));
            }
        }
        let horizon: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(a, b)| !edges.contains(&(b, a)))
            .collect();
        for &fi in &visible {
            faces[fi].alive = false;
        }
        for (a, b) in horizon {
            faces.push(Face::new(points, [a, b, pi]));
        }
        if faces.len() > 4 * points.len() + 64 {
            faces.retain(|f| f.alive);
        }
    }

    faces
        .iter()
        .filter(|f| f.alive)
        .map(|f| {
            let [a, b, c] = f.v.map(|i| points[i]);
            a.dot(&b.cross(&c)) / 6.0
        })
        .sum::<f64>()
        .abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::primitives;
    use rand::{Rng, SeedableRng};

    #[test]
    fn cube_hull_volume() {
        let cube = primitives::cuboid(Vec3::new(0.5, 1.0, 1.5));
        assert!((convex_hull_volume(&cube.vertices) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn interior_points_do_not_change_volume() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut pts = primitives::cuboid(Vec3::repeat(1.0)).vertices;
        for _ in 0..200 {
            pts.push(Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ));
        }
        assert!((convex_hull_volume(&pts) - 8.0).abs() < 1e-9);
    }

    #[test]
    fn sphere_hull_matches_mesh_volume() {
        let s = primitives::icosphere(1.0, 3);
        let hull = convex_hull_volume(&s.vertices);
        assert!((hull - s.volume().volume).abs() < 1e-9);
    }

    #[test]
    fn flat_input_has_zero_volume() {
        let pts: Vec<Vec3> = (0..10).map(|i| Vec3::new(i as f64, (i * i) as f64, 0.0)).collect();
        assert_eq!(convex_hull_volume(&pts), 0.0);
    }
}
