//! Primitive intersection tests.

use super::{TriangleMesh, Vec3};

/// Watertight ray/triangle intersection (Woop, Benthin & Wald, 2013).
///
/// Returns the hit distance in `[0, t_max]`. Both faces are hit. Rays crossing
/// a shared edge hit at least one of the adjacent triangles.
pub fn ray_triangle(origin: &Vec3, dir: &Vec3, t_max: f64, tri: &[Vec3; 3]) -> Option<f64> {
    let kz = dir.iamax();
    let mut kx = (kz + 1) % 3;
    let mut ky = (kx + 1) % 3;
    if dir[kz] < 0.0 {
        std::mem::swap(&mut kx, &mut ky);
    }
    let sx = dir[kx] / dir[kz];
    let sy = dir[ky] / dir[kz];
    let sz = 1.0 / dir[kz];

    let a = tri[0] - origin;
    let b = tri[1] - origin;
    let c = tri[2] - origin;
    let ax = a[kx] - sx * a[kz];
    let ay = a[ky] - sy * a[kz];
    let bx = b[kx] - sx * b[kz];
    let by = b[ky] - sy * b[kz];
    let cx = c[kx] - sx * c[kz];
    let cy = c[ky] - sy * c[kz];

    let u = cx * by - cy * bx;
    let v = ax * cy - ay * cx;
    let w = bx * ay - by * ax;
    if (u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0) {
        return None;
    }
    let det = u + v + w;
    if det == 0.0 {
        return None;
    }
    let az = sz * a[kz];
    let bz = sz * b[kz];
    let cz = sz * c[kz];
    let t_scaled = u * az + v * bz + w * cz;
    if det > 0.0 {
        if t_scaled < 0.0 || t_scaled > t_max * det {
            return None;
        }
    } else if t_scaled > 0.0 || t_scaled < t_max * det {
        return None;
    }
    Some(t_scaled / det)
}

fn project(points: &[Vec3], axis: &Vec3) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = p.dot(axis);
        (lo.min(d), hi.max(d))
    })
}

fn separated_on(a: &[Vec3], b: &[Vec3], axis: &Vec3) -> bool {
    let (amin, amax) = project(a, axis);
    let (bmin, bmax) = project(b, axis);
    amax < bmin || bmax < amin
}

/// Separating-axis test between two triangles. Touching counts as overlap.
pub fn triangle_triangle_overlap(a: &[Vec3; 3], b: &[Vec3; 3]) -> bool {
    let ea = [a[1] - a[0], a[2] - a[1], a[0] - a[2]];
    let eb = [b[1] - b[0], b[2] - b[1], b[0] - b[2]];
    let na = ea[0].cross(&ea[1]);
    let nb = eb[0].cross(&eb[1]);

    let mut axes: Vec<Vec3> = Vec::with_capacity(17);
    axes.push(na);
    axes.push(nb);
    for e in &ea {
        for f in &eb {
            axes.push(e.cross(f));
        }
    }
    for e in &ea {
        axes.push(na.cross(e));
    }
    for f in &eb {
        axes.push(nb.cross(f));
    }
    let scale = ea.iter().chain(eb.iter()).map(|e| e.norm_squared()).fold(0.0, f64::max);
    let tiny = 1e-24 * scale * scale;
    for axis in &axes {
        if axis.norm_squared() <= tiny {
            continue;
        }
        if separated_on(a, b, axis) {
            return false;
        }
    }
    true
}

/// Separating-axis test between an oriented box (center, unit axes, half
/// extents) and a triangle. Touching counts as overlap.
pub fn box_triangle_overlap(center: &Vec3, axes: &[Vec3; 3], half: &Vec3, tri: &[Vec3; 3]) -> bool {
    let local: [Vec3; 3] = tri.map(|p| {
        let d = p - center;
        Vec3::new(d.dot(&axes[0]), d.dot(&axes[1]), d.dot(&axes[2]))
    });
    let corners: Vec<Vec3> = (0..8)
        .map(|k| {
            Vec3::new(
                if k & 1 == 0 { -half.x } else { half.x },
                if k & 2 == 0 { -half.y } else { half.y },
                if k & 4 == 0 { -half.z } else { half.z },
            )
        })
        .collect();
    let e = [local[1] - local[0], local[2] - local[1], local[0] - local[2]];
    let n = e[0].cross(&e[1]);
    let mut candidates = vec![Vec3::x(), Vec3::y(), Vec3::z(), n];
    for edge in &e {
        for unit in [Vec3::x(), Vec3::y(), Vec3::z()] {
            candidates.push(edge.cross(&unit));
        }
    }
    let scale = e.iter().map(|v| v.norm_squared()).fold(half.norm_squared(), f64::max);
    for axis in &candidates {
        if axis.norm_squared() <= 1e-24 * scale {
            continue;
        }
        if separated_on(&corners, &local, axis) {
            return false;
        }
    }
    true
}

fn closest_on_triangle(p: &Vec3, t: &[Vec3; 3]) -> Vec3 {
    // Ericson, Real-Time Collision Detection, 5.1.5.
    let (a, b, c) = (t[0], t[1], t[2]);
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

fn segment_segment_distance(p1: &Vec3, q1: &Vec3, p2: &Vec3, q2: &Vec3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= 1e-30 && e <= 1e-30 {
        return r.norm();
    }
    if a <= 1e-30 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= 1e-30 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

/// Minimum distance between segment `p..q` and a triangle.
pub fn segment_triangle_distance(p: &Vec3, q: &Vec3, tri: &[Vec3; 3]) -> f64 {
    let d = q - p;
    let len = d.norm();
    if len > 0.0 && ray_triangle(p, &(d / len), len, tri).is_some() {
        return 0.0;
    }
    let mut best = (closest_on_triangle(p, tri) - p)
        .norm()
        .min((closest_on_triangle(q, tri) - q).norm());
    for k in 0..3 {
        best = best.min(segment_segment_distance(p, q, &tri[k], &tri[(k + 1) % 3]));
    }
    best
}

/// Direction used for parity tests; chosen to avoid axis-aligned features.
pub(crate) const PARITY_DIR: [f64; 3] = [0.577_215_664_9, 0.618_033_988_7, 0.531_128_874_1];

/// Ray-parity point-in-mesh test against every triangle (brute force).
pub fn point_in_mesh(p: &Vec3, mesh: &TriangleMesh) -> bool {
    let dir = Vec3::from(PARITY_DIR).normalize();
    let crossings = (0..mesh.triangle_count())
        .filter(|&i| ray_triangle(p, &dir, f64::INFINITY, &mesh.corners(i)).is_some())
        .count();
    crossings % 2 == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::primitives;

    fn tri(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> [Vec3; 3] {
        [Vec3::from(a), Vec3::from(b), Vec3::from(c)]
    }

    #[test]
    fn ray_hits_triangle_front_and_back() {
        let t = tri([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let o = Vec3::new(0.2, 0.2, 1.0);
        assert_eq!(ray_triangle(&o, &-Vec3::z(), 10.0, &t), Some(1.0));
        let o2 = Vec3::new(0.2, 0.2, -1.0);
        assert_eq!(ray_triangle(&o2, &Vec3::z(), 10.0, &t), Some(1.0));
        assert_eq!(ray_triangle(&o, &-Vec3::z(), 0.5, &t), None);
        assert_eq!(ray_triangle(&o, &Vec3::z(), 10.0, &t), None);
    }

    #[test]
    fn shared_edge_does_not_leak() {
        // Two triangles sharing the diagonal of the unit square.
        let t1 = tri([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]);
        let t2 = tri([0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]);
        for k in 0..=100 {
            let s = k as f64 / 100.0;
            let o = Vec3::new(s, s, 1.0);
            let hit =
                ray_triangle(&o, &-Vec3::z(), 2.0, &t1).is_some() || ray_triangle(&o, &-Vec3::z(), 2.0, &t2).is_some();
            assert!(hit, "leak at s = {s}");
        }
    }

    #[test]
    fn tri_tri_cases() {
        let a = tri([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let crossing = tri([0.2, 0.2, -1.0], [0.2, 0.2, 1.0], [0.3, 0.5, 0.0]);
        assert!(triangle_triangle_overlap(&a, &crossing));
        let above = tri([0.2, 0.2, 0.1], [0.5, 0.2, 0.1], [0.2, 0.5, 0.1]);
        assert!(!triangle_triangle_overlap(&a, &above));
        let touching = tri([0.2, 0.2, 0.0], [0.5, 0.2, 0.5], [0.2, 0.5, 0.5]);
        assert!(triangle_triangle_overlap(&a, &touching));
        let coplanar_apart = tri([2.0, 2.0, 0.0], [3.0, 2.0, 0.0], [2.0, 3.0, 0.0]);
        assert!(!triangle_triangle_overlap(&a, &coplanar_apart));
        let coplanar_over = tri([0.1, 0.1, 0.0], [3.0, 0.1, 0.0], [0.1, 3.0, 0.0]);
        assert!(triangle_triangle_overlap(&a, &coplanar_over));
    }

    #[test]
    fn box_triangle_cases() {
        let axes = [Vec3::x(), Vec3::y(), Vec3::z()];
        let half = Vec3::repeat(0.5);
        let inside = tri([0.0, 0.0, 0.0], [0.1, 0.0, 0.0], [0.0, 0.1, 0.0]);
        assert!(box_triangle_overlap(&Vec3::zeros(), &axes, &half, &inside));
        let far = tri([2.0, 0.0, 0.0], [2.1, 0.0, 0.0], [2.0, 0.1, 0.0]);
        assert!(!box_triangle_overlap(&Vec3::zeros(), &axes, &half, &far));
        // Passes diagonally near a corner without touching.
        let skew = tri([0.9, 0.0, 0.55], [0.0, 0.9, 0.55], [0.9, 0.9, 0.55]);
        assert!(!box_triangle_overlap(&Vec3::zeros(), &axes, &half, &skew));
    }

    #[test]
    fn segment_distance_cases() {
        let t = tri([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let d = segment_triangle_distance(&Vec3::new(0.2, 0.2, 0.5), &Vec3::new(0.2, 0.2, 1.0), &t);
        assert!((d - 0.5).abs() < 1e-12);
        let crossing = segment_triangle_distance(&Vec3::new(0.2, 0.2, -1.0), &Vec3::new(0.2, 0.2, 1.0), &t);
        assert_eq!(crossing, 0.0);
        let beside = segment_triangle_distance(&Vec3::new(2.0, 0.0, -1.0), &Vec3::new(2.0, 0.0, 1.0), &t);
        assert!((beside - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_inside_cube() {
        let cube = primitives::cuboid(Vec3::repeat(0.5));
        assert!(point_in_mesh(&Vec3::new(0.1, -0.2, 0.3), &cube));
        assert!(!point_in_mesh(&Vec3::new(0.7, 0.0, 0.0), &cube));
    }
}
