use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PointNormal, Pose, Vec3};

/// Minimum neighbor count for a normal covariance.
pub const MIN_NEIGHBORS: usize = 3;
/// Eigenvalue gap below which the frame is flagged degenerate.
pub const DEGENERATE_GAP: f64 = 1e-9;

/// Sum of `n nᵀ` over samples within `radius` of `center`.
pub fn normal_covariance(samples: &[PointNormal], center: &Vec3, radius: f64) -> Result<Matrix3<f64>> {
    let r2 = radius * radius;
    let mut n = Matrix3::zeros();
    let mut found = 0;
    for s in samples {
        if (s.point - center).norm_squared() <= r2 {
            n += s.normal * s.normal.transpose();
            found += 1;
        }
    }
    if found < MIN_NEIGHBORS {
        return Err(Error::InsufficientSupport {
            found,
            needed: MIN_NEIGHBORS,
        });
    }
    Ok(n)
}

/// Surface frame at a sample point: columns `[v1 | v2 | v3]` are the normal
/// consensus direction and the major and minor curvature axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DarbouxFrame {
    pub origin: Vec3,
    pub rotation: Matrix3<f64>,
    /// Eigenvalue multiplicity made some axis choice arbitrary.
    pub degenerate: bool,
}

impl DarbouxFrame {
    pub fn v1(&self) -> Vec3 {
        self.rotation.column(0).into()
    }

    pub fn v2(&self) -> Vec3 {
        self.rotation.column(1).into()
    }

    pub fn v3(&self) -> Vec3 {
        self.rotation.column(2).into()
    }

    pub fn pose(&self) -> Pose {
        Pose::from_axes(self.v1(), self.v2(), self.v3(), self.origin)
    }
}

/// Unit projection of `dir` onto the plane normal to `n`, or `None` when
/// `dir` is (nearly) parallel to `n`.
fn project_to_plane(dir: &Vec3, n: &Vec3) -> Option<Vec3> {
    let p = dir - n * dir.dot(n);
    (p.norm() > 1e-6).then(|| p.normalize())
}

fn reference_tangent(v1: &Vec3) -> Vec3 {
    project_to_plane(&Vec3::x(), v1)
        .or_else(|| project_to_plane(&Vec3::y(), v1))
        .expect("x and y cannot both be parallel to a unit vector")
}

/// Frame from the eigen-decomposition of the local normal covariance.
/// `v1` takes the largest eigenvalue and is flipped to agree with
/// `t.normal`; `v2` is signed toward global +x (projected) and
/// `v3 = v1 × v2`.
pub fn darboux_frame(samples: &[PointNormal], t: &PointNormal, radius: f64) -> Result<DarbouxFrame> {
    let n = normal_covariance(samples, &t.point, radius)?;
    Ok(frame_from_covariance(&n, t))
}

pub fn frame_from_covariance(n: &Matrix3<f64>, t: &PointNormal) -> DarbouxFrame {
    let eig = SymmetricEigen::new(*n);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let lam = order.map(|i| eig.eigenvalues[i]);
    let e = order.map(|i| -> Vec3 { eig.eigenvectors.column(i).into() });

    let top_tie = lam[0] - lam[1] < DEGENERATE_GAP;
    let low_tie = lam[1] - lam[2] < DEGENERATE_GAP;

    let mut v1 = e[0].normalize();
    if top_tie {
        // Pick the direction in the tied eigenspace closest to the normal.
        let span = if low_tie {
            vec![e[0], e[1], e[2]]
        } else {
            vec![e[0], e[1]]
        };
        let proj: Vec3 = span.iter().map(|b| b * b.dot(&t.normal)).sum();
        if proj.norm() > 1e-9 {
            v1 = proj.normalize();
        }
    }
    if v1.dot(&t.normal) < 0.0 {
        // 180° about v3; v2's sign is fixed below.
        v1 = -v1;
    }
    let v2 = if top_tie || low_tie {
        reference_tangent(&v1)
    } else {
        let v = (e[1] - v1 * e[1].dot(&v1)).normalize();
        if v.dot(&reference_tangent(&v1)) < 0.0 {
            -v
        } else {
            v
        }
    };
    let v3 = v1.cross(&v2);
    DarbouxFrame {
        origin: t.point,
        rotation: Matrix3::from_columns(&[v1, v2, v3]),
        degenerate: top_tie || low_tie,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Rotation3, Unit};

    fn pn(p: Vec3, n: Vec3) -> PointNormal {
        PointNormal {
            point: p,
            normal: n.normalize(),
            instance_id: 0,
        }
    }

    #[test]
    fn rank_one_sum() {
        let s: Vec<_> = (0..5)
            .map(|i| pn(Vec3::new(i as f64 * 1e-3, 0.0, 0.0), Vec3::z()))
            .collect();
        let n = normal_covariance(&s, &Vec3::zeros(), 0.01).unwrap();
        assert_eq!(n, Matrix3::from_diagonal(&Vec3::new(0.0, 0.0, 5.0)));
    }

    #[test]
    fn split_normals_add() {
        let mut s: Vec<_> = (0..4).map(|_| pn(Vec3::zeros(), Vec3::x())).collect();
        s.extend((0..4).map(|_| pn(Vec3::zeros(), Vec3::y())));
        let n = normal_covariance(&s, &Vec3::zeros(), 0.01).unwrap();
        assert_eq!(n, Matrix3::from_diagonal(&Vec3::new(4.0, 4.0, 0.0)));
    }

    #[test]
    fn too_few_neighbors() {
        let s = vec![pn(Vec3::zeros(), Vec3::z()), pn(Vec3::new(1.0, 0.0, 0.0), Vec3::z())];
        assert!(matches!(
            normal_covariance(&s, &Vec3::zeros(), 0.01),
            Err(Error::InsufficientSupport { found: 1, needed: 3 })
        ));
    }

    fn check_orthonormal(f: &DarbouxFrame) {
        let r = f.rotation;
        assert!((r.transpose() * r - Matrix3::identity()).norm() < 1e-6);
        assert!((r.determinant() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn flat_plane() {
        let s: Vec<_> = (0..9)
            .map(|i| pn(Vec3::new((i % 3) as f64 * 1e-3, (i / 3) as f64 * 1e-3, 0.0), Vec3::z()))
            .collect();
        let f = darboux_frame(&s, &s[4], 0.01).unwrap();
        assert!((f.v1() - Vec3::z()).norm() < 1e-12);
        assert!(f.degenerate);
        assert!((f.v2() - Vec3::x()).norm() < 1e-12);
        check_orthonormal(&f);
    }

    #[test]
    fn inward_eigenvector_is_flipped() {
        // Normals cluster around -z; the query normal is +z-ish (outward).
        let s: Vec<_> = (0..6)
            .map(|i| {
                let a = i as f64 * 0.3;
                pn(
                    Vec3::new(a * 1e-3, 0.0, 0.0),
                    Vec3::new(0.1 * a.cos(), 0.05 * a.sin(), -1.0),
                )
            })
            .collect();
        let t = pn(Vec3::zeros(), Vec3::new(0.0, 0.0, 1.0));
        let f = darboux_frame(&s, &t, 0.01).unwrap();
        assert!(f.v1().dot(&t.normal) >= 0.0);
        check_orthonormal(&f);
    }

    #[test]
    fn cylinder_side() {
        // Analytic normals on a cylinder of radius 0.02 with axis z.
        let r = 0.02;
        let mut s = Vec::new();
        for i in 0..40 {
            for j in 0..10 {
                let a = -0.5 + i as f64 * 0.025;
                let z = -0.005 + j as f64 * 0.001;
                let n = Vec3::new(a.cos(), a.sin(), 0.0);
                s.push(pn(n * r + Vec3::new(0.0, 0.0, z), n));
            }
        }
        let t = pn(Vec3::new(r, 0.0, 0.0), Vec3::x());
        let f = darboux_frame(&s, &t, 0.01).unwrap();
        assert!(f.v1().angle(&Vec3::x()) < 5f64.to_radians());
        assert!(f.v2().dot(&Vec3::z()).abs() < 5f64.to_radians().sin());
        check_orthonormal(&f);
    }

    #[test]
    fn rotation_equivariance() {
        let s: Vec<_> = (0..30)
            .map(|i| {
                let a = i as f64 * 0.37;
                pn(
                    Vec3::new(a.sin() * 1e-3, a.cos() * 2e-3, 0.0),
                    Vec3::new(0.3 * a.sin(), 0.1 * a.cos(), 1.0),
                )
            })
            .collect();
        let q = Rotation3::from_axis_angle(&Unit::new_normalize(Vec3::new(1.0, 2.0, 3.0)), 0.7);
        let rs: Vec<_> = s.iter().map(|p| pn(q * p.point, q * p.normal)).collect();
        let f = darboux_frame(&s, &s[0], 0.01).unwrap();
        let g = darboux_frame(&rs, &rs[0], 0.01).unwrap();
        assert!(!f.degenerate);
        assert!((q * f.v1() - g.v1()).norm() < 1e-6);
    }
}
