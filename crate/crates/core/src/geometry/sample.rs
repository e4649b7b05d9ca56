use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PointNormal, TriangleMesh};
use crate::error::{Error, Result};

/// Area-weighted uniform surface samples with face normals. Deterministic per
/// seed. Instance ids are 0; callers relabel.
pub fn sample_surface(mesh: &TriangleMesh, n: usize, seed: u64) -> Result<Vec<PointNormal>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be ≥ 1".into()));
    }
    let mut cdf = Vec::with_capacity(mesh.triangle_count());
    let mut total = 0.0;
    for i in 0..mesh.triangle_count() {
        total += mesh.triangle_area(i);
        cdf.push(total);
    }
    let normals: Vec<_> = (0..mesh.triangle_count()).map(|i| mesh.face_normal(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let target = rng.random::<f64>() * total;
            let tri = cdf.partition_point(|&c| c <= target).min(cdf.len() - 1);
            let [a, b, c] = mesh.corners(tri);
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            let s = r1.sqrt();
            let point = a * (1.0 - s) + b * (s * (1.0 - r2)) + c * (s * r2);
            PointNormal {
                point,
                normal: normals[tri],
                instance_id: 0,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{primitives, Vec3};

    #[test]
    fn zero_samples_is_an_error() {
        let cube = primitives::cuboid(Vec3::repeat(0.5));
        assert!(sample_surface(&cube, 0, 1).is_err());
    }

    #[test]
    fn cube_faces_receive_equal_share() {
        let cube = primitives::cuboid(Vec3::repeat(0.5));
        let pts = sample_surface(&cube, 6000, 7).unwrap();
        let mut counts = [0usize; 6];
        for p in &pts {
            let axis = p.normal.iamax();
            let face = axis * 2 + usize::from(p.normal[axis] > 0.0);
            counts[face] += 1;
        }
        for c in counts {
            assert!((900..=1100).contains(&c), "face count {c}");
        }
        // Chi-square with 5 dof; the 99.9% quantile is 20.5.
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - 1000.0).powi(2) / 1000.0).sum();
        assert!(chi2 < 20.5, "chi2 = {chi2}");
    }

    #[test]
    fn samples_are_deterministic_and_on_surface() {
        let cube = primitives::cuboid(Vec3::repeat(0.5));
        let a = sample_surface(&cube, 500, 42).unwrap();
        let b = sample_surface(&cube, 500, 42).unwrap();
        assert_eq!(a, b);
        for p in &a {
            assert!((p.point.abs().max() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn single_triangle_normals() {
        let m = TriangleMesh::new(vec![Vec3::zeros(), Vec3::x(), Vec3::y()], vec![[0, 1, 2]]).unwrap();
        let pts = sample_surface(&m, 3, 0).unwrap();
        assert!(pts.iter().all(|p| (p.normal - Vec3::z()).norm() < 1e-15));
    }
}
