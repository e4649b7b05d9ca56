//! Geometric substrate: posed triangle meshes, a BVH over world-space
//! triangles, watertight ray casting, triangle overlap queries and surface
//! sampling.

mod accel;
mod hull;
mod intersect;
mod mesh;
mod obj;
pub mod primitives;
mod sample;

use nalgebra::{Matrix3, Quaternion, Rotation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use accel::{AccelInstance, OverlapResult, SceneAccel};
pub use hull::convex_hull_volume;
pub use intersect::{
    box_triangle_overlap, point_in_mesh, ray_triangle, segment_triangle_distance, triangle_triangle_overlap,
};
pub use mesh::{MeshLoad, TriangleMesh, VolumeEstimate};
pub use obj::{load_mesh, parse_obj, write_obj};
pub use sample::sample_surface;

pub type Vec3 = Vector3<f64>;

/// Rigid transform: rotation followed by translation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vec3,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vec3) -> Self {
        Self { rotation, translation }
    }

    pub fn from_translation(translation: Vec3) -> Self {
        Self::new(UnitQuaternion::identity(), translation)
    }

    /// Builds a pose from a rotation matrix whose columns are the frame axes.
    pub fn from_axes(x: Vec3, y: Vec3, z: Vec3, translation: Vec3) -> Self {
        let m = Matrix3::from_columns(&[x, y, z]);
        let rot = Rotation3::from_matrix_unchecked(m);
        Self::new(UnitQuaternion::from_rotation_matrix(&rot), translation)
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        *self.rotation.to_rotation_matrix().matrix()
    }

    pub fn axis(&self, i: usize) -> Vec3 {
        self.rotation_matrix().column(i).into_owned()
    }

    pub fn transform_point(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    pub fn transform_vector(&self, v: &Vec3) -> Vec3 {
        self.rotation * v
    }

    pub fn inverse_transform_point(&self, p: &Vec3) -> Vec3 {
        self.rotation.inverse() * (p - self.translation)
    }

    pub fn inverse(&self) -> Self {
        let inv = self.rotation.inverse();
        Self::new(inv, -(inv * self.translation))
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose::new(
            self.rotation * other.rotation,
            self.rotation * other.translation + self.translation,
        )
    }

    /// Quaternion as `[w, x, y, z]`.
    pub fn quaternion_wxyz(&self) -> [f64; 4] {
        let q = self.rotation.quaternion();
        [q.w, q.i, q.j, q.k]
    }

    /// Rebuilds a pose from stored components without renormalizing, so a
    /// serialized pose reloads bit-exactly.
    pub fn from_wxyz(q: [f64; 4], t: [f64; 3]) -> Self {
        let quat = Quaternion::new(q[0], q[1], q[2], q[3]);
        let norm = quat.norm();
        let rotation = if (norm - 1.0).abs() <= 1e-9 {
            UnitQuaternion::new_unchecked(quat)
        } else {
            UnitQuaternion::from_quaternion(quat)
        };
        Self::new(rotation, Vec3::new(t[0], t[1], t[2]))
    }
}

#[derive(Serialize, Deserialize)]
struct PoseRepr {
    q: [f64; 4],
    t: [f64; 3],
}

impl Serialize for Pose {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PoseRepr {
            q: self.quaternion_wxyz(),
            t: [self.translation.x, self.translation.y, self.translation.z],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pose {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PoseRepr::deserialize(d)?;
        let n = (r.q.iter().map(|v| v * v).sum::<f64>()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(serde::de::Error::custom("quaternion must be non-zero"));
        }
        Ok(Pose::from_wxyz(r.q, r.t))
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Self {
            min: Vec3::repeat(f64::INFINITY),
            max: Vec3::repeat(f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn grow(&mut self, p: &Vec3) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn merge(&self, o: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&o.min),
            max: self.max.sup(&o.max),
        }
    }

    pub fn padded(&self, pad: f64) -> Aabb {
        Aabb {
            min: self.min.add_scalar(-pad),
            max: self.max.add_scalar(pad),
        }
    }

    pub fn intersects(&self, o: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= o.max[i] && o.min[i] <= self.max[i])
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|i| self.min[i] <= p[i] && p[i] <= self.max[i])
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn is_empty(&self) -> bool {
        (0..3).any(|i| self.min[i] > self.max[i])
    }

    /// Slab test; returns the entry distance when the ray segment `[0, t_max]`
    /// touches the box.
    pub fn ray_entry(&self, origin: &Vec3, inv_dir: &Vec3, t_max: f64) -> Option<f64> {
        let mut t0 = 0.0f64;
        let mut t1 = t_max;
        for i in 0..3 {
            if inv_dir[i].is_infinite() {
                if origin[i] < self.min[i] || origin[i] > self.max[i] {
                    return None;
                }
                continue;
            }
            let mut a = (self.min[i] - origin[i]) * inv_dir[i];
            let mut b = (self.max[i] - origin[i]) * inv_dir[i];
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
            if t0 > t1 {
                return None;
            }
        }
        Some(t0)
    }
}

/// Half-open ray segment `origin + s·direction`, `s ∈ [0, max_distance]`.
#[derive(Clone, Copy, Debug)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
    pub max_distance: f64,
}

impl Ray {
    /// Normalizes `direction`.
    pub fn new(origin: Vec3, direction: Vec3, max_distance: f64) -> Self {
        Self {
            origin,
            direction: direction.normalize(),
            max_distance,
        }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayHit {
    pub distance: f64,
    pub point: Vec3,
    pub face_normal: Vec3,
    pub instance_id: u32,
    pub triangle_index: u32,
}

/// A surface point with its unit normal and owning instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointNormal {
    pub point: Vec3,
    pub normal: Vec3,
    pub instance_id: u32,
}

/// Quaternion from normalized 4-D Gaussian draws (uniform over SO(3)).
pub fn random_rotation<R: rand::Rng + ?Sized>(rng: &mut R) -> UnitQuaternion<f64> {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let w: f64 = StandardNormal.sample(rng);
        let x: f64 = StandardNormal.sample(rng);
        let y: f64 = StandardNormal.sample(rng);
        let z: f64 = StandardNormal.sample(rng);
        let q = Quaternion::new(w, x, y, z);
        if q.norm() > 1e-6 {
            return UnitQuaternion::from_quaternion(q);
        }
    }
}

/// Any unit vector orthogonal to `n`.
pub fn any_orthogonal(n: &Vec3) -> Vec3 {
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    (helper - n * n.dot(&helper)).normalize()
}
