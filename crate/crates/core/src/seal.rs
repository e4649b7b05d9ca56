//! Suction seal evaluation: a 15-ring × 64-vertex web of rays cast along the
//! cup approach axis, plus the 8-vertex perimeter/flexion/cone spring
//! baseline evaluated on the singulated target.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::geometry::{Ray, SceneAccel, Vec3};
use crate::grasp::{SuctionCandidate, SuctionCupSpec};

pub const RINGS: usize = 15;
pub const VERTICES_PER_RING: usize = 64;
/// Allowed per-vertex deformation as a fraction of the bellows height.
pub const DEFORMATION_FRACTION: f64 = 0.10;
/// Allowed spring strain in the 8-vertex baseline.
pub const SPRING_STRAIN_LIMIT: f64 = 0.10;
pub const BASELINE_VERTICES: usize = 8;

/// Vertex positions in the cup frame; rings are concentric about the X axis
/// in the rim plane `x = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SealModel {
    pub ring_radii: Vec<f64>,
    pub vertices_per_ring: usize,
    pub nominal_height: f64,
    /// Per-vertex |δ| limit as a fraction of `nominal_height`.
    pub deformation_fraction: f64,
    /// Ring-major: index `k * vertices_per_ring + j`.
    pub vertices: Vec<Vec3>,
}

impl SealModel {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
}

pub fn build_seal_model(cup: &SuctionCupSpec) -> SealModel {
    build_seal_model_with(cup.radius, cup.bellows_height, RINGS, VERTICES_PER_RING)
}

pub fn build_seal_model_with(radius: f64, height: f64, rings: usize, per_ring: usize) -> SealModel {
    let ring_radii: Vec<f64> = (1..=rings).map(|k| radius * k as f64 / rings as f64).collect();
    let mut vertices = Vec::with_capacity(rings * per_ring);
    for r in &ring_radii {
        for j in 0..per_ring {
            let a = TAU * j as f64 / per_ring as f64;
            vertices.push(Vec3::new(0.0, r * a.cos(), r * a.sin()));
        }
    }
    SealModel {
        ring_radii,
        vertices_per_ring: per_ring,
        nominal_height: height,
        deformation_fraction: DEFORMATION_FRACTION,
        vertices,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SealFailure {
    #[default]
    None,
    RayMiss,
    WrongInstance,
    DeformationExceeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexHit {
    pub hit: bool,
    /// -1 on miss.
    pub instance_id: i64,
    /// Signed displacement from the rim plane along the approach axis [m];
    /// positive means the surface lies beyond the rim.
    pub deformation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SealEvaluation {
    pub vertices: Vec<VertexHit>,
    pub q_seal: bool,
    pub failure_reason: SealFailure,
    /// Largest |δ| over vertices that hit anything [m].
    pub max_deformation: f64,
}

/// Casts a ray from `h` behind the rim vertex along the approach axis with
/// reach `3h`, so surfaces from `h` behind to `2h` beyond the rim register.
fn cast_vertex(accel: &SceneAccel, origin: Vec3, axis: &Vec3, h: f64, keep: impl Fn(u32) -> bool) -> VertexHit {
    let ray = Ray {
        origin: origin - axis * h,
        direction: *axis,
        max_distance: 3.0 * h,
    };
    match accel.raycast_filtered(&ray, keep) {
        Some(hit) => VertexHit {
            hit: true,
            instance_id: hit.instance_id as i64,
            deformation: hit.distance - h,
        },
        None => VertexHit {
            hit: false,
            instance_id: -1,
            deformation: 0.0,
        },
    }
}

/// Evaluates the seal of `cand` against every instance in `accel`.
/// Failure priority: wrong instance, then ray miss, then deformation.
pub fn evaluate_seal(accel: Option<&SceneAccel>, cand: &SuctionCandidate, model: &SealModel) -> SealEvaluation {
    let Some(accel) = accel else {
        return SealEvaluation {
            vertices: vec![
                VertexHit {
                    hit: false,
                    instance_id: -1,
                    deformation: 0.0
                };
                model.vertex_count()
            ],
            q_seal: false,
            failure_reason: SealFailure::RayMiss,
            max_deformation: 0.0,
        };
    };
    let axis = cand.pose.axis(0);
    let h = model.nominal_height;
    let vertices: Vec<VertexHit> = model
        .vertices
        .iter()
        .map(|v| cast_vertex(accel, cand.pose.transform_point(v), &axis, h, |_| true))
        .collect();
    let target = cand.target_instance as i64;
    let wrong = vertices.iter().any(|v| v.hit && v.instance_id != target);
    let miss = vertices.iter().any(|v| !v.hit);
    let max_deformation = vertices
        .iter()
        .filter(|v| v.hit)
        .map(|v| v.deformation.abs())
        .fold(0.0, f64::max);
    let failure_reason = if wrong {
        SealFailure::WrongInstance
    } else if miss {
        SealFailure::RayMiss
    } else if max_deformation > model.deformation_fraction * h {
        SealFailure::DeformationExceeded
    } else {
        SealFailure::None
    };
    SealEvaluation {
        vertices,
        q_seal: failure_reason == SealFailure::None,
        failure_reason,
        max_deformation,
    }
}

/// Spring strains of the 8-vertex baseline, or `None` when a perimeter ray
/// misses the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpringStrains {
    pub perimeter: [f64; BASELINE_VERTICES],
    pub flexion: [f64; BASELINE_VERTICES],
    pub cone: [f64; BASELINE_VERTICES],
}

impl SpringStrains {
    pub fn max_abs(&self) -> f64 {
        self.perimeter
            .iter()
            .chain(&self.flexion)
            .chain(&self.cone)
            .map(|s| s.abs())
            .fold(0.0, f64::max)
    }
}

/// Projects the eight outer-ring vertices (angles `2πj/8`) onto the target
/// only and measures perimeter (j, j+1), flexion (j, j+2) and cone (vertex to
/// an apex `h` behind the rim center) spring strains.
pub fn dexnet8_strains(
    target_accel: &SceneAccel,
    cand: &SuctionCandidate,
    cup: &SuctionCupSpec,
) -> Option<SpringStrains> {
    let (r, h) = (cup.radius, cup.bellows_height);
    let axis = cand.pose.axis(0);
    let target = cand.target_instance;
    let mut contacts = [Vec3::zeros(); BASELINE_VERTICES];
    for (j, c) in contacts.iter_mut().enumerate() {
        let a = TAU * j as f64 / BASELINE_VERTICES as f64;
        let v = cand.pose.transform_point(&Vec3::new(0.0, r * a.cos(), r * a.sin()));
        let hit = cast_vertex(target_accel, v, &axis, h, |id| id == target);
        if !hit.hit {
            return None;
        }
        *c = v + axis * hit.deformation;
    }
    let apex = cand.pose.translation - axis * h;
    let perim0 = 2.0 * r * (PI / BASELINE_VERTICES as f64).sin();
    let flex0 = 2.0 * r * (TAU / BASELINE_VERTICES as f64).sin();
    let cone0 = (r * r + h * h).sqrt();
    let strain = |l: f64, l0: f64| (l - l0) / l0;
    let n = BASELINE_VERTICES;
    Some(SpringStrains {
        perimeter: std::array::from_fn(|j| strain((contacts[j] - contacts[(j + 1) % n]).norm(), perim0)),
        flexion: std::array::from_fn(|j| strain((contacts[j] - contacts[(j + 2) % n]).norm(), flex0)),
        cone: std::array::from_fn(|j| strain((contacts[j] - apex).norm(), cone0)),
    })
}

/// 8-vertex baseline verdict on the singulated target.
pub fn evaluate_seal_dexnet8(target_accel: &SceneAccel, cand: &SuctionCandidate, cup: &SuctionCupSpec) -> bool {
    evaluate_seal_dexnet8_with(target_accel, cand, cup, SPRING_STRAIN_LIMIT)
}

pub fn evaluate_seal_dexnet8_with(
    target_accel: &SceneAccel,
    cand: &SuctionCandidate,
    cup: &SuctionCupSpec,
    strain_limit: f64,
) -> bool {
    dexnet8_strains(target_accel, cand, cup).is_some_and(|s| s.max_abs() <= strain_limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{primitives, AccelInstance, Pose, TriangleMesh};
    use nalgebra::UnitQuaternion;

    fn accel(meshes: &[&TriangleMesh]) -> SceneAccel {
        let inst: Vec<AccelInstance> = meshes
            .iter()
            .enumerate()
            .map(|(i, m)| AccelInstance {
                mesh: m,
                pose: Pose::identity(),
                scale: 1.0,
                instance_id: i as u32,
            })
            .collect();
        SceneAccel::build(&inst).unwrap()
    }

    fn down_at(p: Vec3, roll: f64) -> SuctionCandidate {
        let base = UnitQuaternion::rotation_between(&Vec3::x(), &-Vec3::z()).unwrap();
        SuctionCandidate {
            scene_id: String::new(),
            target_instance: 0,
            point_index: 0,
            pose: Pose::new(base * UnitQuaternion::from_axis_angle(&Vec3::x_axis(), roll), p),
            cup: "cup_15mm".into(),
        }
    }

    fn plate_with_hole(hole: f64) -> TriangleMesh {
        primitives::HeightField {
            origin: (-0.04, -0.04),
            cell: 0.0005,
            nx: 160,
            ny: 160,
            bottom: -0.005,
            height: &|_, _| 0.0,
            solid: &|x, y| (x * x + y * y).sqrt() > hole,
        }
        .build()
    }

    #[test]
    fn model_layout() {
        for (cup, r) in [(SuctionCupSpec::cup_15mm(), 0.015), (SuctionCupSpec::cup_25mm(), 0.025)] {
            let m = build_seal_model(&cup);
            assert_eq!(m.vertex_count(), 960);
            assert!((m.ring_radii.last().unwrap() - r).abs() < 1e-15);
            assert!(m.ring_radii.windows(2).all(|w| w[0] < w[1]));
            for k in 0..RINGS {
                for j in 0..VERTICES_PER_RING {
                    let v = m.vertices[k * VERTICES_PER_RING + j];
                    let a = v.z.atan2(v.y).rem_euclid(TAU);
                    let expect = TAU * j as f64 / 64.0;
                    let d = (a - expect).abs();
                    assert!(d.min(TAU - d) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn flat_plate_seals() {
        let plate = primitives::cuboid_between(Vec3::new(-0.05, -0.05, -0.01), Vec3::new(0.05, 0.05, 0.0));
        let a = accel(&[&plate]);
        let cup = SuctionCupSpec::cup_15mm();
        let e = evaluate_seal(Some(&a), &down_at(Vec3::zeros(), 0.0), &build_seal_model(&cup));
        assert!(e.q_seal);
        assert!(e.vertices.iter().all(|v| v.deformation.abs() < 1e-6));
        assert!(evaluate_seal_dexnet8(&a, &down_at(Vec3::zeros(), 0.0), &cup));
    }

    #[test]
    fn half_radius_hole_fools_the_baseline_only() {
        let cup = SuctionCupSpec::cup_15mm();
        let plate = plate_with_hole(0.5 * cup.radius);
        let a = accel(&[&plate]);
        let cand = down_at(Vec3::zeros(), 0.0);
        let e = evaluate_seal(Some(&a), &cand, &build_seal_model(&cup));
        assert_eq!(e.failure_reason, SealFailure::RayMiss);
        assert!(evaluate_seal_dexnet8(&a, &cand, &cup));

        let wide = plate_with_hole(1.2 * cup.radius);
        let a = accel(&[&wide]);
        assert!(!evaluate_seal_dexnet8(&a, &cand, &cup));
    }

    #[test]
    fn step_under_half_the_cup() {
        let cup = SuctionCupSpec::cup_15mm();
        let step = 0.2 * cup.bellows_height;
        let m = primitives::HeightField {
            origin: (-0.04, -0.04),
            cell: 0.001,
            nx: 80,
            ny: 80,
            bottom: -0.01,
            height: &|x, _| if x > 0.0 { -step } else { 0.0 },
            solid: &|_, _| true,
        }
        .build();
        let a = accel(&[&m]);
        let e = evaluate_seal(
            Some(&a),
            &down_at(Vec3::new(-0.0, 0.0, 0.0), 0.0),
            &build_seal_model(&cup),
        );
        assert_eq!(e.failure_reason, SealFailure::DeformationExceeded);
        assert!((e.max_deformation - step).abs() < 1e-9);
    }

    #[test]
    fn neighbor_under_cup_is_wrong_instance() {
        let a_plate = primitives::cuboid_between(Vec3::new(-0.05, -0.05, -0.01), Vec3::new(0.0, 0.05, 0.0));
        let b_plate = primitives::cuboid_between(Vec3::new(0.0005, -0.05, -0.01), Vec3::new(0.05, 0.05, 0.0));
        let a = accel(&[&a_plate, &b_plate]);
        let cup = SuctionCupSpec::cup_15mm();
        let e = evaluate_seal(Some(&a), &down_at(Vec3::zeros(), 0.0), &build_seal_model(&cup));
        assert_eq!(e.failure_reason, SealFailure::WrongInstance);
    }

    #[test]
    fn symmetric_roll_invariance() {
        let cup = SuctionCupSpec::cup_15mm();
        let plate = plate_with_hole(0.004);
        let a = accel(&[&plate]);
        let m = build_seal_model(&cup);
        let e0 = evaluate_seal(Some(&a), &down_at(Vec3::zeros(), 0.0), &m);
        let e1 = evaluate_seal(Some(&a), &down_at(Vec3::zeros(), TAU / 64.0), &m);
        assert_eq!(e0.q_seal, e1.q_seal);
    }

    #[test]
    fn empty_scene_misses() {
        let cup = SuctionCupSpec::cup_15mm();
        let e = evaluate_seal(None, &down_at(Vec3::zeros(), 0.0), &build_seal_model(&cup));
        assert_eq!(e.failure_reason, SealFailure::RayMiss);
    }
}
