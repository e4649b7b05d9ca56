//! Quasi-static lift feasibility for suction and parallel-jaw candidates.

use serde::{Deserialize, Serialize};

use crate::geometry::{Ray, Vec3};
use crate::grasp::{GraspCandidate, GripperSpec, SuctionCandidate, SuctionCupSpec};
use crate::scene::SceneContext;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsConfig {
    /// [m/s²]
    pub gravity: f64,
    /// Load multiplier covering lift acceleration.
    pub accel_factor: f64,
    /// Jaw gripping force budget [N].
    pub grip_force: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            gravity: 9.81,
            accel_factor: 1.5,
            grip_force: 60.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsFailure {
    #[default]
    None,
    PayloadExceedsForceLimit,
    BendLimitExceeded,
    BlockedByPile,
    NoAntipodalContact,
    FrictionConeViolated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsVerdict {
    pub q_dynamics: bool,
    pub failure_reason: DynamicsFailure,
    /// Mass the tool has to lift [kg].
    pub payload_mass: f64,
    /// Objects resting (directly or transitively) on the target; only
    /// populated in clutter-aware mode.
    pub blocking_instances: Vec<u32>,
}

impl DynamicsVerdict {
    fn new(failure: DynamicsFailure, payload_mass: f64, blocking_instances: Vec<u32>) -> Self {
        Self {
            q_dynamics: failure == DynamicsFailure::None,
            failure_reason: failure,
            payload_mass,
            blocking_instances,
        }
    }
}

/// Target mass plus, in clutter-aware mode, the mass of everything stacked
/// on it.
fn pile_payload(ctx: &SceneContext, target: u32, clutter_aware: bool) -> (f64, Vec<u32>) {
    if !clutter_aware {
        return (ctx.mass(target), Vec::new());
    }
    let above: Vec<u32> = ctx.support.stacked_on(target).into_iter().collect();
    let extra: f64 = above.iter().map(|&i| ctx.mass(i)).sum();
    (ctx.mass(target) + extra, above)
}

/// Bending moment about the rim center perpendicular to the cup axis
/// produced by `mass` hanging at `com` [N·m].
pub fn suction_bend_torque(cand: &SuctionCandidate, com: &Vec3, mass: f64, gravity: f64) -> f64 {
    let axis = cand.pose.axis(0);
    let arm = com - cand.pose.translation;
    let tau = arm.cross(&Vec3::new(0.0, 0.0, -mass * gravity));
    (tau - axis * tau.dot(&axis)).norm()
}

fn suction_checks(
    cand: &SuctionCandidate,
    cup: &SuctionCupSpec,
    com: &Vec3,
    mass: f64,
    cfg: &DynamicsConfig,
) -> DynamicsFailure {
    if mass * cfg.gravity * cfg.accel_factor > cup.force_limit {
        DynamicsFailure::PayloadExceedsForceLimit
    } else if suction_bend_torque(cand, com, mass, cfg.gravity) > cup.force_limit * cup.radius {
        // Angular stiffness force_limit·radius / bend_limit puts the bend
        // limit exactly at this torque.
        DynamicsFailure::BendLimitExceeded
    } else {
        DynamicsFailure::None
    }
}

/// Lift check for a sealed suction candidate. Clutter-aware mode first runs
/// the single-object checks, then repeats them with the pile payload and
/// reports failures of the second pass as `BlockedByPile`.
pub fn suction_quasistatic(
    ctx: &SceneContext,
    cand: &SuctionCandidate,
    cup: &SuctionCupSpec,
    cfg: &DynamicsConfig,
    clutter_aware: bool,
) -> DynamicsVerdict {
    let target = cand.target_instance;
    let com = ctx.centers_of_mass[target as usize];
    let single = suction_checks(cand, cup, &com, ctx.mass(target), cfg);
    let (payload, above) = pile_payload(ctx, target, clutter_aware);
    if single != DynamicsFailure::None {
        return DynamicsVerdict::new(single, payload, above);
    }
    let failure = match suction_checks(cand, cup, &com, payload, cfg) {
        DynamicsFailure::None => DynamicsFailure::None,
        _ => DynamicsFailure::BlockedByPile,
    };
    DynamicsVerdict::new(failure, payload, above)
}

/// Finger contacts found by closing rays, in world frame.
#[derive(Clone, Debug, PartialEq)]
pub struct JawContacts {
    pub left: Vec3,
    pub left_normal: Vec3,
    pub right: Vec3,
    pub right_normal: Vec3,
}

/// Casts one ray from each finger's inner face toward the other finger,
/// through the centroid of the target samples inside the close region.
pub fn find_jaw_contacts(ctx: &SceneContext, cand: &GraspCandidate, gripper: &GripperSpec) -> Option<JawContacts> {
    let accel = ctx.accel.as_ref()?;
    let target = cand.target_instance;
    let inside: Vec<Vec3> = ctx.samples[target as usize]
        .iter()
        .map(|s| cand.pose.inverse_transform_point(&s.point))
        .filter(|p| gripper.close_region.contains(p))
        .collect();
    if inside.is_empty() {
        return None;
    }
    let c = inside.iter().sum::<Vec3>() / inside.len() as f64;
    let w = gripper.max_open_width;
    let y = cand.pose.axis(1);
    let cast = |side: f64| {
        let origin = cand.pose.transform_point(&Vec3::new(c.x, side * w / 2.0, c.z));
        let ray = Ray {
            origin,
            direction: -y * side,
            max_distance: w,
        };
        accel.raycast_filtered(&ray, |id| id == target)
    };
    let (l, r) = (cast(1.0)?, cast(-1.0)?);
    if l.distance + r.distance > w {
        return None;
    }
    Some(JawContacts {
        left: l.point,
        left_normal: l.face_normal,
        right: r.point,
        right_normal: r.face_normal,
    })
}

/// Antipodal friction-cone test plus the grip-force budget. Clutter-aware
/// mode repeats the budget check with the pile payload.
pub fn grasp_quasistatic(
    ctx: &SceneContext,
    cand: &GraspCandidate,
    gripper: &GripperSpec,
    cfg: &DynamicsConfig,
    clutter_aware: bool,
) -> DynamicsVerdict {
    let target = cand.target_instance;
    let (payload, above) = pile_payload(ctx, target, clutter_aware);
    let Some(contacts) = find_jaw_contacts(ctx, cand, gripper) else {
        return DynamicsVerdict::new(DynamicsFailure::NoAntipodalContact, payload, above);
    };
    let closing = cand.pose.axis(1);
    let cos_cone = ctx.friction(target).atan().cos();
    let inside_cone = |n: &Vec3| n.dot(&closing).abs() >= cos_cone - 1e-12;
    if !inside_cone(&contacts.left_normal) || !inside_cone(&contacts.right_normal) {
        return DynamicsVerdict::new(DynamicsFailure::FrictionConeViolated, payload, above);
    }
    let load = |m: f64| m * cfg.gravity * cfg.accel_factor;
    let failure = if load(ctx.mass(target)) > cfg.grip_force {
        DynamicsFailure::PayloadExceedsForceLimit
    } else if load(payload) > cfg.grip_force {
        DynamicsFailure::BlockedByPile
    } else {
        DynamicsFailure::None
    };
    DynamicsVerdict::new(failure, payload, above)
}
