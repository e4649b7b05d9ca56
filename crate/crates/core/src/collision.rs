//! Pose-level collision checks for jaw and suction candidates.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Pose, Vec3};
use crate::grasp::{GraspCandidate, GripperSpec, SuctionCandidate, SuctionCupSpec};
use crate::scene::{Scene, SceneContext};

/// Band behind the cup rim in which contact with the target is allowed [m].
pub const RIM_CONTACT_BAND: f64 = 0.001;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub q_collision: bool,
    pub contacting_instances: Vec<u32>,
    /// Non-target instances with surface samples inside the close region.
    pub close_region_occupied_by: Vec<u32>,
    pub ground_contact: bool,
    /// Target surface samples inside the close region (jaws only).
    pub target_points_in_close_region: usize,
}

/// Collision geometry used for the gripper body.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GripperModel {
    /// Full triangle mesh.
    #[default]
    Mesh,
    /// Palm box plus finger capsules, tested analytically.
    Primitives,
}

/// Samples of every instance that fall inside `region` (given in the frame
/// of `pose`), grouped by instance.
pub fn samples_in_region(ctx: &SceneContext, pose: &Pose, region: &Aabb) -> Vec<(u32, usize)> {
    let corners: Vec<Vec3> = (0..8)
        .map(|i| {
            Vec3::new(
                if i & 1 == 0 { region.min.x } else { region.max.x },
                if i & 2 == 0 { region.min.y } else { region.max.y },
                if i & 4 == 0 { region.min.z } else { region.max.z },
            )
        })
        .map(|c| pose.transform_point(&c))
        .collect();
    let world_box = Aabb::from_points(corners.iter());
    let inv = pose.inverse();
    let mut out = Vec::new();
    for (id, mesh) in ctx.meshes.iter().enumerate() {
        if !mesh.aabb().intersects(&world_box) {
            continue;
        }
        let n = ctx.samples[id]
            .iter()
            .filter(|s| world_box.contains(&s.point) && region.contains(&inv.transform_point(&s.point)))
            .count();
        if n > 0 {
            out.push((id as u32, n));
        }
    }
    out
}

fn body_contacts(
    ctx: &SceneContext,
    cand: &GraspCandidate,
    gripper: &GripperSpec,
    model: GripperModel,
) -> (BTreeSet<u32>, bool) {
    let none = BTreeSet::new();
    match model {
        GripperModel::Mesh => {
            let world = gripper.collision_mesh.transformed(&cand.pose, 1.0);
            let ground = world.min_z() <= Scene::GROUND_Z;
            let hits = ctx
                .accel
                .as_ref()
                .map(|a| a.world_mesh_overlap(&world, &none, false).instances)
                .unwrap_or_default();
            (hits, ground)
        }
        GripperModel::Primitives => {
            let p = gripper.primitives();
            let pose = &cand.pose;
            let axes = [pose.axis(0), pose.axis(1), pose.axis(2)];
            let center = pose.transform_point(&p.palm_center);
            let fingers = p
                .fingers
                .map(|(a, b)| (pose.transform_point(&a), pose.transform_point(&b)));
            let palm_low = center.z - (0..3).map(|i| axes[i].z.abs() * p.palm_half[i]).sum::<f64>();
            let finger_low = fingers
                .iter()
                .map(|(a, b)| a.z.min(b.z) - p.finger_radius)
                .fold(f64::INFINITY, f64::min);
            let ground = palm_low.min(finger_low) <= Scene::GROUND_Z;
            let mut hits = BTreeSet::new();
            if let Some(accel) = ctx.accel.as_ref() {
                hits.extend(accel.box_overlap(&center, &axes, &p.palm_half, &none));
                for (a, b) in &fingers {
                    hits.extend(accel.capsule_overlap(a, b, p.finger_radius, &none));
                }
            }
            (hits, ground)
        }
    }
}

/// Passes iff the gripper body touches neither the scene nor the ground and
/// the close region holds target samples and no others.
pub fn check_grasp_collision(
    ctx: &SceneContext,
    cand: &GraspCandidate,
    gripper: &GripperSpec,
) -> Result<CollisionReport> {
    check_grasp_collision_with(ctx, cand, gripper, GripperModel::Mesh)
}

pub fn check_grasp_collision_with(
    ctx: &SceneContext,
    cand: &GraspCandidate,
    gripper: &GripperSpec,
    model: GripperModel,
) -> Result<CollisionReport> {
    if cand.gripper != gripper.name {
        return Err(Error::UnknownGripper(cand.gripper.clone()));
    }
    if cand.target_instance as usize >= ctx.len() {
        return Err(Error::IdMismatch(format!(
            "target instance {} not in scene",
            cand.target_instance
        )));
    }
    let (contacts, ground) = body_contacts(ctx, cand, gripper, model);
    let mut occupied = Vec::new();
    let mut target_points = 0;
    for (id, n) in samples_in_region(ctx, &cand.pose, &gripper.close_region) {
        if id == cand.target_instance {
            target_points = n;
        } else {
            occupied.push(id);
        }
    }
    Ok(CollisionReport {
        q_collision: contacts.is_empty() && !ground && occupied.is_empty() && target_points > 0,
        contacting_instances: contacts.into_iter().collect(),
        close_region_occupied_by: occupied,
        ground_contact: ground,
        target_points_in_close_region: target_points,
    })
}

/// Passes iff the cup body (radius R, height h behind the rim) touches
/// nothing, except the target within [`RIM_CONTACT_BAND`] of the rim, and
/// stays above the ground.
pub fn check_suction_collision(
    ctx: &SceneContext,
    cand: &SuctionCandidate,
    cup: &SuctionCupSpec,
) -> Result<CollisionReport> {
    if cand.cup != cup.name {
        return Err(Error::UnknownCup(cand.cup.clone()));
    }
    let target = cand.target_instance;
    if target as usize >= ctx.len() {
        return Err(Error::IdMismatch(format!("target instance {target} not in scene")));
    }
    let full = cup.body_mesh(0.0).transformed(&cand.pose, 1.0);
    let ground = full.min_z() <= Scene::GROUND_Z;
    let mut contacts = BTreeSet::new();
    if let Some(accel) = ctx.accel.as_ref() {
        contacts = accel
            .world_mesh_overlap(&full, &BTreeSet::from([target]), false)
            .instances;
        let back = cup.body_mesh(RIM_CONTACT_BAND).transformed(&cand.pose, 1.0);
        let others: BTreeSet<u32> = (0..ctx.len() as u32).filter(|&i| i != target).collect();
        if accel.world_mesh_overlap(&back, &others, true).overlap {
            contacts.insert(target);
        }
    }
    Ok(CollisionReport {
        q_collision: contacts.is_empty() && !ground,
        contacting_instances: contacts.into_iter().collect(),
        close_region_occupied_by: Vec::new(),
        ground_contact: ground,
        target_points_in_close_region: 0,
    })
}
