//! Jaw and suction collision checks on two cubes standing side by side.

use clutter_label::collision::{
    check_grasp_collision, check_grasp_collision_with, check_suction_collision, GripperModel,
};
use clutter_label::geometry::{primitives, Pose, Vec3};
use clutter_label::grasp::{GraspCandidate, GripperSpec, SuctionCandidate, SuctionCupSpec};
use clutter_label::scene::{
    AssetLibrary, DifficultyThresholds, ObjectAsset, Scene, SceneContext, SceneObject, SurfaceSamplingConfig,
};

fn cube(id: u32, x: f64) -> SceneObject {
    SceneObject {
        instance_id: id,
        asset_id: "cube".into(),
        pose: Pose::from_translation(Vec3::new(x, 0.0, 0.025)),
        scale: 1.0,
        mass: 0.06,
        friction: 0.5,
    }
}

fn main() -> clutter_label::Result<()> {
    let th = DifficultyThresholds::default();
    let mut lib = AssetLibrary::new();
    lib.insert(ObjectAsset::new(
        "cube",
        primitives::cuboid(Vec3::repeat(0.025)),
        500.0,
        None,
        &th,
    )?);
    let scene = Scene {
        seed: 0,
        objects: vec![cube(0, 0.0), cube(1, 0.08)],
    };
    let ctx = SceneContext::new(scene, &lib, &SurfaceSamplingConfig::default())?;

    let g = GripperSpec::fetch();
    // Top-down, fingers closing along y or along x (toward the neighbor).
    for (label, closing) in [("closing along y", Vec3::y()), ("closing along x", Vec3::x())] {
        let cand = GraspCandidate {
            scene_id: "pair".into(),
            target_instance: 0,
            point_index: 0,
            roll_index: 0,
            standoff_index: 0,
            pose: Pose::from_axes(
                -Vec3::z(),
                closing,
                -Vec3::z().cross(&closing),
                Vec3::new(0.0, 0.0, 0.05 + g.finger_depth * 0.5),
            ),
            standoff: 0.0,
            roll: 0.0,
            gripper: g.name.clone(),
        };
        let mesh = check_grasp_collision(&ctx, &cand, &g)?;
        let capsule = check_grasp_collision_with(&ctx, &cand, &g, GripperModel::Primitives)?;
        println!(
            "jaw {label}: mesh {} (contacts {:?}, ground {}), primitives {}",
            mesh.q_collision, mesh.contacting_instances, mesh.ground_contact, capsule.q_collision
        );
    }

    let cup = SuctionCupSpec::cup_15mm();
    for x in [0.0, 0.02] {
        let cand = SuctionCandidate {
            scene_id: "pair".into(),
            target_instance: 0,
            point_index: 0,
            pose: Pose::from_axes(-Vec3::z(), Vec3::x(), -Vec3::y(), Vec3::new(x, 0.0, 0.05)),
            cup: cup.name.clone(),
        };
        let r = check_suction_collision(&ctx, &cand, &cup)?;
        println!(
            "suction at x={x}: {} (contacts {:?})",
            r.q_collision, r.contacting_instances
        );
    }
    Ok(())
}
