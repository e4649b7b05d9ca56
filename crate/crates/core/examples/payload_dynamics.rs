//! Quasi-static lift checks on a small stack: the bottom cube carries the
//! one above it when clutter-aware dynamics is on.

use clutter_label::dynamics::{suction_quasistatic, DynamicsConfig};
use clutter_label::geometry::{primitives, Pose, Vec3};
use clutter_label::grasp::{SuctionCandidate, SuctionCupSpec};
use clutter_label::scene::{
    AssetLibrary, DifficultyThresholds, ObjectAsset, Scene, SceneContext, SceneObject, SurfaceSamplingConfig,
};

fn main() -> clutter_label::Result<()> {
    let th = DifficultyThresholds::default();
    let mut lib = AssetLibrary::new();
    lib.insert(ObjectAsset::new(
        "slab",
        primitives::cuboid(Vec3::new(0.05, 0.05, 0.01)),
        500.0,
        None,
        &th,
    )?);
    lib.insert(ObjectAsset::new(
        "cube",
        primitives::cuboid(Vec3::repeat(0.02)),
        500.0,
        None,
        &th,
    )?);
    let cup = SuctionCupSpec::cup_15mm();
    let cfg = DynamicsConfig::default();

    for top_mass in [0.2, 0.8, 2.0] {
        let objects = vec![
            SceneObject {
                instance_id: 0,
                asset_id: "slab".into(),
                pose: Pose::from_translation(Vec3::new(0.0, 0.0, 0.01)),
                scale: 1.0,
                mass: 0.2,
                friction: 0.5,
            },
            SceneObject {
                instance_id: 1,
                asset_id: "cube".into(),
                pose: Pose::from_translation(Vec3::new(0.02, 0.0, 0.04)),
                scale: 1.0,
                mass: top_mass,
                friction: 0.5,
            },
        ];
        let ctx = SceneContext::new(Scene { seed: 0, objects }, &lib, &SurfaceSamplingConfig::default())?;
        // Cup on the exposed part of the slab.
        let cand = SuctionCandidate {
            scene_id: String::new(),
            target_instance: 0,
            point_index: 0,
            pose: Pose::from_axes(-Vec3::z(), Vec3::x(), -Vec3::y(), Vec3::new(-0.03, 0.0, 0.02)),
            cup: cup.name.clone(),
        };
        let single = suction_quasistatic(&ctx, &cand, &cup, &cfg, false);
        let pile = suction_quasistatic(&ctx, &cand, &cup, &cfg, true);
        println!(
            "top {top_mass:.1} kg: single-object {:?}, clutter-aware {:?} (payload {:.2} kg, blocking {:?})",
            single.failure_reason, pile.failure_reason, pile.payload_mass, pile.blocking_instances
        );
    }
    Ok(())
}
