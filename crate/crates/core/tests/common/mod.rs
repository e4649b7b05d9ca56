#![allow(dead_code)]

use clutter_label::geometry::{primitives, Pose, Vec3};
use clutter_label::grasp::{darboux_frame, gen_suction_grasp, Candidate, SuctionCandidate, SuctionCupSpec};
use clutter_label::pipeline::{generate_scene, FailureReason, LabelRecord, PipelineConfig};
use clutter_label::scene::{AssetLibrary, DifficultyThresholds, ObjectAsset, Scene, SceneContext, SceneObject};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TEN_OBJECT_SEED: u64 = 2024;

/// A settled pile of exactly ten procedural objects.
pub fn ten_object_scene() -> (PipelineConfig, AssetLibrary, SceneContext) {
    let mut cfg = PipelineConfig::default();
    cfg.scene.object_count_range = [10, 10];
    let assets = AssetLibrary::procedural(&cfg.difficulty);
    let scene = generate_scene(&cfg, &assets, TEN_OBJECT_SEED).unwrap();
    assert_eq!(scene.objects.len(), 10, "fixture seed must settle all ten objects");
    let ctx = SceneContext::new(scene, &assets, &cfg.sampling).unwrap();
    (cfg, assets, ctx)
}

/// `n` suction candidates at uniformly drawn surface samples.
pub fn random_suction_sweep(ctx: &SceneContext, cup: &SuctionCupSpec, n: usize, seed: u64) -> Vec<SuctionCandidate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let id = rng.random_range(0..ctx.len());
        let samples = &ctx.samples[id];
        let i = rng.random_range(0..samples.len());
        let Ok(frame) = darboux_frame(samples, &samples[i], 0.01) else {
            continue;
        };
        let mut c = gen_suction_grasp(&frame, cup, id as u32);
        c.scene_id = "sweep".into();
        c.point_index = out.len() as u32;
        out.push(c);
    }
    out
}

pub const STEEL: f64 = 7850.0;
pub const WOOD: f64 = 700.0;

/// Two wooden planks each carrying a steel block at one end, plus two loose
/// objects. Mass follows density × volume throughout.
pub fn pile_fixture() -> (AssetLibrary, SceneContext) {
    let th = DifficultyThresholds::default();
    let mut lib = AssetLibrary::new();
    lib.insert(
        ObjectAsset::new(
            "plank",
            primitives::cuboid(Vec3::new(0.07, 0.025, 0.015)),
            WOOD,
            None,
            &th,
        )
        .unwrap(),
    );
    lib.insert(ObjectAsset::new("steel_block", primitives::cuboid(Vec3::repeat(0.045)), STEEL, None, &th).unwrap());
    lib.insert(ObjectAsset::new("puck", primitives::cylinder(0.03, 0.03, 32), WOOD, None, &th).unwrap());
    let place = |id: u32, asset: &str, p: Vec3| {
        let a = lib.get(asset).unwrap();
        SceneObject {
            instance_id: id,
            asset_id: asset.into(),
            pose: Pose::from_translation(p),
            scale: 1.0,
            mass: a.mass(1.0),
            friction: 0.5,
        }
    };
    let objects = vec![
        place(0, "plank", Vec3::new(0.0, 0.0, 0.015)),
        place(1, "steel_block", Vec3::new(0.03, 0.0, 0.075)),
        place(2, "plank", Vec3::new(0.0, 0.25, 0.015)),
        place(3, "steel_block", Vec3::new(-0.03, 0.25, 0.075)),
        place(4, "puck", Vec3::new(0.25, 0.0, 0.015)),
        place(5, "puck", Vec3::new(0.25, 0.25, 0.015)),
    ];
    let scene = Scene { seed: 0, objects };
    let ctx = SceneContext::new(scene, &lib, &Default::default()).unwrap();
    (lib, ctx)
}

/// A suction record whose stages follow the short-circuit rule.
pub fn suction_record(id: u32, c: bool, s: bool, d: bool) -> LabelRecord {
    let q_seal = c.then_some(s);
    let q_dynamics = (c && s).then_some(d);
    let final_label = c && s && d;
    let failure_reason = match (c, s, d) {
        (false, _, _) => FailureReason::Collision,
        (true, false, _) => FailureReason::DeformationExceeded,
        (true, true, false) => FailureReason::PayloadExceedsForceLimit,
        _ => FailureReason::None,
    };
    LabelRecord {
        scene_id: "synthetic".into(),
        target_instance: 0,
        tool: "cup_15mm".into(),
        candidate: Candidate::Suction(SuctionCandidate {
            scene_id: "synthetic".into(),
            target_instance: 0,
            point_index: id,
            pose: Pose::identity(),
            cup: "cup_15mm".into(),
        }),
        q_collision: c,
        q_seal,
        q_dynamics,
        final_label,
        failure_reason,
        config_hash: "0".repeat(64),
    }
}
