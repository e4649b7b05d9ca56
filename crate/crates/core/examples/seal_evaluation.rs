//! Dense ring-web seal model against the 8-vertex singulated baseline on a
//! flat face, an edge and a curved surface.

use clutter_label::geometry::{primitives, AccelInstance, Pose, SceneAccel, Vec3};
use clutter_label::grasp::{SuctionCandidate, SuctionCupSpec};
use clutter_label::seal::{build_seal_model, dexnet8_strains, evaluate_seal};

fn top_down(at: Vec3, cup: &SuctionCupSpec) -> SuctionCandidate {
    SuctionCandidate {
        scene_id: String::new(),
        target_instance: 0,
        point_index: 0,
        pose: Pose::from_axes(-Vec3::z(), Vec3::x(), -Vec3::y(), at),
        cup: cup.name.clone(),
    }
}

fn main() -> clutter_label::Result<()> {
    let cup = SuctionCupSpec::cup_15mm();
    let model = build_seal_model(&cup);
    println!("seal model: {} vertices", model.vertex_count());

    let cube = primitives::cuboid(Vec3::repeat(0.025));
    let ball = primitives::icosphere(0.02, 4);
    let cases = [
        ("cube face center", &cube, Vec3::new(0.0, 0.0, 0.025)),
        ("cube near edge", &cube, Vec3::new(0.018, 0.0, 0.025)),
        ("small sphere top", &ball, Vec3::new(0.0, 0.0, 0.02)),
    ];
    for (name, mesh, at) in cases {
        let accel = SceneAccel::build(&[AccelInstance {
            mesh,
            pose: Pose::identity(),
            scale: 1.0,
            instance_id: 0,
        }])?;
        let cand = top_down(at, &cup);
        let dense = evaluate_seal(Some(&accel), &cand, &model);
        let base = dexnet8_strains(&accel, &cand, &cup);
        println!(
            "{name:<18} dense: {:<5} {:?} (max deformation {:.2} mm)   8-vertex strain: {}",
            dense.q_seal,
            dense.failure_reason,
            dense.max_deformation * 1e3,
            base.map_or("ray miss".to_string(), |s| format!("{:.3}", s.max_abs())),
        );
    }
    Ok(())
}
