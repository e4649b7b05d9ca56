//! Farthest point sampling, Darboux frames and grasp poses on a sphere.

use clutter_label::geometry::{primitives, sample_surface, Vec3};
use clutter_label::grasp::{darboux_frame, fps, gen_parallel_grasps, gen_suction_grasp, GripperSpec, SuctionCupSpec};

fn main() -> clutter_label::Result<()> {
    let sphere = primitives::icosphere(0.04, 4);
    let samples = sample_surface(&sphere, 4000, 1)?;
    let points: Vec<Vec3> = samples.iter().map(|s| s.point).collect();
    let picked = fps(&points, 8, 0)?;

    let gripper = GripperSpec::fetch();
    let cup = SuctionCupSpec::cup_15mm();
    for &i in &picked {
        let f = darboux_frame(&samples, &samples[i], 0.01)?;
        let radial = samples[i].point.normalize();
        let angle = f.v1().dot(&radial).abs().min(1.0).acos().to_degrees();
        let jaws = gen_parallel_grasps(&f, &gripper, 12, 3, 0)?;
        let suction = gen_suction_grasp(&f, &cup, 0);
        println!(
            "point {i:>4}: v1 off radial {angle:5.2} deg, curvature axis {:?}, {} jaw poses, cup approach {:?}",
            f.v2().map(|c| (c * 100.0).round() / 100.0).as_slice(),
            jaws.len(),
            suction.pose.axis(0).map(|c| (c * 100.0).round() / 100.0).as_slice(),
        );
    }
    Ok(())
}
