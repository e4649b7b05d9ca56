//! Build a BVH over two posed primitives and cast rays through it.
//!
//! Each hit is cross-checked against a brute-force loop over every triangle.

use clutter_label::geometry::{primitives, ray_triangle, AccelInstance, Pose, Ray, SceneAccel, Vec3};

fn main() -> clutter_label::Result<()> {
    let sphere = primitives::icosphere(0.05, 3);
    let cube = primitives::cuboid(Vec3::repeat(0.03));
    let instances = [
        AccelInstance {
            mesh: &sphere,
            pose: Pose::from_translation(Vec3::new(0.0, 0.0, 0.05)),
            scale: 1.0,
            instance_id: 0,
        },
        AccelInstance {
            mesh: &cube,
            pose: Pose::from_translation(Vec3::new(0.12, 0.0, 0.03)),
            scale: 1.5,
            instance_id: 1,
        },
    ];
    let accel = SceneAccel::build(&instances)?;
    println!("{} triangles, bounds {:?}", accel.triangle_count(), accel.bounds());

    let world: Vec<(u32, Vec<[Vec3; 3]>)> = instances
        .iter()
        .map(|i| {
            let m = i.mesh.transformed(&i.pose, i.scale);
            (i.instance_id, (0..m.triangle_count()).map(|t| m.corners(t)).collect())
        })
        .collect();

    for k in 0..8 {
        let x = -0.06 + 0.03 * k as f64;
        let ray = Ray::new(Vec3::new(x, 0.0, 1.0), -Vec3::z(), 2.0);
        let hit = accel.raycast(&ray);
        let brute = world
            .iter()
            .flat_map(|(id, tris)| {
                tris.iter()
                    .filter_map(move |t| ray_triangle(&ray.origin, &ray.direction, 2.0, t).map(|d| (d, *id)))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match hit {
            Some(h) => println!(
                "x={x:+.3}  hit instance {} at z={:.4}  (brute {:.4})",
                h.instance_id,
                h.point.z,
                1.0 - brute.unwrap().0
            ),
            None => println!(
                "x={x:+.3}  miss (brute {})",
                if brute.is_none() { "miss" } else { "HIT" }
            ),
        }
    }
    Ok(())
}
