//! Frozen-orientation drop settling: each object keeps its sampled rotation
//! and slides straight down until it touches the ground or an earlier object.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{AssetLibrary, Scene, SceneObject, ScenePlan};
use crate::error::Result;
use crate::geometry::{Aabb, AccelInstance, Pose, SceneAccel, TriangleMesh, Vec3};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SettleConfig {
    /// Coarse sweep step [m].
    pub sweep_step: f64,
    /// Contact bracketing resolution [m].
    pub contact_tolerance: f64,
}

impl Default for SettleConfig {
    fn default() -> Self {
        Self {
            sweep_step: 0.002,
            contact_tolerance: 1e-4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SettleReport {
    pub scene: Scene,
    /// Plan indices that could not be placed.
    pub skipped: Vec<usize>,
}

pub fn settle_scene(plan: &ScenePlan, assets: &AssetLibrary) -> Result<Scene> {
    Ok(settle_scene_report(plan, assets, &SettleConfig::default())?.scene)
}

fn shifted(mesh: &TriangleMesh, dz: f64) -> TriangleMesh {
    let mut m = mesh.clone();
    for v in &mut m.vertices {
        v.z += dz;
    }
    m
}

fn footprint_overlaps(a: &Aabb, b: &Aabb) -> bool {
    a.min.x <= b.max.x && b.min.x <= a.max.x && a.min.y <= b.max.y && b.min.y <= a.max.y
}

pub fn settle_scene_report(plan: &ScenePlan, assets: &AssetLibrary, cfg: &SettleConfig) -> Result<SettleReport> {
    let mut objects: Vec<SceneObject> = Vec::new();
    let mut placed: Vec<TriangleMesh> = Vec::new();
    let mut skipped = Vec::new();
    let none = BTreeSet::new();

    for (plan_index, drop) in plan.drops.iter().enumerate() {
        let asset = assets.get(&drop.asset_id)?;
        let world = asset.mesh.transformed(&drop.pose, drop.scale);
        let bounds = world.aabb();
        let to_ground = Scene::GROUND_Z - bounds.min.z;

        let below: Vec<usize> = placed
            .iter()
            .enumerate()
            .filter(|(_, m)| footprint_overlaps(&m.aabb(), &bounds))
            .map(|(i, _)| i)
            .collect();

        let shift = if below.is_empty() {
            Some(to_ground)
        } else {
            let instances: Vec<AccelInstance> = below
                .iter()
                .map(|&i| AccelInstance {
                    mesh: &placed[i],
                    pose: Pose::identity(),
                    scale: 1.0,
                    instance_id: i as u32,
                })
                .collect();
            let accel = SceneAccel::build(&instances)?;
            let overlaps = |dz: f64| accel.world_mesh_overlap(&shifted(&world, dz), &none, true).overlap;

            let pile_top = accel.bounds().max.z;
            let start = (pile_top + cfg.sweep_step - bounds.min.z).max(to_ground);
            if overlaps(start) {
                None
            } else {
                let mut free = start;
                let mut contact = None;
                while free > to_ground {
                    let next = (free - cfg.sweep_step).max(to_ground);
                    if overlaps(next) {
                        contact = Some(next);
                        break;
                    }
                    free = next;
                }
                match contact {
                    None => Some(to_ground),
                    Some(mut hit) => {
                        while free - hit > cfg.contact_tolerance {
                            let mid = 0.5 * (free + hit);
                            if overlaps(mid) {
                                hit = mid;
                            } else {
                                free = mid;
                            }
                        }
                        Some(free)
                    }
                }
            }
        };

        match shift {
            Some(dz) => {
                let instance_id = objects.len() as u32;
                let pose = Pose::new(drop.pose.rotation, drop.pose.translation + Vec3::new(0.0, 0.0, dz));
                placed.push(asset.mesh.transformed(&pose, drop.scale));
                objects.push(SceneObject {
                    instance_id,
                    asset_id: drop.asset_id.clone(),
                    pose,
                    scale: drop.scale,
                    mass: asset.mass(drop.scale),
                    friction: drop.friction,
                });
            }
            None => {
                log::warn!("drop {plan_index} ({}) cannot be placed; skipped", drop.asset_id);
                skipped.push(plan_index);
            }
        }
    }
    Ok(SettleReport {
        scene: Scene {
            seed: plan.seed,
            objects,
        },
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::primitives;
    use crate::scene::{DifficultyThresholds, ObjectAsset, PlannedDrop};

    fn cube_library(edge: f64) -> AssetLibrary {
        let mut lib = AssetLibrary::new();
        lib.insert(
            ObjectAsset::new(
                "cube",
                primitives::cuboid(Vec3::repeat(edge / 2.0)),
                500.0,
                None,
                &DifficultyThresholds::default(),
            )
            .unwrap(),
        );
        lib
    }

    fn drop_at(x: f64, y: f64, z: f64) -> PlannedDrop {
        PlannedDrop {
            asset_id: "cube".into(),
            pose: Pose::from_translation(Vec3::new(x, y, z)),
            scale: 1.0,
            friction: 0.5,
        }
    }

    #[test]
    fn single_cube_rests_on_ground() {
        let lib = cube_library(0.05);
        let plan = ScenePlan {
            seed: 0,
            drops: vec![drop_at(0.0, 0.0, 0.6)],
        };
        let scene = settle_scene(&plan, &lib).unwrap();
        let bottom = scene.objects[0].pose.translation.z - 0.025;
        assert!(bottom.abs() < 1e-4);
    }

    #[test]
    fn cubes_stack() {
        let lib = cube_library(0.05);
        let plan = ScenePlan {
            seed: 0,
            drops: vec![drop_at(0.0, 0.0, 0.6), drop_at(0.0, 0.0, 0.7)],
        };
        let scene = settle_scene(&plan, &lib).unwrap();
        let bottom = scene.objects[1].pose.translation.z - 0.025;
        assert!((bottom - 0.05).abs() < 1e-4, "bottom {bottom}");
        assert!(bottom >= 0.05);
        assert!((scene.objects[1].mass - 500.0 * 0.05f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn side_by_side_cubes_both_reach_ground() {
        let lib = cube_library(0.05);
        let plan = ScenePlan {
            seed: 0,
            drops: vec![drop_at(0.0, 0.0, 0.6), drop_at(0.06, 0.0, 0.6)],
        };
        let scene = settle_scene(&plan, &lib).unwrap();
        assert!((scene.objects[1].pose.translation.z - 0.025).abs() < 1e-12);
    }
}
