use serde::{Deserialize, Serialize};

use super::{support_graph, AssetLibrary, Difficulty, Scene, SupportGraph};
use crate::error::{Error, Result};
use crate::geometry::{sample_surface, AccelInstance, PointNormal, Pose, SceneAccel, TriangleMesh, Vec3};

/// Density of the per-object surface samples that feed FPS, normal
/// estimation and the close-region test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurfaceSamplingConfig {
    pub samples_per_m2: f64,
    pub min_samples: usize,
    pub max_samples: usize,
}

impl Default for SurfaceSamplingConfig {
    fn default() -> Self {
        Self {
            samples_per_m2: 2.0e5,
            min_samples: 500,
            max_samples: 20_000,
        }
    }
}

impl SurfaceSamplingConfig {
    pub fn count_for(&self, area: f64) -> usize {
        ((area * self.samples_per_m2).round() as usize).clamp(self.min_samples, self.max_samples)
    }
}

/// Seed for per-instance sampling streams.
pub(crate) fn instance_seed(scene_seed: u64, instance: u32, salt: u64) -> u64 {
    scene_seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((instance as u64) << 20)
        .wrapping_add(salt)
}

/// A scene with its world-space geometry resolved: meshes, the shared BVH,
/// surface samples, centers of mass and the support graph.
#[derive(Clone, Debug)]
pub struct SceneContext {
    pub scene: Scene,
    /// World-space meshes indexed by instance id.
    pub meshes: Vec<TriangleMesh>,
    pub accel: Option<SceneAccel>,
    /// World-space surface samples indexed by instance id.
    pub samples: Vec<Vec<PointNormal>>,
    pub centers_of_mass: Vec<Vec3>,
    pub difficulty: Vec<Difficulty>,
    pub support: SupportGraph,
}

impl SceneContext {
    pub fn new(scene: Scene, assets: &AssetLibrary, sampling: &SurfaceSamplingConfig) -> Result<Self> {
        for (i, o) in scene.objects.iter().enumerate() {
            if o.instance_id as usize != i {
                return Err(Error::IdMismatch(format!(
                    "instance ids must be contiguous from 0 (object {i} has id {})",
                    o.instance_id
                )));
            }
        }
        let mut meshes = Vec::with_capacity(scene.objects.len());
        let mut samples = Vec::with_capacity(scene.objects.len());
        let mut coms = Vec::with_capacity(scene.objects.len());
        let mut difficulty = Vec::with_capacity(scene.objects.len());
        for o in &scene.objects {
            let asset = assets.get(&o.asset_id)?;
            let world = asset.mesh.transformed(&o.pose, o.scale);
            let n = sampling.count_for(world.surface_area());
            let mut pts = sample_surface(&world, n, instance_seed(scene.seed, o.instance_id, 0))?;
            for p in &mut pts {
                p.instance_id = o.instance_id;
            }
            samples.push(pts);
            coms.push(o.pose.transform_point(&(asset.center_of_mass * o.scale)));
            difficulty.push(asset.difficulty);
            meshes.push(world);
        }
        let accel = if meshes.is_empty() {
            None
        } else {
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
            Some(SceneAccel::build(&inst)?)
        };
        let mut ctx = Self {
            scene,
            meshes,
            accel,
            samples,
            centers_of_mass: coms,
            difficulty,
            support: SupportGraph::default(),
        };
        ctx.support = support_graph(&ctx);
        Ok(ctx)
    }

    pub fn len(&self) -> usize {
        self.scene.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scene.objects.is_empty()
    }

    pub fn mass(&self, id: u32) -> f64 {
        self.scene.objects[id as usize].mass
    }

    pub fn friction(&self, id: u32) -> f64 {
        self.scene.objects[id as usize].friction
    }

    /// BVH over a single instance, for singulated evaluation.
    pub fn singulated_accel(&self, id: u32) -> Result<SceneAccel> {
        SceneAccel::build(&[AccelInstance {
            mesh: &self.meshes[id as usize],
            pose: Pose::identity(),
            scale: 1.0,
            instance_id: id,
        }])
    }
}
