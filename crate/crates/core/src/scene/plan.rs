use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AssetLibrary;
use crate::error::{Error, Result};
use crate::geometry::{random_rotation, Pose, Vec3};

/// Distribution over scene configurations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneDistributionConfig {
    /// Inclusive object-count range.
    pub object_count_range: [u32; 2],
    pub drop_region_min: [f64; 3],
    pub drop_region_max: [f64; 3],
    pub scale_range: [f64; 2],
    pub friction_range: [f64; 2],
    /// Draw μ per object instead of once per scene.
    pub friction_per_object: bool,
}

impl Default for SceneDistributionConfig {
    fn default() -> Self {
        Self {
            object_count_range: [1, 20],
            drop_region_min: [-0.1, -0.1, 0.5],
            drop_region_max: [0.1, 0.1, 0.8],
            scale_range: [1.0, 1.5],
            friction_range: [0.0, 1.0],
            friction_per_object: false,
        }
    }
}

impl SceneDistributionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        let [c0, c1] = self.object_count_range;
        if c0 == 0 || c0 > c1 {
            return bad("object_count_range must satisfy 1 ≤ lo ≤ hi");
        }
        if (0..3).any(|i| self.drop_region_min[i] > self.drop_region_max[i]) {
            return bad("drop region is empty");
        }
        let [s0, s1] = self.scale_range;
        if !(s0 > 0.0) || s0 > s1 {
            return bad("scale_range must satisfy 0 < lo ≤ hi");
        }
        let [f0, f1] = self.friction_range;
        if f0 < 0.0 || f1 > 1.0 || f0 > f1 {
            return bad("friction_range must lie within [0, 1]");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannedDrop {
    pub asset_id: String,
    pub pose: Pose,
    pub scale: f64,
    pub friction: f64,
}

/// Ordered drop list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenePlan {
    pub seed: u64,
    pub drops: Vec<PlannedDrop>,
}

fn draw(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Samples a drop plan: object count, assets (with replacement), positions in
/// the drop box, uniform SO(3) orientations, scales and friction.
pub fn sample_scene_plan(cfg: &SceneDistributionConfig, assets: &AssetLibrary, seed: u64) -> Result<ScenePlan> {
    if assets.is_empty() {
        return Err(Error::InvalidArgument("asset pool is empty".into()));
    }
    cfg.validate()?;
    let ids = assets.ids();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.random_range(cfg.object_count_range[0]..=cfg.object_count_range[1]);
    let scene_friction = draw(&mut rng, cfg.friction_range[0], cfg.friction_range[1]);
    let drops = (0..count)
        .map(|_| {
            let asset_id = ids[rng.random_range(0..ids.len())].to_string();
            let t = Vec3::new(
                draw(&mut rng, cfg.drop_region_min[0], cfg.drop_region_max[0]),
                draw(&mut rng, cfg.drop_region_min[1], cfg.drop_region_max[1]),
                draw(&mut rng, cfg.drop_region_min[2], cfg.drop_region_max[2]),
            );
            let rotation = random_rotation(&mut rng);
            let scale = draw(&mut rng, cfg.scale_range[0], cfg.scale_range[1]);
            let friction = if cfg.friction_per_object {
                draw(&mut rng, cfg.friction_range[0], cfg.friction_range[1])
            } else {
                scene_friction
            };
            PlannedDrop {
                asset_id,
                pose: Pose::new(rotation, t),
                scale,
                friction,
            }
        })
        .collect();
    Ok(ScenePlan { seed, drops })
}
