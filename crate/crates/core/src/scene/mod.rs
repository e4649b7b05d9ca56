//! Cluttered-scene sampling, drop settling, difficulty levels, support
//! relations and the scene JSON format.

mod assets;
mod context;
mod difficulty;
mod io;
mod plan;
mod settle;
mod support;

use serde::{Deserialize, Serialize};

use crate::geometry::Pose;

pub use assets::{AssetLibrary, ManifestEntry, ObjectAsset, DEFAULT_DENSITY};
pub use context::{SceneContext, SurfaceSamplingConfig};
pub use difficulty::{classify_difficulty, Difficulty, DifficultyThresholds};
pub use io::{load_scene, parse_scene, save_scene, scene_to_json};
pub use plan::{sample_scene_plan, PlannedDrop, SceneDistributionConfig, ScenePlan};
pub use settle::{settle_scene, settle_scene_report, SettleConfig, SettleReport};
pub use support::{support_graph, SupportGraph, SUPPORT_GAP};

/// One placed object instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneObject {
    pub instance_id: u32,
    pub asset_id: String,
    pub pose: Pose,
    pub scale: f64,
    /// [kg]
    pub mass: f64,
    /// Coulomb friction coefficient.
    pub friction: f64,
}

/// A settled (or imported) arrangement of objects on the ground plane z = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub seed: u64,
    pub objects: Vec<SceneObject>,
}

impl Scene {
    pub const GROUND_Z: f64 = 0.0;

    pub fn object(&self, instance_id: u32) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.instance_id == instance_id)
    }
}
