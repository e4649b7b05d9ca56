use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::camera::{CameraIntrinsics, ViewpointConfig};
use crate::collision::GripperModel;
use crate::dynamics::DynamicsConfig;
use crate::error::{Error, Result};
use crate::grasp::{GripperSpec, SuctionCupSpec};
use crate::scene::{DifficultyThresholds, SceneDistributionConfig, SettleConfig, SurfaceSamplingConfig};
use crate::seal::{
    build_seal_model_with, SealModel, DEFORMATION_FRACTION, RINGS, SPRING_STRAIN_LIMIT, VERTICES_PER_RING,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CandidateConfig {
    /// FPS points per object.
    pub fps_points: usize,
    pub fps_start: usize,
    /// Neighborhood radius for the normal covariance [m].
    pub frame_radius: f64,
    pub n_roll: usize,
    pub n_standoff: usize,
}

impl Default for CandidateConfig {
    fn default() -> Self {
        Self {
            fps_points: 50,
            fps_start: 0,
            frame_radius: 0.01,
            n_roll: 12,
            n_standoff: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SealConfig {
    pub rings: usize,
    pub vertices_per_ring: usize,
    /// Fraction of the bellows height.
    pub deformation_fraction: f64,
    pub dexnet8_strain_limit: f64,
}

impl Default for SealConfig {
    fn default() -> Self {
        Self {
            rings: RINGS,
            vertices_per_ring: VERTICES_PER_RING,
            deformation_fraction: DEFORMATION_FRACTION,
            dexnet8_strain_limit: SPRING_STRAIN_LIMIT,
        }
    }
}

impl SealConfig {
    pub fn model(&self, cup: &SuctionCupSpec) -> SealModel {
        let mut m = build_seal_model_with(cup.radius, cup.bellows_height, self.rings, self.vertices_per_ring);
        m.deformation_fraction = self.deformation_fraction;
        m
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderConfig {
    pub intrinsics: CameraIntrinsics,
    pub viewpoint: ViewpointConfig,
    pub frames_per_scene: usize,
    /// Additive Gaussian depth noise σ [mm]; off when absent.
    pub depth_noise_mm: Option<f64>,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            intrinsics: CameraIntrinsics::default(),
            viewpoint: ViewpointConfig::default(),
            frames_per_scene: 8,
            depth_noise_mm: None,
        }
    }
}

/// Every tunable of scene generation, rendering, sampling and labeling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub scene: SceneDistributionConfig,
    pub settle: SettleConfig,
    pub difficulty: DifficultyThresholds,
    pub sampling: SurfaceSamplingConfig,
    pub render: RenderConfig,
    pub candidates: CandidateConfig,
    pub seal: SealConfig,
    pub dynamics: DynamicsConfig,
    pub grippers: Vec<GripperSpec>,
    pub cups: Vec<SuctionCupSpec>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            scene: SceneDistributionConfig::default(),
            settle: SettleConfig::default(),
            difficulty: DifficultyThresholds::default(),
            sampling: SurfaceSamplingConfig::default(),
            render: RenderConfig::default(),
            candidates: CandidateConfig::default(),
            seal: SealConfig::default(),
            dynamics: DynamicsConfig::default(),
            grippers: vec![GripperSpec::fetch(), GripperSpec::robotiq_2f140()],
            cups: vec![SuctionCupSpec::cup_15mm(), SuctionCupSpec::cup_25mm()],
        }
    }
}

impl PipelineConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate()?;
        // Meshes and close regions follow the (possibly edited) dimensions.
        cfg.grippers = cfg
            .grippers
            .iter()
            .map(|g| cfg.rebuild_gripper(g))
            .collect::<Result<_>>()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn validate(&self) -> Result<()> {
        self.scene.validate()?;
        self.render.intrinsics.validate()?;
        self.render.viewpoint.validate()?;
        let c = &self.candidates;
        if c.fps_points == 0 || c.n_roll == 0 || c.n_standoff == 0 || !(c.frame_radius > 0.0) {
            return Err(Error::InvalidArgument(
                "candidates: fps_points, n_roll, n_standoff and frame_radius must be positive".into(),
            ));
        }
        let s = &self.seal;
        if s.rings == 0
            || s.vertices_per_ring == 0
            || !(s.deformation_fraction > 0.0)
            || !(s.dexnet8_strain_limit > 0.0)
        {
            return Err(Error::InvalidArgument("seal parameters must be positive".into()));
        }
        let d = &self.dynamics;
        if !(d.gravity > 0.0 && d.accel_factor > 0.0 && d.grip_force > 0.0) {
            return Err(Error::InvalidArgument("dynamics parameters must be positive".into()));
        }
        for g in &self.grippers {
            self.rebuild_gripper(g)?;
        }
        for cup in &self.cups {
            cup.validate()?;
        }
        Ok(())
    }

    fn rebuild_gripper(&self, g: &GripperSpec) -> Result<GripperSpec> {
        GripperSpec::new(
            &g.name,
            g.finger_depth,
            g.max_open_width,
            g.finger_thickness,
            g.finger_width,
            g.palm_depth,
            g.palm_height,
        )
    }

    /// Gripper by name with its collision mesh rebuilt from the dimensions.
    pub fn gripper(&self, name: &str) -> Result<GripperSpec> {
        let canonical = if name == "robotiq" { "robotiq_2f140" } else { name };
        let g = self
            .grippers
            .iter()
            .find(|g| g.name == canonical)
            .ok_or_else(|| Error::UnknownGripper(name.to_string()))?;
        self.rebuild_gripper(g)
    }

    pub fn cup(&self, name: &str) -> Result<SuctionCupSpec> {
        self.cups
            .iter()
            .find(|c| c.name == name)
            .cloned()
            .ok_or_else(|| Error::UnknownCup(name.to_string()))
    }
}

/// Ablation variants; each swaps exactly one evaluated component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Default,
    Dexnet8Seal,
    SingleObjectDynamics,
    SimplifiedGripper,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Default,
        Variant::Dexnet8Seal,
        Variant::SingleObjectDynamics,
        Variant::SimplifiedGripper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Default => "default",
            Variant::Dexnet8Seal => "dexnet8_seal",
            Variant::SingleObjectDynamics => "single_object_dynamics",
            Variant::SimplifiedGripper => "simplified_gripper",
        }
    }

    pub fn seal_model(self) -> SealModelKind {
        match self {
            Variant::Dexnet8Seal => SealModelKind::Dexnet8Singulated,
            _ => SealModelKind::RingWeb,
        }
    }

    pub fn clutter_aware(self) -> bool {
        self != Variant::SingleObjectDynamics
    }

    pub fn gripper_model(self) -> GripperModel {
        match self {
            Variant::SimplifiedGripper => GripperModel::Primitives,
            _ => GripperModel::Mesh,
        }
    }

    /// Whether the variant changes anything for `modality` ("jaw" or "suction").
    pub fn applies_to(self, modality: &str) -> bool {
        match self {
            Variant::Default | Variant::SingleObjectDynamics => true,
            Variant::Dexnet8Seal => modality == "suction",
            Variant::SimplifiedGripper => modality == "jaw",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variant `{s}`")))
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SealModelKind {
    RingWeb,
    Dexnet8Singulated,
}

/// Everything that influences a label, flattened to dotted keys.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationSettings {
    pub config: PipelineConfig,
    pub seal_model: SealModelKind,
    pub clutter_aware_dynamics: bool,
    pub gripper_model: GripperModel,
}

impl EvaluationSettings {
    pub fn new(config: &PipelineConfig, variant: Variant) -> Self {
        Self {
            config: config.clone(),
            seal_model: variant.seal_model(),
            clutter_aware_dynamics: variant.clutter_aware(),
            gripper_model: variant.gripper_model(),
        }
    }

    pub fn flatten(&self) -> BTreeMap<String, Value> {
        let mut out = BTreeMap::new();
        flatten_into("", &serde_json::to_value(self).expect("settings serialize"), &mut out);
        out
    }

    /// SHA-256 over the flattened settings, hex encoded.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.flatten()).expect("settings serialize");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

fn flatten_into(prefix: &str, v: &Value, out: &mut BTreeMap<String, Value>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_into(&key, child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten_into(&format!("{prefix}[{i}]"), child, out);
            }
        }
        _ => {
            out.insert(prefix.to_string(), v.clone());
        }
    }
}

/// Keys whose values differ between two settings.
pub fn settings_diff(a: &EvaluationSettings, b: &EvaluationSettings) -> Vec<String> {
    let (fa, fb) = (a.flatten(), b.flatten());
    let keys: std::collections::BTreeSet<&String> = fa.keys().chain(fb.keys()).collect();
    keys.into_iter().filter(|k| fa.get(*k) != fb.get(*k)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trip() {
        let cfg = PipelineConfig::default();
        assert_eq!(PipelineConfig::parse(&cfg.to_json_pretty()).unwrap(), cfg);
        assert_eq!(PipelineConfig::parse("{}").unwrap(), cfg);
    }

    #[test]
    fn partial_override_and_bad_field() {
        let cfg = PipelineConfig::parse(r#"{"candidates": {"n_roll": 4}}"#).unwrap();
        assert_eq!((cfg.candidates.n_roll, cfg.candidates.n_standoff), (4, 3));
        let err = PipelineConfig::parse(r#"{"candidates": {"n_rolls": 4}}"#).unwrap_err();
        assert!(err.is_validation() && err.to_string().contains("candidates"), "{err}");
        assert!(PipelineConfig::parse(r#"{"candidates": {"n_roll": 0}}"#).is_err());
    }

    #[test]
    fn variants_differ_in_one_key() {
        let cfg = PipelineConfig::default();
        let base = EvaluationSettings::new(&cfg, Variant::Default);
        for v in &Variant::ALL[1..] {
            let s = EvaluationSettings::new(&cfg, *v);
            assert_eq!(settings_diff(&base, &s).len(), 1, "{v}");
            assert_ne!(base.hash(), s.hash());
        }
        assert_eq!(base.hash(), EvaluationSettings::new(&cfg, Variant::Default).hash());
        assert_eq!(base.hash().len(), 64);
    }

    #[test]
    fn gripper_lookup_rebuilds_mesh() {
        let cfg = PipelineConfig::default();
        let g = cfg.gripper("fetch").unwrap();
        assert_eq!(g, GripperSpec::fetch());
        assert!(cfg.gripper("robotiq").is_ok());
        assert!(cfg.gripper("claw").is_err());
        assert!(cfg.cup("cup_99mm").is_err());
        assert_eq!(cfg.seal.model(&cfg.cup("cup_15mm").unwrap()).vertex_count(), 960);
    }

    #[test]
    fn variant_names() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
            assert_eq!(serde_json::to_string(&v).unwrap(), format!("\"{v}\""));
        }
    }
}
