use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{EvaluationSettings, PipelineConfig, Variant};
use super::record::{write_labels, LabelRecord};
use crate::camera::{save_frame, DepthFrame};
use crate::error::{Error, Result};
use crate::scene::{save_scene, Scene};

pub const FIDELITY_GAPS: [&str; 5] = [
    "scenes are settled by a frozen-orientation vertical drop, not rigid-body simulation",
    "lift dynamics are a quasi-static force and moment check, not an articulated-arm simulation",
    "collision uses exact triangle meshes rather than convex decompositions",
    "frames contain depth and instance ids only; no RGB rendering",
    "depth is noise-free unless depth_noise_mm is set",
];

#[derive(Clone, Debug)]
pub struct ExportFrame {
    pub scene_id: String,
    pub index: usize,
    pub seed: u64,
    pub frame: DepthFrame,
}

pub struct ExportInput<'a> {
    pub config: &'a PipelineConfig,
    pub variant: Variant,
    pub scenes: Vec<(String, Scene)>,
    pub frames: Vec<ExportFrame>,
    pub records: &'a [LabelRecord],
    pub asset_ids: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestCounts {
    pub scenes: usize,
    pub frames: usize,
    pub records: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameEntry {
    pub scene_id: String,
    pub index: usize,
    pub seed: u64,
    pub sidecar: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub tool_version: String,
    /// Seconds since the Unix epoch; the only field that changes between
    /// identical exports.
    pub created_unix: u64,
    pub config: PipelineConfig,
    pub variant: Variant,
    pub config_hash: String,
    pub scene_seeds: BTreeMap<String, u64>,
    pub frames: Vec<FrameEntry>,
    pub assets: Vec<String>,
    pub counts: ManifestCounts,
    pub label_files: Vec<String>,
    pub fidelity_gaps: Vec<String>,
}

/// Writes `scenes/<id>.json`, `frames/<id>_fNNN*`, `labels/<id>.ndjson` and
/// `manifest.json` under `out`.
pub fn export_dataset(input: &ExportInput, out: impl AsRef<Path>) -> Result<DatasetManifest> {
    let out = out.as_ref();
    let ids: BTreeSet<&str> = input.scenes.iter().map(|(id, _)| id.as_str()).collect();
    if ids.len() != input.scenes.len() {
        return Err(Error::IdMismatch("duplicate scene id".into()));
    }
    for f in &input.frames {
        if !ids.contains(f.scene_id.as_str()) {
            return Err(Error::IdMismatch(format!(
                "frame refers to unknown scene `{}`",
                f.scene_id
            )));
        }
    }
    let mut by_scene: BTreeMap<&str, Vec<LabelRecord>> = ids.iter().map(|id| (*id, Vec::new())).collect();
    for r in input.records {
        by_scene
            .get_mut(r.scene_id.as_str())
            .ok_or_else(|| Error::IdMismatch(format!("record refers to unknown scene `{}`", r.scene_id)))?
            .push(r.clone());
    }

    let mut scene_seeds = BTreeMap::new();
    for (id, scene) in &input.scenes {
        save_scene(out.join("scenes").join(format!("{id}.json")), scene)?;
        scene_seeds.insert(id.clone(), scene.seed);
    }
    let mut frames = Vec::new();
    for f in &input.frames {
        let stem = format!("{}_f{:03}", f.scene_id, f.index);
        save_frame(&f.frame, out.join("frames"), &stem)?;
        frames.push(FrameEntry {
            scene_id: f.scene_id.clone(),
            index: f.index,
            seed: f.seed,
            sidecar: format!("frames/{stem}.json"),
        });
    }
    let mut label_files = Vec::new();
    for (id, recs) in by_scene {
        let rel = format!("labels/{id}.ndjson");
        write_labels(out.join(&rel), &recs)?;
        label_files.push(rel);
    }
    let manifest = DatasetManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        config: input.config.clone(),
        variant: input.variant,
        config_hash: EvaluationSettings::new(input.config, input.variant).hash(),
        scene_seeds,
        frames,
        assets: input.asset_ids.clone(),
        counts: ManifestCounts {
            scenes: input.scenes.len(),
            frames: input.frames.len(),
            records: input.records.len(),
        },
        label_files,
        fidelity_gaps: FIDELITY_GAPS.iter().map(|s| s.to_string()).collect(),
    };
    let path = out.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{primitives, Pose, Vec3};
    use crate::pipeline::record::{read_labels, tests::suction};
    use crate::pipeline::run::{frame_seed, render_frames};
    use crate::scene::{AssetLibrary, DifficultyThresholds, ObjectAsset, SceneContext, SceneObject};

    fn fixture() -> (PipelineConfig, Scene, Vec<ExportFrame>, Vec<LabelRecord>) {
        let mut cfg = PipelineConfig::default();
        cfg.render.intrinsics.width = 64;
        cfg.render.intrinsics.height = 48;
        cfg.render.intrinsics.cx = 31.5;
        cfg.render.intrinsics.cy = 23.5;
        cfg.render.intrinsics.fx = 60.0;
        cfg.render.intrinsics.fy = 60.0;
        let th = DifficultyThresholds::default();
        let mut lib = AssetLibrary::new();
        lib.insert(ObjectAsset::new("cube", primitives::cuboid(Vec3::repeat(0.025)), 500.0, None, &th).unwrap());
        let scene = Scene {
            seed: 5,
            objects: vec![SceneObject {
                instance_id: 0,
                asset_id: "cube".into(),
                pose: Pose::from_translation(Vec3::new(0.0, 0.0, 0.025)),
                scale: 1.0,
                mass: 0.0625,
                friction: 0.5,
            }],
        };
        let ctx = SceneContext::new(scene.clone(), &lib, &cfg.sampling).unwrap();
        let frames = render_frames(&ctx, &cfg, 2, scene.seed)
            .into_iter()
            .enumerate()
            .map(|(k, frame)| ExportFrame {
                scene_id: "s".into(),
                index: k,
                seed: frame_seed(scene.seed, k),
                frame,
            })
            .collect();
        let records = (0..100)
            .map(|i| match i % 3 {
                0 => suction(false, None, None),
                1 => suction(true, Some(false), None),
                _ => suction(true, Some(true), Some(i % 2 == 0)),
            })
            .collect();
        (cfg, scene, frames, records)
    }

    fn input<'a>(
        cfg: &'a PipelineConfig,
        scene: &Scene,
        frames: &[ExportFrame],
        records: &'a [LabelRecord],
    ) -> ExportInput<'a> {
        ExportInput {
            config: cfg,
            variant: Variant::Default,
            scenes: vec![("s".into(), scene.clone())],
            frames: frames.to_vec(),
            records,
            asset_ids: vec!["cube".into()],
        }
    }

    fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
        let mut out = BTreeMap::new();
        let mut stack = vec![dir.to_path_buf()];
        while let Some(d) = stack.pop() {
            for e in std::fs::read_dir(&d).unwrap() {
                let p = e.unwrap().path();
                if p.is_dir() {
                    stack.push(p);
                } else {
                    let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                    out.insert(rel, std::fs::read(&p).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn manifest_counts() {
        let (cfg, scene, frames, records) = fixture();
        let dir = tempfile::tempdir().unwrap();
        let m = export_dataset(&input(&cfg, &scene, &frames, &records), dir.path()).unwrap();
        assert_eq!(
            m.counts,
            ManifestCounts {
                scenes: 1,
                frames: 2,
                records: 100
            }
        );
        assert_eq!(m.scene_seeds["s"], 5);
        assert_eq!(m.frames[1].seed, frame_seed(5, 1));
        assert_eq!(m.label_files, vec!["labels/s.ndjson".to_string()]);
        for f in &m.frames {
            assert!(dir.path().join(&f.sidecar).is_file());
        }
    }

    #[test]
    fn reexport_identical_except_timestamp() {
        let (cfg, scene, frames, records) = fixture();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        export_dataset(&input(&cfg, &scene, &frames, &records), a.path()).unwrap();
        export_dataset(&input(&cfg, &scene, &frames, &records), b.path()).unwrap();
        let (mut ta, mut tb) = (tree(a.path()), tree(b.path()));
        assert_eq!(ta.keys().collect::<Vec<_>>(), tb.keys().collect::<Vec<_>>());
        let strip = |bytes: Vec<u8>| {
            let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
            v.as_object_mut().unwrap().remove("created_unix").unwrap();
            v
        };
        let (ma, mb) = (ta.remove("manifest.json").unwrap(), tb.remove("manifest.json").unwrap());
        assert_eq!(strip(ma), strip(mb));
        assert_eq!(ta, tb);
    }

    #[test]
    fn labels_round_trip() {
        let (cfg, scene, frames, records) = fixture();
        let dir = tempfile::tempdir().unwrap();
        export_dataset(&input(&cfg, &scene, &frames, &records), dir.path()).unwrap();
        assert_eq!(read_labels(dir.path().join("labels/s.ndjson")).unwrap(), records);
    }

    #[test]
    fn unknown_scene_rejected() {
        let (cfg, scene, frames, mut records) = fixture();
        records[3].scene_id = "other".into();
        let dir = tempfile::tempdir().unwrap();
        let err = export_dataset(&input(&cfg, &scene, &frames, &records), dir.path()).unwrap_err();
        assert!(matches!(err, Error::IdMismatch(_)));
    }
}
