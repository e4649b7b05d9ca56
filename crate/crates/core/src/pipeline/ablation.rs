use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{settings_diff, EvaluationSettings, PipelineConfig, Variant};
use super::record::{compute_pass_rates, PassRateReport};
use super::run::{evaluate_candidates, generate_candidates, Modality};
use crate::error::{Error, Result};
use crate::grasp::{read_candidates, Candidate};
use crate::scene::{load_scene, AssetLibrary, SceneContext};

/// Tools used when a corpus entry ships no candidates.
pub const DEFAULT_JAW: &str = "fetch";
pub const DEFAULT_CUP: &str = "cup_15mm";

pub struct CorpusEntry {
    pub name: String,
    pub ctx: SceneContext,
    pub candidates: Vec<Candidate>,
}

fn load_entry(dir: &Path, name: String, cfg: &PipelineConfig) -> Result<CorpusEntry> {
    let scene = load_scene(dir.join("scene.json"))?;
    let manifest = dir.join("assets.json");
    let assets = if manifest.is_file() {
        AssetLibrary::load_manifest(&manifest, &cfg.difficulty)?
    } else {
        AssetLibrary::procedural(&cfg.difficulty)
    };
    let ctx = SceneContext::new(scene, &assets, &cfg.sampling)?;
    let cand_path = dir.join("candidates.ndjson");
    let candidates = if cand_path.is_file() {
        read_candidates(&cand_path)?
    } else {
        let mut c = generate_candidates(&ctx, &name, Modality::Jaw, DEFAULT_JAW, cfg)?;
        c.extend(generate_candidates(&ctx, &name, Modality::Suction, DEFAULT_CUP, cfg)?);
        c
    };
    Ok(CorpusEntry { name, ctx, candidates })
}

/// Loads `dir` itself when it holds a `scene.json`, otherwise every
/// subdirectory that does, in name order. Each entry may carry an
/// `assets.json` manifest and a `candidates.ndjson`; missing candidates are
/// sampled with the default jaw and cup.
pub fn load_corpus(dir: impl AsRef<Path>, cfg: &PipelineConfig) -> Result<Vec<CorpusEntry>> {
    let dir = dir.as_ref();
    if dir.join("scene.json").is_file() {
        let name = dir
            .file_name()
            .map_or_else(|| "scene".into(), |n| n.to_string_lossy().into_owned());
        return Ok(vec![load_entry(dir, name, cfg)?]);
    }
    let read = std::fs::read_dir(dir).map_err(|e| Error::io(format!("reading {}", dir.display()), e))?;
    let mut subdirs: Vec<_> = read
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("scene.json").is_file())
        .collect();
    subdirs.sort();
    subdirs
        .into_iter()
        .map(|p| {
            let name = p
                .file_name()
                .expect("subdirectory has a name")
                .to_string_lossy()
                .into_owned();
            load_entry(&p, name, cfg)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub variant: Variant,
    pub modality: Modality,
    pub config_hash: String,
    pub report: PassRateReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationTable {
    pub rows: Vec<AblationRow>,
}

fn pct(r: Option<f64>) -> String {
    r.map_or_else(|| "-".into(), |v| format!("{:.2}%", 100.0 * v))
}

impl AblationTable {
    pub fn row(&self, variant: Variant, modality: Modality) -> Option<&AblationRow> {
        self.rows
            .iter()
            .find(|r| r.variant == variant && r.modality == modality)
    }

    pub fn to_text(&self) -> String {
        let header = [
            "variant",
            "modality",
            "total",
            "collision",
            "seal",
            "dynamics",
            "labeled",
        ];
        let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            cells.push(vec![
                r.variant.to_string(),
                r.modality.name().into(),
                r.report.total.to_string(),
                pct(r.report.collision_pass_rate),
                pct(r.report.seal_pass_rate),
                pct(r.report.dynamics_pass_rate),
                r.report.dynamics_passed.to_string(),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| cells.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in cells {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (s, w))| if i < 2 { format!("{s:<w$}") } else { format!("{s:>w$}") })
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// One pass-rate row per (variant, modality) the variant applies to. Every
/// variant's settings must differ from the default in exactly one key.
pub fn run_ablation(
    corpus: &[CorpusEntry],
    cfg: &PipelineConfig,
    variants: &[Variant],
    workers: usize,
) -> Result<AblationTable> {
    if corpus.is_empty() {
        return Err(Error::InvalidArgument("ablation corpus is empty".into()));
    }
    let base = EvaluationSettings::new(cfg, Variant::Default);
    let mut rows = Vec::new();
    for &variant in variants {
        let settings = EvaluationSettings::new(cfg, variant);
        let diff = settings_diff(&base, &settings);
        let expected = usize::from(variant != Variant::Default);
        if diff.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "variant {variant} changes {} settings ({diff:?}); expected {expected}",
                diff.len()
            )));
        }
        for modality in [Modality::Jaw, Modality::Suction] {
            if !variant.applies_to(modality.name()) {
                continue;
            }
            let mut records = Vec::new();
            for entry in corpus {
                let subset: Vec<Candidate> = entry
                    .candidates
                    .iter()
                    .filter(|c| c.modality() == modality.name())
                    .cloned()
                    .collect();
                if !subset.is_empty() {
                    records.extend(evaluate_candidates(&entry.ctx, &subset, cfg, variant, workers)?);
                }
            }
            if records.is_empty() {
                continue;
            }
            rows.push(AblationRow {
                variant,
                modality,
                config_hash: settings.hash(),
                report: compute_pass_rates(&records)?,
            });
        }
    }
    Ok(AblationTable { rows })
}
