use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EvaluationSettings, PipelineConfig, SealModelKind, Variant};
use super::record::{FailureReason, LabelRecord};
use crate::camera::{add_depth_noise, render_depth, sample_viewpoint, DepthFrame};
use crate::collision::{check_grasp_collision_with, check_suction_collision};
use crate::dynamics::{grasp_quasistatic, suction_quasistatic};
use crate::error::{Error, Result};
use crate::geometry::{SceneAccel, Vec3};
use crate::grasp::{
    darboux_frame, fps, gen_parallel_grasps, gen_suction_grasp, Candidate, GraspCandidate, GripperSpec,
    SuctionCandidate, SuctionCupSpec,
};
use crate::scene::{sample_scene_plan, settle_scene_report, AssetLibrary, Scene, SceneContext};
use crate::seal::{dexnet8_strains, evaluate_seal, SealModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Jaw,
    Suction,
}

impl Modality {
    pub fn name(self) -> &'static str {
        match self {
            Modality::Jaw => "jaw",
            Modality::Suction => "suction",
        }
    }
}

impl std::str::FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jaw" => Ok(Modality::Jaw),
            "suction" => Ok(Modality::Suction),
            _ => Err(Error::InvalidArgument(format!("unknown modality `{s}`"))),
        }
    }
}

/// Plans and settles one scene.
pub fn generate_scene(cfg: &PipelineConfig, assets: &AssetLibrary, seed: u64) -> Result<Scene> {
    let plan = sample_scene_plan(&cfg.scene, assets, seed)?;
    let report = settle_scene_report(&plan, assets, &cfg.settle)?;
    if !report.skipped.is_empty() {
        log::warn!("scene {seed}: {} drops could not be placed", report.skipped.len());
    }
    Ok(report.scene)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of frame `k` rendered with base seed `seed`.
pub fn frame_seed(seed: u64, k: usize) -> u64 {
    splitmix(splitmix(seed) ^ k as u64)
}

pub fn render_frames(ctx: &SceneContext, cfg: &PipelineConfig, frames: usize, seed: u64) -> Vec<DepthFrame> {
    (0..frames)
        .map(|k| {
            let s = frame_seed(seed, k);
            let pose = sample_viewpoint(&cfg.render.viewpoint, s);
            let mut f = render_depth(ctx.accel.as_ref(), &pose, &cfg.render.intrinsics);
            if let Some(sigma) = cfg.render.depth_noise_mm {
                add_depth_noise(&mut f, sigma, splitmix(s));
            }
            f
        })
        .collect()
}

/// FPS over each object's surface samples, a Darboux frame per selected
/// point, then the jaw roll/standoff grid or one suction pose per frame.
/// Points whose neighborhood is too sparse for a frame are skipped.
pub fn generate_candidates(
    ctx: &SceneContext,
    scene_id: &str,
    modality: Modality,
    tool: &str,
    cfg: &PipelineConfig,
) -> Result<Vec<Candidate>> {
    let gripper = match modality {
        Modality::Jaw => Some(cfg.gripper(tool)?),
        Modality::Suction => None,
    };
    let cup = match modality {
        Modality::Suction => Some(cfg.cup(tool)?),
        Modality::Jaw => None,
    };
    let cc = &cfg.candidates;
    let mut out = Vec::new();
    for (id, samples) in ctx.samples.iter().enumerate() {
        if samples.is_empty() {
            continue;
        }
        let points: Vec<Vec3> = samples.iter().map(|s| s.point).collect();
        let k = cc.fps_points.min(points.len());
        let picked = fps(&points, k, cc.fps_start.min(points.len() - 1))?;
        for (pos, &idx) in picked.iter().enumerate() {
            let frame = match darboux_frame(samples, &samples[idx], cc.frame_radius) {
                Ok(f) => f,
                Err(Error::InsufficientSupport { .. }) => continue,
                Err(e) => return Err(e),
            };
            if let Some(g) = &gripper {
                for mut c in gen_parallel_grasps(&frame, g, cc.n_roll, cc.n_standoff, id as u32)? {
                    c.scene_id = scene_id.to_string();
                    c.point_index = pos as u32;
                    out.push(Candidate::Jaw(c));
                }
            }
            if let Some(cup) = &cup {
                let mut c = gen_suction_grasp(&frame, cup, id as u32);
                c.scene_id = scene_id.to_string();
                c.point_index = pos as u32;
                out.push(Candidate::Suction(c));
            }
        }
    }
    Ok(out)
}

/// Per-run state shared by all candidate evaluations.
pub struct Evaluator<'a> {
    ctx: &'a SceneContext,
    cfg: &'a PipelineConfig,
    variant: Variant,
    config_hash: String,
    grippers: BTreeMap<String, GripperSpec>,
    cups: BTreeMap<String, (SuctionCupSpec, SealModel)>,
    singulated: Vec<SceneAccel>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        ctx: &'a SceneContext,
        cfg: &'a PipelineConfig,
        variant: Variant,
        candidates: &[Candidate],
    ) -> Result<Self> {
        let mut grippers = BTreeMap::new();
        let mut cups = BTreeMap::new();
        for c in candidates {
            if !variant.applies_to(c.modality()) {
                return Err(Error::SpecMismatch {
                    variant: variant.name().to_string(),
                    modality: c.modality().to_string(),
                });
            }
            if c.target_instance() as usize >= ctx.len() {
                return Err(Error::IdMismatch(format!(
                    "candidate targets instance {} but the scene has {} objects",
                    c.target_instance(),
                    ctx.len()
                )));
            }
            match c {
                Candidate::Jaw(g) if !grippers.contains_key(&g.gripper) => {
                    grippers.insert(g.gripper.clone(), cfg.gripper(&g.gripper)?);
                }
                Candidate::Suction(s) if !cups.contains_key(&s.cup) => {
                    let cup = cfg.cup(&s.cup)?;
                    let model = cfg.seal.model(&cup);
                    cups.insert(s.cup.clone(), (cup, model));
                }
                _ => {}
            }
        }
        let singulated = if variant.seal_model() == SealModelKind::Dexnet8Singulated {
            (0..ctx.len() as u32)
                .map(|i| ctx.singulated_accel(i))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            ctx,
            cfg,
            variant,
            config_hash: EvaluationSettings::new(cfg, variant).hash(),
            grippers,
            cups,
            singulated,
        })
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    fn record(
        &self,
        cand: &Candidate,
        c: bool,
        s: Option<bool>,
        d: Option<bool>,
        reason: FailureReason,
    ) -> LabelRecord {
        let seal_ok = s.unwrap_or(true);
        LabelRecord {
            scene_id: cand.scene_id().to_string(),
            target_instance: cand.target_instance(),
            tool: cand.tool_name().to_string(),
            candidate: cand.clone(),
            q_collision: c,
            q_seal: s,
            q_dynamics: d,
            final_label: c && seal_ok && d == Some(true),
            failure_reason: reason,
            config_hash: self.config_hash.clone(),
        }
    }

    pub fn evaluate(&self, cand: &Candidate) -> Result<LabelRecord> {
        match cand {
            Candidate::Jaw(g) => self.evaluate_jaw(cand, g),
            Candidate::Suction(s) => self.evaluate_suction(cand, s),
        }
    }

    fn evaluate_jaw(&self, cand: &Candidate, c: &GraspCandidate) -> Result<LabelRecord> {
        let g = self
            .grippers
            .get(&c.gripper)
            .ok_or_else(|| Error::UnknownGripper(c.gripper.clone()))?;
        let col = check_grasp_collision_with(self.ctx, c, g, self.variant.gripper_model())?;
        if !col.q_collision {
            return Ok(self.record(cand, false, None, None, FailureReason::Collision));
        }
        let v = grasp_quasistatic(self.ctx, c, g, &self.cfg.dynamics, self.variant.clutter_aware());
        Ok(self.record(cand, true, None, Some(v.q_dynamics), v.failure_reason.into()))
    }

    fn evaluate_suction(&self, cand: &Candidate, c: &SuctionCandidate) -> Result<LabelRecord> {
        let (cup, model) = self.cups.get(&c.cup).ok_or_else(|| Error::UnknownCup(c.cup.clone()))?;
        let col = check_suction_collision(self.ctx, c, cup)?;
        if !col.q_collision {
            return Ok(self.record(cand, false, None, None, FailureReason::Collision));
        }
        let seal = match self.variant.seal_model() {
            SealModelKind::RingWeb => evaluate_seal(self.ctx.accel.as_ref(), c, model).failure_reason.into(),
            SealModelKind::Dexnet8Singulated => {
                match dexnet8_strains(&self.singulated[c.target_instance as usize], c, cup) {
                    None => FailureReason::RayMiss,
                    Some(s) if s.max_abs() > self.cfg.seal.dexnet8_strain_limit => FailureReason::SpringStrainExceeded,
                    Some(_) => FailureReason::None,
                }
            }
        };
        if seal != FailureReason::None {
            return Ok(self.record(cand, true, Some(false), None, seal));
        }
        let v = suction_quasistatic(self.ctx, c, cup, &self.cfg.dynamics, self.variant.clutter_aware());
        Ok(self.record(cand, true, Some(true), Some(v.q_dynamics), v.failure_reason.into()))
    }
}

/// Evaluates candidates on a pool of `workers` threads; records come back in
/// canonical candidate order whatever the worker count.
pub fn evaluate_candidates(
    ctx: &SceneContext,
    candidates: &[Candidate],
    cfg: &PipelineConfig,
    variant: Variant,
    workers: usize,
) -> Result<Vec<LabelRecord>> {
    let ev = Evaluator::new(ctx, cfg, variant, candidates)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let mut records: Vec<LabelRecord> =
        pool.install(|| candidates.par_iter().map(|c| ev.evaluate(c)).collect::<Result<_>>())?;
    records.sort_by(|a, b| a.candidate.sort_key().cmp(&b.candidate.sort_key()));
    Ok(records)
}

/// Samples and labels every candidate of one modality on a scene.
pub fn run_label_pipeline(
    ctx: &SceneContext,
    scene_id: &str,
    cfg: &PipelineConfig,
    modality: Modality,
    tool: &str,
    variant: Variant,
    workers: usize,
) -> Result<Vec<LabelRecord>> {
    let candidates = generate_candidates(ctx, scene_id, modality, tool, cfg)?;
    evaluate_candidates(ctx, &candidates, cfg, variant, workers)
}
