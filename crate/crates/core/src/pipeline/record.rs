use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::DynamicsFailure;
use crate::error::{Error, Result};
use crate::grasp::Candidate;
use crate::seal::SealFailure;

/// Why a candidate's final label is 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    #[default]
    None,
    Collision,
    RayMiss,
    WrongInstance,
    DeformationExceeded,
    SpringStrainExceeded,
    PayloadExceedsForceLimit,
    BendLimitExceeded,
    BlockedByPile,
    NoAntipodalContact,
    FrictionConeViolated,
}

impl From<SealFailure> for FailureReason {
    fn from(f: SealFailure) -> Self {
        match f {
            SealFailure::None => FailureReason::None,
            SealFailure::RayMiss => FailureReason::RayMiss,
            SealFailure::WrongInstance => FailureReason::WrongInstance,
            SealFailure::DeformationExceeded => FailureReason::DeformationExceeded,
        }
    }
}

impl From<DynamicsFailure> for FailureReason {
    fn from(f: DynamicsFailure) -> Self {
        match f {
            DynamicsFailure::None => FailureReason::None,
            DynamicsFailure::PayloadExceedsForceLimit => FailureReason::PayloadExceedsForceLimit,
            DynamicsFailure::BendLimitExceeded => FailureReason::BendLimitExceeded,
            DynamicsFailure::BlockedByPile => FailureReason::BlockedByPile,
            DynamicsFailure::NoAntipodalContact => FailureReason::NoAntipodalContact,
            DynamicsFailure::FrictionConeViolated => FailureReason::FrictionConeViolated,
        }
    }
}

/// One labeled candidate. Stages after a failed one are `null`; jaws never
/// have a seal stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelRecord {
    pub scene_id: String,
    pub target_instance: u32,
    pub tool: String,
    pub candidate: Candidate,
    pub q_collision: bool,
    pub q_seal: Option<bool>,
    pub q_dynamics: Option<bool>,
    pub final_label: bool,
    pub failure_reason: FailureReason,
    pub config_hash: String,
}

impl LabelRecord {
    pub fn modality(&self) -> &'static str {
        self.candidate.modality()
    }

    pub fn has_seal_stage(&self) -> bool {
        matches!(self.candidate, Candidate::Suction(_))
    }

    /// Checks the stage/label invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("label record: {m}")));
        if !self.q_collision && (self.q_seal.is_some() || self.q_dynamics.is_some()) {
            return bad("stages after a failed collision check must be null");
        }
        if !self.has_seal_stage() && self.q_seal.is_some() {
            return bad("jaw records have no seal stage");
        }
        if self.q_seal == Some(false) && self.q_dynamics.is_some() {
            return bad("dynamics after a failed seal must be null");
        }
        let seal_ok = if self.has_seal_stage() {
            self.q_seal == Some(true)
        } else {
            true
        };
        let expect = self.q_collision && seal_ok && self.q_dynamics == Some(true);
        if self.final_label != expect {
            return bad("final_label must equal the product of the stage bits");
        }
        if self.final_label != (self.failure_reason == FailureReason::None) {
            return bad("failure_reason must be none iff final_label is set");
        }
        Ok(())
    }
}

/// Stage pass rates; each denominator is the number of candidates that
/// passed the previous stage, and a zero denominator yields `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassRateReport {
    pub total: usize,
    pub collision_passed: usize,
    /// Collision passers with a seal stage.
    pub seal_evaluated: usize,
    pub seal_passed: usize,
    pub dynamics_evaluated: usize,
    pub dynamics_passed: usize,
    pub collision_pass_rate: Option<f64>,
    pub seal_pass_rate: Option<f64>,
    pub dynamics_pass_rate: Option<f64>,
}

fn ratio(n: usize, d: usize) -> Option<f64> {
    (d > 0).then(|| n as f64 / d as f64)
}

pub fn compute_pass_rates(records: &[LabelRecord]) -> Result<PassRateReport> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no label records".into()));
    }
    let mut r = PassRateReport {
        total: records.len(),
        collision_passed: 0,
        seal_evaluated: 0,
        seal_passed: 0,
        dynamics_evaluated: 0,
        dynamics_passed: 0,
        collision_pass_rate: None,
        seal_pass_rate: None,
        dynamics_pass_rate: None,
    };
    for rec in records {
        if !rec.q_collision {
            continue;
        }
        r.collision_passed += 1;
        if rec.has_seal_stage() {
            r.seal_evaluated += 1;
            if rec.q_seal != Some(true) {
                continue;
            }
            r.seal_passed += 1;
        }
        r.dynamics_evaluated += 1;
        if rec.q_dynamics == Some(true) {
            r.dynamics_passed += 1;
        }
    }
    r.collision_pass_rate = ratio(r.collision_passed, r.total);
    r.seal_pass_rate = ratio(r.seal_passed, r.seal_evaluated);
    r.dynamics_pass_rate = ratio(r.dynamics_passed, r.dynamics_evaluated);
    Ok(r)
}

pub fn labels_to_ndjson(records: &[LabelRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn write_labels(path: impl AsRef<Path>, records: &[LabelRecord]) -> Result<()> {
    let path = path.as_ref();
    let ctx = |e| Error::io(format!("writing {}", path.display()), e);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(ctx)?;
    }
    let mut f = std::fs::File::create(path).map_err(ctx)?;
    f.write_all(labels_to_ndjson(records).as_bytes()).map_err(ctx)
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<LabelRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let de = &mut serde_json::Deserializer::from_str(&line);
        let rec: LabelRecord = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: format!("line {}: {}", i + 1, e.path()),
            message: e.inner().to_string(),
        })?;
        rec.validate()
            .map_err(|e| Error::InvalidArgument(format!("line {}: {e}", i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}
