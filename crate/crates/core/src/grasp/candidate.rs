use std::f64::consts::{PI, TAU};
use std::io::{BufRead, Write};
use std::path::Path;

use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::{DarbouxFrame, GripperSpec, SuctionCupSpec};
use crate::error::{Error, Result};
use crate::geometry::Pose;

/// Parallel-jaw candidate. Pose axes: X = approach (−v1), Y = closing
/// direction, Z = finger-width direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraspCandidate {
    pub scene_id: String,
    pub target_instance: u32,
    /// Position of the sample point in the target's FPS order.
    pub point_index: u32,
    pub roll_index: u32,
    pub standoff_index: u32,
    pub pose: Pose,
    pub standoff: f64,
    pub roll: f64,
    pub gripper: String,
}

/// Suction candidate. Pose X axis = approach (−v1); rim center at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuctionCandidate {
    pub scene_id: String,
    pub target_instance: u32,
    pub point_index: u32,
    pub pose: Pose,
    pub cup: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "modality", rename_all = "snake_case")]
pub enum Candidate {
    Jaw(GraspCandidate),
    Suction(SuctionCandidate),
}

impl Candidate {
    pub fn scene_id(&self) -> &str {
        match self {
            Candidate::Jaw(c) => &c.scene_id,
            Candidate::Suction(c) => &c.scene_id,
        }
    }

    pub fn target_instance(&self) -> u32 {
        match self {
            Candidate::Jaw(c) => c.target_instance,
            Candidate::Suction(c) => c.target_instance,
        }
    }

    pub fn pose(&self) -> &Pose {
        match self {
            Candidate::Jaw(c) => &c.pose,
            Candidate::Suction(c) => &c.pose,
        }
    }

    pub fn tool_name(&self) -> &str {
        match self {
            Candidate::Jaw(c) => &c.gripper,
            Candidate::Suction(c) => &c.cup,
        }
    }

    pub fn modality(&self) -> &'static str {
        match self {
            Candidate::Jaw(_) => "jaw",
            Candidate::Suction(_) => "suction",
        }
    }

    /// Canonical order: scene, target, FPS position, roll, standoff.
    pub fn sort_key(&self) -> (&str, u32, u32, u32, u32) {
        match self {
            Candidate::Jaw(c) => (
                &c.scene_id,
                c.target_instance,
                c.point_index,
                c.roll_index,
                c.standoff_index,
            ),
            Candidate::Suction(c) => (&c.scene_id, c.target_instance, c.point_index, 0, 0),
        }
    }
}

/// Tool orientation at a frame: X = −v1, Y = v2, Z = −v3 (the frame turned
/// 180° about v2).
pub fn approach_rotation(frame: &DarbouxFrame) -> UnitQuaternion<f64> {
    let f = frame.pose().rotation;
    f * UnitQuaternion::from_axis_angle(&Vector3::y_axis(), PI)
}

/// `n_roll × n_standoff` candidates on the roll/standoff grid, rolls
/// `2πj/n_roll` about the approach axis and standoffs `d·i/(n_standoff−1)`
/// back along −approach.
pub fn gen_parallel_grasps(
    frame: &DarbouxFrame,
    gripper: &GripperSpec,
    n_roll: usize,
    n_standoff: usize,
    target: u32,
) -> Result<Vec<GraspCandidate>> {
    if n_roll == 0 || n_standoff == 0 {
        return Err(Error::InvalidArgument(
            "n_roll and n_standoff must be at least 1".into(),
        ));
    }
    let base = approach_rotation(frame);
    let v1 = frame.v1();
    let mut out = Vec::with_capacity(n_roll * n_standoff);
    for j in 0..n_roll {
        let roll = TAU * j as f64 / n_roll as f64;
        let rot = base * UnitQuaternion::from_axis_angle(&Vector3::x_axis(), roll);
        for i in 0..n_standoff {
            let standoff = if n_standoff == 1 {
                0.0
            } else {
                gripper.finger_depth * i as f64 / (n_standoff - 1) as f64
            };
            out.push(GraspCandidate {
                scene_id: String::new(),
                target_instance: target,
                point_index: 0,
                roll_index: j as u32,
                standoff_index: i as u32,
                pose: Pose::new(rot, frame.origin + v1 * standoff),
                standoff,
                roll,
                gripper: gripper.name.clone(),
            });
        }
    }
    Ok(out)
}

pub fn gen_suction_grasp(frame: &DarbouxFrame, cup: &SuctionCupSpec, target: u32) -> SuctionCandidate {
    SuctionCandidate {
        scene_id: String::new(),
        target_instance: target,
        point_index: 0,
        pose: Pose::new(approach_rotation(frame), frame.origin),
        cup: cup.name.clone(),
    }
}

pub fn write_candidates(path: impl AsRef<Path>, candidates: &[Candidate]) -> Result<()> {
    let path = path.as_ref();
    let ctx = |e| Error::io(format!("writing {}", path.display()), e);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(ctx)?;
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(ctx)?);
    for c in candidates {
        serde_json::to_writer(&mut w, c)?;
        w.write_all(b"\n").map_err(ctx)?;
    }
    w.flush().map_err(ctx)
}

pub fn read_candidates(path: impl AsRef<Path>) -> Result<Vec<Candidate>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let de = &mut serde_json::Deserializer::from_str(&line);
        out.push(serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: format!("line {}: {}", i + 1, e.path()),
            message: e.inner().to_string(),
        })?);
    }
    Ok(out)
}
