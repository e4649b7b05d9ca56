use std::fmt::Write as _;
use std::path::Path;

use super::config::PipelineConfig;
use super::record::LabelRecord;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::grasp::Candidate;
use crate::scene::SceneContext;
use crate::seal::evaluate_seal;

/// ASCII PLY point cloud with per-vertex colors.
pub fn write_ply(path: impl AsRef<Path>, points: &[(Vec3, [u8; 3])]) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::new();
    let _ = write!(
        s,
        "ply\nformat ascii 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n",
        points.len()
    );
    for (p, c) in points {
        let _ = writeln!(
            s,
            "{} {} {} {} {} {}",
            p.x as f32, p.y as f32, p.z as f32, c[0], c[1], c[2]
        );
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    }
    std::fs::write(path, s).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn instance_color(id: u32) -> [u8; 3] {
    let h = (id as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    [(h >> 16) as u8 | 0x40, (h >> 32) as u8 | 0x40, (h >> 48) as u8 | 0x40]
}

/// Writes `samples.ply` (surface samples colored by instance) and
/// `seal_hits.ply` (ring-web contact points of collision-free suction
/// candidates: green on the target, red on another instance).
pub fn dump_debug_ply(
    dir: impl AsRef<Path>,
    ctx: &SceneContext,
    records: &[LabelRecord],
    cfg: &PipelineConfig,
) -> Result<()> {
    let dir = dir.as_ref();
    let samples: Vec<(Vec3, [u8; 3])> = ctx
        .samples
        .iter()
        .flatten()
        .map(|s| (s.point, instance_color(s.instance_id)))
        .collect();
    write_ply(dir.join("samples.ply"), &samples)?;
    let mut hits = Vec::new();
    for r in records.iter().filter(|r| r.q_collision) {
        let Candidate::Suction(c) = &r.candidate else { continue };
        let cup = cfg.cup(&c.cup)?;
        let model = cfg.seal.model(&cup);
        let e = evaluate_seal(ctx.accel.as_ref(), c, &model);
        let axis = c.pose.axis(0);
        for (v, h) in model.vertices.iter().zip(&e.vertices) {
            if h.hit {
                let p = c.pose.transform_point(v) + axis * h.deformation;
                let color = if h.instance_id == c.target_instance as i64 {
                    [0, 200, 0]
                } else {
                    [220, 0, 0]
                };
                hits.push((p, color));
            }
        }
    }
    write_ply(dir.join("seal_hits.ply"), &hits)
}
