//! Pinhole depth camera: viewpoint sampling, depth and instance-id rendering
//! by ray casting, back-projection and PNG export.
//!
//! Camera frames follow the OpenCV convention: +x right, +y down, +z forward.
//! `camera_pose` maps camera coordinates to world coordinates.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use image::{ImageBuffer, Luma};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PointNormal, Pose, Ray, SceneAccel, Vec3};

/// Longest camera ray [m].
pub const MAX_RANGE: f64 = 100.0;
/// Depth PNG quantum [m]: one count is 0.1 mm.
pub const DEPTH_PNG_SCALE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        Self {
            fx: 525.0,
            fy: 525.0,
            cx: 319.5,
            cy: 239.5,
            width: 640,
            height: 480,
        }
    }
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::InvalidArgument("focal lengths must be positive".into()));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidArgument("image size must be non-zero".into()));
        }
        if !(0.0..=self.width as f64).contains(&self.cx) || !(0.0..=self.height as f64).contains(&self.cy) {
            return Err(Error::InvalidArgument("principal point lies outside the image".into()));
        }
        Ok(())
    }

    /// Unit-z-depth direction through pixel center `(u, v)` in camera frame.
    pub fn pixel_direction(&self, u: f64, v: f64) -> Vec3 {
        Vec3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, 1.0)
    }

    /// Pixel coordinates of a camera-frame point (no bounds check).
    pub fn project(&self, p: &Vec3) -> (f64, f64) {
        (self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ViewpointConfig {
    pub rho_range: [f64; 2],
    pub phi_range: [f64; 2],
    pub theta_range: [f64; 2],
    pub look_at: [f64; 3],
}

impl Default for ViewpointConfig {
    fn default() -> Self {
        Self {
            rho_range: [0.5, 10.0],
            phi_range: [0.0, FRAC_PI_2],
            theta_range: [0.0, PI],
            look_at: [0.0; 3],
        }
    }
}

impl ViewpointConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |r: &[f64; 2]| r[0] <= r[1] && r.iter().all(|v| v.is_finite());
        if !(ok(&self.rho_range) && ok(&self.phi_range) && ok(&self.theta_range)) || !(self.rho_range[0] > 0.0) {
            return Err(Error::InvalidArgument(
                "viewpoint ranges must be non-empty with rho > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Camera-to-world pose at `eye` looking at `target`, with world +z as up
/// (+x when the view is vertical).
pub fn look_at(eye: &Vec3, target: &Vec3) -> Pose {
    let forward = (target - eye).normalize();
    let mut right = forward.cross(&Vec3::z());
    if right.norm() < 1e-9 {
        right = forward.cross(&Vec3::x());
    }
    let right = right.normalize();
    let down = forward.cross(&right);
    Pose::from_axes(right, down, forward, *eye)
}

pub fn viewpoint_from_spherical(rho: f64, phi: f64, theta: f64, target: &Vec3) -> Pose {
    let eye = target + rho * Vec3::new(phi.sin() * theta.cos(), phi.sin() * theta.sin(), phi.cos());
    look_at(&eye, target)
}

fn uniform(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.random_range(r[0]..=r[1])
    }
}

/// Spherical coordinates drawn uniformly per coordinate; camera looks at
/// `cfg.look_at`.
pub fn sample_viewpoint(cfg: &ViewpointConfig, seed: u64) -> Pose {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = uniform(&mut rng, cfg.rho_range);
    let phi = uniform(&mut rng, cfg.phi_range);
    let theta = uniform(&mut rng, cfg.theta_range);
    viewpoint_from_spherical(rho, phi, theta, &Vec3::from(cfg.look_at))
}

/// Rendered depth and instance-id maps, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthFrame {
    /// z-depth in camera frame [m]; 0 on miss.
    pub depth: Vec<f64>,
    /// Nearest-hit instance; -1 on miss.
    pub instance_ids: Vec<i32>,
    /// World-space face normal of the hit triangle; zero on miss or when
    /// loaded from disk.
    pub normals: Vec<Vec3>,
    pub camera_pose: Pose,
    pub intrinsics: CameraIntrinsics,
}

impl DepthFrame {
    pub fn width(&self) -> usize {
        self.intrinsics.width as usize
    }

    pub fn height(&self) -> usize {
        self.intrinsics.height as usize
    }

    pub fn index(&self, u: usize, v: usize) -> usize {
        v * self.width() + u
    }

    pub fn hit_count(&self) -> usize {
        self.instance_ids.iter().filter(|&&i| i >= 0).count()
    }

    /// Pixel count per instance id.
    pub fn id_histogram(&self) -> BTreeMap<i32, usize> {
        let mut h = BTreeMap::new();
        for &i in &self.instance_ids {
            *h.entry(i).or_insert(0) += 1;
        }
        h
    }
}

/// Casts one ray per pixel center. `accel = None` renders an empty scene.
pub fn render_depth(accel: Option<&SceneAccel>, camera_pose: &Pose, intrinsics: &CameraIntrinsics) -> DepthFrame {
    let (w, h) = (intrinsics.width as usize, intrinsics.height as usize);
    let rows: Vec<Vec<(f64, i32, Vec3)>> = (0..h)
        .into_par_iter()
        .map(|v| {
            (0..w)
                .map(|u| {
                    let Some(accel) = accel else {
                        return (0.0, -1, Vec3::zeros());
                    };
                    let d_cam = intrinsics.pixel_direction(u as f64, v as f64);
                    let dir = camera_pose.transform_vector(&d_cam);
                    let ray = Ray::new(camera_pose.translation, dir, MAX_RANGE);
                    match accel.raycast(&ray) {
                        Some(hit) => {
                            let z = hit.distance / d_cam.norm();
                            (z, hit.instance_id as i32, hit.face_normal)
                        }
                        None => (0.0, -1, Vec3::zeros()),
                    }
                })
                .collect()
        })
        .collect();
    let mut depth = Vec::with_capacity(w * h);
    let mut ids = Vec::with_capacity(w * h);
    let mut normals = Vec::with_capacity(w * h);
    for (d, i, n) in rows.into_iter().flatten() {
        depth.push(d);
        ids.push(i);
        normals.push(n);
    }
    DepthFrame {
        depth,
        instance_ids: ids,
        normals,
        camera_pose: *camera_pose,
        intrinsics: *intrinsics,
    }
}

/// Adds zero-mean Gaussian noise of `sigma_mm` millimetres to every hit pixel.
pub fn add_depth_noise(frame: &mut DepthFrame, sigma_mm: f64, seed: u64) {
    if sigma_mm <= 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (d, &id) in frame.depth.iter_mut().zip(&frame.instance_ids) {
        if id >= 0 {
            let n: f64 = rng.sample(StandardNormal);
            *d = (*d + n * sigma_mm * 1e-3).max(DEPTH_PNG_SCALE);
        }
    }
}

/// World-space points for every hit pixel, grouped by instance id.
pub fn depth_to_pointcloud(frame: &DepthFrame) -> BTreeMap<u32, Vec<PointNormal>> {
    let mut out: BTreeMap<u32, Vec<PointNormal>> = BTreeMap::new();
    for v in 0..frame.height() {
        for u in 0..frame.width() {
            let i = frame.index(u, v);
            let id = frame.instance_ids[i];
            if id < 0 {
                continue;
            }
            let p_cam = frame.intrinsics.pixel_direction(u as f64, v as f64) * frame.depth[i];
            out.entry(id as u32).or_default().push(PointNormal {
                point: frame.camera_pose.transform_point(&p_cam),
                normal: frame.normals[i],
                instance_id: id as u32,
            });
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct FrameSidecar {
    camera_pose: Pose,
    intrinsics: CameraIntrinsics,
    depth_png: String,
    ids_png: String,
    depth_scale_m: f64,
}

/// Paths written by [`save_frame`].
#[derive(Clone, Debug)]
pub struct FrameFiles {
    pub depth_png: PathBuf,
    pub ids_png: PathBuf,
    pub sidecar: PathBuf,
}

/// Writes `<stem>_depth.png` (u16, 0.1 mm, saturating), `<stem>_ids.png`
/// (u16, id + 1, 0 = miss) and `<stem>.json`.
pub fn save_frame(frame: &DepthFrame, dir: impl AsRef<Path>, stem: &str) -> Result<FrameFiles> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let (w, h) = (frame.intrinsics.width, frame.intrinsics.height);
    let depth: Vec<u16> = frame
        .depth
        .iter()
        .map(|d| (d / DEPTH_PNG_SCALE).round().clamp(0.0, u16::MAX as f64) as u16)
        .collect();
    let ids: Vec<u16> = frame
        .instance_ids
        .iter()
        .map(|&i| (i + 1).clamp(0, u16::MAX as i32) as u16)
        .collect();
    let files = FrameFiles {
        depth_png: dir.join(format!("{stem}_depth.png")),
        ids_png: dir.join(format!("{stem}_ids.png")),
        sidecar: dir.join(format!("{stem}.json")),
    };
    ImageBuffer::<Luma<u16>, _>::from_raw(w, h, depth)
        .expect("buffer size matches intrinsics")
        .save(&files.depth_png)?;
    ImageBuffer::<Luma<u16>, _>::from_raw(w, h, ids)
        .expect("buffer size matches intrinsics")
        .save(&files.ids_png)?;
    let sidecar = FrameSidecar {
        camera_pose: frame.camera_pose,
        intrinsics: frame.intrinsics,
        depth_png: format!("{stem}_depth.png"),
        ids_png: format!("{stem}_ids.png"),
        depth_scale_m: DEPTH_PNG_SCALE,
    };
    std::fs::write(&files.sidecar, serde_json::to_string_pretty(&sidecar)?)
        .map_err(|e| Error::io(format!("writing {}", files.sidecar.display()), e))?;
    Ok(files)
}

/// Reads a frame written by [`save_frame`]; depth is quantized to 0.1 mm
/// and normals are not stored.
pub fn load_frame(sidecar: impl AsRef<Path>) -> Result<DepthFrame> {
    let sidecar = sidecar.as_ref();
    let text = std::fs::read_to_string(sidecar).map_err(|e| Error::io(format!("reading {}", sidecar.display()), e))?;
    let meta: FrameSidecar = serde_json::from_str(&text)?;
    let dir = sidecar.parent().unwrap_or(Path::new("."));
    let depth = image::open(dir.join(&meta.depth_png))?.into_luma16();
    let ids = image::open(dir.join(&meta.ids_png))?.into_luma16();
    let n = (meta.intrinsics.width * meta.intrinsics.height) as usize;
    if depth.len() != n || ids.len() != n {
        return Err(Error::IdMismatch(format!(
            "{}: image size disagrees with intrinsics",
            sidecar.display()
        )));
    }
    Ok(DepthFrame {
        depth: depth.iter().map(|&d| d as f64 * meta.depth_scale_m).collect(),
        instance_ids: ids.iter().map(|&i| i as i32 - 1).collect(),
        normals: vec![Vec3::zeros(); n],
        camera_pose: meta.camera_pose,
        intrinsics: meta.intrinsics,
    })
}
