//! Six procedurally meshed suction corner cases at 1.5 cm cup scale, each
//! with one fixed top-down candidate. Dimensions in millimetres:
//!
//! | case | geometry | cup placement |
//! |------|----------|---------------|
//! | a | plate with a 7.5 radius through-hole and a 6 wide × 5 deep groove along x | centered on the top, roll 22.5° |
//! | b | plate with a 4 tall boss over x > 5 | rim on the boss top |
//! | c | sinusoidal top, amplitude 3, period √2·R | rim on the crest plane |
//! | d | plate with a 6 wide slot holding a 5 wide neighbor bar (0.5 gaps, 0.5 lower) | centered, roll 22.5° |
//! | e | block with a 20 radius spherical dent, 12 deep | centered on the top face |
//! | f | plate with a 1 thick neighbor sheet covering half the footprint | rim 0.1 above the sheet |

use std::f64::consts::SQRT_2;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::primitives::{cuboid_between, HeightField};
use crate::geometry::{Pose, TriangleMesh, Vec3};
use crate::grasp::{write_candidates, Candidate, SuctionCandidate, SuctionCupSpec};
use crate::scene::{save_scene, AssetLibrary, DifficultyThresholds, ObjectAsset, Scene, SceneObject, DEFAULT_DENSITY};

pub const CORNER_CUP: &str = "cup_15mm";
pub const CORNER_FRICTION: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct CornerCase {
    pub name: String,
    pub description: String,
    pub scene: Scene,
    pub assets: AssetLibrary,
    pub candidate: SuctionCandidate,
    /// Expected verdict of the 8-vertex singulated baseline.
    pub dexnet8_expected: bool,
}

const MM: f64 = 1e-3;

fn plate(cell: f64, top: &dyn Fn(f64, f64) -> f64, solid: &dyn Fn(f64, f64) -> bool) -> TriangleMesh {
    let half = 40.0 * MM;
    let n = (2.0 * half / cell).round() as usize;
    HeightField {
        origin: (-half, -half),
        cell,
        nx: n,
        ny: n,
        bottom: 0.0,
        height: top,
        solid,
    }
    .build()
}

/// Cup approaching along -z with its Y axis on world +x before `roll`.
fn top_down(rim: Vec3, roll_deg: f64) -> SuctionCandidate {
    let base = Pose::from_axes(-Vec3::z(), Vec3::x(), -Vec3::y(), rim);
    let roll = nalgebra::UnitQuaternion::from_axis_angle(&Vec3::x_axis(), roll_deg.to_radians());
    SuctionCandidate {
        scene_id: String::new(),
        target_instance: 0,
        point_index: 0,
        pose: Pose::new(base.rotation * roll, rim),
        cup: CORNER_CUP.into(),
    }
}

fn case(
    name: &str,
    description: &str,
    meshes: Vec<TriangleMesh>,
    mut candidate: SuctionCandidate,
    dexnet8_expected: bool,
) -> Result<CornerCase> {
    let th = DifficultyThresholds::default();
    let mut assets = AssetLibrary::new();
    let mut objects = Vec::new();
    for (i, m) in meshes.into_iter().enumerate() {
        let id = format!("{name}_{i}");
        let asset = ObjectAsset::new(id.clone(), m, DEFAULT_DENSITY, None, &th)?;
        objects.push(SceneObject {
            instance_id: i as u32,
            asset_id: id,
            pose: Pose::identity(),
            scale: 1.0,
            mass: asset.mass(1.0),
            friction: CORNER_FRICTION,
        });
        assets.insert(asset);
    }
    candidate.scene_id = name.to_string();
    Ok(CornerCase {
        name: name.into(),
        description: description.into(),
        scene: Scene { seed: 0, objects },
        assets,
        candidate,
        dexnet8_expected,
    })
}

pub fn corner_cases() -> Result<Vec<CornerCase>> {
    let top = 10.0 * MM;
    let mut out = Vec::new();

    let groove = plate(
        0.5 * MM,
        &|_, y| {
            if y.abs() <= 3.0 * MM + 1e-9 {
                top - 5.0 * MM
            } else {
                top
            }
        },
        &|x, y| x.hypot(y) > 7.5 * MM,
    );
    out.push(case(
        "a_grooves_holes",
        "groove and through-hole under the cup",
        vec![groove],
        top_down(Vec3::new(0.0, 0.0, top), 22.5),
        true,
    )?);

    let boss = plate(
        0.5 * MM,
        &|x, _| if x > 5.0 * MM - 1e-9 { top + 4.0 * MM } else { top },
        &|_, _| true,
    );
    out.push(case(
        "b_protrusion",
        "cup seated on a 4 mm boss covering part of the footprint",
        vec![boss],
        top_down(Vec3::new(0.0, 0.0, top + 4.0 * MM), 0.0),
        false,
    )?);

    let lambda = SQRT_2 * 15.0 * MM;
    let k = std::f64::consts::TAU / lambda;
    let rough = plate(
        0.5 * MM,
        &|x, y| top + 3.0 * MM * (k * x).sin() * (k * y).sin(),
        &|_, _| true,
    );
    out.push(case(
        "c_rough",
        "sinusoidal roughness, 3 mm amplitude",
        vec![rough],
        top_down(Vec3::new(0.0, 0.0, top + 3.0 * MM), 0.0),
        true,
    )?);

    let slotted = plate(0.5 * MM, &|_, _| top, &|x, y| {
        !(x > 4.0 * MM && x < 30.0 * MM && y.abs() < 3.0 * MM)
    });
    let bar = cuboid_between(
        Vec3::new(4.5 * MM, -2.5 * MM, 0.0),
        Vec3::new(29.5 * MM, 2.5 * MM, top - 0.5 * MM),
    );
    out.push(case(
        "d_adjacent",
        "neighbor bar in a slot with 0.5 mm gaps",
        vec![slotted, bar],
        top_down(Vec3::new(0.0, 0.0, top), 22.5),
        true,
    )?);

    let block_top = 30.0 * MM;
    let (r_s, depth) = (20.0 * MM, 12.0 * MM);
    let center_z = block_top - depth + r_s;
    let dent = plate(
        MM,
        &|x, y| {
            let r2 = x * x + y * y;
            if r2 >= r_s * r_s {
                block_top
            } else {
                (center_z - (r_s * r_s - r2).sqrt()).min(block_top)
            }
        },
        &|_, _| true,
    );
    out.push(case(
        "e_concave",
        "spherical dent, 20 mm radius, 12 mm deep",
        vec![dent],
        top_down(Vec3::new(0.0, 0.0, block_top), 0.0),
        false,
    )?);

    let base = plate(MM, &|_, _| top, &|_, _| true);
    let sheet = cuboid_between(
        Vec3::new(0.0, -40.0 * MM, top),
        Vec3::new(40.0 * MM, 40.0 * MM, top + MM),
    );
    out.push(case(
        "f_overlap",
        "1 mm neighbor sheet over half the footprint",
        vec![base, sheet],
        top_down(Vec3::new(0.0, 0.0, top + 1.1 * MM), 0.0),
        true,
    )?);
    Ok(out)
}

/// Writes `<out>/<case>/{scene.json, assets.json, meshes/, candidates.ndjson}`
/// for every case.
pub fn gen_corner_corpus(out: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out = out.as_ref();
    let mut dirs = Vec::new();
    for c in corner_cases()? {
        let dir = out.join(&c.name);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
        save_scene(dir.join("scene.json"), &c.scene)?;
        c.assets.save_manifest(&dir, "assets.json")?;
        write_candidates(
            dir.join("candidates.ndjson"),
            &[Candidate::Suction(c.candidate.clone())],
        )?;
        dirs.push(dir);
    }
    Ok(dirs)
}

pub fn corner_cup() -> SuctionCupSpec {
    SuctionCupSpec::cup_15mm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::check_suction_collision;
    use crate::scene::{SceneContext, SurfaceSamplingConfig};
    use crate::seal::{build_seal_model, dexnet8_strains, evaluate_seal, SealFailure};

    #[test]
    fn every_case_behaves_as_documented() {
        let cup = corner_cup();
        let model = build_seal_model(&cup);
        let expect = [
            SealFailure::RayMiss,
            SealFailure::DeformationExceeded,
            SealFailure::DeformationExceeded,
            SealFailure::WrongInstance,
            SealFailure::DeformationExceeded,
            SealFailure::WrongInstance,
        ];
        let sampling = SurfaceSamplingConfig {
            samples_per_m2: 1e4,
            min_samples: 50,
            max_samples: 500,
        };
        for (c, want) in corner_cases().unwrap().into_iter().zip(expect) {
            let ctx = SceneContext::new(c.scene.clone(), &c.assets, &sampling).unwrap();
            let col = check_suction_collision(&ctx, &c.candidate, &cup).unwrap();
            assert!(col.q_collision, "{}: {col:?}", c.name);
            let e = evaluate_seal(ctx.accel.as_ref(), &c.candidate, &model);
            assert_eq!(e.failure_reason, want, "{}", c.name);
            let single = ctx.singulated_accel(0).unwrap();
            let strains = dexnet8_strains(&single, &c.candidate, &cup);
            let pass = strains.as_ref().is_some_and(|s| s.max_abs() <= 0.10);
            assert_eq!(pass, c.dexnet8_expected, "{}: {strains:?}", c.name);
        }
    }

    #[test]
    fn rough_cone_strain_is_close_to_analytic() {
        let cases = corner_cases().unwrap();
        let c = &cases[2];
        let cup = corner_cup();
        let sampling = SurfaceSamplingConfig {
            samples_per_m2: 1e4,
            min_samples: 50,
            max_samples: 500,
        };
        let ctx = SceneContext::new(c.scene.clone(), &c.assets, &sampling).unwrap();
        let s = dexnet8_strains(&ctx.singulated_accel(0).unwrap(), &c.candidate, &cup).unwrap();
        // δ = 3 mm at every perimeter vertex: √(15² + 23²) / 25 − 1.
        let analytic = (15f64.powi(2) + 23f64.powi(2)).sqrt() / 25.0 - 1.0;
        for cone in s.cone {
            assert!((cone - analytic).abs() < 5e-4, "{cone} vs {analytic}");
        }
    }

    #[test]
    fn corpus_files() {
        let dir = tempfile::tempdir().unwrap();
        let dirs = gen_corner_corpus(dir.path()).unwrap();
        assert_eq!(dirs.len(), 6);
        for d in dirs {
            for f in ["scene.json", "assets.json", "candidates.ndjson"] {
                assert!(d.join(f).is_file());
            }
        }
    }
}
