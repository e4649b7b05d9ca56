//! Object assets: meshes with density and difficulty, loaded from an OBJ
//! manifest or generated procedurally.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::difficulty::{classify_difficulty, Difficulty, DifficultyThresholds};
use crate::error::{Error, Result};
use crate::geometry::primitives::{self, HeightField};
use crate::geometry::{load_mesh, write_obj, TriangleMesh, Vec3};

/// Density used when an asset does not specify one [kg/m³].
pub const DEFAULT_DENSITY: f64 = 500.0;

#[derive(Clone, Debug)]
pub struct ObjectAsset {
    pub asset_id: String,
    pub mesh: TriangleMesh,
    pub density: f64,
    pub difficulty: Difficulty,
    /// Unscaled enclosed volume [m³].
    pub volume: f64,
    /// Unscaled center of mass in the asset frame.
    pub center_of_mass: Vec3,
}

impl ObjectAsset {
    pub fn new(
        asset_id: impl Into<String>,
        mesh: TriangleMesh,
        density: f64,
        difficulty: Option<Difficulty>,
        thresholds: &DifficultyThresholds,
    ) -> Result<Self> {
        let asset_id = asset_id.into();
        if !(density > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "asset `{asset_id}` density must be > 0 (got {density})"
            )));
        }
        let vol = mesh.volume();
        if !vol.watertight {
            log::warn!("asset `{asset_id}` is not watertight; mass is an estimate");
        }
        Ok(Self {
            difficulty: difficulty.unwrap_or_else(|| classify_difficulty(&mesh, thresholds)),
            volume: vol.volume,
            center_of_mass: mesh.centroid(),
            asset_id,
            mesh,
            density,
        })
    }

    /// `density × scale³ × volume`.
    pub fn mass(&self, scale: f64) -> f64 {
        self.density * scale.powi(3) * self.volume
    }
}

/// One entry of the asset manifest file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub difficulty: Option<Difficulty>,
}

/// Asset pool keyed by id; iteration order is the sorted id order.
#[derive(Clone, Debug, Default)]
pub struct AssetLibrary {
    assets: BTreeMap<String, ObjectAsset>,
}

impl AssetLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, asset: ObjectAsset) {
        self.assets.insert(asset.asset_id.clone(), asset);
    }

    pub fn get(&self, id: &str) -> Result<&ObjectAsset> {
        self.assets.get(id).ok_or_else(|| Error::UnknownAsset(id.to_string()))
    }

    pub fn ids(&self) -> Vec<&str> {
        self.assets.keys().map(String::as_str).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ObjectAsset> {
        self.assets.values()
    }

    pub fn len(&self) -> usize {
        self.assets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assets.is_empty()
    }

    /// Reads a manifest mapping asset ids to OBJ paths (relative to the
    /// manifest), densities and optional difficulty overrides.
    pub fn load_manifest(path: impl AsRef<Path>, thresholds: &DifficultyThresholds) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let entries: BTreeMap<String, ManifestEntry> =
            serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
                path: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut lib = Self::new();
        for (id, entry) in entries {
            let mesh = load_mesh(base.join(&entry.path))?.mesh;
            lib.insert(ObjectAsset::new(
                id,
                mesh,
                entry.density.unwrap_or(DEFAULT_DENSITY),
                entry.difficulty,
                thresholds,
            )?);
        }
        Ok(lib)
    }

    /// Writes every mesh as `meshes/<id>.obj` under `dir` plus a manifest
    /// at `dir/<manifest_name>`.
    pub fn save_manifest(&self, dir: impl AsRef<Path>, manifest_name: &str) -> Result<PathBuf> {
        let dir = dir.as_ref();
        let mesh_dir = dir.join("meshes");
        std::fs::create_dir_all(&mesh_dir).map_err(|e| Error::io(format!("creating {}", mesh_dir.display()), e))?;
        let mut entries = BTreeMap::new();
        for asset in self.iter() {
            let rel = PathBuf::from("meshes").join(format!("{}.obj", asset.asset_id));
            let out = dir.join(&rel);
            std::fs::write(&out, write_obj(&asset.mesh))
                .map_err(|e| Error::io(format!("writing {}", out.display()), e))?;
            entries.insert(
                asset.asset_id.clone(),
                ManifestEntry {
                    path: rel,
                    density: Some(asset.density),
                    difficulty: Some(asset.difficulty),
                },
            );
        }
        let manifest = dir.join(manifest_name);
        std::fs::write(&manifest, serde_json::to_string_pretty(&entries)?)
            .map_err(|e| Error::io(format!("writing {}", manifest.display()), e))?;
        Ok(manifest)
    }

    /// The built-in pool of procedurally meshed household-scale objects.
    pub fn procedural(thresholds: &DifficultyThresholds) -> Self {
        let mut lib = Self::new();
        for (id, mesh, density) in procedural_meshes() {
            let asset = ObjectAsset::new(id, mesh, density, None, thresholds).expect("procedural assets are valid");
            lib.insert(asset);
        }
        lib
    }
}

fn polygon(sides: usize, radius: f64, phase: f64) -> Vec<(f64, f64)> {
    (0..sides)
        .map(|k| {
            let a = phase + TAU * k as f64 / sides as f64;
            (radius * a.cos(), radius * a.sin())
        })
        .collect()
}

fn block(
    half_x: f64,
    half_y: f64,
    cell: f64,
    height: &dyn Fn(f64, f64) -> f64,
    solid: &dyn Fn(f64, f64) -> bool,
) -> TriangleMesh {
    let nx = (2.0 * half_x / cell).round() as usize;
    let ny = (2.0 * half_y / cell).round() as usize;
    let mut m = HeightField {
        origin: (-half_x, -half_y),
        cell,
        nx,
        ny,
        bottom: 0.0,
        height,
        solid,
    }
    .build();
    // Center vertically so the asset frame sits near the middle of the part.
    let mid = 0.5 * (m.aabb().min.z + m.aabb().max.z);
    for v in &mut m.vertices {
        v.z -= mid;
    }
    m
}

fn procedural_meshes() -> Vec<(&'static str, TriangleMesh, f64)> {
    let v = Vec3::new;
    vec![
        ("box_small", primitives::cuboid(v(0.025, 0.025, 0.025)), DEFAULT_DENSITY),
        ("box_carton", primitives::cuboid(v(0.045, 0.035, 0.025)), 300.0),
        ("box_flat", primitives::cuboid(v(0.06, 0.04, 0.012)), DEFAULT_DENSITY),
        ("box_long", primitives::cuboid(v(0.08, 0.025, 0.02)), DEFAULT_DENSITY),
        ("can", primitives::cylinder(0.033, 0.1, 48), 400.0),
        ("jar", primitives::cylinder(0.045, 0.07, 56), 450.0),
        ("dowel", primitives::cylinder(0.012, 0.12, 24), 700.0),
        ("ball", primitives::icosphere(0.035, 3), 300.0),
        ("ball_small", primitives::icosphere(0.022, 2), 600.0),
        ("cone", primitives::cone(0.035, 0.07, 40), DEFAULT_DENSITY),
        (
            "hex_nut",
            primitives::extrude(&polygon(6, 0.03, 0.0), -0.012, 0.012),
            800.0,
        ),
        (
            "wedge",
            primitives::extrude(&[(-0.04, -0.03), (0.04, -0.03), (-0.04, 0.03)], -0.025, 0.025),
            DEFAULT_DENSITY,
        ),
        ("mug", primitives::cup(0.04, 0.034, 0.09, 0.006, 48), 900.0),
        ("ring", primitives::torus(0.035, 0.01, 48, 16), 900.0),
        (
            "l_bracket",
            block(0.04, 0.04, 0.004, &|_, _| 0.03, &|x, y| x < -0.01 || y < -0.01),
            DEFAULT_DENSITY,
        ),
        (
            "perforated_plate",
            block(0.06, 0.045, 0.002, &|_, _| 0.012, &|x, y| {
                let holes = [(-0.03, 0.0), (0.0, 0.015), (0.03, -0.01)];
                holes
                    .iter()
                    .all(|(cx, cy)| (x - cx).powi(2) + (y - cy).powi(2) > 0.009f64.powi(2))
            }),
            DEFAULT_DENSITY,
        ),
        (
            "ribbed_block",
            block(
                0.05,
                0.035,
                0.002,
                &|x, _| if (x * 200.0).sin() > 0.0 { 0.035 } else { 0.028 },
                &|_, _| true,
            ),
            DEFAULT_DENSITY,
        ),
        (
            "wavy_tile",
            block(
                0.05,
                0.05,
                0.002,
                &|x, y| 0.02 + 0.004 * (x * 150.0).sin() * (y * 150.0).cos(),
                &|_, _| true,
            ),
            DEFAULT_DENSITY,
        ),
        (
            "dish",
            block(
                0.05,
                0.05,
                0.002,
                &|x, y| {
                    let r2 = x * x + y * y;
                    let rho: f64 = 0.04;
                    if r2 < rho * rho {
                        0.04 - (rho * rho - r2).sqrt().min(0.03)
                    } else {
                        0.04
                    }
                },
                &|_, _| true,
            ),
            DEFAULT_DENSITY,
        ),
        (
            "twin_blocks",
            TriangleMesh::merged(&[
                primitives::cuboid_between(v(-0.04, -0.02, -0.015), v(-0.005, 0.02, 0.015)),
                primitives::cuboid_between(v(0.005, -0.02, -0.015), v(0.04, 0.02, 0.015)),
            ]),
            DEFAULT_DENSITY,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn procedural_pool_is_valid() {
        let lib = AssetLibrary::procedural(&DifficultyThresholds::default());
        assert_eq!(lib.len(), 20);
        for a in lib.iter() {
            assert!(a.mesh.is_watertight(), "{} not watertight", a.asset_id);
            assert!(a.mesh.signed_volume() > 0.0, "{} inverted", a.asset_id);
            assert!(a.mass(1.0) > 0.0);
        }
        assert_eq!(lib.get("box_small").unwrap().difficulty, Difficulty::L1);
        assert_eq!(lib.get("twin_blocks").unwrap().difficulty, Difficulty::L3);
    }

    #[test]
    fn mass_scales_cubically() {
        let lib = AssetLibrary::procedural(&DifficultyThresholds::default());
        let a = lib.get("box_small").unwrap();
        assert!((a.mass(1.0) - 500.0 * 0.05f64.powi(3)).abs() < 1e-12);
        assert!((a.mass(1.5) / a.mass(1.0) - 3.375).abs() < 1e-12);
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let th = DifficultyThresholds::default();
        let lib = AssetLibrary::procedural(&th);
        let manifest = lib.save_manifest(dir.path(), "assets.json").unwrap();
        let back = AssetLibrary::load_manifest(&manifest, &th).unwrap();
        assert_eq!(back.ids(), lib.ids());
        for (a, b) in lib.iter().zip(back.iter()) {
            assert_eq!(a.mesh.vertices, b.mesh.vertices);
            assert_eq!(a.density, b.density);
            assert_eq!(a.difficulty, b.difficulty);
        }
    }

    #[test]
    fn manifest_density_defaults() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("cube.obj"),
            write_obj(&primitives::cuboid(Vec3::repeat(0.05))),
        )
        .unwrap();
        std::fs::write(dir.path().join("m.json"), r#"{"cube": {"path": "cube.obj"}}"#).unwrap();
        let lib = AssetLibrary::load_manifest(dir.path().join("m.json"), &DifficultyThresholds::default()).unwrap();
        assert_eq!(lib.get("cube").unwrap().density, DEFAULT_DENSITY);
    }
}
