use std::path::Path;

use super::Scene;
use crate::error::{Error, Result};

pub fn scene_to_json(scene: &Scene) -> Result<String> {
    Ok(serde_json::to_string_pretty(scene)?)
}

pub fn save_scene(path: impl AsRef<Path>, scene: &Scene) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    }
    std::fs::write(path, scene_to_json(scene)?).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Parses and validates scene JSON. Schema violations name the offending
/// field path.
pub fn parse_scene(text: &str) -> Result<Scene> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scene: Scene = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    for (i, o) in scene.objects.iter().enumerate() {
        let at = |field: &str| format!("objects[{i}].{field}");
        if o.instance_id as usize != i {
            return Err(Error::Schema {
                path: at("instance_id"),
                message: format!("expected contiguous id {i}, found {}", o.instance_id),
            });
        }
        if !(o.scale > 0.0) {
            return Err(Error::Schema {
                path: at("scale"),
                message: "scale must be > 0".into(),
            });
        }
        if !(0.0..=1.0).contains(&o.friction) {
            return Err(Error::Schema {
                path: at("friction"),
                message: "friction must lie in [0, 1]".into(),
            });
        }
        if !(o.mass > 0.0) {
            return Err(Error::Schema {
                path: at("mass"),
                message: "mass must be > 0".into(),
            });
        }
    }
    Ok(scene)
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    parse_scene(&text)
}
