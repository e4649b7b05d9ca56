use serde::{Deserialize, Serialize};

use crate::geometry::{convex_hull_volume, TriangleMesh};

/// Object difficulty level derived from triangle-mesh complexity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Difficulty {
    L1,
    L2,
    L3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DifficultyThresholds {
    /// Maximum triangle count for L1.
    pub max_l1_triangles: usize,
    /// Maximum hull/mesh volume ratio for L1.
    pub max_l1_hull_ratio: f64,
    /// Hull/mesh volume ratio at or above which a mesh is L3.
    pub min_l3_hull_ratio: f64,
}

impl Default for DifficultyThresholds {
    fn default() -> Self {
        Self {
            max_l1_triangles: 500,
            max_l1_hull_ratio: 1.2,
            min_l3_hull_ratio: 3.0,
        }
    }
}

/// L3 for multi-component or strongly non-convex meshes, L1 for small
/// convex-ish meshes, L2 otherwise.
pub fn classify_difficulty(mesh: &TriangleMesh, th: &DifficultyThresholds) -> Difficulty {
    if mesh.connected_components() > 1 {
        return Difficulty::L3;
    }
    let volume = mesh.volume().volume;
    if volume <= 1e-15 {
        return Difficulty::L3;
    }
    let ratio = convex_hull_volume(&mesh.vertices) / volume;
    if ratio >= th.min_l3_hull_ratio {
        Difficulty::L3
    } else if mesh.triangle_count() <= th.max_l1_triangles && ratio <= th.max_l1_hull_ratio {
        Difficulty::L1
    } else {
        Difficulty::L2
    }
}
