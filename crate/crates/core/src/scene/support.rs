use std::collections::BTreeSet;

use super::SceneContext;
use crate::geometry::{Ray, Vec3};

/// Maximum downward gap for a resting contact [m].
pub const SUPPORT_GAP: f64 = 0.002;
const LIFT: f64 = 1e-4;

/// Directed resting relation: edge `(a, b)` means `a` rests on `b`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SupportGraph {
    edges: BTreeSet<(u32, u32)>,
}

impl SupportGraph {
    pub fn from_edges(edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        Self {
            edges: edges.into_iter().collect(),
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn rests_on(&self, a: u32) -> Vec<u32> {
        self.edges.iter().filter(|e| e.0 == a).map(|e| e.1).collect()
    }

    /// Every object transitively resting on `base` (excluding `base`).
    pub fn stacked_on(&self, base: u32) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        let mut frontier = vec![base];
        while let Some(b) = frontier.pop() {
            for &(a, _) in self.edges.iter().filter(|e| e.1 == b) {
                if a != base && out.insert(a) {
                    frontier.push(a);
                }
            }
        }
        out
    }
}

/// Casts rays straight down from the lowest decile of each object's surface
/// samples; `a → b` when one first hits `b` within [`SUPPORT_GAP`]. Only
/// edges toward earlier-placed (lower id) objects are kept, so the graph is
/// acyclic.
pub fn support_graph(ctx: &SceneContext) -> SupportGraph {
    let Some(accel) = ctx.accel.as_ref() else {
        return SupportGraph::default();
    };
    let mut edges = BTreeSet::new();
    for obj in &ctx.scene.objects {
        let a = obj.instance_id;
        let mut zs: Vec<&Vec3> = ctx.samples[a as usize].iter().map(|s| &s.point).collect();
        if zs.is_empty() {
            continue;
        }
        zs.sort_by(|p, q| p.z.total_cmp(&q.z));
        let decile = (zs.len() / 10).max(1);
        for p in &zs[..decile] {
            // Start slightly above so coincident faces register.
            let ray = Ray::new(**p + Vec3::z() * LIFT, -Vec3::z(), SUPPORT_GAP + LIFT);
            if let Some(hit) = accel.raycast_filtered(&ray, |id| id != a) {
                if hit.instance_id < a {
                    edges.insert((a, hit.instance_id));
                }
            }
        }
    }
    SupportGraph { edges }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stacked_on_is_transitive() {
        let g = SupportGraph::from_edges([(1, 0), (2, 1), (3, 0)]);
        assert_eq!(g.stacked_on(0), [1, 2, 3].into());
        assert_eq!(g.stacked_on(1), [2].into());
        assert!(g.stacked_on(2).is_empty());
        assert_eq!(g.rests_on(2), vec![1]);
    }
}
