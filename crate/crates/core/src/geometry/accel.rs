//! Bounding volume hierarchy over world-space triangles of posed instances.

use std::collections::BTreeSet;

use super::intersect::{
    box_triangle_overlap, point_in_mesh, ray_triangle, segment_triangle_distance, triangle_triangle_overlap, PARITY_DIR,
};
use super::{Aabb, Pose, Ray, RayHit, TriangleMesh, Vec3};
use crate::error::{Error, Result};

const LEAF_SIZE: usize = 4;

/// One posed, uniformly scaled mesh to insert into a [`SceneAccel`].
#[derive(Clone, Copy, Debug)]
pub struct AccelInstance<'a> {
    pub mesh: &'a TriangleMesh,
    pub pose: Pose,
    pub scale: f64,
    pub instance_id: u32,
}

#[derive(Clone, Debug)]
struct WorldTriangle {
    corners: [Vec3; 3],
    normal: Vec3,
    instance_id: u32,
    triangle_index: u32,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    aabb: Aabb,
    /// Leaf: first triangle. Interior: index of the left child (right child
    /// follows the whole left subtree, stored in `right`).
    first: u32,
    count: u32,
    right: u32,
}

#[derive(Clone, Debug)]
struct InstanceInfo {
    id: u32,
    aabb: Aabb,
    probe_point: Vec3,
}

/// Immutable acceleration structure; safe to share across threads.
#[derive(Clone, Debug)]
pub struct SceneAccel {
    tris: Vec<WorldTriangle>,
    nodes: Vec<Node>,
    instances: Vec<InstanceInfo>,
}

/// Outcome of [`SceneAccel::mesh_overlap`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OverlapResult {
    pub overlap: bool,
    pub instances: BTreeSet<u32>,
}

impl SceneAccel {
    pub fn build(instances: &[AccelInstance<'_>]) -> Result<Self> {
        if instances.is_empty() {
            return Err(Error::EmptyScene);
        }
        let mut tris = Vec::new();
        let mut infos = Vec::with_capacity(instances.len());
        for inst in instances {
            if !(inst.scale > 0.0) || !inst.scale.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "instance {} has non-positive scale {}",
                    inst.instance_id, inst.scale
                )));
            }
            let world = inst.mesh.transformed(&inst.pose, inst.scale);
            for i in 0..world.triangle_count() {
                let corners = world.corners(i);
                let n = (corners[1] - corners[0]).cross(&(corners[2] - corners[0]));
                tris.push(WorldTriangle {
                    corners,
                    normal: n.normalize(),
                    instance_id: inst.instance_id,
                    triangle_index: i as u32,
                });
            }
            infos.push(InstanceInfo {
                id: inst.instance_id,
                aabb: world.aabb(),
                probe_point: world.vertices[world.triangles[0][0] as usize],
            });
        }
        // Canonical order so the tree does not depend on insertion order.
        tris.sort_by(|a, b| (a.instance_id, a.triangle_index).cmp(&(b.instance_id, b.triangle_index)));
        infos.sort_by_key(|i| i.id);

        let mut order: Vec<u32> = (0..tris.len() as u32).collect();
        let centroids: Vec<Vec3> = tris
            .iter()
            .map(|t| (t.corners[0] + t.corners[1] + t.corners[2]) / 3.0)
            .collect();
        let boxes: Vec<Aabb> = tris.iter().map(|t| Aabb::from_points(t.corners.iter())).collect();
        let mut nodes = Vec::with_capacity(2 * tris.len() / LEAF_SIZE + 1);
        build_node(&mut nodes, &mut order, 0, &centroids, &boxes);
        let tris = order.iter().map(|&i| tris[i as usize].clone()).collect();
        Ok(Self {
            tris,
            nodes,
            instances: infos,
        })
    }

    pub fn triangle_count(&self) -> usize {
        self.tris.len()
    }

    pub fn instance_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.instances.iter().map(|i| i.id)
    }

    pub fn instance_aabb(&self, id: u32) -> Option<Aabb> {
        self.instances.iter().find(|i| i.id == id).map(|i| i.aabb)
    }

    pub fn bounds(&self) -> Aabb {
        self.nodes[0].aabb
    }

    /// Nearest hit along the ray.
    pub fn raycast(&self, ray: &Ray) -> Option<RayHit> {
        self.raycast_filtered(ray, |_| true)
    }

    /// Nearest hit on instances accepted by `keep`. Equal distances resolve
    /// to the lower `(instance_id, triangle_index)`.
    pub fn raycast_filtered(&self, ray: &Ray, keep: impl Fn(u32) -> bool) -> Option<RayHit> {
        let inv = ray.direction.map(|c| 1.0 / c);
        let mut best: Option<(f64, usize)> = None;
        let mut limit = ray.max_distance;
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        if self.nodes[0].aabb.ray_entry(&ray.origin, &inv, limit).is_some() {
            stack.push(0);
        }
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            match node.aabb.ray_entry(&ray.origin, &inv, limit) {
                Some(_) => {}
                None => continue,
            }
            if node.count > 0 {
                for ti in node.first..node.first + node.count {
                    let tri = &self.tris[ti as usize];
                    if !keep(tri.instance_id) {
                        continue;
                    }
                    if let Some(t) = ray_triangle(&ray.origin, &ray.direction, limit, &tri.corners) {
                        let better = match best {
                            None => true,
                            Some((bt, bi)) => {
                                let cur = &self.tris[bi];
                                t < bt
                                    || (t == bt
                                        && (tri.instance_id, tri.triangle_index)
                                            < (cur.instance_id, cur.triangle_index))
                            }
                        };
                        if better {
                            best = Some((t, ti as usize));
                            limit = t;
                        }
                    }
                }
            } else {
                let l = ni + 1;
                let r = node.right;
                let dl = self.nodes[l as usize].aabb.ray_entry(&ray.origin, &inv, limit);
                let dr = self.nodes[r as usize].aabb.ray_entry(&ray.origin, &inv, limit);
                match (dl, dr) {
                    (Some(a), Some(b)) => {
                        if a <= b {
                            stack.push(r);
                            stack.push(l);
                        } else {
                            stack.push(l);
                            stack.push(r);
                        }
                    }
                    (Some(_), None) => stack.push(l),
                    (None, Some(_)) => stack.push(r),
                    (None, None) => {}
                }
            }
        }
        best.map(|(t, i)| {
            let tri = &self.tris[i];
            RayHit {
                distance: t,
                point: ray.at(t),
                face_normal: tri.normal,
                instance_id: tri.instance_id,
                triangle_index: tri.triangle_index,
            }
        })
    }

    /// Number of triangles of `instance` crossed by the unbounded ray.
    fn crossings(&self, origin: &Vec3, dir: &Vec3, instance: u32) -> usize {
        let inv = dir.map(|c| 1.0 / c);
        let mut count = 0;
        let mut stack = vec![0u32];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if node.aabb.ray_entry(origin, &inv, f64::INFINITY).is_none() {
                continue;
            }
            if node.count > 0 {
                for tri in &self.tris[node.first as usize..(node.first + node.count) as usize] {
                    if tri.instance_id == instance && ray_triangle(origin, dir, f64::INFINITY, &tri.corners).is_some() {
                        count += 1;
                    }
                }
            } else {
                stack.push(ni + 1);
                stack.push(node.right);
            }
        }
        count
    }

    /// Ray-parity containment test of a point against one instance.
    pub fn point_inside(&self, p: &Vec3, instance: u32) -> bool {
        let dir = Vec3::from(PARITY_DIR).normalize();
        self.crossings(p, &dir, instance) % 2 == 1
    }

    /// Visits every triangle whose bounding box touches `query`.
    fn for_each_near(&self, query: &Aabb, mut f: impl FnMut(&WorldTriangle)) {
        let mut stack = vec![0u32];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if !node.aabb.intersects(query) {
                continue;
            }
            if node.count > 0 {
                for tri in &self.tris[node.first as usize..(node.first + node.count) as usize] {
                    f(tri);
                }
            } else {
                stack.push(ni + 1);
                stack.push(node.right);
            }
        }
    }

    /// Triangle-level overlap between a posed probe mesh and every instance
    /// not in `exclude`. Touching contact counts. A probe fully inside an
    /// instance, or an instance fully inside the probe, is caught by a
    /// ray-parity containment check.
    pub fn mesh_overlap(&self, probe: &TriangleMesh, probe_pose: &Pose, exclude: &BTreeSet<u32>) -> OverlapResult {
        let world = probe.transformed(probe_pose, 1.0);
        self.world_mesh_overlap(&world, exclude, false)
    }

    /// Same as [`SceneAccel::mesh_overlap`] but stops at the first contact.
    pub fn any_overlap(&self, probe: &TriangleMesh, probe_pose: &Pose, exclude: &BTreeSet<u32>) -> bool {
        let world = probe.transformed(probe_pose, 1.0);
        self.world_mesh_overlap(&world, exclude, true).overlap
    }

    pub(crate) fn world_mesh_overlap(
        &self,
        world: &TriangleMesh,
        exclude: &BTreeSet<u32>,
        first_only: bool,
    ) -> OverlapResult {
        let mut hits = BTreeSet::new();
        let probe_box = world.aabb();
        if !probe_box.intersects(&self.bounds()) {
            return OverlapResult::default();
        }
        for i in 0..world.triangle_count() {
            let corners = world.corners(i);
            let tb = Aabb::from_points(corners.iter()).padded(1e-12);
            self.for_each_near(&tb, |tri| {
                if exclude.contains(&tri.instance_id) || hits.contains(&tri.instance_id) {
                    return;
                }
                if triangle_triangle_overlap(&corners, &tri.corners) {
                    hits.insert(tri.instance_id);
                }
            });
            if first_only && !hits.is_empty() {
                return OverlapResult {
                    overlap: true,
                    instances: hits,
                };
            }
        }
        for info in &self.instances {
            if exclude.contains(&info.id) || hits.contains(&info.id) || !info.aabb.intersects(&probe_box) {
                continue;
            }
            let probe_point = world.vertices[world.triangles[0][0] as usize];
            let contained = (info.aabb.contains(&probe_point) && self.point_inside(&probe_point, info.id))
                || (probe_box.contains(&info.probe_point) && point_in_mesh(&info.probe_point, world));
            if contained {
                hits.insert(info.id);
                if first_only {
                    break;
                }
            }
        }
        OverlapResult {
            overlap: !hits.is_empty(),
            instances: hits,
        }
    }
    /// Instances touching an oriented box. A box that swallows an instance
    /// whole is caught through the instance's probe point.
    pub fn box_overlap(&self, center: &Vec3, axes: &[Vec3; 3], half: &Vec3, exclude: &BTreeSet<u32>) -> BTreeSet<u32> {
        let reach: Vec3 = (0..3).fold(Vec3::zeros(), |acc, i| acc + axes[i].abs() * half[i]);
        let query = Aabb {
            min: center - reach,
            max: center + reach,
        };
        let mut hits = BTreeSet::new();
        self.for_each_near(&query, |tri| {
            if !exclude.contains(&tri.instance_id)
                && !hits.contains(&tri.instance_id)
                && box_triangle_overlap(center, axes, half, &tri.corners)
            {
                hits.insert(tri.instance_id);
            }
        });
        for info in &self.instances {
            if exclude.contains(&info.id) || hits.contains(&info.id) {
                continue;
            }
            let local = info.probe_point - center;
            let inside_box = (0..3).all(|i| local.dot(&axes[i]).abs() <= half[i]);
            if inside_box || (info.aabb.contains(center) && self.point_inside(center, info.id)) {
                hits.insert(info.id);
            }
        }
        hits
    }

    /// Instances within `radius` of the segment `p..q` (a capsule).
    pub fn capsule_overlap(&self, p: &Vec3, q: &Vec3, radius: f64, exclude: &BTreeSet<u32>) -> BTreeSet<u32> {
        let query = Aabb::from_points([p, q]).padded(radius);
        let mut hits = BTreeSet::new();
        self.for_each_near(&query, |tri| {
            if !exclude.contains(&tri.instance_id)
                && !hits.contains(&tri.instance_id)
                && segment_triangle_distance(p, q, &tri.corners) <= radius
            {
                hits.insert(tri.instance_id);
            }
        });
        for info in &self.instances {
            if exclude.contains(&info.id) || hits.contains(&info.id) {
                continue;
            }
            if info.aabb.contains(p) && self.point_inside(p, info.id) {
                hits.insert(info.id);
            }
        }
        hits
    }
}

fn build_node(nodes: &mut Vec<Node>, order: &mut [u32], offset: usize, centroids: &[Vec3], boxes: &[Aabb]) -> u32 {
    let aabb = order
        .iter()
        .fold(Aabb::empty(), |acc, &i| acc.merge(&boxes[i as usize]));
    let index = nodes.len() as u32;
    nodes.push(Node {
        aabb,
        first: offset as u32,
        count: order.len() as u32,
        right: 0,
    });
    if order.len() <= LEAF_SIZE {
        return index;
    }
    let cbox = Aabb::from_points(order.iter().map(|&i| &centroids[i as usize]));
    let axis = cbox.extent().imax();
    if cbox.extent()[axis] <= 0.0 {
        return index;
    }
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis]
            .total_cmp(&centroids[b as usize][axis])
            .then(a.cmp(&b))
    });
    let (left, right) = order.split_at_mut(mid);
    build_node(nodes, left, offset, centroids, boxes);
    let r = build_node(nodes, right, offset + mid, centroids, boxes);
    let node = &mut nodes[index as usize];
    node.count = 0;
    node.right = r;
    index
}
