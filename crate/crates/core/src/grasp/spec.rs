use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{load_mesh, primitives, Aabb, TriangleMesh, Vec3};

/// Parallel-jaw gripper in its open configuration.
///
/// Gripper frame: +X is the approach direction, fingers close along Y and
/// the origin sits at the palm face. The palm occupies `x ∈ [-palm_depth, 0]`;
/// fingers span `x ∈ [0, finger_depth]` just outside `|y| = max_open_width/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GripperSpec {
    pub name: String,
    /// `d` [m].
    pub finger_depth: f64,
    /// Inner gap between the open fingers [m].
    pub max_open_width: f64,
    /// Finger extent along Y [m].
    pub finger_thickness: f64,
    /// Finger extent along Z [m].
    pub finger_width: f64,
    pub palm_depth: f64,
    /// Palm extent along Z [m].
    pub palm_height: f64,
    #[serde(skip)]
    pub collision_mesh: TriangleMesh,
    pub close_region: Aabb,
}

/// Analytic stand-ins for the gripper body: a palm box and one capsule per
/// finger, all in gripper frame.
#[derive(Clone, Debug, PartialEq)]
pub struct GripperPrimitives {
    pub palm_center: Vec3,
    pub palm_half: Vec3,
    /// Finger capsule segments `(p, q)`.
    pub fingers: [(Vec3, Vec3); 2],
    pub finger_radius: f64,
}

pub const JAW_GRIPPERS: [&str; 2] = ["fetch", "robotiq_2f140"];

impl GripperSpec {
    pub fn new(
        name: &str,
        finger_depth: f64,
        max_open_width: f64,
        finger_thickness: f64,
        finger_width: f64,
        palm_depth: f64,
        palm_height: f64,
    ) -> Result<Self> {
        if [
            finger_depth,
            max_open_width,
            finger_thickness,
            finger_width,
            palm_depth,
            palm_height,
        ]
        .iter()
        .any(|v| !(*v > 0.0))
        {
            return Err(Error::InvalidArgument(format!(
                "gripper `{name}` dimensions must be positive"
            )));
        }
        let half_w = max_open_width / 2.0;
        let outer = half_w + finger_thickness;
        let palm = primitives::cuboid_between(
            Vec3::new(-palm_depth, -outer, -palm_height / 2.0),
            Vec3::new(0.0, outer, palm_height / 2.0),
        );
        let left = primitives::cuboid_between(
            Vec3::new(0.0, half_w, -finger_width / 2.0),
            Vec3::new(finger_depth, outer, finger_width / 2.0),
        );
        let right = primitives::cuboid_between(
            Vec3::new(0.0, -outer, -finger_width / 2.0),
            Vec3::new(finger_depth, -half_w, finger_width / 2.0),
        );
        Ok(Self {
            name: name.to_string(),
            finger_depth,
            max_open_width,
            finger_thickness,
            finger_width,
            palm_depth,
            palm_height,
            collision_mesh: TriangleMesh::merged(&[palm, left, right]),
            close_region: Aabb {
                min: Vec3::new(0.0, -half_w, -finger_width / 2.0),
                max: Vec3::new(finger_depth, half_w, finger_width / 2.0),
            },
        })
    }

    pub fn fetch() -> Self {
        Self::new("fetch", 0.045, 0.10, 0.01, 0.02, 0.06, 0.04).expect("valid dimensions")
    }

    pub fn robotiq_2f140() -> Self {
        Self::new("robotiq_2f140", 0.06, 0.14, 0.012, 0.027, 0.08, 0.06).expect("valid dimensions")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "fetch" => Ok(Self::fetch()),
            "robotiq_2f140" | "robotiq" => Ok(Self::robotiq_2f140()),
            _ => Err(Error::UnknownGripper(name.to_string())),
        }
    }

    /// Replaces the collision mesh with a user OBJ given in gripper frame.
    pub fn with_mesh_file(mut self, path: impl AsRef<Path>) -> Result<Self> {
        self.collision_mesh = load_mesh(path)?.mesh;
        Ok(self)
    }

    pub fn primitives(&self) -> GripperPrimitives {
        let half_w = self.max_open_width / 2.0;
        let r = self.finger_thickness / 2.0;
        let y = half_w + r;
        let finger = |s: f64| (Vec3::new(r, s * y, 0.0), Vec3::new(self.finger_depth - r, s * y, 0.0));
        GripperPrimitives {
            palm_center: Vec3::new(-self.palm_depth / 2.0, 0.0, 0.0),
            palm_half: Vec3::new(
                self.palm_depth / 2.0,
                half_w + self.finger_thickness,
                self.palm_height / 2.0,
            ),
            fingers: [finger(1.0), finger(-1.0)],
            finger_radius: r,
        }
    }
}

/// Bellows suction cup. Cup frame: +X is the approach direction and the rim
/// circle lies in the `x = 0` plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuctionCupSpec {
    pub name: String,
    pub radius: f64,
    /// Bellows height `h` [m].
    pub bellows_height: f64,
    pub force_limit: f64,
    pub bend_limit_deg: f64,
}

pub const SUCTION_CUPS: [&str; 2] = ["cup_15mm", "cup_25mm"];

impl SuctionCupSpec {
    pub fn cup_15mm() -> Self {
        Self {
            name: "cup_15mm".into(),
            radius: 0.015,
            bellows_height: 0.02,
            force_limit: 20.0,
            bend_limit_deg: 7.0,
        }
    }

    pub fn cup_25mm() -> Self {
        Self {
            name: "cup_25mm".into(),
            radius: 0.025,
            bellows_height: 0.03,
            force_limit: 30.0,
            bend_limit_deg: 7.0,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "cup_15mm" => Ok(Self::cup_15mm()),
            "cup_25mm" => Ok(Self::cup_25mm()),
            _ => Err(Error::UnknownCup(name.to_string())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.bellows_height > 0.0 && self.force_limit > 0.0 && self.bend_limit_deg > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cup `{}` parameters must be positive",
                self.name
            )));
        }
        Ok(())
    }

    /// Cup body cylinder spanning `x ∈ [-h, -gap]` (gap ≥ 0 behind the rim).
    pub fn body_mesh(&self, gap: f64) -> TriangleMesh {
        let len = self.bellows_height - gap;
        let cyl = primitives::cylinder(self.radius, len, 48);
        // Centered cylinder along z, turned so its axis runs along X.
        let pose = crate::geometry::Pose::from_axes(
            Vec3::z(),
            Vec3::y(),
            -Vec3::x(),
            Vec3::new(-(gap + len / 2.0), 0.0, 0.0),
        );
        cyl.transformed(&pose, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn close_region_between_fingers() {
        for name in JAW_GRIPPERS {
            let g = GripperSpec::by_name(name).unwrap();
            let m = g.collision_mesh.aabb();
            assert!(g.close_region.max.y <= g.max_open_width / 2.0 + 1e-12);
            assert!((m.max.x - g.finger_depth).abs() < 1e-12);
            assert!(g.collision_mesh.is_watertight());
            let p = g.primitives();
            for (a, b) in p.fingers {
                for e in [a, b] {
                    assert!(e.y.abs() - p.finger_radius >= g.max_open_width / 2.0 - 1e-12);
                    assert!(e.x - p.finger_radius >= -1e-12 && e.x + p.finger_radius <= g.finger_depth + 1e-12);
                }
            }
        }
        assert!(matches!(GripperSpec::by_name("claw"), Err(Error::UnknownGripper(_))));
    }

    #[test]
    fn cups() {
        let c = SuctionCupSpec::cup_15mm();
        assert_eq!((c.radius, c.force_limit, c.bend_limit_deg), (0.015, 20.0, 7.0));
        let c = SuctionCupSpec::cup_25mm();
        assert_eq!((c.radius, c.force_limit), (0.025, 30.0));
        let body = c.body_mesh(0.001).aabb();
        assert!((body.min.x + 0.03).abs() < 1e-12 && (body.max.x + 0.001).abs() < 1e-12);
        assert!((body.max.y - 0.025).abs() < 1e-9);
        assert!(SuctionCupSpec::by_name("cup_99mm").is_err());
    }
}
