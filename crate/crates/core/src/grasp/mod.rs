//! Candidate generation: farthest point sampling, Darboux frames and
//! approach-based poses for parallel-jaw and suction tools.

mod candidate;
mod fps;
mod frame;
mod spec;

pub use candidate::{
    approach_rotation, gen_parallel_grasps, gen_suction_grasp, read_candidates, write_candidates, Candidate,
    GraspCandidate, SuctionCandidate,
};
pub use fps::fps;
pub use frame::{darboux_frame, frame_from_covariance, normal_covariance, DarbouxFrame, DEGENERATE_GAP, MIN_NEIGHBORS};
pub use spec::{GripperPrimitives, GripperSpec, SuctionCupSpec, JAW_GRIPPERS, SUCTION_CUPS};
