//! Forward and inverse kinematics of the six-joint virtual arm.

mod dh;
mod geometry;
mod ik;
mod pen;
mod transform;

pub use dh::{
    dh_table, dh_transform, forward_frames, forward_pose, forward_positions, shoulder_elbow_frame,
    DhRow,
};
pub use geometry::{
    calibrate_to_checkpoint, rotation_defects, ArmGeometry, JointAngles, JointPositions,
    INITIAL_PEN_POSITION, INITIAL_POSTURE,
};
pub use ik::{
    in_solution_branch, inverse_kinematics, KinematicsError, COSINE_TOLERANCE, WRIST_SINGULARITY,
};
pub use pen::{
    pen_direction, pen_pose_matrix, pen_rotation, plane_rotation, rotate_writing_plane, PenPose,
};
pub use transform::{compose, invert, rot_x, rot_y, rot_z, Mat3, Transform4, Vec3};
