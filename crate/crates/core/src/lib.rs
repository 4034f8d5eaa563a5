//! Kinematics, singularity analysis and isotropic design of the planar 3-PRR
//! parallel manipulator.
//!
//! The crate is organised bottom-up: [`geometry`] holds design parameters, poses and
//! working modes; [`kinematics`] solves the inverse and direct problems and assembles
//! the Jacobian matrices; [`conditioning`], [`singularity`] and [`isotropy`] analyse
//! those matrices; [`sweep`] maps conditioning over the workspace and extracts
//! isoconditioning loci.

pub mod conditioning;
pub mod geometry;
pub mod isotropy;
pub mod kinematics;
pub mod optim;
pub mod singularity;
pub mod sweep;

pub use conditioning::{condition_report, diag_condition, ConditioningReport, KappaVariant};
pub use geometry::{default_params, DesignParams, GeometryError, Pose, Sign, WorkingMode};
pub use isotropy::{characteristic_length_closed, find_isotropic, CharacteristicLength, IsotropyError, IsotropySearch};
pub use kinematics::{
    assemble_matrices, direct_kinematics, inverse_kinematics, KinematicMatrices, KinematicsError, LimbState,
};
pub use singularity::{classify, Classification, SingularityReport};
pub use sweep::{sweep, IsoLoci, MatrixKind, SweepError, SweepGrid, SweepSpec};
