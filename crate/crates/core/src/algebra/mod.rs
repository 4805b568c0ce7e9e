//! Eigenvalue curves of `phi_+`, the pencil equivalence, pure states,
//! membership tests and the separation experiments.

mod curves;
mod eigen;
mod membership;
mod separation;
mod states;

pub use curves::{eigencurves, eigencurves_with, EigencurveTable};
pub use eigen::{eigendecompose_spd, generalized_eigen_check, pencil_eigenvalues, PencilCheck};
pub use membership::{membership_frak_c, membership_t, ConditionRecord, FiberTolerances, MembershipReport};
pub use separation::{
    approx_identity_limit, fiber_vector_test, hermite_frame_det, separation_exponent, FiberTest, SeparationExponent,
    FIBER_TOL,
};
pub use states::{pure_state_eval, ConstantField, MatrixField, PhiField, PureState, Side, Stratum};
