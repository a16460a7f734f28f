//! Design and verification of observers with intersample injection for
//! Lipschitz plants whose outputs are sampled sporadically.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds plant, sampling, and gain data and the error-system matrices.
//! * [`lmi`] builds matrix-inequality problems as affine expressions in scalar variables.
//! * [`sdp`] solves them with a dense barrier method and exchanges SDPA files.
//! * [`design`] runs the γ-minimisation, T2-maximisation, and sweep procedures.
//! * [`sim`] integrates the hybrid closed loop.
//! * [`verify`] re-checks certificates and trajectories independently of the solver.

pub mod benchmarks;
pub mod design;
pub mod error;
pub mod linalg;
pub mod lmi;
pub mod model;
pub mod report;
pub mod sdp;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Mat, Vector};
pub use lmi::{Certificate, LmiProblem, VarId};
pub use model::{
    assemble_error_matrices, factorize_f, validate_plant, DesignMethod, ErrorSystemMatrices, GainTag,
    Nonlinearity, ObserverGains, PlantModel, SamplingSpec,
};
