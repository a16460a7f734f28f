//! Bundled semidefinite solver and SDPA exchange.

mod barrier;
mod sdpa;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, max_eig};
use crate::lmi::{LmiProblem, VarId};

pub use sdpa::{export_sdpa, import_sdpa, import_solution};

/// Per-block residual bound, relative to `1 + ‖constant‖max`.
pub const FEASIBILITY_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Cap on outer path-following stages.
    pub max_iterations: usize,
    /// Relative duality-gap target.
    pub tolerance: f64,
    /// Factor applied to the barrier weight `1/t` after each stage.
    pub barrier_reduction: f64,
    /// Normalise each block by its constant's largest entry.
    pub scaling: bool,
    /// Box `|x_i| < box_bound` keeping the barrier bounded.
    pub box_bound: f64,
    /// Slack level phase 1 drives to for problems without an objective.
    pub feasibility_target: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 200,
            tolerance: 1e-9,
            barrier_reduction: 0.2,
            scaling: true,
            box_bound: 1e7,
            feasibility_target: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Feasible,
    Infeasible,
    NumericalFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// Values indexed by `VarId`.
    pub point: Vec<f64>,
    pub objective_value: Option<f64>,
    /// Largest `λmax(F_k(x)) / (1 + ‖C_k‖max)` over all blocks.
    pub max_constraint_eig: f64,
    /// Outer path-following stages.
    pub iterations: usize,
    pub newton_steps: usize,
    /// Best phase-1 slack in normalised units; positive when infeasible.
    pub phase1_slack: Option<f64>,
    /// Running best phase-1 slack after each accepted step.
    pub phase1_history: Vec<f64>,
    pub message: String,
}

impl SdpSolution {
    pub(crate) fn empty(n: usize) -> Self {
        SdpSolution {
            status: SolveStatus::NumericalFailure,
            point: vec![0.0; n],
            objective_value: None,
            max_constraint_eig: f64::INFINITY,
            iterations: 0,
            newton_steps: 0,
            phase1_slack: None,
            phase1_history: Vec::new(),
            message: String::new(),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == SolveStatus::Feasible
    }

    pub fn value(&self, id: VarId) -> f64 {
        self.point[id.0]
    }
}

/// Solves `min cᵀx` subject to every block of the problem.
pub fn solve(problem: &LmiProblem, options: &SolverOptions) -> Result<SdpSolution> {
    problem.check_well_formed()?;
    if !(options.barrier_reduction > 0.0 && options.barrier_reduction < 1.0) {
        return Err(Error::InvalidArgument {
            name: "barrier_reduction",
            reason: format!("must lie in (0, 1), got {}", options.barrier_reduction),
        });
    }
    if !(options.tolerance > 0.0 && options.max_iterations > 0 && options.box_bound > 0.0) {
        return Err(Error::InvalidArgument {
            name: "options",
            reason: "tolerance, max_iterations, and box_bound must be positive".into(),
        });
    }
    Ok(barrier::solve_impl(problem, options))
}

/// Largest eigenvalue of each `F_k(x)`, constraints first then the
/// positive-definiteness blocks.
pub fn residual(problem: &LmiProblem, point: &[f64]) -> Vec<f64> {
    problem
        .nsd_blocks()
        .iter()
        .map(|b| if b.dim == 0 { f64::NEG_INFINITY } else { max_eig(&b.eval(point)) })
        .collect()
}

/// `1 + ‖C_k‖max` for every block in [`residual`] order.
pub fn block_scales(problem: &LmiProblem) -> Vec<f64> {
    problem
        .nsd_blocks()
        .iter()
        .map(|b| 1.0 + max_abs(&b.constant))
        .collect()
}
