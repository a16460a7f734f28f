//! Matrix-inequality problems in scalar decision variables.

mod build;
mod expr;
mod hinf;
mod mfun;
mod problem;

pub use build::{
    build_corollary_problem, build_design_problem, build_design_problem_with, build_existence_problem,
    build_verification_problem, count_scalar_variables, Corollary, CorollaryBase, DesignOptions, Performance,
};
pub use expr::{AffineExpr, AffineSymMatrix, VarId, Variable};
pub use hinf::hinf_necessary;
pub use mfun::{convex_decomposition, eval_m, eval_m_with};
pub use problem::{
    Certificate, Constraint, CorollaryVariant, LmiProblem, ProblemBuilder, ProblemKind, ProblemMeta, PsdBlock,
    Strictness, NONSTRICT_MARGIN, PD_MARGIN, STRICT_MARGIN,
};
