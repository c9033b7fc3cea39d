//! Small dense optimization kernels.

mod lp;
mod multistart;

pub use lp::{lp_calls, solve_lp, LpProblem, LpSolution, LpStatus, MAX_ROWS, MAX_VARS};
pub(crate) use lp::simplex_combination;
pub use multistart::{
    minimize_nonconvex, start_rng, unit_f64, MultistartConfig, MultistartResult, StartKind, StartRecord,
};
