//! bvpkit: two-point boundary value problem solvers.
//!
//! Two independent engines solve second-order problems
//! `v'' = f(r, v, v')` with a Neumann condition on the left and a Dirichlet
//! condition on the right:
//!
//! - [`shooting`] converts the problem to a family of initial value
//!   problems parameterised by `p = v(a)`, integrates each with an adaptive
//!   Dormand–Prince 5(4) pair, and bisects `p` until the terminal value
//!   matches the right boundary condition.
//! - [`fdm`] discretises the problem on a uniform mesh with second-order
//!   differences and drives the resulting nonlinear system to a root with
//!   Newton iteration and a banded direct solve.
//!
//! The [`problems`] module ships the Kerr-medium beam-profile equation
//! (`v'' = -(1/r) v' + v - 2 v^3`) with brackets and initial guesses for its
//! monotone decaying and one-node solutions, plus a manufactured problem
//! with a closed-form solution for order-of-accuracy measurements.
//!
//! ```
//! use bvpkit::problems::{decaying_bracket, kerr_problem};
//! use bvpkit::shooting::{solve_shooting, ShootingConfig};
//!
//! let problem = kerr_problem(10.0);
//! let sol = solve_shooting(&problem, &decaying_bracket(), &ShootingConfig::new(1e-6)).unwrap();
//! assert!(sol.report.converged);
//! assert!(sol.p_star > 1.5 && sol.p_star < 2.0);
//! ```

pub mod core;
mod error;
pub mod fdm;
pub mod ivp;
pub mod problems;
pub mod shooting;

pub use crate::core::{
    build_mesh, count_sign_changes, profile_max_abs_difference, Mesh, ProblemDefinition,
    SolutionProfile, SolverMethod, SolverReport,
};
pub use crate::error::{Error, Result};
