//! Nonlinear model reduction: benchmark models, Galerkin/DEIM reduction,
//! time integration, and parametrized test functions.

pub mod fitzhugh;
pub mod galerkin;
pub mod integrate;
pub mod model;
pub mod paramfun;
pub mod pipeline;
pub mod rc;

pub use fitzhugh::{build_fn_model, build_fn_model_with, FnParams};
pub use galerkin::{galerkin_reduce, reduced_nonlinear_eval, ReducedModel};
pub use integrate::{simulate, ImexSystem, Trajectory};
pub use model::{validate_pattern, FomModel, Mass, Nonlinearity, SparseMatrix};
pub use paramfun::{approximation_sweep, linspace, param_fun_snapshots, ParamFunKind, SweepResult};
pub use rc::{build_rc_model, build_rc_model_with_input, RcInput};
