//! Library side of the `opmeans` command: problem files, the compute
//! payload and representing-function tables.

pub mod compute;
pub mod error;
pub mod phi_table;
pub mod problem_file;

pub use compute::{compute, ComputeOutput};
pub use error::{CliError, Result};
pub use phi_table::{phi_rows, to_csv, PhiRow, TGrid};
pub use problem_file::{max_dim_from_env, InitName, ProblemFile, MAX_DIM_ENV, SYMMETRY_TOL};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for unreadable or invalid input.
pub const EXIT_INPUT: i32 = 1;
/// Exit status when the solver stops without converging.
pub const EXIT_NOT_CONVERGED: i32 = 2;
/// Exit status when a theorem-backed verification check reports violations.
pub const EXIT_VERIFY_FAILED: i32 = 3;
