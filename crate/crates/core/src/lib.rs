//! Linear systems through convex hull membership.
//!
//! The Triangle Algorithm decides whether a point lies in the convex hull of a
//! finite set, returning either an ε-approximation written as an explicit
//! convex combination or a witness whose bisector separates the point from the
//! hull. On top of it sit two solvers for square `Ax = b`:
//!
//! * [`solve_nonneg`]: solutions with `x ≥ 0`, via `0 ∈ conv{a₁,…,aₙ,-b}`;
//! * [`solve_incremental`]: arbitrary solutions, by shifting `b` along `u = Ae`
//!   until the shifted system has a non-negative solution.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*F64` aliases
//! cover the common case.
//!
//! ```
//! use hullsolve::{solve_incremental, IncrementalConfig, LinearSystemF64};
//!
//! let system = LinearSystemF64::from_rows(&[vec![2.0, -1.0], vec![1.0, 1.0]], vec![0.0, -3.0])?;
//! let out = solve_incremental(&system, &IncrementalConfig::with_epsilon0(1e-8))?;
//! let x = out.x.unwrap();
//! assert!((x[0] + 1.0).abs() < 1e-6 && (x[1] + 2.0).abs() < 1e-6);
//! # Ok::<(), hullsolve::Error>(())
//! ```

// `!(a > b)` is deliberate: NaN must fall into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod error;
pub mod generate;
pub mod hull;
pub mod incremental;
pub mod linalg;
pub mod oracle;
pub mod scalar;
pub mod system;
pub mod trace;
pub mod two_phase;

pub use bounds::{analyze, delta0_lower_bound, tau_star_bounds, Delta0Bounds, SystemAnalysis, TauBounds};
pub use error::{Error, Result};
pub use hull::{
    apply_step, check_witness, find_pivot, pivot_margins, run_hull, step_size, HullConfig, HullInstance, HullOutcome,
    HullOutcomeKind, InitRule, Iterate, PivotRule, Witness,
};
pub use incremental::{
    build_quadratics, next_shift, optimize_shift_tau0, shift_solvability_certificate, solve_incremental,
    IncrementPolicy, IncrementalConfig, ShiftCertificate, ShiftQuadratic, ShiftState,
};
pub use linalg::DenseMatrix;
pub use scalar::Scalar;
pub use system::LinearSystem;
pub use trace::TraceRecord;
pub use two_phase::{
    phase1_witness, recover_solution, select_inner_epsilon, sensitivity_epsilon_prime, solve_nonneg, Delta0Policy,
    SensitivityCheck, SolveConfig, SolveOutcome, SolveStatus, StopRule,
};

pub type DenseMatrixF64 = DenseMatrix<f64>;
pub type DenseMatrixF32 = DenseMatrix<f32>;
pub type LinearSystemF64 = LinearSystem<f64>;
pub type LinearSystemF32 = LinearSystem<f32>;
pub type HullInstanceF64 = HullInstance<f64>;
pub type HullInstanceF32 = HullInstance<f32>;
pub type HullConfigF64 = HullConfig<f64>;
pub type HullConfigF32 = HullConfig<f32>;
pub type HullOutcomeF64 = HullOutcome<f64>;
pub type SolveConfigF64 = SolveConfig<f64>;
pub type SolveConfigF32 = SolveConfig<f32>;
pub type IncrementalConfigF64 = IncrementalConfig<f64>;
pub type SolveOutcomeF64 = SolveOutcome<f64>;
pub type SolveOutcomeF32 = SolveOutcome<f32>;
pub type SystemAnalysisF64 = SystemAnalysis<f64>;
