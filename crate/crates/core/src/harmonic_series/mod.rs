//! Periodic boundary data and constructive solutions of the harmonic
//! Cauchy problem on strips.
//!
//! Boundary functions are stored as [`TrigPolynomial`]s with frequencies
//! `ω_n = 2πn/L`. Solutions are [`HarmonicStripFunction`]s: finite sums of
//! `cosh(ω s)(a cos ωx + b sin ωx)` and `sinh(ω s)/ω (...)` modes plus a
//! harmonic polynomial part, all exactly harmonic. The same frequency is
//! used in both factors of every mode.

mod strip;
mod taylor;
mod trig;

pub use strip::{
    conjugate_harmonic, solve_cauchy, solve_cauchy_dirichlet, solve_cauchy_neumann, CauchyData,
    HarmonicStripFunction, Mode, ScalarJet, DEFAULT_GUARD,
};
pub use taylor::taylor_eval;
pub use trig::{fourier_analyze, fourier_analyze_with_drift, sample_uniform, TrigPolynomial};

pub(crate) use strip::poly_eval;
pub(crate) use trig::parse_lines;

/// Default number of retained Fourier modes.
pub const DEFAULT_MODES: usize = 32;

/// Coefficients below this fraction of the largest one are treated as
/// round-off and dropped before building strip solutions.
pub const DEFAULT_PRUNE: f64 = 1e-13;
