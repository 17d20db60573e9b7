use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Pipeline stage that produced a reflection failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Steklov,
    ConformalFactor,
    Normalization,
    PushForward,
    Completion,
    Schwarz,
    Ode,
    Matching,
    Punctures,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Steklov => "steklov",
            Stage::ConformalFactor => "conformal-factor",
            Stage::Normalization => "normalization",
            Stage::PushForward => "push-forward",
            Stage::Completion => "holomorphic-completion",
            Stage::Schwarz => "schwarz",
            Stage::Ode => "reflection-ode",
            Stage::Matching => "axis-matching",
            Stage::Punctures => "punctures",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sample abscissae are not uniformly spaced (gap {gap} vs expected {expected})")]
    NonUniformSpacing { gap: f64, expected: f64 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("period mismatch: {left} vs {right}")]
    PeriodMismatch { left: f64, right: f64 },

    #[error("evaluation left the truncation domain: |omega*y| = {omega_y} exceeds {bound}")]
    TruncationExit { omega_y: f64, bound: f64 },

    #[error("degenerate parametrization at ({x}, {y}): |psi_x| = {speed}")]
    Degenerate { x: f64, y: f64, speed: f64 },

    #[error("conformal factor trace is not positive: {value} at x = {x}")]
    NonPositiveFactor { x: f64, value: f64 },

    #[error("edge is not on the unit sphere: max ||psi| - 1| = {residual} at x = {x}")]
    NotOnSphere { residual: f64, x: f64 },

    #[error("Steklov residual {residual} exceeds tolerance {tol}")]
    SteklovResidual { residual: f64, tol: f64 },

    #[error("Schwarz residual {residual} exceeds tolerance {tol}")]
    SchwarzResidual { residual: f64, tol: f64 },

    #[error("axis matching residual {residual} exceeds tolerance {tol}")]
    AxisMismatch { residual: f64, tol: f64 },

    #[error("resonant mode with frequency {omega} cannot be solved: {reason}")]
    Resonance { omega: f64, reason: String },

    #[error("Newton iteration did not converge for target {target}")]
    NewtonDiverged { target: Complex64 },

    #[error("point {point} lies within the exclusion disk of puncture {puncture}")]
    InsidePuncture {
        point: Complex64,
        puncture: Complex64,
    },

    #[error("zero of the derivative on a cell boundary after {attempts} grid perturbations")]
    ZeroOnCellBoundary { attempts: usize },

    #[error("point y = {y} is outside the domain ({lo}, {hi})")]
    OutOfDomain { y: f64, lo: f64, hi: f64 },

    #[error("unknown edge {0}")]
    UnknownEdge(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("extension aborted after lineage [{completed}]: {source}")]
    Extension {
        completed: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
