use thiserror::Error;

/// Errors shared by the solver, zipper, energy, and field modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("driving function evaluated at t = {t} beyond horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("adaptive step size underflow at t = {t} (dt = {dt})")]
    StepSizeUnderflow { t: f64, dt: f64 },

    #[error("force point approached within {gap} of the driving value at t = {t}")]
    ForcePointApproach { t: f64, gap: f64 },

    #[error("numerical blowup at t = {t}")]
    NumericalBlowup { t: f64 },

    #[error("polyline leaves the domain at vertex {index} (self-intersection or boundary touch)")]
    SelfIntersection { index: usize },

    #[error("degenerate zipper step at vertex {index}: consecutive vertices coincide")]
    DegenerateStep { index: usize },

    #[error("capacity increment {increment} at vertex {index} exceeds 10x the median {median}")]
    VertexSpacing {
        index: usize,
        increment: f64,
        median: f64,
    },

    #[error("branch unwrapping jump of {jump} rad at step {step} exceeds the pi guard")]
    BranchJump { step: usize, jump: f64 },

    #[error("grid cell at r = {r} contains a branch point")]
    SingularityOnGrid { r: f64 },

    #[error("renormalized Dirichlet energy did not converge: last delta {delta}")]
    NonConvergent { delta: f64 },

    #[error("driving function flagged as not absolutely continuous (refinement growth {growth})")]
    NotAbsolutelyContinuous { growth: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
