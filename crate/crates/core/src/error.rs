use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {max_asymmetry:.3e})")]
    NotHermitian { max_asymmetry: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("principal argument of zero is undefined")]
    ZeroArgument,

    #[error("quadrature needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state {index} is not normalized (norm {norm:.15})")]
    NotNormalized { index: usize, norm: f64 },

    #[error("spectral gap {gap:.3e} below floor at chi = {chi}")]
    GapClosed { chi: f64, gap: f64 },

    #[error(
        "overlap between states {from} and {to} has modulus {modulus:.3e} below the sanity floor; refine the grid"
    )]
    OverlapBelowFloor { from: usize, to: usize, modulus: f64 },

    #[error("stencil of width {width} is too wide for a grid of {points} points")]
    StencilTooWide { width: usize, points: usize },

    #[error("derivative order {0} not supported (1..=4)")]
    UnsupportedOrder(usize),

    #[error("path gauge is {found}, expected {expected}")]
    WrongGauge { expected: &'static str, found: &'static str },

    #[error("imaginary residue {residue:.3e} of C{order} exceeds tolerance")]
    ImaginaryResidue { order: usize, residue: f64 },

    #[error("degenerate spectrum (gap {gap:.3e}); commutator equation is underdetermined")]
    Degenerate { gap: f64 },

    #[error("derivative has diagonal {max_diagonal:.3e} in the eigenbasis; i[H, O] cannot reproduce it")]
    NoCommutatorSolution { max_diagonal: f64 },

    #[error("invalid gauge function: {0}")]
    InvalidGauge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
