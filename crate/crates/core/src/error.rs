use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Lorentz index {0} out of range 0..=3")]
    InvalidIndex(usize),

    #[error("singular matrix (condition estimate {condition:.3e}); evaluation at or too near a pole")]
    SingularMatrix { condition: f64 },

    #[error("prefix momentum {prefix} is on shell (|p²−m²| = {distance:.3e})")]
    OnShell { prefix: usize, distance: f64 },

    #[error("λ path crosses the mass shell of prefix {prefix} at λ = {lambda:.6}")]
    OnShellCrossing { prefix: usize, lambda: f64 },

    #[error("quadrature error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    QuadratureTolerance { estimate: f64, tolerance: f64 },

    #[error("finite-difference step {step:.3e} too small: rounding dominates")]
    StepTooSmall { step: f64 },

    #[error("coincident poles: prefixes {i} and {j} satisfy |p_i² − p_j²| = {gap:.3e}")]
    DegeneratePoles { i: usize, j: usize, gap: f64 },

    #[error("p_i·k_j vanishes for pole {pole}, photon {photon}")]
    VanishingDot { pole: usize, photon: usize },

    #[error("shifted prefix {prefix} is on shell for Θ = {theta}")]
    OnShellShift { theta: String, prefix: usize },

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("extrapolation does not converge: {0}")]
    NonConvergent(String),

    #[error("Fock truncation insufficient: tail bound {bound:.3e} exceeds tolerance {tolerance:.3e}")]
    TruncationInsufficient { bound: f64, tolerance: f64 },

    #[error("truncated Fock space of dimension {dim} exceeds the limit {limit}")]
    FockDimension { dim: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),
}
