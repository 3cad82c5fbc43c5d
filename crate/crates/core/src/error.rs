use thiserror::Error;

/// Errors raised by grid, solver, counting and bound routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("boundary violation: |f| = {value:e} at a Dirichlet node (tolerance {tolerance:e})")]
    BoundaryViolation { value: f64, tolerance: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("interaction kernel is not integrable: {0}")]
    NotIntegrable(String),

    #[error("kernel support exceeds the padded box: {0}")]
    SupportTooWide(String),

    #[error("time step too large: phase increment {increment:.3} exceeds pi (reduce dt below {max_dt:e})")]
    AliasingGuard { increment: f64, max_dt: f64 },

    #[error("interaction not resolvable: scaled support {support:e} < 3 grid spacings ({spacing:e}); need at least {required_points} points per axis")]
    Unresolvable {
        support: f64,
        spacing: f64,
        required_points: usize,
    },

    #[error("memory guard: {required} bytes required, cap is {cap} bytes")]
    MemoryGuard { required: u64, cap: u64 },

    #[error("state is not permutation symmetric (residual {0:e})")]
    NotSymmetric(f64),

    #[error("state has zero norm after symmetrization")]
    ZeroNorm,

    #[error("not normalized: norm {0}")]
    NotNormalized(f64),

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("malformed container: {0}")]
    Container(String),

    #[error("I/O: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
