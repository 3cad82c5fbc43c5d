use thiserror::Error;

/// Harness failures, grouped by the exit code the CLI reports.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("guard violation: {message}\n  hint: {hint}")]
    Guard { message: String, hint: String },

    #[error("invariant failure: {0}")]
    Invariant(String),

    #[error("I/O: {0}")]
    Io(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Invariant(_) => 2,
            HarnessError::Guard { .. } => 3,
            HarnessError::Config(_) => 4,
            HarnessError::Io(_) => 1,
        }
    }
}

impl From<mfl_core::Error> for HarnessError {
    fn from(e: mfl_core::Error) -> Self {
        use mfl_core::Error as E;
        let message = e.to_string();
        match e {
            E::MemoryGuard { .. } => HarnessError::Guard {
                message,
                hint: "lower N or the point counts, or raise memory_cap".into(),
            },
            E::AliasingGuard { max_dt, .. } => HarnessError::Guard {
                message,
                hint: format!("set run.dt <= {max_dt:e}"),
            },
            E::Unresolvable { required_points, .. } => HarnessError::Guard {
                message,
                hint: format!("use at least {required_points} points per axis or a wider interaction"),
            },
            E::SupportTooWide(_) => HarnessError::Guard {
                message,
                hint: "enlarge the free box or shrink the interaction support".into(),
            },
            E::NotSymmetric(_) | E::NotNormalized(_) | E::BoundaryViolation { .. } | E::ZeroNorm => {
                HarnessError::Invariant(message)
            }
            E::Io(_) | E::Container(_) => HarnessError::Io(message),
            _ => HarnessError::Config(message),
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;
