use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("{module} failed for {case}: {source}")]
    Numerical {
        module: &'static str,
        case: String,
        #[source]
        source: berry_cumulants::Error,
    },
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl RunError {
    /// 1 for configuration problems, 2 for numerical ones and for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical { .. } | RunError::Output { .. } => 2,
        }
    }
}

/// Attaches the module and case to a core error.
pub(crate) trait Context<T> {
    fn during(self, module: &'static str, case: impl FnOnce() -> String) -> Result<T, RunError>;
}

impl<T> Context<T> for berry_cumulants::Result<T> {
    fn during(self, module: &'static str, case: impl FnOnce() -> String) -> Result<T, RunError> {
        self.map_err(|source| RunError::Numerical { module, case: case(), source })
    }
}
