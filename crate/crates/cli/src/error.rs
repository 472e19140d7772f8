use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid config: {0}")]
    Schema(String),
    #[error("unknown experiment `{name}`; available experiments: {available}")]
    UnknownExperiment { name: String, available: String },
    #[error("{0}")]
    Compute(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// 2 for config problems, 1 for everything that fails after validation.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Schema(_) | LabError::UnknownExperiment { .. } => 2,
            _ => 1,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        LabError::Io {
            context: context.into(),
            source,
        }
    }
}

macro_rules! compute_from {
    ($($t:path),* $(,)?) => {
        $(impl From<$t> for LabError {
            fn from(e: $t) -> Self {
                LabError::Compute(e.to_string())
            }
        })*
    };
}

compute_from!(
    multact_core::actions::ActionError,
    multact_core::averages::AveragesError,
    multact_core::equations::EquationError,
    multact_core::folner::FolnerError,
    multact_core::linforms::LinFormError,
    multact_core::multfn::MultFnError,
    multact_core::numtheory::NumTheoryError,
    multact_core::uniformity::UniformityError,
);

pub fn fail(msg: impl Into<String>) -> LabError {
    LabError::Compute(msg.into())
}
