use std::fmt;
use std::path::PathBuf;

use repsel_core::ErrorCategory;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Pipeline step an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Distance,
    Selection,
    Evaluation,
    Output,
    Manifest,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Distance => "distance",
            Stage::Selection => "selection",
            Stage::Evaluation => "evaluation",
            Stage::Output => "output",
            Stage::Manifest => "manifest",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("[{stage}] {source}")]
    Core {
        stage: Stage,
        #[source]
        source: repsel_core::Error,
    },
    #[error("[config] {0}")]
    Config(String),
    #[error("[{stage}] {}: {source}", path.display())]
    Io {
        stage: Stage,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("[manifest] {0}")]
    Manifest(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core { source, .. } => match source.category() {
                ErrorCategory::Config => EXIT_CONFIG,
                ErrorCategory::Data => EXIT_DATA,
            },
            CliError::Io {
                stage: Stage::Config,
                ..
            } => EXIT_CONFIG,
            CliError::Io { .. } | CliError::Manifest(_) => EXIT_DATA,
        }
    }
}

/// Tags core errors with the stage they surfaced in.
pub trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, CliError>;
}

impl<T> AtStage<T> for repsel_core::Result<T> {
    fn at(self, stage: Stage) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core { stage, source })
    }
}

pub fn io_at(stage: Stage, path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io {
        stage,
        path,
        source,
    }
}
