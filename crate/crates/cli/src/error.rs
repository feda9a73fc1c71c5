use std::path::PathBuf;

use thiserror::Error;

use crate::config::Kind;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{kind}: {source}")]
    Scenario {
        kind: Kind,
        #[source]
        source: fracdisp_core::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: fracdisp_core::Error,
    },
}

impl CliError {
    pub fn scenario(kind: Kind) -> impl FnOnce(fracdisp_core::Error) -> Self {
        move |source| CliError::Scenario { kind, source }
    }
}
