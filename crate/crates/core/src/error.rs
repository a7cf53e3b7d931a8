use thiserror::Error;

/// Errors raised by the simulator and the cost model.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("GeometryError: {0}")]
    Geometry(String),

    #[error("EmptyBranchSet: resistor network needs at least one input")]
    EmptyBranchSet,

    #[error("ConfigError: {0}")]
    Config(String),

    #[error("RatioUndefined: {0} is zero")]
    RatioUndefined(&'static str),

    #[error("ParseError: {0}")]
    Parse(String),

    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    pub fn geometry(msg: impl Into<String>) -> Self {
        SimError::Geometry(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        SimError::Config(msg.into())
    }

    /// True for errors caused by bad inputs rather than the environment.
    pub fn is_config(&self) -> bool {
        !matches!(self, SimError::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
