//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Tensor/graph shape validation failure; names the offending node.
    #[error("graph error at {node}: {message}")]
    Graph { node: String, message: String },

    /// Operation called out of order (e.g. backward before forward).
    #[error("invalid state: {0}")]
    State(String),

    /// Malformed input data (image, checkpoint, manifest, config).
    #[error("format error: {0}")]
    Format(String),

    /// Geometry fit could not be computed on the component.
    #[error("fit error: {0}")]
    Fit(String),

    /// A principal-axis orientation is undefined (a ≈ b).
    #[error("degenerate orientation: {0}")]
    DegenerateOrientation(String),

    /// Planned pose violates workspace limits; names the axis.
    #[error("workspace limit violated on {axis}: {message}")]
    Workspace { axis: String, message: String },

    /// Synthetic generation could not place any vein after bounded retries.
    #[error("generation failed: {0}")]
    Generation(String),

    /// Run configuration is invalid.
    #[error("config error: {0}")]
    Config(String),

    /// Dataset/corpus level problem (missing files, empty manifest, ...).
    #[error("data error: {0}")]
    Data(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
