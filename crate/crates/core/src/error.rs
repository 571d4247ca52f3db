use thiserror::Error;

/// Errors raised by the simulation kernels and models.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("size limit exceeded: {what} = {value} (limit {limit})")]
    SizeLimit {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("pattern error: {0}")]
    Pattern(String),

    #[error("photon-number conservation violated: output carries {output} photons, input carries {input}")]
    Conservation { output: usize, input: usize },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("closed form not applicable: {0}")]
    ClosedFormInapplicable(String),

    #[error("cannot condition on an outcome of zero probability")]
    ZeroProbabilityCondition,

    #[error("cannot normalize by the norm of a zero matrix")]
    DegenerateNorm,

    #[error("truncation tail mass {tail:.3e} exceeds {limit:.1e}")]
    TailMass { tail: f64, limit: f64 },

    #[error("quadrature did not converge: order doubling changed the result by {change:.3e}")]
    Accuracy { change: f64 },

    #[error("infeasible at desk scale: {0}")]
    Feasibility(String),

    #[error("distribution table is not normalized (total {total})")]
    Unnormalized { total: f64 },

    #[error("distribution supports differ")]
    SupportMismatch,

    #[error("degenerate table: {0}")]
    DegenerateTable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
