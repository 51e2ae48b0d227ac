use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// `line` is the file line, or 0 when the value did not come from a file.
    #[error("{at}: key `{key}`: {message}")]
    Config {
        key: String,
        line: usize,
        at: String,
        message: String,
    },

    #[error("missing required key(s): {}", .0.join(", "))]
    MissingKeys(Vec<String>),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("near-singular closed form (|beta| = {beta_abs:.3e}); use the exact transfer-matrix solver")]
    NearSingularClosedForm { beta_abs: f64 },

    #[error("singular coherence system (condition number {condition:.3e}) at {context}")]
    SingularCoherence { condition: f64, context: String },

    #[error("singular boundary-value solve at {0}")]
    SingularBoundary(String),

    #[error("closed-form solver outside its regime: {0}")]
    Regime(String),

    #[error("time-step precondition violated: {0}")]
    Precondition(String),

    #[error("implicit step did not converge at step {step} after {iterations} iterations")]
    NoConvergence { step: usize, iterations: usize },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("at grid value {value}: {source}")]
    AtGridPoint {
        value: f64,
        #[source]
        source: Box<Error>,
    },
}
