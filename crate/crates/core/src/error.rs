use thiserror::Error;

pub type Result<T, E = SimError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SimError {
    /// A model parameter violates its invariant.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("arm index {0} out of range (expected 0..12)")]
    ArmIndex(usize),

    /// The pair unit wrenches cannot realise a requested allocation target.
    #[error(
        "allocation is rank deficient (rank {rank} of 6): cannot produce {target} \
         (residual {residual:.3e})"
    )]
    RankDeficient {
        rank: usize,
        target: &'static str,
        residual: f64,
    },

    /// Scenario configuration failed validation; `field` is the dotted config path.
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("failed to parse config: {0}")]
    ConfigParse(#[from] toml::de::Error),

    #[error("simulation state became non-finite at step {step}")]
    NonFinite { step: u64 },

    #[error("malformed record: {0}")]
    Record(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SimError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        SimError::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        SimError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
