use thiserror::Error;

/// Errors raised by the staffing library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    /// A data invariant does not hold; the message names it.
    #[error("validation error: {0}")]
    Invalid(String),

    #[error("unknown profession `{0}`")]
    UnknownProfession(String),

    #[error("unknown care `{0}`")]
    UnknownCare(String),

    #[error("unknown series `{0}`")]
    UnknownSeries(String),

    #[error("sector {sector} out of range (territory has {sector_count} sectors)")]
    SectorOutOfRange { sector: usize, sector_count: usize },

    #[error("care `{care}` is not remote for `{profession}` and cannot be served at the depot")]
    NotRemote { care: String, profession: String },

    /// One demand unit alone does not fit in a working day.
    #[error("demand of care {care} at sector {sector} cannot be served within the daily limit")]
    InfeasibleDemand { sector: usize, care: usize },

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("coverage ratio {0} is not achievable")]
    InfeasibleCoverage(f64),

    #[error("missing slave assignments for scenario {scenario}; re-solve with --keep-assignments")]
    MissingAssignments { scenario: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
