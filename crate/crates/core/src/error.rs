use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("negative time {0} for the heat semigroup")]
    NegativeTime(f64),
    #[error("shell {shell} is outside the ladder [{min}, {max}]")]
    ShellOutOfRange { shell: i32, min: i32, max: i32 },
    #[error("cutoff profile rejected: {0}")]
    InvalidCutoff(String),
    #[error("time {t} does not increase past {last} for '{tag}'")]
    NonMonotoneTime { tag: String, t: f64, last: f64 },
    #[error("ledger entry '{name}' must be nonnegative, got {value}")]
    NegativeEntry { name: String, value: f64 },
    #[error("negative weight {0}")]
    NegativeWeight(f64),
    #[error("unknown ledger entry '{0}'")]
    UnknownTag(String),
    #[error("inadmissible data parameter: {0}")]
    InadmissibleData(String),
    #[error("CFL violation at step {step} (t = {t}): max|u| = {umax}, dt = {dt} exceeds limit {limit}")]
    Cfl { step: usize, t: f64, umax: f64, dt: f64, limit: f64 },
    #[error("solver configuration: {0}")]
    InvalidConfig(String),
    #[error("field must be real-valued for this operation")]
    NotReal,
    #[error("nonfinite state at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },
}
