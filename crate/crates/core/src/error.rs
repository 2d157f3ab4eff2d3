use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too coarse: {0} nodes (need at least {1})")]
    GridTooCoarse(usize, usize),

    #[error("grid nodes must start at r=0 and increase strictly (violation at node {0})")]
    NonMonotoneNodes(usize),

    #[error("non-finite value at node {index} (r = {r})")]
    NonFinite { index: usize, r: f64 },

    #[error("parity violation: {0}")]
    Parity(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("insufficient grid extent: need r up to {needed}, grid reaches {available}")]
    InsufficientExtent { needed: f64, available: f64 },

    #[error("not in Kato class: {0}")]
    NotKatoClass(String),

    #[error("tail unresolved: tail estimate {tail:e} vs total {total:e}")]
    TailUnresolved { tail: f64, total: f64 },

    #[error("value {value} at node {index} (r = {r}) outside invertibility range ({lo}, {hi})")]
    OutsideInvertibility {
        index: usize,
        r: f64,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("solution ceased (blow-up): v left ({lo}, {hi}) at r = {r}, t = {t}")]
    SolutionCeased { r: f64, t: f64, lo: f64, hi: f64 },

    #[error("nonlinearity profile: {0}")]
    Profile(String),

    #[error("no singular soliton for N = {0} (need N > 2)")]
    NoSingularSoliton(f64),

    #[error("monotonicity not guaranteed: data satisfy none of the admissible cases")]
    MonotonicityNotGuaranteed,

    #[error("criterion-failure witness inconsistent: {0}")]
    WitnessInconsistent(String),

    #[error("not in asymptotic regime: {0}")]
    NotAsymptotic(String),

    #[error("non-finite energy: {0}")]
    NonFiniteEnergy(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
