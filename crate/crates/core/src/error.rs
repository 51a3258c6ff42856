use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("dimension lists differ")]
    DimsMismatch,
    #[error("factor {factor} has dimension {dim}, expected a two-level factor")]
    NotTwoLevel { factor: usize, dim: usize },
    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("requested {requested} entries, capacity is {cap}")]
    Capacity { requested: u128, cap: u128 },
    #[error("non-finite amplitude or parameter")]
    NonFinite,
    #[error("amplitudes are not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },
    #[error("degenerate two-level amplitudes (|a| is 0 or 1)")]
    Degenerate,
    #[error("state or density carries zero total mass")]
    EmptyState,
    #[error("label function produced a value outside the declared codomain")]
    OutsideCodomain,
    #[error("coarse map is not defined on every label")]
    MapNotTotal,
    #[error("visibility is undefined for an all-zero intensity")]
    UndefinedVisibility,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }

    /// Whether the error comes from a size cap rather than a bad input.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}
