use crate::quad::QuadratureResult;

/// Errors raised by the numerical kernel.
///
/// The variants follow the failure classes of the operations: bad inputs
/// ([`Error::Domain`], [`Error::UnsupportedDimension`], [`Error::Config`],
/// [`Error::Geometry`]) versus numerical trouble at run time
/// ([`Error::Accuracy`], [`Error::State`], [`Error::ThresholdNotFound`]).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("unsupported dimension n = {n}: {reason}")]
    UnsupportedDimension { n: usize, reason: &'static str },
    #[error("unsupported derivative order {0} (max 2)")]
    UnsupportedDerivative(u8),
    #[error("quadrature did not reach tolerance within {} evaluations (best {} +/- {})", best.evaluations, best.value, best.abs_error)]
    Accuracy { best: QuadratureResult },
    #[error("configuration error: {0}")]
    Config(&'static str),
    #[error("CFL violation: dt = {dt:e} exceeds the stable limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },
    #[error("metric lost positive definiteness at grid point {index}")]
    NotPositiveDefinite { index: usize },
    #[error("geometry error: {0}")]
    Geometry(&'static str),
    #[error("no threshold found: the bound still fails at i = {i_max}")]
    ThresholdNotFound { i_max: f64 },
    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),
}

impl Error {
    /// `true` for failures caused by the inputs rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::UnsupportedDimension { .. }
                | Error::UnsupportedDerivative(_)
                | Error::Config(_)
                | Error::Geometry(_)
                | Error::Unsupported(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
