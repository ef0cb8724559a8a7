//! Error type shared across the library.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("curve dimension must be 2 or 3, got {0}")]
    InvalidDims(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid size {0} too small (need at least {1})")]
    GridTooSmall(usize, usize),

    #[error("perturbation amplitude must satisfy |eps| < 1, got {0}")]
    PerturbationTooLarge(f64),

    #[error("curve has zero length")]
    ZeroLength,

    #[error("arc-length inversion failed to converge at s = {0}")]
    ArcLengthInversion(f64),

    #[error("projection direction has zero norm")]
    ZeroVector,

    #[error("coincident points at grid offset ({i}, {j}): chord below 1e-14 * length")]
    CoincidentPoints { i: usize, j: usize },

    #[error("samples fail the embeddedness check (min chord/parameter-distance ratio {ratio:.3e} < {tol:.3e} * L)")]
    NotEmbedded { ratio: f64, tol: f64 },

    #[error("operation requires arc-length samples; call resample_arclength first")]
    NotArcLength,

    #[error("operation requires a planar convex curve")]
    NotConvexPlanar,

    #[error("sin-power integral diverges for exponent {0} <= -1")]
    DivergentExponent(f64),

    #[error("gamma function requires a positive argument, got {0}")]
    GammaDomain(f64),

    #[error("degenerate denominator: {0} too close to zero")]
    DegenerateDenominator(f64),
}
