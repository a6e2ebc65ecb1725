use thiserror::Error;

/// Errors surfaced by the library.
///
/// Modeling violations (a candidate economy failing its assumptions) are not
/// errors; they are reported as data by [`crate::economy::validate_economy`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("bad dimensions: {0}")]
    BadDimensions(String),

    #[error("price out of domain: {0}")]
    PriceOutOfDomain(String),

    #[error("nonpositive wealth: m = {0}")]
    NonpositiveWealth(f64),

    #[error("parameter overflow in power evaluation")]
    ParameterOverflow,

    #[error("Slutsky undefined at boundary")]
    SlutskyAtBoundary,

    #[error("finite-difference step out of range: {0}")]
    StepOutOfRange(f64),

    #[error("index out of range: {0}")]
    IndexOutOfRange(usize),

    #[error("singular Jacobian")]
    SingularJacobian,

    #[error("no equilibrium found")]
    NoEquilibrium,

    #[error("degenerate equilibrium (chi = 0)")]
    DegenerateEquilibrium,

    #[error("price path touches the boundary")]
    BoundaryPath,

    #[error("path endpoints do not match")]
    EndpointMismatch,

    #[error("partial-equilibrium view requires two goods")]
    NotTwoGoods,

    #[error("invalid economy file: {0}")]
    InvalidEconomyFile(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
