use thiserror::Error;

/// Errors raised by the pricing engine.
///
/// Input problems (bad files, invalid parameters, inconsistent dates) are kept
/// apart from numerical failures so that callers such as the command-line tool
/// can map them onto different exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("monomial outside basis: degree {degree} exceeds {max}")]
    MonomialOutsideBasis { degree: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("moment overflow: matrix exponential produced non-finite values")]
    MomentOverflow,

    #[error("non-finite matrix entries")]
    NonFiniteMatrix,

    #[error("jump moments unavailable for exponent {0:?}")]
    JumpMomentsUnavailable(Vec<u32>),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("deterministic dividends: all stochastic dividend loadings are zero")]
    DeterministicDividends,

    #[error("closed form unavailable; use numeric eigenvalues (kappa is not triangular)")]
    NotTriangular,

    #[error("invalid state for discounting: q'H1(x) = {0}")]
    InvalidDiscountState(f64),

    #[error("stock price infinite: max Re eig(G2) = {max_eig} >= gamma - beta = {gap}")]
    StockPriceInfinite { max_eig: f64, gap: f64 },

    #[error("invalid dates: {0}")]
    InvalidDates(String),

    #[error("zero annuity")]
    ZeroAnnuity,

    #[error("infeasible moments: {0}")]
    InfeasibleMoments(String),

    #[error("maxent fit failed after {iterations} iterations (gradient norm {residual:e})")]
    MaxEntFailed { iterations: usize, residual: f64 },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("price {price} outside no-arbitrage band: {bound}")]
    NoArbitrage { price: f64, bound: String },

    #[error("simulation horizon {horizon} shorter than instrument maturity {maturity}")]
    HorizonTooShort { horizon: f64, maturity: f64 },

    #[error("infeasible constraints: {0}")]
    Infeasible(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::MomentOverflow
                | Error::NonFiniteMatrix
                | Error::MaxEntFailed { .. }
                | Error::Quadrature(_)
                | Error::Singular(_)
                | Error::StockPriceInfinite { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
