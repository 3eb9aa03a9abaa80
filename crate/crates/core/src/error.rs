use thiserror::Error;

/// Errors raised while validating inputs or evaluating the stability machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field `{0}` is not finite")]
    NonFinite(&'static str),

    #[error("hyperbolicity violated: {0}")]
    HyperbolicityViolated(String),

    #[error("interface constraint violated: {component} = {actual} but the planar constant solution requires {expected}")]
    InterfaceConstraintViolated {
        component: &'static str,
        expected: f64,
        actual: f64,
    },

    #[error("expansion condition violated: kappa = {0} > 0 (plasma must not shrink)")]
    ExpansionViolated(f64),

    #[error("epsilon out of range: {0}")]
    EpsilonOutOfRange(String),

    #[error("plasma and vacuum tangential magnetic fields are collinear (H2*Hv3 - H3*Hv2 = {0}); energy method inapplicable")]
    CollinearFields(f64),

    #[error("state is not in the particular case v1 = v2 = H2 = Hv3 = 0, H3*Hv2 != 0")]
    NotPCase,

    #[error("degenerate dispersion denominator at tau = {re} + {im}i")]
    DegenerateDenominator { re: f64, im: f64 },

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("invalid scan specification: {0}")]
    InvalidSpec(String),

    #[error("region consistency violation at (E1 = {e1}, H2 = {h2}): {reason}")]
    ConsistencyViolation { e1: f64, h2: f64, reason: String },

    #[error("malformed input: {0}")]
    Input(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
