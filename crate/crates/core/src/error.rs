use thiserror::Error;

/// Typed failures shared by every module. `name()` is the stable identifier
/// used in machine-readable CLI output.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid operand: {0}")]
    InvalidOperand(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("non-invertible block: {0}")]
    NonInvertibleBlock(String),
    #[error("matrix is not even: {0}")]
    NotEven(String),
    #[error("matrix is not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("berezinian routes disagree: {0}")]
    RouteMismatch(String),
    #[error("non-invertible jacobian: {0}")]
    NonInvertibleJacobian(String),
    #[error("division by non-unit: {0}")]
    DivisionByNonUnit(String),
    #[error("empty precision window: {0}")]
    EmptyWindow(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("wrong weight: {0}")]
    WrongWeight(String),
    #[error("change is not superconformal: {0}")]
    NotSuperconformal(String),
    #[error("no invertible minor: {0}")]
    NoInvertibleMinor(String),
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("no punctures: {0}")]
    NoPunctures(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("odd number of Ramond punctures: {0}")]
    OddRamondCount(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidOperand(_) => "InvalidOperand",
            Error::NotInvertible(_) => "NotInvertible",
            Error::InvalidShape(_) => "InvalidShape",
            Error::NonInvertibleBlock(_) => "NonInvertibleBlock",
            Error::NotEven(_) => "NotEven",
            Error::NotNilpotent(_) => "NotNilpotent",
            Error::RouteMismatch(_) => "RouteMismatch",
            Error::NonInvertibleJacobian(_) => "NonInvertibleJacobian",
            Error::DivisionByNonUnit(_) => "DivisionByNonUnit",
            Error::EmptyWindow(_) => "EmptyWindow",
            Error::InsufficientPrecision(_) => "InsufficientPrecision",
            Error::WrongWeight(_) => "WrongWeight",
            Error::NotSuperconformal(_) => "NotSuperconformal",
            Error::NoInvertibleMinor(_) => "NoInvertibleMinor",
            Error::DegenerateConfiguration(_) => "DegenerateConfiguration",
            Error::NoPunctures(_) => "NoPunctures",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::OddRamondCount(_) => "OddRamondCount",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    pub fn detail(&self) -> String {
        match self {
            Error::InvalidOperand(s)
            | Error::NotInvertible(s)
            | Error::InvalidShape(s)
            | Error::NonInvertibleBlock(s)
            | Error::NotEven(s)
            | Error::NotNilpotent(s)
            | Error::RouteMismatch(s)
            | Error::NonInvertibleJacobian(s)
            | Error::DivisionByNonUnit(s)
            | Error::EmptyWindow(s)
            | Error::InsufficientPrecision(s)
            | Error::WrongWeight(s)
            | Error::NotSuperconformal(s)
            | Error::NoInvertibleMinor(s)
            | Error::DegenerateConfiguration(s)
            | Error::NoPunctures(s)
            | Error::PreconditionViolated(s)
            | Error::OddRamondCount(s)
            | Error::InvalidInput(s) => s.clone(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Serde error that keeps the typed error recoverable through
/// [`Error::from_serde_message`].
pub fn de_error<E: serde::de::Error>(e: Error) -> E {
    E::custom(format!("[{}] {}", e.name(), e.detail()))
}

impl Error {
    pub fn from_name(name: &str, detail: String) -> Option<Error> {
        let e = match name {
            "InvalidOperand" => Error::InvalidOperand(detail),
            "NotInvertible" => Error::NotInvertible(detail),
            "InvalidShape" => Error::InvalidShape(detail),
            "NonInvertibleBlock" => Error::NonInvertibleBlock(detail),
            "NotEven" => Error::NotEven(detail),
            "NotNilpotent" => Error::NotNilpotent(detail),
            "RouteMismatch" => Error::RouteMismatch(detail),
            "NonInvertibleJacobian" => Error::NonInvertibleJacobian(detail),
            "DivisionByNonUnit" => Error::DivisionByNonUnit(detail),
            "EmptyWindow" => Error::EmptyWindow(detail),
            "InsufficientPrecision" => Error::InsufficientPrecision(detail),
            "WrongWeight" => Error::WrongWeight(detail),
            "NotSuperconformal" => Error::NotSuperconformal(detail),
            "NoInvertibleMinor" => Error::NoInvertibleMinor(detail),
            "DegenerateConfiguration" => Error::DegenerateConfiguration(detail),
            "NoPunctures" => Error::NoPunctures(detail),
            "PreconditionViolated" => Error::PreconditionViolated(detail),
            "OddRamondCount" => Error::OddRamondCount(detail),
            "InvalidInput" => Error::InvalidInput(detail),
            _ => return None,
        };
        Some(e)
    }

    /// Recovers an error produced by [`de_error`] from a deserializer message.
    pub fn from_serde_message(msg: &str) -> Option<Error> {
        let start = msg.find('[')?;
        let end = start + msg[start..].find(']')?;
        let detail = msg[end + 1..].trim().to_string();
        Error::from_name(&msg[start + 1..end], detail)
    }
}
