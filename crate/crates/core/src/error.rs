use thiserror::Error;

use crate::qcore::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("negative value {0}")]
    NegativeValue(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("valuation of zero is undefined")]
    ZeroArgument,
    #[error("zero is not a valid generator")]
    ZeroGenerator,
    #[error("duplicate base {0}")]
    DuplicateBase(Rational),
    #[error("{0} is not a generator of the set")]
    NotAGenerator(Rational),
    #[error("generator set is not canonical")]
    NotCanonical,
    #[error("base index {0} out of range")]
    BadIndex(usize),
    #[error("{0} is not an element of the monoid")]
    NotMember(Rational),
    #[error("base {0} is not a proper fraction")]
    ImproperBase(Rational),
    #[error("factorizations evaluate to different values ({0} vs {1})")]
    ValueMismatch(Rational, Rational),
    #[error("factorization is not the hub factorization")]
    NotHub,
    #[error("union of lengths requires k >= 1")]
    ZeroLength,
    #[error("bad prime seed: {0}")]
    BadSeed(String),
    #[error("level {0} out of range")]
    BadLevel(u32),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("coefficient exceeds 64 bits")]
    Overflow,
    #[error("rewrite step does not apply: {0}")]
    InvalidStep(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// The variant name, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroDenominator => "ZeroDenominator",
            Error::NegativeValue(_) => "NegativeValue",
            Error::NotPrime(_) => "NotPrime",
            Error::ZeroArgument => "ZeroArgument",
            Error::ZeroGenerator => "ZeroGenerator",
            Error::DuplicateBase(_) => "DuplicateBase",
            Error::NotAGenerator(_) => "NotAGenerator",
            Error::NotCanonical => "NotCanonical",
            Error::BadIndex(_) => "BadIndex",
            Error::NotMember(_) => "NotMember",
            Error::ImproperBase(_) => "ImproperBase",
            Error::ValueMismatch(_, _) => "ValueMismatch",
            Error::NotHub => "NotHub",
            Error::ZeroLength => "ZeroLength",
            Error::BadSeed(_) => "BadSeed",
            Error::BadLevel(_) => "BadLevel",
            Error::Parse(_) => "ParseError",
            Error::Overflow => "Overflow",
            Error::InvalidStep(_) => "InvalidStep",
        }
    }
}
