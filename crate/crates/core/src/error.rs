use thiserror::Error;

use crate::arith::Place;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero input")]
    ZeroInput,
    #[error("cannot factor {n}: unfactored cofactor {cofactor} exceeds bound {bound}")]
    FactorLimitExceeded { n: i128, cofactor: i128, bound: u64 },
    #[error("the trivial square class 1 has no quadratic field")]
    TrivialClass,
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("product formula violated for ({a}, {b})")]
    ProductFormulaViolated { a: String, b: String },
    #[error("element has odd valuation at a prime above {p}")]
    OddValuation { p: u64 },
    #[error("prime {p} is inert in Q(sqrt {a})")]
    InertPrime { p: u64, a: i64 },
    #[error("element is not a 2-unit up to squares")]
    NotTwoUnit,
    #[error("operation requires discriminant 4 mod 8, got radicand {a}")]
    WrongDiscriminantClass { a: i64 },
    #[error("2 does not split in Q(sqrt {a})")]
    TwoNotSplit { a: i64 },
    #[error("x^2 - ({a})y^2 - ({b})z^2 = 0 has no non-trivial rational solution")]
    NotSolvable { a: i64, b: i64 },
    #[error("conic search exhausted for ({a}, {b})")]
    SearchExhausted { a: i64, b: i64 },
    #[error("degenerate symbol: {a} and {b} are equal square classes")]
    DegenerateSquareClass { a: i64, b: i64 },
    #[error("place {place} does not divide {c}")]
    PartUndefined { place: Place, c: i64 },
    #[error("ramification assertion failed at {place}: {detail}")]
    RamificationAssertFailed { place: Place, detail: String },
    #[error("invalid triple: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidTriple(Vec<crate::symbol::Violation>),
    #[error("forms have different discriminants {0} and {1}")]
    DiscriminantMismatch(i64, i64),
    #[error("|D| = {d} exceeds the enumeration bound {bound}")]
    BoundExceeded { d: i64, bound: u64 },
    #[error("arithmetic overflow")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
