use crate::arith::Nat;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("modulus must be at least 1")]
    ZeroModulus,

    #[error("{what} must be at least 1")]
    Zero { what: &'static str },

    #[error("{0} is not prime")]
    NotPrime(Nat),

    #[error("{divisor} does not divide {n}")]
    NotDivisible { divisor: Nat, n: Nat },

    #[error("factorization incomplete: cofactor {cofactor} of {n} not split within {iterations} iterations")]
    FactorizationIncomplete { n: Nat, cofactor: Nat, iterations: u64 },

    #[error("p = {0} is excluded here (must not be one of 2, 3, 7, 43)")]
    ExcludedPrime(Nat),

    #[error("{0} is not an element of the supplied prime set")]
    NotInSet(Nat),

    #[error("unbounded enumeration requires a stabilized prime set")]
    NotStabilized,
}
