use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("modulus polynomial is reducible over Z_{0}")]
    ReducibleModulus(u64),
    #[error("no built-in irreducible modulus for extension degree {0}; supply one")]
    NoDefaultModulus(usize),
    #[error("enumeration cap exceeded: {requested} > {cap}")]
    CapExceeded { requested: u128, cap: u128 },
    #[error("split index {0} out of range")]
    BadIndex(usize),
    #[error("arc span is not a {side} ideal: product e_{}{} * e_{}{} escapes", witness.0, witness.1, witness.2, witness.3)]
    NotAnIdeal {
        side: &'static str,
        witness: (usize, usize, usize, usize),
    },
    #[error("ideal subgroups live in different parents or have different sides")]
    SideMismatch,
    #[error("class functions belong to different groups")]
    GroupMismatch,
    #[error("{0} is not a subgroup of the target group")]
    NotSubgroup(&'static str),
    #[error("quotient relation does not hold")]
    NotQuotient,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("supercharacter theory of N is not G-invariant")]
    NotInvariant,
    #[error("K is not contained in the inertia subgroup of psi")]
    NotInInertia,
    #[error("unsupported lattice family for this operation")]
    UnsupportedLattice,
    #[error("H-map validation failed: condition {condition} violated ({detail})")]
    ValidationFailed {
        condition: &'static str,
        detail: String,
    },
    #[error("classical construction requires odd characteristic")]
    EvenCharacteristic,
    #[error("functional space is not closed under the requested action")]
    SpaceNotClosed,
}

pub type Result<T> = std::result::Result<T, Error>;
