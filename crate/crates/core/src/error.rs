use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not a lattice: {0}")]
    NotALattice(String),
    #[error("lattice is not graded: {0}")]
    NotGraded(String),
    #[error("partial order has no unique bottom/top")]
    NoBounds,
    #[error("element rank must be at least 1")]
    RankTooSmall,
    #[error("element rank must be at most rank(L) - 1")]
    RankTooLarge,
    #[error("truncation rank {0} out of range 1..={1}")]
    BadRank(usize, usize),
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("atom set is not independent")]
    NotIndependent,
    #[error("family is not downward closed")]
    NotDownwardClosed,
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("target lattice is not geometric")]
    NotGeometricTarget,
    #[error("atom map is not a bijection")]
    AtomMapNotBijective,
    #[error("set is not a basis")]
    NotABasis,
    #[error("atom already belongs to the basis")]
    AtomInBasis,
    #[error("lattice is not coatomic")]
    NotCoatomic,
    #[error("lattice is not atomic")]
    NotAtomic,
    #[error("basis exchange axiom violated: {0}")]
    ExchangeAxiomViolated(String),
    #[error("basis family is empty")]
    EmptyFamily,
    #[error("bases have unequal sizes")]
    UnequalSizes,
    #[error("element already belongs to the basis")]
    ElementInBasis,
    #[error("set is not a circuit")]
    NotACircuit,
    #[error("matroid has no circuits")]
    NoCircuits,
    #[error("ground set mismatch: {0} vs {1}")]
    GroundSetMismatch(usize, usize),
    #[error("unknown catalog name `{0}`")]
    UnknownName(String),
    #[error("circuit belongs to the fundamental circuit family of the basis")]
    CircuitIsFundamental,
    #[error("lattice of flats is not modular")]
    NotModular,
    #[error("sequence is not proper at position {0}")]
    NotProper(usize),
    #[error("the empty set is dependent")]
    EmptySetDependent,
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("adjoint characterizations disagree: {0}")]
    RouteDisagreement(String),
    #[error("invalid input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
