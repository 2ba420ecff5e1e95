use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dense dimension {dim} exceeds the configured limit {limit}")]
    DenseLimit { dim: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not traceless (trace {trace:.3e})")]
    NotTraceless { trace: f64 },

    #[error("reference operator must be nonzero")]
    ZeroReference,

    #[error("spectrum {x:?} is not majorized by {y:?}")]
    NotMajorized { x: Vec<f64>, y: Vec<f64> },

    #[error("matrix is not doubly stochastic (defect {defect:.3e})")]
    NotDoublyStochastic { defect: f64 },

    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,

    #[error("gcd({l}, {m}) = {gcd} is not 1")]
    NotCoprime { l: i64, m: i64, gcd: i64 },

    #[error("congruence {j}*{m} = {k}*{l} fails mod {d}")]
    CongruenceFails { j: i64, k: i64, l: i64, m: i64, d: i64 },

    #[error("multiplier {a} is not coprime to dimension {d}")]
    NonCoprimeMultiplier { a: u32, d: u32 },

    #[error("the identity label has no PEG target")]
    IdentityLabel,

    #[error("Hamiltonian has no two-body coupling term: not entangling")]
    NotEntangling,

    #[error("interaction graph is not connected: {0}")]
    Disconnected(String),

    #[error("term acts on {support} qudits; only two-body Hamiltonians are supported")]
    ManyBody { support: usize },

    #[error("invalid partition: block {block} contains coupled qudits {a} and {b}")]
    InvalidPartition { block: usize, a: usize, b: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("negative weight {0} reached lowering; resolve negations first")]
    NegativeWeight(f64),

    #[error("gate layer is not local: {0}")]
    NonLocalGate(String),

    #[error("gamma vector has imaginary part {0:.3e}")]
    ComplexGamma(f64),

    #[error("degenerate coupling phase basis for kappa = {0}")]
    DegenerateKappa(String),

    #[error("identity component {found:.3e} exceeds bound {bound:.3e}")]
    TraceBookkeeping { found: f64, bound: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("Hamiltonian is not Hermitian: term {term} and its conjugate partner {partner} disagree")]
    HermiticityViolation { term: String, partner: String },

    #[error("label out of range: {0}")]
    Range(String),

    #[error("malformed schedule: {0}")]
    MalformedSchedule(String),
}
