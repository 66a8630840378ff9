use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..=4")]
    QubitCount(usize),

    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("control and target must differ (both {0})")]
    SameQubit(usize),

    #[error("gate is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),

    #[error("state is not normalized (norm² = {0})")]
    Unnormalized(f64),

    #[error("{name} = {value} outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero condition violated (residual {0:.3e})")]
    ZeroCondition(f64),

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("no valid crossover in domain: {0}")]
    NoCrossover(&'static str),

    #[error("{failures} of {reps} replicates failed to intersect")]
    TooManyFailures { failures: usize, reps: usize },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            domain,
        }
    }
}
