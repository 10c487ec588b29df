use std::fmt;
use std::io;

/// Why a verifier refused a prover's messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    /// A round polynomial exceeded its declared degree bound.
    Degree { round: usize },
    /// `g_{j-1}(r_{j-1}) != g_j(0) + g_j(1)` (or `H != g_1(0) + g_1(1)` on round 1).
    Sum { round: usize },
    /// The last round polynomial disagreed with the verifier's own evaluation.
    FinalCheck,
    /// Matrix-product annotation failed the α-fingerprint identity.
    Fingerprint,
    /// Claimed eigenvalues are inconsistent with the verified product `A·V`.
    Eigen,
    /// The verified `VᵀV` has a nonzero off-diagonal entry.
    NotOrthogonal,
    WitnessTooLarge,
    WitnessSize { expected: usize, got: usize },
    /// Claimed radius differs from the radius of the witness subset's ball.
    Radius,
    /// Claimed center is not the rounding of the witness subset's center.
    Center,
    /// A witness point is not on its claimed hyperplane.
    Incidence,
    /// Witness points are closer than the claimed cost.
    Distance,
    /// A witness point has zero multiplicity in the stream.
    NotInStream,
    /// Verified range count differs from the stream length.
    Count { expected: i64, got: i64 },
    /// A prover message could not be decoded.
    Malformed(String),
    /// Reason relayed to the prover in the verifier's verdict.
    Verifier(String),
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::Degree { round } => write!(f, "degree (round {round})"),
            Rejection::Sum { round } => write!(f, "sum (round {round})"),
            Rejection::FinalCheck => f.write_str("final check"),
            Rejection::Fingerprint => f.write_str("fingerprint"),
            Rejection::Eigen => f.write_str("eigen"),
            Rejection::NotOrthogonal => f.write_str("not orthogonal"),
            Rejection::WitnessTooLarge => f.write_str("witness too large"),
            Rejection::WitnessSize { expected, got } => {
                write!(f, "witness size (expected {expected}, got {got})")
            }
            Rejection::Radius => f.write_str("radius"),
            Rejection::Center => f.write_str("center"),
            Rejection::Incidence => f.write_str("incidence"),
            Rejection::Distance => f.write_str("distance"),
            Rejection::NotInStream => f.write_str("witness not in stream"),
            Rejection::Count { expected, got } => {
                write!(f, "count (expected {expected}, got {got})")
            }
            Rejection::Malformed(msg) => write!(f, "malformed message: {msg}"),
            Rejection::Verifier(msg) => f.write_str(msg),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("field mismatch: GF({0}) vs GF({1})")]
    FieldMismatch(u64, u64),
    #[error("non-invertible element")]
    NonInvertible,
    #[error("{0} is not a prime modulus >= 3")]
    NotPrime(u64),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("rejected: {0}")]
    Reject(Rejection),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("transcript corrupt at byte {offset}: {msg}")]
    Corrupt { offset: usize, msg: String },
    #[error("transport: {0}")]
    Transport(#[from] io::Error),
    #[error("internal: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_reject(&self) -> bool {
        matches!(self, Error::Reject(_))
    }

    pub fn rejection(&self) -> Option<&Rejection> {
        match self {
            Error::Reject(r) => Some(r),
            _ => None,
        }
    }
}

impl From<Rejection> for Error {
    fn from(r: Rejection) -> Self {
        Error::Reject(r)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
