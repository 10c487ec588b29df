pub mod error;
pub mod extension;
pub mod field;
pub mod fingerprint;
pub mod geometry;
pub mod stream;
pub mod transport;
pub mod sumcheck;
pub mod pq_rc;
pub mod matmul;
pub mod runner;

pub use error::{Error, Rejection, Result};
pub use field::{FieldElement, PrimeField};
pub use pq_rc::ProverOptions;
pub use runner::{replay, run_local, run_prover, run_verifier, Input, Outcome, ProtocolSpec, RunSettings};
pub use stream::{GridUniverse, MetricSpace, Point, StreamUpdate};
pub use transport::{CostReport, Transcript, TranscriptHeader, Verdict};
