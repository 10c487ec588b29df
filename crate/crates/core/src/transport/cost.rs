use std::fmt::Write as _;

use super::frame::{Direction, Frame, FrameKind};
use super::Verdict;

/// Verifier-side accounting kept outside the transcript's message bodies:
/// live protocol state in field elements, passes over the input, and
/// derived-stream work.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StateMeter {
    pub peak_verifier_elements: usize,
    pub stream_passes: usize,
    pub derived_updates: u64,
}

impl StateMeter {
    pub fn observe(&mut self, live_elements: usize) {
        self.peak_verifier_elements = self.peak_verifier_elements.max(live_elements);
    }

    pub fn pass(&mut self) {
        self.stream_passes += 1;
    }

    pub fn derived(&mut self, n: u64) {
        self.derived_updates += n;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CostReport {
    /// Distinct prover rounds numbered 1 and up, summed over sessions.
    pub rounds: usize,
    /// Field elements in round polynomials and annotations.
    pub p2v_elements: usize,
    /// Challenge elements.
    pub v2p_elements: usize,
    /// Claimed values opening sum-check sessions.
    pub claim_elements: usize,
    pub p2v_bits: usize,
    pub v2p_bits: usize,
    pub frames: usize,
    pub meter: StateMeter,
}

impl CostReport {
    pub fn from_frames(frames: &[Frame]) -> Self {
        let mut c = CostReport { frames: frames.len(), ..Default::default() };
        let mut rounds = std::collections::BTreeSet::new();
        for f in frames {
            match (f.direction, f.kind) {
                (_, FrameKind::Verdict) => {
                    if let Ok(v) = Verdict::decode(&f.body) {
                        c.meter = v.stats;
                    }
                }
                (Direction::ProverToVerifier, kind) => {
                    c.p2v_bits += 8 * f.body.len();
                    if kind == FrameKind::Claim {
                        c.claim_elements += f.element_count();
                    } else {
                        c.p2v_elements += f.element_count();
                    }
                    if f.round >= 1 {
                        rounds.insert((f.session, f.round));
                    }
                }
                (Direction::VerifierToProver, _) => {
                    c.v2p_bits += 8 * f.body.len();
                    c.v2p_elements += f.element_count();
                }
            }
        }
        c.rounds = rounds.len();
        c
    }

    /// Flat `key=value` lines.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "rounds={}", self.rounds);
        let _ = writeln!(s, "p2v_elements={}", self.p2v_elements);
        let _ = writeln!(s, "v2p_elements={}", self.v2p_elements);
        let _ = writeln!(s, "claim_elements={}", self.claim_elements);
        let _ = writeln!(s, "p2v_bits={}", self.p2v_bits);
        let _ = writeln!(s, "v2p_bits={}", self.v2p_bits);
        let _ = writeln!(s, "frames={}", self.frames);
        let _ = writeln!(s, "peak_verifier_elements={}", self.meter.peak_verifier_elements);
        let _ = writeln!(s, "stream_passes={}", self.meter.stream_passes);
        let _ = writeln!(s, "derived_updates={}", self.meter.derived_updates);
        s
    }
}
