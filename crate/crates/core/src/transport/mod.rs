//! Framed messages, channels, transcripts, and cost accounting.

mod channel;
mod cost;
mod frame;
mod transcript;

pub use channel::{memory_pair, Channel, Link, MemoryChannel, ReplayChannel, Role, TcpChannel, VERDICT_ROUND};
pub use cost::{CostReport, StateMeter};
pub use frame::{encode_elements, read_frame, write_frame, Direction, Frame, FrameKind, MAX_FRAME};
pub use transcript::{Transcript, TranscriptHeader, MAGIC, VERSION};

use crate::error::{Error, Rejection, Result};

/// Final message from the verifier: decision, reason, output lines, and the
/// verifier's own accounting.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub reason: Option<String>,
    pub output: Vec<String>,
    pub stats: StateMeter,
}

impl Verdict {
    pub fn accept(output: Vec<String>, stats: StateMeter) -> Self {
        Verdict { accepted: true, reason: None, output, stats }
    }

    pub fn reject(reason: &Rejection, stats: StateMeter) -> Self {
        Verdict { accepted: false, reason: Some(reason.to_string()), output: Vec::new(), stats }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut s = format!("verdict={}\n", if self.accepted { "accept" } else { "reject" });
        if let Some(r) = &self.reason {
            s.push_str(&format!("reason={}\n", r.replace('\n', " ")));
        }
        s.push_str(&format!(
            "peak_verifier_elements={}\nstream_passes={}\nderived_updates={}\n",
            self.stats.peak_verifier_elements, self.stats.stream_passes, self.stats.derived_updates
        ));
        for line in &self.output {
            s.push_str(&format!("output={line}\n"));
        }
        s.into_bytes()
    }

    pub fn decode(body: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(body).map_err(|_| Error::Protocol("verdict is not UTF-8".into()))?;
        let mut v = Verdict::default();
        let mut seen = false;
        for line in text.lines() {
            let (k, val) = line
                .split_once('=')
                .ok_or_else(|| Error::Protocol(format!("bad verdict line `{line}`")))?;
            let num = || val.parse::<u64>().map_err(|_| Error::Protocol(format!("bad verdict number `{val}`")));
            match k {
                "verdict" => {
                    seen = true;
                    v.accepted = val == "accept";
                }
                "reason" => v.reason = Some(val.to_string()),
                "peak_verifier_elements" => v.stats.peak_verifier_elements = num()? as usize,
                "stream_passes" => v.stats.stream_passes = num()? as usize,
                "derived_updates" => v.stats.derived_updates = num()?,
                "output" => v.output.push(val.to_string()),
                _ => return Err(Error::Protocol(format!("unknown verdict key `{k}`"))),
            }
        }
        if !seen {
            return Err(Error::Protocol("verdict frame without a decision".into()));
        }
        Ok(v)
    }
}
