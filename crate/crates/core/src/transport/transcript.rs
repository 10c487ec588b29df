//! Transcript files: `SIP1`, a version byte, a length-prefixed text header,
//! then frames back to back.

use std::fs;
use std::path::Path;

use super::cost::CostReport;
use super::frame::{Frame, FrameKind};
use super::Verdict;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SIP1";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptHeader {
    pub protocol: String,
    pub params: String,
    pub modulus: u64,
    pub seed: u64,
    pub input: String,
}

impl TranscriptHeader {
    fn to_text(&self) -> String {
        format!(
            "protocol={}\nparams={}\nmodulus={}\nseed={}\ninput={}\n",
            self.protocol, self.params, self.modulus, self.seed, self.input
        )
    }

    fn parse(text: &str, offset: usize) -> Result<Self> {
        let bad = |msg: String| Error::Corrupt { offset, msg };
        let get = |key: &str| -> Result<String> {
            text.lines()
                .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .map(str::to_string)
                .ok_or_else(|| bad(format!("header lacks `{key}`")))
        };
        let protocol = get("protocol")?;
        let params = get("params")?;
        let modulus = get("modulus")?;
        let seed = get("seed")?;
        let input = get("input")?;
        Ok(TranscriptHeader {
            protocol,
            params,
            modulus: modulus.parse().map_err(|_| Error::Corrupt { offset, msg: "bad modulus".into() })?,
            seed: seed.parse().map_err(|_| Error::Corrupt { offset, msg: "bad seed".into() })?,
            input,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub frames: Vec<Frame>,
}

impl Transcript {
    pub fn new(header: TranscriptHeader, frames: Vec<Frame>) -> Self {
        Transcript { header, frames }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let text = self.header.to_text();
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(text.len() as u32).to_le_bytes());
        out.extend_from_slice(text.as_bytes());
        for f in &self.frames {
            out.extend_from_slice(&f.encode());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.is_empty() {
            return Err(Error::Corrupt { offset: 0, msg: "empty transcript".into() });
        }
        if bytes.len() < 9 || &bytes[0..4] != MAGIC {
            return Err(Error::Corrupt { offset: 0, msg: "missing SIP1 magic".into() });
        }
        if bytes[4] != VERSION {
            return Err(Error::Corrupt { offset: 4, msg: format!("unsupported version {}", bytes[4]) });
        }
        let hlen = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
        let hend = 9 + hlen;
        if bytes.len() < hend {
            return Err(Error::Corrupt { offset: 5, msg: "truncated header".into() });
        }
        let text = std::str::from_utf8(&bytes[9..hend])
            .map_err(|_| Error::Corrupt { offset: 9, msg: "header is not UTF-8".into() })?;
        let header = TranscriptHeader::parse(text, 9)?;
        let mut frames = Vec::new();
        let mut pos = hend;
        while pos < bytes.len() {
            let (f, used) = Frame::decode(&bytes[pos..]).map_err(|e| match e {
                Error::Corrupt { offset, msg } => Error::Corrupt { offset: pos + offset, msg },
                other => other,
            })?;
            frames.push(f);
            pos += used;
        }
        Ok(Transcript { header, frames })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(fs::write(path, self.to_bytes())?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }

    pub fn verdict(&self) -> Option<Verdict> {
        self.frames
            .iter()
            .rev()
            .find(|f| f.kind == FrameKind::Verdict)
            .and_then(|f| Verdict::decode(&f.body).ok())
    }

    pub fn cost(&self) -> CostReport {
        CostReport::from_frames(&self.frames)
    }
}
