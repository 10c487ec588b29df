//! Wire framing.
//!
//! ```text
//! len: u32 LE | kind: u8 | session: u32 LE | round: u32 LE | direction: u8 | body
//! ```
//!
//! `len` counts the bytes after the kind byte.

use std::io::{self, Read, Write};

use crate::error::{Error, Rejection, Result};
use crate::field::{FieldElement, PrimeField};

const HEADER: usize = 9;
/// Frames larger than this are treated as corrupt.
pub const MAX_FRAME: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    ProverToVerifier,
    VerifierToProver,
}

impl Direction {
    fn to_byte(self) -> u8 {
        match self {
            Direction::ProverToVerifier => 0,
            Direction::VerifierToProver => 1,
        }
    }

    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Direction::ProverToVerifier),
            1 => Some(Direction::VerifierToProver),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameKind {
    /// Claimed value opening a sum-check.
    Claim,
    /// Round polynomial, zero-padded coefficient vector.
    Poly,
    Challenge,
    /// One-message proof such as a matrix-product annotation.
    Annotation,
    /// Structured text claim (geometric witnesses).
    Text,
    /// Verifier's query selecting the next sub-protocol.
    Query,
    Verdict,
}

impl FrameKind {
    pub fn to_byte(self) -> u8 {
        match self {
            FrameKind::Claim => 1,
            FrameKind::Poly => 2,
            FrameKind::Challenge => 3,
            FrameKind::Annotation => 4,
            FrameKind::Text => 5,
            FrameKind::Query => 6,
            FrameKind::Verdict => 7,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        Some(match b {
            1 => FrameKind::Claim,
            2 => FrameKind::Poly,
            3 => FrameKind::Challenge,
            4 => FrameKind::Annotation,
            5 => FrameKind::Text,
            6 => FrameKind::Query,
            7 => FrameKind::Verdict,
            _ => return None,
        })
    }

    /// Kinds whose body is a vector of field elements.
    pub fn carries_elements(self) -> bool {
        matches!(self, FrameKind::Claim | FrameKind::Poly | FrameKind::Challenge | FrameKind::Annotation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub session: u32,
    pub round: u32,
    pub direction: Direction,
    pub kind: FrameKind,
    pub body: Vec<u8>,
}

impl Frame {
    pub fn new(session: u32, round: u32, direction: Direction, kind: FrameKind, body: Vec<u8>) -> Self {
        Frame { session, round, direction, kind, body }
    }

    pub fn elements(
        session: u32,
        round: u32,
        direction: Direction,
        kind: FrameKind,
        elems: &[FieldElement],
    ) -> Self {
        Frame::new(session, round, direction, kind, encode_elements(elems))
    }

    pub fn encoded_len(&self) -> usize {
        5 + HEADER + self.body.len()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&((HEADER + self.body.len()) as u32).to_le_bytes());
        out.push(self.kind.to_byte());
        out.extend_from_slice(&self.session.to_le_bytes());
        out.extend_from_slice(&self.round.to_le_bytes());
        out.push(self.direction.to_byte());
        out.extend_from_slice(&self.body);
        out
    }

    /// Decodes one frame from the front of `bytes`, returning it and the
    /// number of bytes consumed. Errors carry offsets relative to `bytes`.
    pub fn decode(bytes: &[u8]) -> Result<(Frame, usize)> {
        if bytes.len() < 5 {
            return Err(Error::Corrupt { offset: bytes.len(), msg: "truncated frame prefix".into() });
        }
        let len = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
        if !(HEADER..=MAX_FRAME).contains(&len) {
            return Err(Error::Corrupt { offset: 0, msg: format!("bad frame length {len}") });
        }
        let kind = FrameKind::from_byte(bytes[4])
            .ok_or_else(|| Error::Corrupt { offset: 4, msg: format!("unknown frame kind {}", bytes[4]) })?;
        if bytes.len() < 5 + len {
            return Err(Error::Corrupt { offset: bytes.len(), msg: "truncated frame payload".into() });
        }
        let p = &bytes[5..5 + len];
        let session = u32::from_le_bytes(p[0..4].try_into().unwrap());
        let round = u32::from_le_bytes(p[4..8].try_into().unwrap());
        let direction = Direction::from_byte(p[8])
            .ok_or_else(|| Error::Corrupt { offset: 13, msg: format!("bad direction byte {}", p[8]) })?;
        Ok((Frame { session, round, direction, kind, body: p[HEADER..].to_vec() }, 5 + len))
    }

    /// Number of field elements in the body, for element-carrying kinds.
    pub fn element_count(&self) -> usize {
        if self.kind.carries_elements() {
            self.body.len() / 8
        } else {
            0
        }
    }

    /// Decodes the body as field elements; bad encodings are a malformed
    /// message from the peer.
    pub fn decode_elements(&self, field: PrimeField) -> Result<Vec<FieldElement>> {
        field
            .decode_vec(&self.body)
            .map_err(|e| Error::Reject(Rejection::Malformed(e.to_string())))
    }

    pub fn text(&self) -> Result<&str> {
        std::str::from_utf8(&self.body).map_err(|_| Error::Reject(Rejection::Malformed("invalid UTF-8".into())))
    }
}

pub fn encode_elements(elems: &[FieldElement]) -> Vec<u8> {
    elems.iter().flat_map(|e| e.to_le_bytes()).collect()
}

pub fn write_frame<W: Write>(w: &mut W, frame: &Frame) -> io::Result<()> {
    w.write_all(&frame.encode())?;
    w.flush()
}

/// Reads one frame; `Ok(None)` on a clean end of stream before any byte.
pub fn read_frame<R: Read>(r: &mut R) -> Result<Option<Frame>> {
    let mut prefix = [0u8; 5];
    let mut got = 0;
    while got < 5 {
        let n = r.read(&mut prefix[got..])?;
        if n == 0 {
            if got == 0 {
                return Ok(None);
            }
            return Err(Error::Transport(io::Error::new(io::ErrorKind::UnexpectedEof, "truncated frame")));
        }
        got += n;
    }
    let len = u32::from_le_bytes(prefix[0..4].try_into().unwrap()) as usize;
    if !(HEADER..=MAX_FRAME).contains(&len) {
        return Err(Error::Protocol(format!("bad frame length {len}")));
    }
    let mut buf = prefix.to_vec();
    buf.resize(5 + len, 0);
    r.read_exact(&mut buf[5..])?;
    Frame::decode(&buf).map(|(f, _)| Some(f))
}
