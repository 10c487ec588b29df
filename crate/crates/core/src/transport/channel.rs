use std::collections::HashMap;
use std::io::{self, BufReader, BufWriter};
use std::net::TcpStream;
use std::sync::mpsc::{channel, Receiver, Sender};

use super::frame::{read_frame, write_frame, Direction, Frame, FrameKind};
use super::Verdict;
use crate::error::{Error, Rejection, Result};
use crate::field::FieldElement;

/// Ordered, reliable frame delivery in both directions.
pub trait Channel: Send {
    fn send(&mut self, frame: &Frame) -> Result<()>;
    fn recv(&mut self) -> Result<Frame>;
}

impl<C: Channel + ?Sized> Channel for Box<C> {
    fn send(&mut self, frame: &Frame) -> Result<()> {
        (**self).send(frame)
    }

    fn recv(&mut self) -> Result<Frame> {
        (**self).recv()
    }
}

fn closed() -> Error {
    Error::Transport(io::Error::new(io::ErrorKind::ConnectionAborted, "peer closed the channel"))
}

/// In-process channel end. Frames travel as encoded bytes.
pub struct MemoryChannel {
    tx: Sender<Vec<u8>>,
    rx: Receiver<Vec<u8>>,
}

pub fn memory_pair() -> (MemoryChannel, MemoryChannel) {
    let (atx, brx) = channel();
    let (btx, arx) = channel();
    (MemoryChannel { tx: atx, rx: arx }, MemoryChannel { tx: btx, rx: brx })
}

impl Channel for MemoryChannel {
    fn send(&mut self, frame: &Frame) -> Result<()> {
        self.tx.send(frame.encode()).map_err(|_| closed())
    }

    fn recv(&mut self) -> Result<Frame> {
        let bytes = self.rx.recv().map_err(|_| closed())?;
        Frame::decode(&bytes).map(|(f, _)| f)
    }
}

pub struct TcpChannel {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
}

impl TcpChannel {
    pub fn new(stream: TcpStream) -> io::Result<Self> {
        stream.set_nodelay(true)?;
        let reader = BufReader::new(stream.try_clone()?);
        Ok(TcpChannel { reader, writer: BufWriter::new(stream) })
    }
}

impl Channel for TcpChannel {
    fn send(&mut self, frame: &Frame) -> Result<()> {
        Ok(write_frame(&mut self.writer, frame)?)
    }

    fn recv(&mut self) -> Result<Frame> {
        read_frame(&mut self.reader)?.ok_or_else(closed)
    }
}

/// Serves a recorded transcript to a re-running verifier: prover frames are
/// replayed in order and the verifier's own frames must match the recording.
pub struct ReplayChannel {
    frames: Vec<Frame>,
    cursor: usize,
}

impl ReplayChannel {
    pub fn new(frames: Vec<Frame>) -> Self {
        ReplayChannel { frames, cursor: 0 }
    }
}

impl Channel for ReplayChannel {
    fn send(&mut self, frame: &Frame) -> Result<()> {
        if frame.kind == FrameKind::Verdict {
            return Ok(());
        }
        match self.frames.get(self.cursor) {
            Some(rec) if rec == frame => {
                self.cursor += 1;
                Ok(())
            }
            _ => Err(Error::Protocol(format!(
                "replay diverged at frame {}: verifier sent {:?} round {}",
                self.cursor, frame.kind, frame.round
            ))),
        }
    }

    fn recv(&mut self) -> Result<Frame> {
        match self.frames.get(self.cursor) {
            Some(rec) if rec.direction == Direction::ProverToVerifier => {
                self.cursor += 1;
                Ok(rec.clone())
            }
            Some(_) => Err(Error::Protocol(format!("replay expected a prover frame at {}", self.cursor))),
            None => Err(closed()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Prover,
    Verifier,
}

impl Role {
    pub fn outgoing(self) -> Direction {
        match self {
            Role::Prover => Direction::ProverToVerifier,
            Role::Verifier => Direction::VerifierToProver,
        }
    }
}

/// One party's end of a protocol run: enforces per-session round order and
/// optionally records every frame in both directions.
pub struct Link<'a> {
    chan: &'a mut dyn Channel,
    role: Role,
    last: HashMap<(u32, Direction), u32>,
    log: Option<Vec<Frame>>,
}

/// Round used for verdict frames, after every protocol round.
pub const VERDICT_ROUND: u32 = u32::MAX;

impl<'a> Link<'a> {
    pub fn new(chan: &'a mut dyn Channel, role: Role) -> Self {
        Link { chan, role, last: HashMap::new(), log: None }
    }

    pub fn recording(chan: &'a mut dyn Channel, role: Role) -> Self {
        Link { chan, role, last: HashMap::new(), log: Some(Vec::new()) }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    fn check_order(&mut self, f: &Frame) -> Result<()> {
        let key = (f.session, f.direction);
        if let Some(&prev) = self.last.get(&key) {
            if f.round <= prev {
                return Err(Error::Protocol(format!(
                    "session {} {:?}: round {} after {prev}",
                    f.session, f.direction, f.round
                )));
            }
        }
        self.last.insert(key, f.round);
        Ok(())
    }

    pub fn send_frame(&mut self, frame: Frame) -> Result<()> {
        if frame.direction != self.role.outgoing() {
            return Err(Error::Internal("frame direction does not match role".into()));
        }
        self.check_order(&frame)?;
        self.chan.send(&frame)?;
        if let Some(log) = &mut self.log {
            log.push(frame);
        }
        Ok(())
    }

    pub fn send(&mut self, session: u32, round: u32, kind: FrameKind, body: Vec<u8>) -> Result<()> {
        let dir = self.role.outgoing();
        self.send_frame(Frame::new(session, round, dir, kind, body))
    }

    pub fn send_elements(&mut self, session: u32, round: u32, kind: FrameKind, elems: &[FieldElement]) -> Result<()> {
        let dir = self.role.outgoing();
        self.send_frame(Frame::elements(session, round, dir, kind, elems))
    }

    pub fn recv(&mut self) -> Result<Frame> {
        let f = self.chan.recv()?;
        if f.direction == self.role.outgoing() {
            return Err(Error::Protocol("received a frame in our own direction".into()));
        }
        self.check_order(&f)?;
        if let Some(log) = &mut self.log {
            log.push(f.clone());
        }
        Ok(f)
    }

    /// Receives the next frame and checks its position. A prover that gets a
    /// rejecting verdict instead surfaces it as [`Error::Reject`].
    pub fn expect(&mut self, session: u32, round: u32, kind: FrameKind) -> Result<Frame> {
        let f = self.recv()?;
        if f.kind == FrameKind::Verdict && kind != FrameKind::Verdict && self.role == Role::Prover {
            let v = Verdict::decode(&f.body)?;
            return Err(Error::Reject(Rejection::Verifier(v.reason.unwrap_or_default())));
        }
        if f.session != session || f.round != round || f.kind != kind {
            return Err(Error::Protocol(format!(
                "expected {kind:?} session {session} round {round}, got {:?} session {} round {}",
                f.kind, f.session, f.round
            )));
        }
        Ok(f)
    }

    pub fn frames(&self) -> &[Frame] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn take_frames(&mut self) -> Vec<Frame> {
        self.log.take().unwrap_or_default()
    }
}
