//! Geometric protocols over point streams: minimum enclosing ball, width,
//! metric k-center (2-approximation), and k-slab feasibility.
//!
//! Every protocol has the same shape. During the stream the verifier keeps
//! MLE evaluations of the point stream (one independent copy per planned
//! point query) and of the derived range stream. Afterwards the prover sends a
//! text claim on session 0, the verifier checks what it can from the claim
//! alone, then runs one RangeCount on session 1 and point queries on sessions
//! 2 onward.

pub mod exact;
mod kcenter;
mod kslab;
mod meb;
mod width;

use std::collections::BTreeMap;

use rand::Rng;

pub use kcenter::{kcenter2_prove, KCenterClaim, KCenterVerifier};
pub use kslab::{kslab_prove, KSlabClaim, KSlabVerifier};
pub use meb::{feasibility_radius2, meb_prove, MebClaim, MebVerifier};
pub use width::{width_prove, WidthClaim, WidthVerifier};

use crate::error::{Error, Rejection, Result};
use crate::field::PrimeField;
use crate::pq_rc::{serve_queries, PointQueryVerifier, ProverOptions, Universe};
use crate::stream::{derive_range_stream, frequencies, Range, RangeSpace, StreamUpdate};
use crate::transport::{FrameKind, Link, StateMeter, Verdict};

pub(crate) const CLAIM_SESSION: u32 = 0;
pub(crate) const COUNT_SESSION: u32 = 1;
pub(crate) const FIRST_QUERY_SESSION: u32 = 2;

/// Verifier stream state shared by the geometric protocols.
#[derive(Debug, Clone)]
pub struct GeometryObserver {
    rs: RangeSpace,
    ranges: PointQueryVerifier,
    copies: Vec<PointQueryVerifier>,
    n: i64,
}

impl GeometryObserver {
    /// `universe` is the size of the point universe; `copies` the number of
    /// point queries the protocol may ask.
    pub fn new<R: Rng + ?Sized>(field: PrimeField, universe: u64, rs: RangeSpace, copies: usize, rng: &mut R) -> Result<Self> {
        if rs.is_empty() {
            return Err(Error::InvalidParam("empty range space".into()));
        }
        let ranges = PointQueryVerifier::new(field, rs.len() as u64, rng)?;
        let copies = (0..copies)
            .map(|_| PointQueryVerifier::new(field, universe, rng))
            .collect::<Result<_>>()?;
        Ok(GeometryObserver { rs, ranges, copies, n: 0 })
    }

    pub fn range_space(&self) -> &RangeSpace {
        &self.rs
    }

    /// Observes one update. `p` is the point at `upd.index` (a metric point
    /// is `[index]`); every range containing it is fed to the derived stream.
    pub fn observe(&mut self, upd: StreamUpdate, p: &[i64], meter: &mut StateMeter) -> Result<()> {
        for c in &mut self.copies {
            c.observe(upd)?;
        }
        let mut derived = 0;
        for idx in self.rs.containing(p) {
            self.ranges.observe(StreamUpdate::new(idx, upd.delta))?;
            derived += 1;
        }
        meter.derived(derived);
        self.n += upd.delta;
        meter.observe(self.state_size());
        Ok(())
    }

    /// Field elements held: all MLE states plus the count `n`.
    pub fn state_size(&self) -> usize {
        self.ranges.state_size() + self.copies.iter().map(|c| c.state_size()).sum::<usize>() + 1
    }

    pub fn count(&self) -> i64 {
        self.n
    }

    /// RangeCount of `range` against `n`. A range outside the space cannot
    /// be checked and is rejected as malformed.
    pub fn range_count(&self, link: &mut Link, range: &Range, meter: &mut StateMeter) -> Result<()> {
        let index = self
            .rs
            .index_of(range)
            .ok_or_else(|| Rejection::Malformed(format!("range {range:?} is not in the range space")))?;
        self.ranges.range_count(link, COUNT_SESSION, index, self.n, self.state_size(), meter)
    }

    /// One point query per witness index, each on its own MLE copy, requiring
    /// frequency at least one.
    pub fn witness_queries(&self, link: &mut Link, indices: &[u64], meter: &mut StateMeter) -> Result<()> {
        if indices.len() > self.copies.len() {
            return Err(Rejection::WitnessTooLarge.into());
        }
        for (i, (&q, copy)) in indices.iter().zip(&self.copies).enumerate() {
            let session = FIRST_QUERY_SESSION + i as u32;
            let a = copy.query(link, session, Universe::Points, q, self.state_size(), meter)?;
            if a.to_signed() < 1 {
                return Err(Rejection::NotInStream.into());
            }
        }
        Ok(())
    }
}

/// Receives the claim text on session 0.
pub(crate) fn recv_claim(link: &mut Link) -> Result<String> {
    let f = link.expect(CLAIM_SESSION, 0, FrameKind::Text)?;
    Ok(f.text()?.to_owned())
}

/// Prover side: sends the claim, then answers queries until the verdict.
/// `points` are stream elements as coordinates (metric points as `[index]`),
/// `point_freqs` the frequency vector over the point universe.
pub fn serve_geometry(
    link: &mut Link,
    claim: &str,
    points: &[Vec<i64>],
    point_freqs: &[i64],
    rs: &RangeSpace,
    field: PrimeField,
    opts: ProverOptions,
) -> Result<Verdict> {
    link.send(CLAIM_SESSION, 0, FrameKind::Text, claim.as_bytes().to_vec())?;
    let ranges = frequencies(derive_range_stream(points, rs), rs.len())?;
    serve_queries(link, field, point_freqs, ranges.values(), opts)
}

/// `key=value` lines of a claim.
pub(crate) struct ClaimFields(BTreeMap<String, String>);

impl ClaimFields {
    pub(crate) fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Rejection::Malformed(format!("claim line `{line}`")))?;
            if map.insert(k.to_owned(), v.to_owned()).is_some() {
                return Err(Rejection::Malformed(format!("duplicate claim key `{k}`")).into());
            }
        }
        Ok(ClaimFields(map))
    }

    pub(crate) fn get(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Rejection::Malformed(format!("claim lacks `{key}`")).into())
    }

    pub(crate) fn num<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        parse_num(self.get(key)?)
    }
}

pub(crate) fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Rejection::Malformed(format!("bad number `{s}`")).into())
}

pub(crate) fn parse_vec(s: &str) -> Result<Vec<i64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_num).collect()
}

pub(crate) fn parse_points(s: &str) -> Result<Vec<Vec<i64>>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(parse_vec).collect()
}

pub(crate) fn fmt_vec(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

pub(crate) fn fmt_points(ps: &[Vec<i64>]) -> String {
    ps.iter().map(|p| fmt_vec(p)).collect::<Vec<_>>().join(";")
}

/// Rejects repeated witness points.
pub(crate) fn require_distinct<T: Ord + Clone>(items: &[T]) -> Result<()> {
    let mut v = items.to_vec();
    v.sort();
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Err(Rejection::Malformed("repeated witness point".into()).into());
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod harness {
    //! In-process driver used by the protocol tests.

    use super::*;
    use crate::transport::{memory_pair, Role};

    /// Runs `prover` and `verifier` over a memory channel. The verifier's
    /// error (if a rejection) becomes the verdict it sends.
    pub fn run<P, V>(prover: P, verifier: V) -> (Result<Verdict>, Result<Vec<String>>)
    where
        P: FnOnce(&mut Link) -> Result<Verdict> + Send,
        V: FnOnce(&mut Link, &mut StateMeter) -> Result<Vec<String>> + Send,
    {
        let (mut a, mut b) = memory_pair();
        std::thread::scope(|s| {
            let p = s.spawn(move || {
                let mut link = Link::new(&mut a, Role::Prover);
                prover(&mut link)
            });
            let mut link = Link::new(&mut b, Role::Verifier);
            let mut meter = StateMeter::default();
            let res = verifier(&mut link, &mut meter);
            let verdict = match &res {
                Ok(out) => Verdict::accept(out.clone(), meter),
                Err(Error::Reject(r)) => Verdict::reject(r, meter),
                Err(e) => panic!("verifier error: {e}"),
            };
            link.send(0, crate::transport::VERDICT_ROUND, FrameKind::Verdict, verdict.encode()).unwrap();
            (p.join().unwrap(), res)
        })
    }
}
