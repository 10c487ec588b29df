//! PointQuery and RangeCount.
//!
//! A point query for `q` is a sum-check over `g(x) = a~(x) * chi_q(x)`, whose
//! cube sum is `a_q`. A range count is a point query on the derived stream,
//! at the index of the range.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Rejection, Result};
use crate::extension::{chi_index, num_vars, padded_table, MleEvalState};
use crate::field::{FieldElement, PrimeField};
use crate::stream::StreamUpdate;
use crate::sumcheck::{prove_sumcheck, verify_sumcheck, ComposedMle, GreedyCheater, RoundProver};
use crate::transport::{FrameKind, Link, StateMeter, Verdict};

/// Query targets: the input stream or the derived range stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Universe {
    Points = 0,
    Ranges = 1,
}

impl Universe {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Universe::Points),
            1 => Some(Universe::Ranges),
            _ => None,
        }
    }
}

/// `|F| >= u * delta^2`, the field-size policy for entries bounded by `delta`.
pub fn check_delta_bound(field: PrimeField, u: u64, delta: u64) -> Result<()> {
    let need = (u as u128) * (delta as u128) * (delta as u128);
    if (field.modulus() as u128) < need {
        return Err(Error::InvalidParam(format!(
            "field of size {} is below u * delta^2 = {need}",
            field.modulus()
        )));
    }
    Ok(())
}

/// Honest prover for `a_q`.
pub fn point_query_prover(field: PrimeField, freqs: &[i64], q: u64) -> Result<ComposedMle> {
    let u = freqs.len() as u64;
    if q >= u {
        return Err(Error::InvalidParam(format!("query {q} outside universe {u}")));
    }
    let v = num_vars(u);
    let a = padded_table(field, freqs, v);
    let mut e = vec![field.zero(); 1 << v];
    e[q as usize] = field.one();
    ComposedMle::new(vec![a, e], Arc::new(|x: &[FieldElement]| x[0] * x[1]), 2)
}

/// Streaming state for later point queries: one MLE evaluation at a point
/// drawn before the stream. The query is chosen only afterwards.
#[derive(Debug, Clone)]
pub struct PointQueryVerifier {
    u: u64,
    mle: MleEvalState,
}

impl PointQueryVerifier {
    pub fn new<R: Rng + ?Sized>(field: PrimeField, u: u64, rng: &mut R) -> Result<Self> {
        let mle = MleEvalState::new(field.sample_vec(rng, num_vars(u)))?;
        Ok(PointQueryVerifier { u, mle })
    }

    pub fn universe_size(&self) -> u64 {
        self.u
    }

    pub fn observe(&mut self, upd: StreamUpdate) -> Result<()> {
        if upd.index >= self.u {
            return Err(Error::InvalidParam(format!("index {} outside universe {}", upd.index, self.u)));
        }
        self.mle.update(upd)
    }

    pub fn state_size(&self) -> usize {
        self.mle.state_size()
    }

    /// Sends the query and verifies the answer; returns the verified `a_q`.
    /// `other_elements` is whatever else the verifier keeps alive meanwhile.
    pub fn query(
        &self,
        link: &mut Link,
        session: u32,
        universe: Universe,
        q: u64,
        other_elements: usize,
        meter: &mut StateMeter,
    ) -> Result<FieldElement> {
        if q >= self.u {
            return Err(Error::InvalidParam(format!("query {q} outside universe {}", self.u)));
        }
        let mut body = vec![universe as u8];
        body.extend_from_slice(&q.to_le_bytes());
        link.send(session, 0, FrameKind::Query, body)?;
        let r = self.mle.point();
        let oracle = self.mle.value() * chi_index(q, r);
        verify_sumcheck(
            link,
            session,
            vec![2; r.len()],
            r,
            oracle,
            other_elements + self.state_size(),
            meter,
        )
    }

    /// RangeCount: verifies that the range at `index` holds exactly `expected`
    /// points.
    pub fn range_count(
        &self,
        link: &mut Link,
        session: u32,
        index: u64,
        expected: i64,
        other_elements: usize,
        meter: &mut StateMeter,
    ) -> Result<()> {
        let got = self.query(link, session, Universe::Ranges, index, other_elements, meter)?;
        let field = got.field();
        if got != field.from_i64(expected) {
            return Err(Rejection::Count { expected, got: got.to_signed() as i64 }.into());
        }
        Ok(())
    }
}

/// Prover options shared by every protocol.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProverOptions {
    /// Inflate every claimed value by one and play the greedy strategy.
    pub cheat: bool,
}

/// Answers point queries on the given universes until the verdict arrives.
pub fn serve_queries(
    link: &mut Link,
    field: PrimeField,
    points: &[i64],
    ranges: &[i64],
    opts: ProverOptions,
) -> Result<Verdict> {
    loop {
        let f = link.recv()?;
        match f.kind {
            FrameKind::Verdict => return Verdict::decode(&f.body),
            FrameKind::Query if f.body.len() == 9 => {
                let universe = Universe::from_byte(f.body[0])
                    .ok_or_else(|| Error::Protocol(format!("unknown universe {}", f.body[0])))?;
                let q = u64::from_le_bytes(f.body[1..9].try_into().unwrap());
                let freqs = match universe {
                    Universe::Points => points,
                    Universe::Ranges => ranges,
                };
                let honest = point_query_prover(field, freqs, q)?;
                let mut prover: Box<dyn RoundProver> = if opts.cheat {
                    Box::new(GreedyCheater::new(honest, field.one()))
                } else {
                    Box::new(honest)
                };
                if let Some(v) = verdict_on_reject(prove_sumcheck(link, f.session, prover.as_mut()))? {
                    return Ok(v);
                }
            }
            _ => return Err(Error::Protocol(format!("unexpected {:?} frame while serving queries", f.kind))),
        }
    }
}

/// Converts a verdict received mid-protocol into a value for the prover.
pub fn verdict_on_reject(res: Result<()>) -> Result<Option<Verdict>> {
    match res {
        Ok(()) => Ok(None),
        Err(Error::Reject(Rejection::Verifier(reason))) => {
            Ok(Some(Verdict { accepted: false, reason: Some(reason), ..Default::default() }))
        }
        Err(e) => Err(e),
    }
}
