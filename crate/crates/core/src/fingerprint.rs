//! Reed–Solomon fingerprints: `sum_i a_i r^i` over a stream of updates.

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::stream::StreamUpdate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fingerprint {
    r: FieldElement,
    acc: FieldElement,
    u: u64,
}

impl Fingerprint {
    pub fn new(r: FieldElement, u: u64) -> Self {
        Fingerprint { r, acc: r.field().zero(), u }
    }

    pub fn field(&self) -> PrimeField {
        self.r.field()
    }

    pub fn point(&self) -> FieldElement {
        self.r
    }

    pub fn len(&self) -> u64 {
        self.u
    }

    pub fn is_empty(&self) -> bool {
        self.u == 0
    }

    pub fn value(&self) -> FieldElement {
        self.acc
    }

    /// `acc += delta * r^index`.
    pub fn update(&mut self, upd: StreamUpdate) -> Result<()> {
        let delta = self.field().from_i64(upd.delta);
        self.add_at(upd.index, delta)
    }

    /// Field-valued update, used when entries arrive already reduced.
    pub fn add_at(&mut self, index: u64, delta: FieldElement) -> Result<()> {
        if index >= self.u {
            return Err(Error::InvalidParam(format!("index {index} outside length {}", self.u)));
        }
        self.acc += delta * self.r.pow(index);
        Ok(())
    }

    pub fn merge(&mut self, other: &Fingerprint) -> Result<()> {
        self.compatible(other)?;
        self.acc += other.acc;
        Ok(())
    }

    fn compatible(&self, other: &Fingerprint) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(self.field().modulus(), other.field().modulus()));
        }
        if self.r != other.r || self.u != other.u {
            return Err(Error::InvalidParam("fingerprints use different points or lengths".into()));
        }
        Ok(())
    }

    /// Field elements held: the point and the accumulator.
    pub fn state_size(&self) -> usize {
        2
    }
}

pub fn fp_equal(a: &Fingerprint, b: &Fingerprint) -> Result<bool> {
    a.compatible(b)?;
    Ok(a.acc == b.acc)
}

/// Fingerprint of a whole update sequence.
pub fn fingerprint_of<I>(r: FieldElement, u: u64, updates: I) -> Result<Fingerprint>
where
    I: IntoIterator<Item = StreamUpdate>,
{
    let mut fp = Fingerprint::new(r, u);
    for upd in updates {
        fp.update(upd)?;
    }
    Ok(fp)
}
