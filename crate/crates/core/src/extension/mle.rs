use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::stream::StreamUpdate;

/// Number of boolean variables needed to index a universe of size `u`.
///
/// Universes are padded to the next power of two, with at least one variable.
pub fn num_vars(u: u64) -> usize {
    let mut v = 0;
    while (1u64 << v) < u {
        v += 1;
    }
    v.max(1)
}

/// Bits of `index`, most significant first: `x_1` is the top bit.
pub fn index_bits(index: u64, v: usize) -> Vec<bool> {
    (0..v).rev().map(|k| (index >> k) & 1 == 1).collect()
}

/// `chi_i(x) = prod_k chi_{i_k}(x_k)` with `chi_0(t) = 1 - t`, `chi_1(t) = t`.
pub fn chi_eval(bits: &[bool], x: &[FieldElement]) -> Result<FieldElement> {
    if bits.len() != x.len() {
        return Err(Error::LengthMismatch(bits.len(), x.len()));
    }
    let field = x
        .first()
        .map(|e| e.field())
        .ok_or_else(|| Error::InvalidParam("empty point".into()))?;
    Ok(bits.iter().zip(x).fold(field.one(), |acc, (&b, &xk)| {
        acc * if b { xk } else { field.one() - xk }
    }))
}

/// `chi_index(r)` computed straight from the bits of `index`, in `v` multiplications.
pub fn chi_index(index: u64, r: &[FieldElement]) -> FieldElement {
    let field = r[0].field();
    let v = r.len();
    let mut acc = field.one();
    for (k, &rk) in r.iter().enumerate() {
        let bit = (index >> (v - 1 - k)) & 1 == 1;
        acc *= if bit { rk } else { field.one() - rk };
    }
    acc
}

/// Streaming evaluation of the multilinear extension of a frequency vector at a
/// fixed point `r`, holding only `r` and one accumulator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MleEvalState {
    r: Vec<FieldElement>,
    acc: FieldElement,
}

impl MleEvalState {
    pub fn new(r: Vec<FieldElement>) -> Result<Self> {
        let field = r
            .first()
            .map(|e| e.field())
            .ok_or_else(|| Error::InvalidParam("evaluation point has no coordinates".into()))?;
        if r.len() >= 64 {
            return Err(Error::InvalidParam("too many variables".into()));
        }
        Ok(MleEvalState { r, acc: field.zero() })
    }

    pub fn num_vars(&self) -> usize {
        self.r.len()
    }

    pub fn point(&self) -> &[FieldElement] {
        &self.r
    }

    pub fn field(&self) -> PrimeField {
        self.acc.field()
    }

    /// `acc += delta * chi_index(r)`.
    pub fn update(&mut self, upd: StreamUpdate) -> Result<()> {
        if upd.index >> self.r.len() != 0 {
            return Err(Error::InvalidParam(format!(
                "index {} outside 2^{}",
                upd.index,
                self.r.len()
            )));
        }
        let delta = self.field().from_i64(upd.delta);
        self.acc += delta * chi_index(upd.index, &self.r);
        Ok(())
    }

    pub fn value(&self) -> FieldElement {
        self.acc
    }

    /// Adds another state's accumulator; both must share the same point.
    pub fn merge(&mut self, other: &MleEvalState) -> Result<()> {
        if self.r != other.r {
            return Err(Error::InvalidParam("cannot merge states at different points".into()));
        }
        self.acc += other.acc;
        Ok(())
    }

    /// Live field elements: the point plus the accumulator.
    pub fn state_size(&self) -> usize {
        self.r.len() + 1
    }
}

/// Evaluates the multilinear extension of `table` (length `2^v`) at `x` by
/// folding one variable at a time.
pub fn mle_full_eval(table: &[FieldElement], x: &[FieldElement]) -> Result<FieldElement> {
    if table.len() != 1usize << x.len() {
        return Err(Error::LengthMismatch(table.len(), 1usize << x.len()));
    }
    let mut cur = table.to_vec();
    for &xk in x {
        let half = cur.len() / 2;
        let (lo, hi) = cur.split_at(half);
        cur = lo.iter().zip(hi).map(|(&a, &b)| a + xk * (b - a)).collect();
    }
    Ok(cur[0])
}

/// Frequency vector mapped into the field and zero-padded to `2^v`.
pub fn padded_table(field: PrimeField, values: &[i64], v: usize) -> Vec<FieldElement> {
    let mut t: Vec<FieldElement> = values.iter().map(|&a| field.from_i64(a)).collect();
    t.resize(1usize << v, field.zero());
    t
}
