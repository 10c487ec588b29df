//! The data-stream input model and everything derived from it: file formats,
//! grid and metric universes, range spaces with their canonical ordering, and
//! test-data generators.

mod format;
pub mod gen;
mod metric;
mod ortho;
mod range;

pub use format::{open_stream, parse_metric, parse_stream, read_points, StreamHeader, StreamReader};
pub use metric::MetricSpace;
pub use ortho::{generate_almost_orthogonal, ortho_count, AlmostOrthogonalSet, MAX_ORTHO_BATCHES};
pub use range::{
    cost_to_index, derive_range_stream, representable_radii2, Cost, Range, RangeKind, RangeSpace,
    Slab,
};

use crate::error::{Error, Result};

/// One `(index, delta)` update to the frequency vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamUpdate {
    pub index: u64,
    pub delta: i64,
}

impl StreamUpdate {
    pub fn new(index: u64, delta: i64) -> Self {
        StreamUpdate { index, delta }
    }

    pub fn insert(index: u64) -> Self {
        StreamUpdate { index, delta: 1 }
    }
}

/// Grid point; coordinates lie in `[0, m)`.
pub type Point = Vec<i64>;

/// The discretized universe `[m]^d`, indexed row-major with the first
/// coordinate most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridUniverse {
    m: u64,
    d: usize,
    size: u64,
}

impl GridUniverse {
    pub fn new(m: u64, d: usize) -> Result<Self> {
        if m == 0 || d == 0 {
            return Err(Error::InvalidParam("grid needs m >= 1 and d >= 1".into()));
        }
        let size = (0..d)
            .try_fold(1u64, |acc, _| acc.checked_mul(m))
            .filter(|&s| s < 1 << 62)
            .ok_or_else(|| Error::InvalidParam(format!("grid {m}^{d} is too large")))?;
        Ok(GridUniverse { m, d, size })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `u = m^d`.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.d && p.iter().all(|&x| x >= 0 && (x as u64) < self.m)
    }

    pub fn encode(&self, p: &[i64]) -> Result<u64> {
        if !self.contains(p) {
            return Err(Error::InvalidParam(format!("point {p:?} outside [{}]^{}", self.m, self.d)));
        }
        Ok(p.iter().fold(0u64, |acc, &x| acc * self.m + x as u64))
    }

    pub fn decode(&self, mut index: u64) -> Point {
        let mut p = vec![0i64; self.d];
        for slot in p.iter_mut().rev() {
            *slot = (index % self.m) as i64;
            index /= self.m;
        }
        p
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.size).map(|i| self.decode(i))
    }
}

/// Explicit frequency vector. Only the prover (and test oracles) hold one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyOracle {
    values: Vec<i64>,
}

impl FrequencyOracle {
    pub fn zeros(u: usize) -> Self {
        FrequencyOracle { values: vec![0; u] }
    }

    pub fn from_values(values: Vec<i64>) -> Self {
        FrequencyOracle { values }
    }

    pub fn apply(&mut self, upd: StreamUpdate) -> Result<()> {
        let slot = self
            .values
            .get_mut(upd.index as usize)
            .ok_or_else(|| Error::InvalidParam(format!("index {} out of universe", upd.index)))?;
        *slot += upd.delta;
        Ok(())
    }

    pub fn get(&self, index: u64) -> i64 {
        self.values.get(index as usize).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }
}

/// Aggregates a stream into its frequency vector over `[0, u)`.
pub fn frequencies<I>(updates: I, u: usize) -> Result<FrequencyOracle>
where
    I: IntoIterator<Item = StreamUpdate>,
{
    let mut f = FrequencyOracle::zeros(u);
    for upd in updates {
        f.apply(upd)?;
    }
    Ok(f)
}
