//! k-slab feasibility: the claimed union of `k` slabs covers every point.
//! Optimality is not verified.

use rand::Rng;

use super::{fmt_vec, parse_num, parse_vec, recv_claim, require_distinct, ClaimFields, GeometryObserver};
use crate::error::{Error, Rejection, Result};
use crate::field::PrimeField;
use crate::stream::{GridUniverse, Point, Range, RangeKind, RangeSpace, Slab, StreamUpdate};
use crate::transport::{Link, StateMeter};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSlabClaim {
    pub slabs: Vec<Slab>,
}

impl KSlabClaim {
    /// `slabs=<normal>:<lo>:<hi>;...`
    pub fn to_text(&self) -> String {
        let parts: Vec<String> =
            self.slabs.iter().map(|s| format!("{}:{}:{}", fmt_vec(&s.normal), s.lo, s.hi)).collect();
        format!("slabs={}\n", parts.join(";"))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f = ClaimFields::parse(text)?;
        let slabs = f
            .get("slabs")?
            .split(';')
            .map(|part| {
                let mut it = part.split(':');
                let (Some(w), Some(lo), Some(hi), None) = (it.next(), it.next(), it.next(), it.next()) else {
                    return Err(Rejection::Malformed(format!("slab `{part}`")).into());
                };
                Slab::new(parse_vec(w)?, parse_num(lo)?, parse_num(hi)?)
                    .map_err(|e| Rejection::Malformed(e.to_string()).into())
            })
            .collect::<Result<_>>()?;
        Ok(KSlabClaim { slabs })
    }
}

/// First covering range in canonical order.
pub fn kslab_prove(points: &[Point], rs: &RangeSpace) -> Result<KSlabClaim> {
    rs.iter()
        .find_map(|(_, r)| match r {
            Range::Slabs(s) if points.iter().all(|p| rs.contains(r, p)) => Some(KSlabClaim { slabs: s.clone() }),
            _ => None,
        })
        .ok_or_else(|| Error::InvalidParam("no k-slab in the range space covers the points".into()))
}

#[derive(Debug, Clone)]
pub struct KSlabVerifier {
    grid: GridUniverse,
    k: usize,
    obs: GeometryObserver,
}

impl KSlabVerifier {
    pub fn new<R: Rng + ?Sized>(field: PrimeField, grid: GridUniverse, k: usize, rng: &mut R) -> Result<Self> {
        Self::with_range_space(field, RangeSpace::slabs(grid, k)?, rng)
    }

    pub fn with_range_space<R: Rng + ?Sized>(field: PrimeField, rs: RangeSpace, rng: &mut R) -> Result<Self> {
        let grid = *rs.grid().ok_or_else(|| Error::InvalidParam("k-slab needs a grid range space".into()))?;
        let RangeKind::Slabs { k } = rs.kind() else {
            return Err(Error::InvalidParam("k-slab needs a slab range space".into()));
        };
        let obs = GeometryObserver::new(field, grid.size(), rs, 0, rng)?;
        Ok(KSlabVerifier { grid, k, obs })
    }

    pub fn observe(&mut self, upd: StreamUpdate, meter: &mut StateMeter) -> Result<()> {
        let p = self.grid.decode(upd.index);
        self.obs.observe(upd, &p, meter)
    }

    pub fn state_size(&self) -> usize {
        self.obs.state_size()
    }

    pub fn verify(&self, link: &mut Link, meter: &mut StateMeter) -> Result<Vec<String>> {
        let claim = KSlabClaim::parse(&recv_claim(link)?)?;
        if claim.slabs.len() != self.k {
            return Err(Rejection::WitnessSize { expected: self.k, got: claim.slabs.len() }.into());
        }
        require_distinct(&claim.slabs)?;
        let range = Range::Slabs(claim.slabs.clone());
        self.obs.range_count(link, &range, meter)?;
        Ok(vec![format!("width2={}", range.cost())])
    }
}
