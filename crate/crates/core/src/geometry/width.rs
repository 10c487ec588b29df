//! Width: the minimum distance between two parallel hyperplanes enclosing
//! the points.

use rand::Rng;

use super::exact;
use super::meb::combinations;
use super::{
    fmt_points, fmt_vec, parse_points, parse_vec, recv_claim, require_distinct, ClaimFields, GeometryObserver,
};
use crate::error::{Error, Rejection, Result};
use crate::field::PrimeField;
use crate::stream::{GridUniverse, Point, Range, RangeSpace, Slab, StreamUpdate};
use crate::transport::{Link, StateMeter};

/// Covering slab with `t1` on its `lo` hyperplane and `t2` on its `hi`
/// hyperplane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthClaim {
    pub slab: Slab,
    pub t1: Vec<Point>,
    pub t2: Vec<Point>,
}

impl WidthClaim {
    pub fn to_text(&self) -> String {
        format!(
            "normal={}\nlo={}\nhi={}\nt1={}\nt2={}\n",
            fmt_vec(&self.slab.normal),
            self.slab.lo,
            self.slab.hi,
            fmt_points(&self.t1),
            fmt_points(&self.t2)
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f = ClaimFields::parse(text)?;
        let slab = Slab::new(parse_vec(f.get("normal")?)?, f.num("lo")?, f.num("hi")?)
            .map_err(|e| Rejection::Malformed(e.to_string()))?;
        Ok(WidthClaim { slab, t1: parse_points(f.get("t1")?)?, t2: parse_points(f.get("t2")?)? })
    }
}

fn rank_of(points: &[Point]) -> usize {
    let refs: Vec<&[i64]> = points.iter().map(Vec::as_slice).collect();
    exact::affine_rank(&refs)
}

fn independent(points: &[Point]) -> bool {
    !points.is_empty() && rank_of(points) == points.len() - 1
}

/// First covering slab in canonical order, so of minimum width, with an
/// incidence witness. Flat point sets get a width-zero slab and a maximal
/// affinely independent witness.
pub fn width_prove(points: &[Point], rs: &RangeSpace) -> Result<WidthClaim> {
    let pts = exact::distinct(points);
    if pts.is_empty() {
        return Err(Error::InvalidParam("width of an empty point set".into()));
    }
    let slab = rs
        .iter()
        .find_map(|(_, r)| match r {
            Range::Slabs(s) if s.len() == 1 && pts.iter().all(|p| s[0].contains(p)) => Some(s[0].clone()),
            _ => None,
        })
        .ok_or_else(|| Error::InvalidParam("no single slab in the range space covers the points".into()))?;
    if slab.lo == slab.hi {
        let mut t1: Vec<Point> = Vec::new();
        for p in &pts {
            t1.push(p.clone());
            if !independent(&t1) {
                t1.pop();
            }
        }
        return Ok(WidthClaim { slab, t1, t2: Vec::new() });
    }
    let d = pts[0].len();
    let on_lo: Vec<&Point> = pts.iter().filter(|p| slab.dot(p) == slab.lo).collect();
    let on_hi: Vec<&Point> = pts.iter().filter(|p| slab.dot(p) == slab.hi).collect();
    for k in 1..=d {
        for a in combinations(on_lo.len(), k) {
            for b in combinations(on_hi.len(), d + 1 - k) {
                let t1: Vec<Point> = a.iter().map(|&i| on_lo[i].clone()).collect();
                let t2: Vec<Point> = b.iter().map(|&i| on_hi[i].clone()).collect();
                if independent(&[t1.clone(), t2.clone()].concat()) {
                    return Ok(WidthClaim { slab, t1, t2 });
                }
            }
        }
    }
    Err(Error::Internal(format!("no incidence witness for slab {slab:?}")))
}

#[derive(Debug, Clone)]
pub struct WidthVerifier {
    grid: GridUniverse,
    obs: GeometryObserver,
}

impl WidthVerifier {
    pub fn new<R: Rng + ?Sized>(field: PrimeField, grid: GridUniverse, rng: &mut R) -> Result<Self> {
        Self::with_range_space(field, RangeSpace::slabs(grid, 1)?, rng)
    }

    /// `rs` must be the single-slab space of the stream's grid.
    pub fn with_range_space<R: Rng + ?Sized>(field: PrimeField, rs: RangeSpace, rng: &mut R) -> Result<Self> {
        let grid = *rs.grid().ok_or_else(|| Error::InvalidParam("width needs a grid range space".into()))?;
        let obs = GeometryObserver::new(field, grid.size(), rs, grid.d() + 1, rng)?;
        Ok(WidthVerifier { grid, obs })
    }

    pub fn observe(&mut self, upd: StreamUpdate, meter: &mut StateMeter) -> Result<()> {
        let p = self.grid.decode(upd.index);
        self.obs.observe(upd, &p, meter)
    }

    pub fn state_size(&self) -> usize {
        self.obs.state_size()
    }

    pub fn verify(&self, link: &mut Link, meter: &mut StateMeter) -> Result<Vec<String>> {
        let claim = WidthClaim::parse(&recv_claim(link)?)?;
        let g = &self.grid;
        let d = g.d();
        let s = &claim.slab;
        if s.normal.len() != d {
            return Err(Rejection::Malformed("normal has the wrong dimension".into()).into());
        }
        let all = [claim.t1.clone(), claim.t2.clone()].concat();
        if !all.iter().all(|p| g.contains(p)) {
            return Err(Rejection::Malformed("witness point outside the grid".into()).into());
        }
        require_distinct(&all)?;
        let size_ok = if s.lo < s.hi {
            !claim.t1.is_empty() && !claim.t2.is_empty() && all.len() == d + 1
        } else {
            (1..=d + 1).contains(&all.len())
        };
        if !size_ok {
            return Err(Rejection::WitnessSize { expected: d + 1, got: all.len() }.into());
        }
        if !independent(&all) {
            return Err(Rejection::Malformed("witness is not affinely independent".into()).into());
        }
        if claim.t1.iter().any(|p| s.dot(p) != s.lo) || claim.t2.iter().any(|p| s.dot(p) != s.hi) {
            return Err(Rejection::Incidence.into());
        }
        self.obs.range_count(link, &Range::Slabs(vec![s.clone()]), meter)?;
        let idx: Vec<u64> = all.iter().map(|p| g.encode(p)).collect::<Result<_>>()?;
        self.obs.witness_queries(link, &idx, meter)?;
        Ok(vec![format!("width2={}", s.width2()), format!("normal={}", fmt_vec(&s.normal))])
    }
}
