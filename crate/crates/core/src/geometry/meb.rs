//! Minimum enclosing ball.

use rand::Rng;

use super::exact::{self, Q};
use super::{
    fmt_points, fmt_vec, parse_points, parse_vec, recv_claim, require_distinct, ClaimFields, GeometryObserver,
};
use crate::error::{Error, Rejection, Result};
use crate::field::PrimeField;
use crate::stream::{representable_radii2, GridUniverse, Point, Range, RangeSpace, StreamUpdate};
use crate::transport::{Link, StateMeter};

/// Rounded center, exact squared radius, and the boundary witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MebClaim {
    pub center: Point,
    pub radius2: Q,
    pub witness: Vec<Point>,
}

impl MebClaim {
    pub fn to_text(&self) -> String {
        format!(
            "center={}\nradius2={}\nwitness={}\n",
            fmt_vec(&self.center),
            self.radius2,
            fmt_points(&self.witness)
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f = ClaimFields::parse(text)?;
        Ok(MebClaim {
            center: parse_vec(f.get("center")?)?,
            radius2: f.num("radius2")?,
            witness: parse_points(f.get("witness")?)?,
        })
    }
}

/// Smallest representable squared radius `R2` with `R >= r + 1`, where
/// `r2 = r^2`; the largest representable value if none is big enough.
pub fn feasibility_radius2(r2: Q, m: u64, d: usize) -> u64 {
    let radii = representable_radii2(m, d);
    let one = Q::from_integer(1);
    let four = Q::from_integer(4);
    radii
        .iter()
        .copied()
        .find(|&big| {
            let t = Q::from_integer(big as i128) - r2 - one;
            t >= Q::from_integer(0) && t * t >= four * r2
        })
        .unwrap_or(*radii.last().expect("radii always contain 0"))
}

/// Exact MEB of the distinct input points, with the rounded center and a
/// smallest subset of boundary points whose own MEB is the same ball.
pub fn meb_prove(points: &[Point]) -> Result<MebClaim> {
    let pts = exact::distinct(points);
    let (c, r2) = exact::meb(&pts).ok_or_else(|| Error::InvalidParam("MEB of an empty point set".into()))?;
    let d = pts[0].len();
    let boundary: Vec<Point> = pts.iter().filter(|p| exact::dist2(p, &c) == r2).cloned().collect();
    for size in 1..=(d + 1).min(boundary.len()) {
        for idx in combinations(boundary.len(), size) {
            let t: Vec<Point> = idx.iter().map(|&i| boundary[i].clone()).collect();
            if exact::meb_by_subsets(&t).is_some_and(|(tc, tr)| tc == c && tr == r2) {
                return Ok(MebClaim { center: exact::round_point(&c), radius2: r2, witness: t });
            }
        }
    }
    Err(Error::Internal(format!("no boundary witness for MEB of {pts:?}")))
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone)]
pub struct MebVerifier {
    grid: GridUniverse,
    obs: GeometryObserver,
}

impl MebVerifier {
    pub fn new<R: Rng + ?Sized>(field: PrimeField, grid: GridUniverse, rng: &mut R) -> Result<Self> {
        Self::with_range_space(field, RangeSpace::balls(grid)?, rng)
    }

    /// `rs` must be the ball space of the stream's grid.
    pub fn with_range_space<R: Rng + ?Sized>(field: PrimeField, rs: RangeSpace, rng: &mut R) -> Result<Self> {
        let grid = *rs.grid().ok_or_else(|| Error::InvalidParam("MEB needs a grid range space".into()))?;
        let obs = GeometryObserver::new(field, grid.size(), rs, grid.d() + 2, rng)?;
        Ok(MebVerifier { grid, obs })
    }

    pub fn observe(&mut self, upd: StreamUpdate, meter: &mut StateMeter) -> Result<()> {
        let p = self.grid.decode(upd.index);
        self.obs.observe(upd, &p, meter)
    }

    pub fn state_size(&self) -> usize {
        self.obs.state_size()
    }

    pub fn verify(&self, link: &mut Link, meter: &mut StateMeter) -> Result<Vec<String>> {
        let claim = MebClaim::parse(&recv_claim(link)?)?;
        let g = &self.grid;
        if claim.witness.len() > g.d() + 2 {
            return Err(Rejection::WitnessTooLarge.into());
        }
        if claim.witness.is_empty() {
            return Err(Rejection::WitnessSize { expected: 1, got: 0 }.into());
        }
        if !claim.witness.iter().chain([&claim.center]).all(|p| g.contains(p)) {
            return Err(Rejection::Malformed("claim point outside the grid".into()).into());
        }
        require_distinct(&claim.witness)?;
        let (c, r2) = exact::meb_by_subsets(&claim.witness).expect("nonempty witness");
        if claim.radius2 != r2 {
            return Err(Rejection::Radius.into());
        }
        if claim.center != exact::round_point(&c) {
            return Err(Rejection::Center.into());
        }
        let big = feasibility_radius2(r2, g.m(), g.d());
        self.obs.range_count(link, &Range::Ball { center: claim.center.clone(), radius2: big }, meter)?;
        let idx: Vec<u64> = claim.witness.iter().map(|p| g.encode(p)).collect::<Result<_>>()?;
        self.obs.witness_queries(link, &idx, meter)?;
        Ok(vec![format!("radius2={}", claim.radius2), format!("center={}", fmt_vec(&claim.center))])
    }
}
