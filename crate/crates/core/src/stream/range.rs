//! Range spaces over grid and metric universes.
//!
//! A [`RangeSpace`] materializes its ranges in canonical order: non-decreasing
//! cost (squared radius, squared width, or metric radius), ties broken by the
//! lexicographic order of the range parameters. The index of a range in that
//! order is its universe element in derived streams.

use num_integer::Integer;
use num_rational::Ratio;

use super::{GridUniverse, MetricSpace, Point, StreamUpdate};
use crate::error::{Error, Result};

/// Exact range cost. Squared Euclidean quantities for grid ranges, plain
/// distances for metric ranges.
pub type Cost = Ratio<u64>;

/// Ranges above this many entries are refused rather than enumerated.
const MAX_RANGES: usize = 1 << 23;

/// Region `lo <= <normal, x> <= hi` between two parallel hyperplanes.
///
/// The normal is primitive (gcd 1) with its first nonzero coordinate positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slab {
    pub normal: Vec<i64>,
    pub lo: i64,
    pub hi: i64,
}

impl Slab {
    pub fn new(normal: Vec<i64>, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParam(format!("slab offsets {lo} > {hi}")));
        }
        if !is_canonical_normal(&normal) {
            return Err(Error::InvalidParam(format!("normal {normal:?} is not canonical")));
        }
        Ok(Slab { normal, lo, hi })
    }

    pub fn dot(&self, p: &[i64]) -> i64 {
        self.normal.iter().zip(p).map(|(a, b)| a * b).sum()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        let t = self.dot(p);
        self.lo <= t && t <= self.hi
    }

    pub fn norm2(&self) -> u64 {
        self.normal.iter().map(|&w| (w * w) as u64).sum()
    }

    /// `(hi - lo)^2 / |normal|^2`.
    pub fn width2(&self) -> Cost {
        let gap = (self.hi - self.lo) as u64;
        Ratio::new(gap * gap, self.norm2())
    }
}

pub(crate) fn is_canonical_normal(w: &[i64]) -> bool {
    match w.iter().find(|&&x| x != 0) {
        Some(&first) if first > 0 => w.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1,
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Range {
    /// Closed Euclidean ball, radius stored squared.
    Ball { center: Point, radius2: u64 },
    /// Union of `k` slabs (a single slab when `k = 1`), sorted.
    Slabs(Vec<Slab>),
    /// Union of `k` Euclidean balls as a sorted multiset of `(center, radius2)`.
    BallUnion(Vec<(Point, u64)>),
    /// Union of metric balls of a common radius around `k` distinct centers.
    MetricBallUnion { centers: Vec<usize>, radius: u64 },
}

impl Range {
    pub fn cost(&self) -> Cost {
        match self {
            Range::Ball { radius2, .. } => Ratio::from_integer(*radius2),
            Range::Slabs(slabs) => slabs.iter().map(Slab::width2).max().unwrap_or_default(),
            Range::BallUnion(balls) => {
                Ratio::from_integer(balls.iter().map(|b| b.1).max().unwrap_or(0))
            }
            Range::MetricBallUnion { radius, .. } => Ratio::from_integer(*radius),
        }
    }

    /// Sorts the components of union ranges so equal ranges compare equal.
    pub fn canonical(mut self) -> Self {
        match &mut self {
            Range::Slabs(s) => s.sort(),
            Range::BallUnion(b) => b.sort(),
            Range::MetricBallUnion { centers, .. } => centers.sort_unstable(),
            Range::Ball { .. } => {}
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeKind {
    Balls,
    Slabs { k: usize },
    BallUnions { k: usize },
    MetricBallUnions { k: usize },
}

/// Squared lengths of integer vectors in `[0, m)^d`, sorted and distinct.
pub fn representable_radii2(m: u64, d: usize) -> Vec<u64> {
    let mut set = vec![0u64];
    for _ in 0..d {
        let mut next: Vec<u64> = set
            .iter()
            .flat_map(|&s| (0..m).map(move |x| s + x * x))
            .collect();
        next.sort_unstable();
        next.dedup();
        set = next;
    }
    set
}

fn sq_dist(a: &[i64], b: &[i64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| ((x - y) * (x - y)) as u64).sum()
}

#[derive(Debug, Clone)]
pub struct RangeSpace {
    kind: RangeKind,
    grid: Option<GridUniverse>,
    metric: Option<MetricSpace>,
    entries: Vec<(Cost, Range)>,
}

impl RangeSpace {
    fn finish(
        kind: RangeKind,
        grid: Option<GridUniverse>,
        metric: Option<MetricSpace>,
        ranges: Vec<Range>,
    ) -> Result<Self> {
        let mut entries: Vec<(Cost, Range)> = ranges.into_iter().map(|r| (r.cost(), r)).collect();
        entries.sort();
        entries.dedup();
        Ok(RangeSpace { kind, grid, metric, entries })
    }

    fn check_size(n: usize) -> Result<()> {
        if n > MAX_RANGES {
            return Err(Error::InvalidParam(format!("range space of {n} ranges is too large")));
        }
        Ok(())
    }

    /// All balls with grid centers and grid-representable squared radii.
    pub fn balls(grid: GridUniverse) -> Result<Self> {
        let radii = representable_radii2(grid.m(), grid.d());
        Self::check_size(grid.size() as usize * radii.len())?;
        let mut ranges = Vec::with_capacity(grid.size() as usize * radii.len());
        for center in grid.points() {
            for &radius2 in &radii {
                ranges.push(Range::Ball { center: center.clone(), radius2 });
            }
        }
        Self::finish(RangeKind::Balls, Some(grid), None, ranges)
    }

    /// Single slabs on the grid: canonical normals with entries in
    /// `[-(m-1), m-1]` and offsets attained by grid points. In the plane this
    /// covers every line through two grid points; for `d >= 3` a supporting
    /// hyperplane can need larger entries, so the width found there is an
    /// upper bound.
    pub fn single_slabs(grid: GridUniverse) -> Result<Vec<Slab>> {
        let b = grid.m() as i64 - 1;
        let d = grid.d();
        let span = (2 * b + 1) as u64;
        let total = span.checked_pow(d as u32).ok_or_else(|| Error::InvalidParam("too many normals".into()))?;
        let mut slabs = Vec::new();
        for code in 0..total {
            let mut c = code;
            let normal: Vec<i64> = (0..d)
                .map(|_| {
                    let x = (c % span) as i64 - b;
                    c /= span;
                    x
                })
                .rev()
                .collect();
            if !is_canonical_normal(&normal) {
                continue;
            }
            let mut values: Vec<i64> = grid
                .points()
                .map(|p| normal.iter().zip(&p).map(|(w, x)| w * x).sum())
                .collect();
            values.sort_unstable();
            values.dedup();
            Self::check_size(slabs.len() + values.len() * (values.len() + 1) / 2)?;
            for (i, &lo) in values.iter().enumerate() {
                for &hi in &values[i..] {
                    slabs.push(Slab { normal: normal.clone(), lo, hi });
                }
            }
        }
        Ok(slabs)
    }

    /// Unions of `k` distinct single slabs; `k = 1` is the plain slab space.
    pub fn slabs(grid: GridUniverse, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParam("k must be positive".into()));
        }
        let singles = Self::single_slabs(grid)?;
        let mut singles_sorted = singles;
        singles_sorted.sort();
        Self::check_size(binomial(singles_sorted.len(), k))?;
        let ranges = combinations(singles_sorted.len(), k, false)
            .into_iter()
            .map(|idx| Range::Slabs(idx.into_iter().map(|i| singles_sorted[i].clone()).collect()))
            .collect();
        Self::finish(RangeKind::Slabs { k }, Some(grid), None, ranges)
    }

    /// Multisets of `k` Euclidean balls.
    pub fn ball_unions(grid: GridUniverse, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParam("k must be positive".into()));
        }
        let radii = representable_radii2(grid.m(), grid.d());
        let balls: Vec<(Point, u64)> = grid
            .points()
            .flat_map(|c| radii.iter().map(move |&r| (c.clone(), r)))
            .collect();
        Self::check_size(binomial(balls.len() + k - 1, k))?;
        let ranges = combinations(balls.len(), k, true)
            .into_iter()
            .map(|idx| Range::BallUnion(idx.into_iter().map(|i| balls[i].clone()).collect()))
            .collect();
        Self::finish(RangeKind::BallUnions { k }, Some(grid), None, ranges)
    }

    /// Unions of balls with a common radius (any realized distance) around
    /// `k` distinct centers.
    pub fn metric_ball_unions(metric: MetricSpace, k: usize) -> Result<Self> {
        if k == 0 || k > metric.size() {
            return Err(Error::InvalidParam(format!("k = {k} invalid for {} points", metric.size())));
        }
        let radii = metric.distinct_distances();
        Self::check_size(binomial(metric.size(), k) * radii.len())?;
        let mut ranges = Vec::new();
        for centers in combinations(metric.size(), k, false) {
            for &radius in &radii {
                ranges.push(Range::MetricBallUnion { centers: centers.clone(), radius });
            }
        }
        Self::finish(RangeKind::MetricBallUnions { k }, None, Some(metric), ranges)
    }

    pub fn kind(&self) -> RangeKind {
        self.kind
    }

    pub fn grid(&self) -> Option<&GridUniverse> {
        self.grid.as_ref()
    }

    pub fn metric(&self) -> Option<&MetricSpace> {
        self.metric.as_ref()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: u64) -> Option<(&Cost, &Range)> {
        self.entries.get(index as usize).map(|(c, r)| (c, r))
    }

    /// Canonical enumeration, one range at a time.
    pub fn iter(&self) -> impl Iterator<Item = (&Cost, &Range)> {
        self.entries.iter().map(|(c, r)| (c, r))
    }

    pub fn index_of(&self, range: &Range) -> Option<u64> {
        let range = range.clone().canonical();
        let key = (range.cost(), range);
        self.entries.binary_search(&key).ok().map(|i| i as u64)
    }

    /// Exact membership predicate. Metric points are given as `[index]`.
    pub fn contains(&self, range: &Range, p: &[i64]) -> bool {
        match range {
            Range::Ball { center, radius2 } => sq_dist(center, p) <= *radius2,
            Range::Slabs(slabs) => slabs.iter().any(|s| s.contains(p)),
            Range::BallUnion(balls) => balls.iter().any(|(c, r2)| sq_dist(c, p) <= *r2),
            Range::MetricBallUnion { centers, radius } => {
                let metric = self.metric.as_ref().expect("metric range without metric");
                let x = p[0] as usize;
                centers.iter().any(|&c| metric.dist(c, x) <= *radius)
            }
        }
    }

    /// Indices of every range containing `p`, in canonical order.
    pub fn containing<'a>(&'a self, p: &'a [i64]) -> impl Iterator<Item = u64> + 'a {
        self.entries
            .iter()
            .enumerate()
            .filter(move |(_, (_, r))| self.contains(r, p))
            .map(|(i, _)| i as u64)
    }
}

/// Derived stream: one `(index(σ), +1)` for every point and every range `σ`
/// containing it.
pub fn derive_range_stream<P: AsRef<[i64]>>(points: &[P], rs: &RangeSpace) -> Vec<StreamUpdate> {
    points
        .iter()
        .flat_map(|p| rs.containing(p.as_ref()).map(StreamUpdate::insert).collect::<Vec<_>>())
        .collect()
}

/// Smallest index whose range has cost exactly `w`, scanning the canonical
/// enumeration and holding one range at a time.
pub fn cost_to_index(rs: &RangeSpace, w: Cost) -> Option<u64> {
    for (i, (c, _)) in rs.iter().enumerate() {
        if *c == w {
            return Some(i as u64);
        }
        if *c > w {
            return None;
        }
    }
    None
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// k-subsets (or k-multisets) of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize, with_replacement: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, rep: bool, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, if rep { i } else { i + 1 }, rep, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, with_replacement, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::frequencies;

    fn line(m: u64) -> GridUniverse {
        GridUniverse::new(m, 1).unwrap()
    }

    /// Interval `[a, b]` on a line as a slab with normal (1).
    fn interval(a: i64, b: i64) -> Range {
        Range::Slabs(vec![Slab::new(vec![1], a, b).unwrap()])
    }

    #[test]
    fn enumeration_sorted_and_bijective() {
        for m in 1..=8u64 {
            for d in 1..=2usize {
                let g = GridUniverse::new(m, d).unwrap();
                for rs in [RangeSpace::balls(g).unwrap(), RangeSpace::slabs(g, 1).unwrap()] {
                    let costs: Vec<Cost> = rs.iter().map(|(c, _)| *c).collect();
                    assert!(costs.windows(2).all(|w| w[0] <= w[1]));
                    for (i, (c, r)) in rs.iter().enumerate() {
                        assert_eq!(*c, r.cost());
                        assert_eq!(rs.index_of(r), Some(i as u64));
                    }
                }
            }
        }
    }

    #[test]
    fn ties_are_lexicographic() {
        let rs = RangeSpace::balls(GridUniverse::new(3, 2).unwrap()).unwrap();
        let entries: Vec<_> = rs.iter().collect();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                assert!(w[0].1 < w[1].1);
            }
        }
    }

    #[test]
    fn singleton_point_on_line_hits_every_covering_interval() {
        let rs = RangeSpace::slabs(line(3), 1).unwrap();
        assert_eq!(rs.len(), 6);
        let derived = derive_range_stream(&[vec![1i64]], &rs);
        let expected: Vec<u64> = [(0, 1), (0, 2), (1, 1), (1, 2)]
            .iter()
            .map(|&(a, b)| rs.index_of(&interval(a, b)).unwrap())
            .collect();
        let mut got: Vec<u64> = derived.iter().map(|u| u.index).collect();
        got.sort_unstable();
        let mut expected_sorted = expected;
        expected_sorted.sort_unstable();
        assert_eq!(got, expected_sorted);
        assert!(derived.iter().all(|u| u.delta == 1));
    }

    #[test]
    fn derived_frequency_is_point_count() {
        let rs = RangeSpace::slabs(line(8), 1).unwrap();
        let pts = vec![vec![1i64], vec![2], vec![3]];
        let derived = derive_range_stream(&pts, &rs);
        let freq = frequencies(derived, rs.len()).unwrap();
        assert_eq!(freq.get(rs.index_of(&interval(2, 5)).unwrap()), 2);
        assert!(derive_range_stream::<Vec<i64>>(&[], &rs).is_empty());
    }

    #[test]
    fn derived_frequencies_match_brute_force() {
        let g = GridUniverse::new(4, 2).unwrap();
        let pts: Vec<Point> = vec![vec![0, 0], vec![3, 1], vec![2, 2], vec![2, 2], vec![1, 3]];
        for rs in [RangeSpace::balls(g).unwrap(), RangeSpace::slabs(g, 1).unwrap()] {
            let freq = frequencies(derive_range_stream(&pts, &rs), rs.len()).unwrap();
            for (i, (_, r)) in rs.iter().enumerate() {
                let brute = pts
                    .iter()
                    .filter(|p| match r {
                        Range::Ball { center, radius2 } => sq_dist(center, p) <= *radius2,
                        Range::Slabs(s) => s.iter().any(|s| {
                            let t: i64 = s.normal.iter().zip(p.iter()).map(|(a, b)| a * b).sum();
                            s.lo <= t && t <= s.hi
                        }),
                        _ => unreachable!(),
                    })
                    .count() as i64;
                assert_eq!(freq.get(i as u64), brute);
            }
        }
    }

    #[test]
    fn cost_to_index_examples() {
        let rs = RangeSpace::slabs(line(4), 1).unwrap();
        assert_eq!(cost_to_index(&rs, *rs.get(0).unwrap().0), Some(0));
        // widths on a line are integers 0..3; a half-width never occurs
        assert_eq!(cost_to_index(&rs, Ratio::new(1, 4)), None);
        let first_w1 = rs.iter().position(|(c, _)| *c == Ratio::from_integer(1)).unwrap() as u64;
        assert_eq!(cost_to_index(&rs, Ratio::from_integer(1)), Some(first_w1));
        assert_eq!(rs.get(first_w1).unwrap().1, &interval(0, 1));

        let balls = RangeSpace::balls(GridUniverse::new(3, 2).unwrap()).unwrap();
        assert_eq!(cost_to_index(&balls, Ratio::from_integer(3)), None);
        assert_eq!(cost_to_index(&balls, Ratio::from_integer(1000)), None);
    }

    #[test]
    fn cost_to_index_is_minimal_for_every_cost() {
        let rs = RangeSpace::slabs(GridUniverse::new(4, 2).unwrap(), 1).unwrap();
        let mut costs: Vec<Cost> = rs.iter().map(|(c, _)| *c).collect();
        costs.dedup();
        for c in costs {
            let idx = cost_to_index(&rs, c).unwrap();
            let brute = rs.iter().position(|(x, _)| *x == c).unwrap() as u64;
            assert_eq!(idx, brute);
        }
    }

    #[test]
    fn slab_count_within_rangesize_bound() {
        for m in 2..=5u64 {
            let g = GridUniverse::new(m, 2).unwrap();
            let rs = RangeSpace::slabs(g, 1).unwrap();
            let bound = binomial(2 * g.size() as usize, 3);
            assert!(rs.len() <= bound, "m={m}: {} > {bound}", rs.len());
        }
    }

    #[test]
    fn slab_width_is_exact() {
        let s = Slab::new(vec![1, 1], 0, 2).unwrap();
        assert_eq!(s.width2(), Ratio::new(2, 1));
        assert!(Slab::new(vec![-1, 0], 0, 1).is_err());
        assert!(Slab::new(vec![2, 2], 0, 1).is_err());
        assert!(Slab::new(vec![1, 0], 2, 1).is_err());
    }

    #[test]
    fn metric_unions() {
        let pts = [0u64, 10, 11];
        let ms = MetricSpace::new(pts.iter().map(|&a| pts.iter().map(|&b| a.abs_diff(b)).collect()).collect())
            .unwrap();
        let rs = RangeSpace::metric_ball_unions(ms, 2).unwrap();
        assert_eq!(rs.len(), 3 * 4);
        let r = Range::MetricBallUnion { centers: vec![2, 0], radius: 1 };
        let idx = rs.index_of(&r).unwrap();
        let (_, stored) = rs.get(idx).unwrap();
        assert!(rs.contains(stored, &[1]));
        assert!(rs.contains(stored, &[0]));
        let r0 = Range::MetricBallUnion { centers: vec![0, 2], radius: 0 };
        assert!(!rs.contains(&r0, &[1]));
    }

    #[test]
    fn k_unions_are_unions() {
        let g = GridUniverse::new(3, 1).unwrap();
        let rs = RangeSpace::ball_unions(g, 2).unwrap();
        let singles = RangeSpace::balls(g).unwrap();
        assert_eq!(rs.len(), binomial(singles.len() + 1, 2));
        let two = RangeSpace::slabs(g, 2).unwrap();
        for (_, r) in two.iter() {
            if let Range::Slabs(s) = r {
                assert_eq!(s.len(), 2);
                assert!(s[0] < s[1]);
            }
        }
    }

    #[test]
    fn radii_set() {
        assert_eq!(representable_radii2(3, 1), vec![0, 1, 4]);
        assert_eq!(representable_radii2(3, 2), vec![0, 1, 2, 4, 5, 8]);
    }
}
