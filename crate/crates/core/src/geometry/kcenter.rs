//! Metric k-center, verified to within a factor of two.

use rand::Rng;

use super::{recv_claim, require_distinct, ClaimFields, GeometryObserver};
use crate::error::{Error, Rejection, Result};
use crate::field::PrimeField;
use crate::stream::{MetricSpace, Range, RangeKind, RangeSpace, StreamUpdate};
use crate::transport::{Link, StateMeter};

/// `k` centers, the covering radius, and `k + 1` stream points pairwise at
/// least `radius` apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KCenterClaim {
    pub centers: Vec<usize>,
    pub radius: u64,
    pub witness: Vec<usize>,
}

fn fmt_ids(ids: &[usize]) -> String {
    ids.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn parse_ids(s: &str) -> Result<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(super::parse_num).collect()
}

impl KCenterClaim {
    pub fn to_text(&self) -> String {
        format!("centers={}\nradius={}\nwitness={}\n", fmt_ids(&self.centers), self.radius, fmt_ids(&self.witness))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f = ClaimFields::parse(text)?;
        Ok(KCenterClaim {
            centers: parse_ids(f.get("centers")?)?,
            radius: f.num("radius")?,
            witness: parse_ids(f.get("witness")?)?,
        })
    }
}

/// Gonzalez farthest-first traversal from the lowest stream point, ties to
/// the lowest index. With at most `k` distinct points the radius is zero, the
/// witness is every distinct point, and the centers are padded with the
/// lowest unused metric points.
pub fn kcenter2_prove(metric: &MetricSpace, points: &[usize], k: usize) -> Result<KCenterClaim> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.is_empty() || k == 0 || k > metric.size() {
        return Err(Error::InvalidParam(format!("k-center needs points and 1 <= k <= {}", metric.size())));
    }
    if pts.last().is_some_and(|&p| p >= metric.size()) {
        return Err(Error::InvalidParam("point outside the metric".into()));
    }
    let near = |centers: &[usize], p: usize| centers.iter().map(|&c| metric.dist(c, p)).min().unwrap();
    // Farthest point from the centers; `max_by_key` keeps the last maximum, so
    // scan in reverse to favor the lowest index.
    let farthest = |centers: &[usize]| pts.iter().rev().copied().max_by_key(|&p| near(centers, p)).unwrap();
    if pts.len() <= k {
        let mut centers = pts.clone();
        for c in 0..metric.size() {
            if centers.len() == k {
                break;
            }
            if !pts.contains(&c) {
                centers.push(c);
            }
        }
        centers.sort_unstable();
        return Ok(KCenterClaim { centers, radius: 0, witness: pts });
    }
    let mut centers = vec![pts[0]];
    while centers.len() < k {
        centers.push(farthest(&centers));
    }
    let u = farthest(&centers);
    let radius = near(&centers, u);
    let mut witness = centers.clone();
    witness.push(u);
    centers.sort_unstable();
    Ok(KCenterClaim { centers, radius, witness })
}

/// Largest realized distance not above `r`; membership in a ball of radius
/// `r` is the same for both.
fn realized_radius(metric: &MetricSpace, r: u64) -> u64 {
    metric.distinct_distances().into_iter().take_while(|&x| x <= r).last().unwrap_or(0)
}

#[derive(Debug, Clone)]
pub struct KCenterVerifier {
    metric: MetricSpace,
    k: usize,
    obs: GeometryObserver,
}

impl KCenterVerifier {
    pub fn new<R: Rng + ?Sized>(field: PrimeField, metric: MetricSpace, k: usize, rng: &mut R) -> Result<Self> {
        Self::with_range_space(field, RangeSpace::metric_ball_unions(metric, k)?, rng)
    }

    pub fn with_range_space<R: Rng + ?Sized>(field: PrimeField, rs: RangeSpace, rng: &mut R) -> Result<Self> {
        let metric = rs.metric().cloned().ok_or_else(|| Error::InvalidParam("k-center needs a metric range space".into()))?;
        let RangeKind::MetricBallUnions { k } = rs.kind() else {
            return Err(Error::InvalidParam("k-center needs a metric ball-union range space".into()));
        };
        let obs = GeometryObserver::new(field, metric.size() as u64, rs, k + 1, rng)?;
        Ok(KCenterVerifier { metric, k, obs })
    }

    pub fn observe(&mut self, upd: StreamUpdate, meter: &mut StateMeter) -> Result<()> {
        self.obs.observe(upd, &[upd.index as i64], meter)
    }

    pub fn state_size(&self) -> usize {
        self.obs.state_size()
    }

    pub fn verify(&self, link: &mut Link, meter: &mut StateMeter) -> Result<Vec<String>> {
        let claim = KCenterClaim::parse(&recv_claim(link)?)?;
        let m = self.metric.size();
        if claim.centers.len() != self.k {
            return Err(Rejection::Malformed(format!("expected {} centers", self.k)).into());
        }
        if claim.centers.iter().chain(&claim.witness).any(|&p| p >= m) {
            return Err(Rejection::Malformed("point outside the metric".into()).into());
        }
        require_distinct(&claim.centers)?;
        require_distinct(&claim.witness)?;
        let w = claim.witness.len();
        let size_ok = if claim.radius > 0 { w == self.k + 1 } else { (1..=self.k + 1).contains(&w) };
        if !size_ok {
            return Err(Rejection::WitnessSize { expected: self.k + 1, got: w }.into());
        }
        for (i, &a) in claim.witness.iter().enumerate() {
            for &b in &claim.witness[i + 1..] {
                if self.metric.dist(a, b) < claim.radius {
                    return Err(Rejection::Distance.into());
                }
            }
        }
        let range = Range::MetricBallUnion {
            centers: claim.centers.clone(),
            radius: realized_radius(&self.metric, claim.radius),
        };
        self.obs.range_count(link, &range, meter)?;
        let idx: Vec<u64> = claim.witness.iter().map(|&p| p as u64).collect();
        self.obs.witness_queries(link, &idx, meter)?;
        Ok(vec![format!("radius={}", claim.radius), format!("centers={}", fmt_ids(&claim.centers))])
    }
}

#[cfg(test)]
mod tests {
    use super::super::harness::run;
    use super::super::serve_geometry;
    use super::super::meb::combinations;
    use super::*;
    use crate::pq_rc::ProverOptions;
    use crate::stream::{frequencies, gen::random_metric};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn line(xs: &[u64]) -> MetricSpace {
        MetricSpace::new(xs.iter().map(|&a| xs.iter().map(|&b| a.abs_diff(b)).collect()).collect()).unwrap()
    }

    /// Optimal k-center cost with centers anywhere in the metric.
    fn oracle_opt(metric: &MetricSpace, points: &[usize], k: usize) -> u64 {
        combinations(metric.size(), k)
            .iter()
            .map(|cs| points.iter().map(|&p| cs.iter().map(|&c| metric.dist(c, p)).min().unwrap()).max().unwrap())
            .min()
            .unwrap()
    }

    fn exchange(rs: &RangeSpace, points: &[usize], claim: &KCenterClaim, opts: ProverOptions, seed: u64) -> Result<Vec<String>> {
        let field = PrimeField::mersenne61();
        let m = rs.metric().unwrap().size();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut v = KCenterVerifier::with_range_space(field, rs.clone(), &mut rng).unwrap();
        let mut meter = StateMeter::default();
        let ups: Vec<StreamUpdate> = points.iter().map(|&p| StreamUpdate::insert(p as u64)).collect();
        for &u in &ups {
            v.observe(u, &mut meter).unwrap();
        }
        let freqs = frequencies(ups, m).unwrap();
        let coords: Vec<Vec<i64>> = points.iter().map(|&p| vec![p as i64]).collect();
        let text = claim.to_text();
        let (p, res) = run(
            |link| serve_geometry(link, &text, &coords, freqs.values(), rs, field, opts),
            |link, meter| v.verify(link, meter),
        );
        p.unwrap();
        res
    }

    #[test]
    fn line_example() {
        let metric = line(&[0, 10, 11]);
        let c = kcenter2_prove(&metric, &[0, 1, 2], 2).unwrap();
        assert_eq!(c, KCenterClaim { centers: vec![0, 2], radius: 1, witness: vec![0, 2, 1] });
        let rs = RangeSpace::metric_ball_unions(metric, 2).unwrap();
        exchange(&rs, &[0, 1, 2], &c, ProverOptions::default(), 1).unwrap();
        let manual = KCenterClaim { centers: vec![0, 1], radius: 1, witness: vec![0, 1, 2] };
        let out = exchange(&rs, &[0, 1, 2], &manual, ProverOptions::default(), 2).unwrap();
        assert_eq!(out[0], "radius=1");
    }

    #[test]
    fn degenerate_inputs() {
        let metric = line(&[0, 3, 7, 8]);
        let c = kcenter2_prove(&metric, &[2, 2], 1).unwrap();
        assert_eq!(c, KCenterClaim { centers: vec![2], radius: 0, witness: vec![2] });
        let c = kcenter2_prove(&metric, &[3, 1, 3], 3).unwrap();
        assert_eq!(c, KCenterClaim { centers: vec![0, 1, 3], radius: 0, witness: vec![1, 3] });
        let rs = RangeSpace::metric_ball_unions(metric.clone(), 3).unwrap();
        exchange(&rs, &[3, 1, 3], &c, ProverOptions::default(), 1).unwrap();
        let all = kcenter2_prove(&metric, &[0, 1, 2, 3], 4).unwrap();
        assert_eq!(all.radius, 0);
    }

    #[test]
    fn random_metrics_are_two_approximate() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for seed in 0..6 {
            let metric = random_metric(10, &mut rng);
            let k = rng.gen_range(1..=3);
            let pts: Vec<usize> = (0..8).map(|_| rng.gen_range(0..10)).collect();
            let c = kcenter2_prove(&metric, &pts, k).unwrap();
            let opt = oracle_opt(&metric, &pts, k);
            assert!(opt <= c.radius && c.radius <= 2 * opt, "opt {opt} claim {}", c.radius);
            let rs = RangeSpace::metric_ball_unions(metric, k).unwrap();
            exchange(&rs, &pts, &c, ProverOptions::default(), seed).unwrap();
        }
    }

    #[test]
    fn rejections() {
        let metric = line(&[0, 4, 9, 15, 16]);
        let pts = [0, 1, 2, 3, 4];
        let rs = RangeSpace::metric_ball_unions(metric.clone(), 2).unwrap();
        let honest = kcenter2_prove(&metric, &pts, 2).unwrap();
        let halved = KCenterClaim { radius: honest.radius / 2, ..honest.clone() };
        let err = exchange(&rs, &pts, &halved, ProverOptions::default(), 1).unwrap_err();
        assert!(matches!(err.rejection(), Some(Rejection::Count { .. })), "{err}");
        let err = exchange(&rs, &pts, &halved, ProverOptions { cheat: true }, 2).unwrap_err();
        assert!(err.is_reject());
        let close = KCenterClaim { witness: vec![3, 4, 0], ..honest.clone() };
        assert_eq!(exchange(&rs, &pts, &close, ProverOptions::default(), 3).unwrap_err().rejection(), Some(&Rejection::Distance));
        let short = KCenterClaim { witness: vec![0, 3], ..honest.clone() };
        assert!(matches!(
            exchange(&rs, &pts, &short, ProverOptions::default(), 4).unwrap_err().rejection(),
            Some(Rejection::WitnessSize { expected: 3, got: 2 })
        ));
        let absent = [0, 1, 3, 4];
        let c = KCenterClaim { centers: vec![0, 4], radius: 5, witness: vec![0, 2, 4] };
        assert_eq!(exchange(&rs, &absent, &c, ProverOptions::default(), 5).unwrap_err().rejection(), Some(&Rejection::NotInStream));
    }

    #[test]
    fn claim_text_round_trip() {
        let c = KCenterClaim { centers: vec![1, 4], radius: 7, witness: vec![1, 4, 2] };
        assert_eq!(KCenterClaim::parse(&c.to_text()).unwrap(), c);
        assert!(KCenterClaim::parse("centers=1\nradius=-1\nwitness=\n").is_err());
    }
}
