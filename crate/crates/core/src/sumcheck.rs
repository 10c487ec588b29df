//! The sum-check protocol and its streaming frequency-statistic instance.
//!
//! Variables are ordered most-significant-bit first: round `j` binds `x_j`,
//! the `j`-th highest bit of a universe index. The verifier draws all of its
//! challenges before the stream so that the same point `r` feeds both the
//! streaming oracle and the rounds; challenges are still revealed one per
//! round.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Rejection, Result};
use crate::extension::{interpolate_consecutive, num_vars, padded_table, MleEvalState, UnivariatePoly};
use crate::field::{FieldElement, PrimeField};
use crate::stream::StreamUpdate;
use crate::transport::{FrameKind, Link, StateMeter};

/// A prover that answers one round at a time.
pub trait RoundProver: Send {
    fn field(&self) -> PrimeField;
    fn num_vars(&self) -> usize;
    fn degree_bound(&self, round: usize) -> usize;
    fn claimed_sum(&self) -> FieldElement;
    /// `g_j` for the current round, `j` = challenges bound so far + 1.
    fn round_message(&mut self) -> UnivariatePoly;
    fn bind(&mut self, r: FieldElement);
}

/// Pointwise combination of table values, e.g. `h(a)` or `a * chi_q`.
pub type Combiner = Arc<dyn Fn(&[FieldElement]) -> FieldElement + Send + Sync>;

/// Honest prover for `g(x) = combine(t_1~(x), ..., t_k~(x))` where each `t_i~`
/// is the multilinear extension of a table. Each round evaluates the partial
/// sum at `degree + 1` points and then folds the tables by the challenge.
pub struct ComposedMle {
    field: PrimeField,
    tables: Vec<Vec<FieldElement>>,
    combine: Combiner,
    degree: usize,
    v: usize,
    claimed: FieldElement,
}

impl ComposedMle {
    pub fn new(tables: Vec<Vec<FieldElement>>, combine: Combiner, degree: usize) -> Result<Self> {
        let first = tables.first().ok_or_else(|| Error::InvalidParam("no tables".into()))?;
        let len = first.len();
        if len < 2 || !len.is_power_of_two() || tables.iter().any(|t| t.len() != len) {
            return Err(Error::InvalidParam("tables must share a power-of-two length >= 2".into()));
        }
        let field = first[0].field();
        let v = len.trailing_zeros() as usize;
        let mut row = vec![field.zero(); tables.len()];
        let mut claimed = field.zero();
        for b in 0..len {
            for (slot, t) in row.iter_mut().zip(&tables) {
                *slot = t[b];
            }
            claimed += combine(&row);
        }
        Ok(ComposedMle { field, tables, combine, degree, v, claimed })
    }
}

impl RoundProver for ComposedMle {
    fn field(&self) -> PrimeField {
        self.field
    }

    fn num_vars(&self) -> usize {
        self.v
    }

    fn degree_bound(&self, _round: usize) -> usize {
        self.degree
    }

    fn claimed_sum(&self) -> FieldElement {
        self.claimed
    }

    fn round_message(&mut self) -> UnivariatePoly {
        let half = self.tables[0].len() / 2;
        let mut row = vec![self.field.zero(); self.tables.len()];
        let values: Vec<FieldElement> = (0..=self.degree as u64)
            .map(|t| {
                let t = self.field.elem(t);
                let mut acc = self.field.zero();
                for b in 0..half {
                    for (slot, tab) in row.iter_mut().zip(&self.tables) {
                        let (lo, hi) = (tab[b], tab[b + half]);
                        *slot = lo + t * (hi - lo);
                    }
                    acc += (self.combine)(&row);
                }
                acc
            })
            .collect();
        interpolate_consecutive(&values).expect("consecutive nodes are distinct")
    }

    fn bind(&mut self, r: FieldElement) {
        for tab in &mut self.tables {
            let half = tab.len() / 2;
            for b in 0..half {
                let (lo, hi) = (tab[b], tab[b + half]);
                tab[b] = lo + r * (hi - lo);
            }
            tab.truncate(half.max(1));
        }
    }
}

/// Reference prover: evaluates an arbitrary `g` point by point and sums over
/// the remaining cube each round. Exponential; used as a test oracle.
pub struct BruteForceProver {
    field: PrimeField,
    degrees: Vec<usize>,
    g: Combiner,
    challenges: Vec<FieldElement>,
    claimed: FieldElement,
}

impl BruteForceProver {
    pub fn new(field: PrimeField, degrees: Vec<usize>, g: Combiner) -> Self {
        let v = degrees.len();
        let claimed = (0..1u64 << v)
            .map(|x| g(&cube_point(field, x, v)))
            .fold(field.zero(), |a, b| a + b);
        BruteForceProver { field, degrees, g, challenges: Vec::new(), claimed }
    }
}

fn cube_point(field: PrimeField, x: u64, v: usize) -> Vec<FieldElement> {
    (0..v).map(|k| field.elem((x >> (v - 1 - k)) & 1)).collect()
}

impl RoundProver for BruteForceProver {
    fn field(&self) -> PrimeField {
        self.field
    }

    fn num_vars(&self) -> usize {
        self.degrees.len()
    }

    fn degree_bound(&self, round: usize) -> usize {
        self.degrees[round - 1]
    }

    fn claimed_sum(&self) -> FieldElement {
        self.claimed
    }

    fn round_message(&mut self) -> UnivariatePoly {
        let j = self.challenges.len();
        let rest = self.degrees.len() - j - 1;
        let values: Vec<FieldElement> = (0..=self.degrees[j] as u64)
            .map(|t| {
                (0..1u64 << rest)
                    .map(|x| {
                        let mut p = self.challenges.clone();
                        p.push(self.field.elem(t));
                        p.extend(cube_point(self.field, x, rest));
                        (self.g)(&p)
                    })
                    .fold(self.field.zero(), |a, b| a + b)
            })
            .collect();
        interpolate_consecutive(&values).expect("consecutive nodes are distinct")
    }

    fn bind(&mut self, r: FieldElement) {
        self.challenges.push(r);
    }
}

/// Claims `H + delta` and keeps every round-sum check consistent by adding
/// `delta_j * X` to the honest message (`delta_j / 2` for degree-0 rounds),
/// where `delta_{j+1}` is the correction's value at `r_j`. Only the final
/// check can catch it.
pub struct GreedyCheater<P> {
    inner: P,
    delta0: FieldElement,
    delta: FieldElement,
    round: usize,
}

impl<P: RoundProver> GreedyCheater<P> {
    pub fn new(inner: P, delta: FieldElement) -> Self {
        GreedyCheater { inner, delta0: delta, delta, round: 1 }
    }

    fn correction(&self) -> UnivariatePoly {
        let f = self.inner.field();
        if self.inner.degree_bound(self.round) == 0 {
            let half = f.elem(2).inverse().expect("odd modulus");
            UnivariatePoly::constant(self.delta * half)
        } else {
            UnivariatePoly::new(f, vec![f.zero(), self.delta])
        }
    }
}

impl<P: RoundProver> RoundProver for GreedyCheater<P> {
    fn field(&self) -> PrimeField {
        self.inner.field()
    }

    fn num_vars(&self) -> usize {
        self.inner.num_vars()
    }

    fn degree_bound(&self, round: usize) -> usize {
        self.inner.degree_bound(round)
    }

    fn claimed_sum(&self) -> FieldElement {
        self.inner.claimed_sum() + self.delta0
    }

    fn round_message(&mut self) -> UnivariatePoly {
        self.inner.round_message().add(&self.correction())
    }

    fn bind(&mut self, r: FieldElement) {
        self.delta = self.correction().evaluate(r);
        self.round += 1;
        self.inner.bind(r);
    }
}

/// Verifier state: pre-drawn challenges, degree bounds, and the running
/// claim `g_{j-1}(r_{j-1})`.
#[derive(Debug, Clone)]
pub struct SumcheckVerifier {
    degree_bounds: Vec<usize>,
    challenges: Vec<FieldElement>,
    expected: FieldElement,
    round: usize,
}

impl SumcheckVerifier {
    pub fn new(claim: FieldElement, degree_bounds: Vec<usize>, challenges: Vec<FieldElement>) -> Result<Self> {
        if degree_bounds.len() != challenges.len() {
            return Err(Error::LengthMismatch(degree_bounds.len(), challenges.len()));
        }
        if degree_bounds.is_empty() {
            return Err(Error::InvalidParam("sum-check needs at least one variable".into()));
        }
        Ok(SumcheckVerifier { degree_bounds, challenges, expected: claim, round: 0 })
    }

    pub fn num_vars(&self) -> usize {
        self.degree_bounds.len()
    }

    /// Checks round `j`'s coefficient vector and returns `r_j`.
    pub fn receive(&mut self, coeffs: &[FieldElement]) -> Result<FieldElement> {
        let j = self.round + 1;
        let bound = *self
            .degree_bounds
            .get(self.round)
            .ok_or_else(|| Error::Protocol(format!("unexpected round {j}")))?;
        if coeffs.len() > bound + 1 {
            return Err(Rejection::Degree { round: j }.into());
        }
        if coeffs.len() < bound + 1 {
            return Err(Rejection::Malformed(format!(
                "round {j}: {} coefficients, expected {}",
                coeffs.len(),
                bound + 1
            ))
            .into());
        }
        let g = UnivariatePoly::new(self.expected.field(), coeffs.to_vec());
        if g.sum_over_bit() != self.expected {
            return Err(Rejection::Sum { round: j }.into());
        }
        let r = self.challenges[self.round];
        self.expected = g.evaluate(r);
        self.round = j;
        Ok(r)
    }

    /// `g_v(r_v) == g(r_1, ..., r_v)`.
    pub fn finish(&self, g_at_r: FieldElement) -> Result<()> {
        if self.round != self.degree_bounds.len() {
            return Err(Error::Protocol("final check before the last round".into()));
        }
        if self.expected != g_at_r {
            return Err(Rejection::FinalCheck.into());
        }
        Ok(())
    }

    /// Elements held besides the shared point: running claim and one message.
    pub fn working_elements(&self) -> usize {
        1 + self.degree_bounds.iter().max().copied().unwrap_or(0) + 1
    }
}

/// Prover side over a link: claim at round 0, then one polynomial per round.
pub fn prove_sumcheck(link: &mut Link, session: u32, prover: &mut dyn RoundProver) -> Result<()> {
    let field = prover.field();
    link.send_elements(session, 0, FrameKind::Claim, &[prover.claimed_sum()])?;
    for j in 1..=prover.num_vars() {
        let msg = prover.round_message();
        // a cheater's message may exceed the bound; it is then sent unpadded
        let coeffs = msg.padded(prover.degree_bound(j) + 1).unwrap_or_else(|_| msg.coeffs().to_vec());
        link.send_elements(session, j as u32, FrameKind::Poly, &coeffs)?;
        let f = link.expect(session, j as u32, FrameKind::Challenge)?;
        let r = f.decode_elements(field)?;
        let r = *r.first().ok_or_else(|| Error::Protocol("empty challenge".into()))?;
        prover.bind(r);
    }
    Ok(())
}

/// Verifier side over a link. `oracle` is the verifier's own `g(r)`, known
/// after the stream. `base_elements` is the rest of the verifier's live
/// state (for example the MLE state holding `r`). Returns the claim.
pub fn verify_sumcheck(
    link: &mut Link,
    session: u32,
    degree_bounds: Vec<usize>,
    challenges: &[FieldElement],
    oracle: FieldElement,
    base_elements: usize,
    meter: &mut StateMeter,
) -> Result<FieldElement> {
    let field = oracle.field();
    let f = link.expect(session, 0, FrameKind::Claim)?;
    let claim = match f.decode_elements(field)?.as_slice() {
        [c] => *c,
        other => return Err(Rejection::Malformed(format!("claim of {} elements", other.len())).into()),
    };
    let mut vs = SumcheckVerifier::new(claim, degree_bounds, challenges.to_vec())?;
    meter.observe(base_elements + vs.working_elements());
    for j in 1..=vs.num_vars() as u32 {
        let f = link.expect(session, j, FrameKind::Poly)?;
        let r = vs.receive(&f.decode_elements(field)?)?;
        link.send_elements(session, j, FrameKind::Challenge, &[r])?;
    }
    vs.finish(oracle)?;
    Ok(claim)
}

/// `h(a)` applied pointwise.
fn poly_combiner(h: UnivariatePoly) -> Combiner {
    Arc::new(move |vals: &[FieldElement]| h.evaluate(vals[0]))
}

/// Prover for `sum_x h(a~(x))` over the padded cube.
pub fn moment_prover(field: PrimeField, freqs: &[i64], h: &UnivariatePoly) -> Result<ComposedMle> {
    let v = num_vars(freqs.len() as u64);
    let table = padded_table(field, freqs, v);
    ComposedMle::new(vec![table], poly_combiner(h.clone()), h.degree())
}

/// `F = H - (2^v - u) h(0)`: removes the padding coordinates' contribution.
pub fn unpad_statistic(h: &UnivariatePoly, u: u64, claim: FieldElement) -> FieldElement {
    let v = num_vars(u);
    let pad = (1u64 << v) - u;
    claim - claim.field().elem(pad) * h.coeff(0)
}

/// Streaming verifier for `F(a) = sum_i h(a_i)`.
#[derive(Debug, Clone)]
pub struct MomentVerifier {
    h: UnivariatePoly,
    u: u64,
    mle: MleEvalState,
}

impl MomentVerifier {
    pub fn new<R: Rng + ?Sized>(h: UnivariatePoly, u: u64, rng: &mut R) -> Result<Self> {
        let field = h.field();
        let mle = MleEvalState::new(field.sample_vec(rng, num_vars(u)))?;
        Ok(MomentVerifier { h, u, mle })
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

    /// Runs the interaction; returns the verified `F(a)`.
    pub fn verify(&self, link: &mut Link, session: u32, meter: &mut StateMeter) -> Result<FieldElement> {
        meter.observe(self.state_size());
        let oracle = self.h.evaluate(self.mle.value());
        let v = self.mle.num_vars();
        let degree = self.h.degree();
        let claim = verify_sumcheck(
            link,
            session,
            vec![degree; v],
            self.mle.point(),
            oracle,
            self.state_size(),
            meter,
        )?;
        Ok(unpad_statistic(&self.h, self.u, claim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::mle_full_eval;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn gf101() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    /// Runs prover and verifier directly, no channel.
    fn run_local(p: &mut dyn RoundProver, r: &[FieldElement], oracle: FieldElement) -> Result<()> {
        let degs = (1..=p.num_vars()).map(|j| p.degree_bound(j)).collect();
        let mut vs = SumcheckVerifier::new(p.claimed_sum(), degs, r.to_vec())?;
        for j in 1..=p.num_vars() {
            let msg = p.round_message().padded(p.degree_bound(j) + 1)?;
            let c = vs.receive(&msg)?;
            p.bind(c);
        }
        vs.finish(oracle)
    }

    fn linear_table(f: PrimeField, vals: &[u64]) -> Vec<FieldElement> {
        vals.iter().map(|&x| f.elem(x)).collect()
    }

    fn identity() -> Combiner {
        Arc::new(|v: &[FieldElement]| v[0])
    }

    #[test]
    fn first_message_example() {
        let f = gf101();
        let mut p = ComposedMle::new(vec![linear_table(f, &[1, 2, 3, 4])], identity(), 1).unwrap();
        assert_eq!(p.claimed_sum(), f.elem(10));
        assert_eq!(p.round_message(), UnivariatePoly::from_u64s(f, &[3, 4]));
    }

    #[test]
    fn honest_and_wrong_claims() {
        let f = gf101();
        let a = linear_table(f, &[1, 2, 3, 4]);
        let r = vec![f.elem(5), f.elem(9)];
        let oracle = mle_full_eval(&a, &r).unwrap();
        let mut p = ComposedMle::new(vec![a.clone()], identity(), 1).unwrap();
        run_local(&mut p, &r, oracle).unwrap();

        let mut vs = SumcheckVerifier::new(f.elem(11), vec![1, 1], r.clone()).unwrap();
        let err = vs.receive(&[f.elem(3), f.elem(4)]).unwrap_err();
        assert_eq!(err.rejection(), Some(&Rejection::Sum { round: 1 }));

        let mut vs = SumcheckVerifier::new(f.elem(10), vec![1, 1], r.clone()).unwrap();
        let err = vs.receive(&[f.elem(3), f.elem(4), f.elem(0)]).unwrap_err();
        assert_eq!(err.rejection(), Some(&Rejection::Degree { round: 1 }));

        let mut p = ComposedMle::new(vec![a], identity(), 1).unwrap();
        let err = run_local(&mut p, &r, oracle + f.one()).unwrap_err();
        assert_eq!(err.rejection(), Some(&Rejection::FinalCheck));
    }

    #[test]
    fn constant_single_variable() {
        let f = gf101();
        let c = f.elem(7);
        let mut p = BruteForceProver::new(f, vec![0], Arc::new(move |_: &[FieldElement]| c));
        assert_eq!(p.claimed_sum(), f.elem(14));
        assert_eq!(p.round_message(), UnivariatePoly::constant(c));
        run_local(&mut p, &[f.elem(3)], c).unwrap();
    }

    #[test]
    fn folding_matches_brute_force() {
        let f = PrimeField::mersenne61();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for v in 1..=5usize {
            let table = f.sample_vec(&mut rng, 1 << v);
            let t2 = table.clone();
            let h = UnivariatePoly::from_u64s(f, &[3, 1, 4]);
            let hh = h.clone();
            let mut fast = ComposedMle::new(vec![table], poly_combiner(h), 2).unwrap();
            let mut slow = BruteForceProver::new(
                f,
                vec![2; v],
                Arc::new(move |x: &[FieldElement]| hh.evaluate(mle_full_eval(&t2, x).unwrap())),
            );
            assert_eq!(fast.claimed_sum(), slow.claimed_sum());
            for _ in 0..v {
                assert_eq!(fast.round_message(), slow.round_message());
                let r = f.sample(&mut rng);
                fast.bind(r);
                slow.bind(r);
            }
        }
    }

    #[test]
    fn first_round_sums_cube_v3() {
        let f = gf101();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let table = f.sample_vec(&mut rng, 8);
        let total: FieldElement = table.iter().copied().sum();
        let mut p = ComposedMle::new(vec![table], identity(), 1).unwrap();
        assert_eq!(p.round_message().sum_over_bit(), total);
    }

    #[test]
    fn moment_values() {
        let f = PrimeField::mersenne61();
        let a = [1i64, 2, 3, 4];
        for (h, expect) in [(vec![0, 1], 10u64), (vec![0, 0, 1], 30), (vec![1], 4)] {
            let h = UnivariatePoly::from_i64s(f, &h);
            let p = moment_prover(f, &a, &h).unwrap();
            assert_eq!(unpad_statistic(&h, 4, p.claimed_sum()), f.elem(expect));
        }
        // u = 3 pads one zero coordinate; h(0) = 1 must be removed again
        let h = UnivariatePoly::from_i64s(f, &[1]);
        let p = moment_prover(f, &a[..3], &h).unwrap();
        assert_eq!(unpad_statistic(&h, 3, p.claimed_sum()), f.elem(3));
    }

    #[test]
    fn cheater_passes_rounds_but_not_final_check() {
        let f = gf101();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let trials = 500;
        let mut rejected = 0;
        for _ in 0..trials {
            let table = f.sample_vec(&mut rng, 16);
            let r = f.sample_vec(&mut rng, 4);
            let oracle = mle_full_eval(&table, &r).unwrap();
            let honest = ComposedMle::new(vec![table], identity(), 1).unwrap();
            let mut cheat = GreedyCheater::new(honest, f.one());
            match run_local(&mut cheat, &r, oracle) {
                Err(e) => {
                    assert_eq!(e.rejection(), Some(&Rejection::FinalCheck));
                    rejected += 1;
                }
                Ok(()) => assert!(r.iter().any(|x| x.is_zero())),
            }
        }
        assert!(rejected as f64 / trials as f64 >= 0.9);
    }

    #[test]
    fn degree_zero_cheater() {
        let f = gf101();
        let c = f.elem(7);
        let honest = BruteForceProver::new(f, vec![0, 0], Arc::new(move |_: &[FieldElement]| c));
        let mut cheat = GreedyCheater::new(honest, f.one());
        let err = run_local(&mut cheat, &[f.elem(2), f.elem(3)], c).unwrap_err();
        assert_eq!(err.rejection(), Some(&Rejection::FinalCheck));
    }
}
