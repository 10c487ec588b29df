//! Acceptance run: every criterion prints one PASS or FAIL line with the
//! measurements behind it. The process fails if any criterion fails.

use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use sipkit_core::extension::mle_full_eval;
use sipkit_core::geometry::{
    kcenter2_prove, meb_prove, serve_geometry, width_prove, KCenterClaim, KCenterVerifier, MebClaim, MebVerifier,
    WidthVerifier,
};
use sipkit_core::matmul::{
    matmul_annotation, random_eigen_input, schoolbook, EigenInput, MatMulInput, MatMulInstance, MatMulVerifier,
};
use sipkit_core::pq_rc::{point_query_prover, verdict_on_reject};
use sipkit_core::runner::{range_space, verify_recorded};
use sipkit_core::stream::gen::{random_metric, random_points, random_stream};
use sipkit_core::stream::{derive_range_stream, frequencies, generate_almost_orthogonal, RangeSpace};
use sipkit_core::sumcheck::{ComposedMle, GreedyCheater, RoundProver, SumcheckVerifier};
use sipkit_core::transport::{memory_pair, FrameKind, Link, Role, StateMeter, TcpChannel};
use sipkit_core::{
    run_local, run_prover, Error, FieldElement, GridUniverse, Input, MetricSpace, Point, PrimeField, ProtocolSpec,
    ProverOptions, Result, RunSettings, StreamUpdate, Verdict,
};

type Q = Ratio<i128>;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, n: usize, name: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("[{}] {n:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn m61() -> PrimeField {
    PrimeField::mersenne61()
}

/// Runs a prover closure against a verifier closure over a memory channel;
/// the verifier's rejection becomes the verdict it sends.
fn exchange<P, V>(prover: P, verifier: V) -> Result<Vec<String>>
where
    P: FnOnce(&mut Link) -> Result<Verdict> + Send,
    V: FnOnce(&mut Link, &mut StateMeter) -> Result<Vec<String>>,
{
    let (mut a, mut b) = memory_pair();
    std::thread::scope(|s| {
        let p = s.spawn(move || prover(&mut Link::new(&mut a, Role::Prover)));
        let mut link = Link::new(&mut b, Role::Verifier);
        let mut meter = StateMeter::default();
        let res = verifier(&mut link, &mut meter);
        let verdict = match &res {
            Ok(out) => Verdict::accept(out.clone(), meter),
            Err(Error::Reject(r)) => Verdict::reject(r, meter),
            Err(e) => panic!("verifier error: {e}"),
        };
        link.send(0, u32::MAX, FrameKind::Verdict, verdict.encode()).unwrap();
        drop(link);
        drop(b);
        p.join().unwrap().unwrap();
        res
    })
}

/// Plain sum-check of a multilinear table against a direct verifier.
fn sumcheck_once(prover: &mut dyn RoundProver, table: &[FieldElement], challenges: Vec<FieldElement>) -> bool {
    let v = challenges.len();
    let oracle = mle_full_eval(table, &challenges).unwrap();
    let mut ver = SumcheckVerifier::new(prover.claimed_sum(), vec![1; v], challenges).unwrap();
    for j in 1..=v {
        let msg = prover.round_message();
        let coeffs = msg.padded(prover.degree_bound(j) + 1).unwrap_or_else(|_| msg.coeffs().to_vec());
        match ver.receive(&coeffs) {
            Ok(r) => prover.bind(r),
            Err(_) => return false,
        }
    }
    ver.finish(oracle).is_ok()
}

fn multilinear(field: PrimeField, v: usize, r: &mut ChaCha20Rng) -> (Vec<FieldElement>, ComposedMle) {
    let table = field.sample_vec(r, 1 << v);
    let mle = ComposedMle::new(vec![table.clone()], Arc::new(|x: &[FieldElement]| x[0]), 1).unwrap();
    (table, mle)
}

fn c1_sumcheck_completeness(rep: &mut Report) {
    let start = Instant::now();
    let f = m61();
    let mut accepted = 0;
    for i in 0..200u64 {
        let mut r = rng(1000 + i);
        let v = 2 + (i as usize % 7);
        let (table, mut p) = multilinear(f, v, &mut r);
        let expect: FieldElement = table.iter().copied().sum();
        assert_eq!(p.claimed_sum(), expect);
        let ch = f.sample_vec(&mut r, v);
        accepted += sumcheck_once(&mut p, &table, ch) as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    rep.line(1, "sum-check completeness", accepted == 200 && secs < 10.0, format!("{accepted}/200 accepted, v in 2..=8, {secs:.2}s"));
}

fn c2_sumcheck_soundness(rep: &mut Report) {
    let f = PrimeField::new(101).unwrap();
    let mut rejected = 0;
    let mut lucky = 0;
    for i in 0..500u64 {
        let mut r = rng(2000 + i);
        let (table, honest) = multilinear(f, 4, &mut r);
        let mut cheat = GreedyCheater::new(honest, f.one());
        let ch = f.sample_vec(&mut r, 4);
        // The cheater's offset survives a round unless the challenge is a root of it.
        lucky += ch.iter().any(|x| x.is_zero()) as usize;
        rejected += !sumcheck_once(&mut cheat, &table, ch) as usize;
    }
    let rate = rejected as f64 / 500.0;
    rep.line(
        2,
        "sum-check soundness",
        rate >= 0.90 && rejected + lucky == 500,
        format!("{rejected}/500 rejected ({:.1}%), GF(101), v=4; every escape hit a root of the offset: {}", 100.0 * rate, rejected + lucky == 500),
    );
}

fn f2_input(seed: u64) -> (Input, i64) {
    let ups = random_stream(256, 1000, &mut rng(seed));
    let freqs = frequencies(ups.iter().copied(), 256).unwrap();
    let f2 = freqs.values().iter().map(|a| a * a).sum();
    (Input::Stream { u: 256, updates: ups }, f2)
}

fn c3_frequency_moments(rep: &mut Report) {
    let s = RunSettings::new(ProtocolSpec::Moment { k: 2 }, m61(), 0);
    let mut ok = 0;
    let mut costs_ok = true;
    let mut peak = 0;
    for i in 0..50u64 {
        let (input, f2) = f2_input(3000 + i);
        let out = run_local(&RunSettings { seed: i, ..s }, &input, "f2").unwrap();
        let cost = out.transcript.cost();
        ok += (out.verdict.accepted && out.verdict.output == [format!("value={f2}")]) as usize;
        costs_ok &= cost.rounds == 8 && cost.p2v_elements == 24 && cost.v2p_elements == 8 && cost.claim_elements == 1;
        peak = peak.max(cost.meter.peak_verifier_elements);
    }
    rep.line(
        3,
        "F2 frequency moment",
        ok == 50 && costs_ok && peak <= 15,
        format!("{ok}/50 equal brute force; 8 rounds x 3 coefficients + 8 challenges + 1 claim: {costs_ok}; peak state {peak} elements"),
    );
}

fn c4_matmul(rep: &mut Report) {
    let f = m61();
    let (k, kp, n) = (4, 4, 256);
    let mut honest = 0;
    let mut tamper_rejects = 0;
    let mut shape_ok = true;
    let mut notes = Vec::new();
    for (si, (h, v)) in [(16, 16), (256, 1), (1, 256)].into_iter().enumerate() {
        let inst = MatMulInstance::new(f, k, kp, n, h, v).unwrap();
        let mut r = rng(4000 + si as u64);
        let mut mat = |rows: usize| -> Vec<Vec<i64>> {
            (0..rows).map(|_| (0..n).map(|_| r.gen_range(-1000..=1000)).collect()).collect()
        };
        let (a, b) = (mat(k), mat(kp));
        let input = MatMulInput { instance: inst, a: a.clone(), b: b.clone() };
        let oracle = schoolbook(&a, &b);
        let ann = matmul_annotation(&inst, &a, &b).unwrap();
        for t in 0..34u64 {
            let mut ver = MatMulVerifier::new(inst, &mut rng(t)).unwrap();
            for e in input.entries() {
                ver.observe(e).unwrap();
            }
            let c = ver.verify(&ann).unwrap();
            honest += (0..k).all(|i| (0..kp).all(|j| c[i * kp + j] == f.from_i64(oracle[i][j]))) as usize;
            let mut bad = ann.clone();
            let mut tr = rng(9000 + t);
            let pos = tr.gen_range(0..bad.len());
            bad[pos] += f.elem(tr.gen_range(1..1 << 40));
            tamper_rejects += ver.verify(&bad).is_err() as usize;
            if t == 0 {
                let state = ver.state_size();
                shape_ok &= state == 2 * v + 3 && ann.len() == k * kp * (2 * h - 1);
                notes.push(format!("(h={h},v={v}) state {state} comm {}", ann.len()));
            }
        }
    }
    let trials = 3 * 34;
    rep.line(
        4,
        "matrix product",
        honest == trials && tamper_rejects * 100 >= 98 * trials && shape_ok,
        format!(
            "{honest}/{trials} honest equal schoolbook; {tamper_rejects}/{trials} tampered rejected; {}; formulas 2v+3 and k*k'*(2h-1) exact: {shape_ok}",
            notes.join(", ")
        ),
    );
}

fn eigen_example(lambdas: Vec<i64>, v: Vec<Vec<i64>>) -> Input {
    Input::Eigen(EigenInput { a: vec![vec![2, 1], vec![1, 2]], lambdas, v })
}

fn c5_eigen(rep: &mut Report) {
    let f = m61();
    let run = |input: &Input, seed: u64| run_local(&RunSettings::new(ProtocolSpec::Eigen, f, seed), input, "e").unwrap().verdict;
    let good = eigen_example(vec![3, 1], vec![vec![1, 1], vec![1, -1]]);
    let example_ok = run(&good, 1).accepted;
    let mut perturbed = 0;
    let mut skewed = 0;
    for t in 0..100u64 {
        let mut r = rng(5000 + t);
        let mut l = vec![3, 1];
        l[r.gen_range(0..2)] += if r.gen() { r.gen_range(1..50) } else { -r.gen_range(1..50) };
        perturbed += !run(&eigen_example(l, vec![vec![1, 1], vec![1, -1]]), t).accepted as usize;
        let x = r.gen_range(2..20);
        skewed += !run(&eigen_example(vec![3, 1], vec![vec![1, x], vec![1, -1]]), t).accepted as usize;
    }
    let mut random_ok = 0;
    for t in 0..20u64 {
        let d = 1 + (t as usize % 4);
        let input = Input::Eigen(random_eigen_input(d, &mut rng(5500 + t)).unwrap());
        random_ok += run(&input, t).accepted as usize;
    }
    rep.line(
        5,
        "eigenpairs",
        example_ok && perturbed == 100 && skewed == 100 && random_ok == 20,
        format!("2x2 example accepted: {example_ok}; perturbed lambda rejected {perturbed}/100; non-orthogonal V rejected {skewed}/100; random Q D Q^T accepted {random_ok}/20"),
    );
}

fn grid_input(grid: GridUniverse, pts: &[Point]) -> Input {
    Input::Grid { grid, updates: pts.iter().map(|p| StreamUpdate::insert(grid.encode(p).unwrap())).collect() }
}

/// Squared MEB radius by enumerating every candidate ball: the midpoint of
/// each pair and the circumcenter of each triangle (closed-form planar
/// formula), keeping the smallest one that covers every point.
fn meb_oracle(pts: &[Point]) -> Q {
    let q = |x: i64| Q::from_integer(x as i128);
    let covers = |cx: Q, cy: Q, r2: Q| pts.iter().all(|p| (q(p[0]) - cx) * (q(p[0]) - cx) + (q(p[1]) - cy) * (q(p[1]) - cy) <= r2);
    let mut best: Option<Q> = None;
    let mut consider = |cx: Q, cy: Q, p: &Point| {
        let r2 = (q(p[0]) - cx) * (q(p[0]) - cx) + (q(p[1]) - cy) * (q(p[1]) - cy);
        if best.is_none_or(|b| r2 < b) && covers(cx, cy, r2) {
            best = Some(r2);
        }
    };
    for a in pts {
        consider(q(a[0]), q(a[1]), a);
        for b in pts {
            consider(Q::new((a[0] + b[0]) as i128, 2), Q::new((a[1] + b[1]) as i128, 2), a);
            for c in pts {
                let (bx, by, cx, cy) = (b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1]);
                let den = 2 * (bx * cy - by * cx);
                if den == 0 {
                    continue;
                }
                let (b2, c2) = (bx * bx + by * by, cx * cx + cy * cy);
                let ux = Q::new((cy * b2 - by * c2) as i128, den as i128) + q(a[0]);
                let uy = Q::new((bx * c2 - cx * b2) as i128, den as i128) + q(a[1]);
                consider(ux, uy, a);
            }
        }
    }
    best.unwrap()
}

fn meb_exchange(grid: GridUniverse, rs: &RangeSpace, pts: &[Point], claim: &MebClaim, seed: u64) -> Result<Vec<String>> {
    let f = m61();
    let ups: Vec<StreamUpdate> = pts.iter().map(|p| StreamUpdate::insert(grid.encode(p).unwrap())).collect();
    let freqs = frequencies(ups.iter().copied(), grid.size() as usize).unwrap();
    let mut ver = MebVerifier::with_range_space(f, rs.clone(), &mut rng(seed)).unwrap();
    let mut meter = StateMeter::default();
    for &u in &ups {
        ver.observe(u, &mut meter).unwrap();
    }
    let text = claim.to_text();
    exchange(
        |link| serve_geometry(link, &text, pts, freqs.values(), rs, f, ProverOptions::default()),
        |link, meter| ver.verify(link, meter),
    )
}

fn isqrt_floor(x: Q) -> i128 {
    let mut s = 0i128;
    while Q::from_integer((s + 1) * (s + 1)) <= x {
        s += 1;
    }
    s
}

fn c6_meb(rep: &mut Report) {
    let start = Instant::now();
    let grid = GridUniverse::new(16, 2).unwrap();
    let rs = RangeSpace::balls(grid).unwrap();
    let (mut accepted, mut matches, mut understated, mut understated_rejected) = (0, 0, 0, 0);
    for t in 0..50u64 {
        let mut r = rng(6000 + t);
        let n = r.gen_range(5..=20);
        let pts = random_points(grid, n, &mut r);
        let claim = meb_prove(&pts).unwrap();
        matches += (claim.radius2 == meb_oracle(&pts)) as usize;
        accepted += meb_exchange(grid, &rs, &pts, &claim, t).is_ok() as usize;
        // Radius lowered by at least one: (floor(r) - 1)^2 <= (r - 1)^2.
        let s = isqrt_floor(claim.radius2);
        if s >= 1 {
            understated += 1;
            let low = MebClaim { radius2: Q::from_integer((s - 1) * (s - 1)), ..claim };
            understated_rejected += meb_exchange(grid, &rs, &pts, &low, t).is_err() as usize;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    rep.line(
        6,
        "minimum enclosing ball",
        accepted == 50 && matches == 50 && understated == 50 && understated_rejected == 50 && secs < 60.0,
        format!("{accepted}/50 honest accepted; {matches}/50 radius equals oracle; {understated_rejected}/{understated} understated rejected; {secs:.1}s"),
    );
}

/// Planar width: minimum over point pairs of the largest squared distance to
/// the line through them.
fn width_oracle(pts: &[Point]) -> Ratio<u64> {
    let mut best: Option<Ratio<u64>> = None;
    for p in pts {
        for q in pts {
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            if dx == 0 && dy == 0 {
                continue;
            }
            let cross: Vec<i64> = pts.iter().map(|r| dx * (r[1] - p[1]) - dy * (r[0] - p[0])).collect();
            let gap = (cross.iter().max().unwrap() - cross.iter().min().unwrap()) as u64;
            let w = Ratio::new(gap * gap, (dx * dx + dy * dy) as u64);
            if best.is_none_or(|b| w < b) {
                best = Some(w);
            }
        }
    }
    best.unwrap_or_default()
}

fn c7_width(rep: &mut Report) {
    let f = m61();
    let grid = GridUniverse::new(8, 2).unwrap();
    let rs = RangeSpace::slabs(grid, 1).unwrap();
    let (mut agree, mut accepted, mut general, mut split_ok) = (0, 0, 0, 0);
    for t in 0..25u64 {
        let mut r = rng(7000 + t);
        let pts = random_points(grid, 10, &mut r);
        let claim = width_prove(&pts, &rs).unwrap();
        agree += (claim.slab.width2() == width_oracle(&pts)) as usize;
        if claim.slab.lo < claim.slab.hi {
            general += 1;
            split_ok += (claim.t1.len() + claim.t2.len() == 3 && !claim.t1.is_empty() && !claim.t2.is_empty()) as usize;
        }
        let ups: Vec<StreamUpdate> = pts.iter().map(|p| StreamUpdate::insert(grid.encode(p).unwrap())).collect();
        let freqs = frequencies(ups.iter().copied(), grid.size() as usize).unwrap();
        let mut ver = WidthVerifier::with_range_space(f, rs.clone(), &mut rng(t)).unwrap();
        let mut meter = StateMeter::default();
        for &u in &ups {
            ver.observe(u, &mut meter).unwrap();
        }
        let text = claim.to_text();
        accepted += exchange(
            |link| serve_geometry(link, &text, &pts, freqs.values(), &rs, f, ProverOptions::default()),
            |link, meter| ver.verify(link, meter),
        )
        .is_ok() as usize;
    }
    rep.line(
        7,
        "width",
        agree == 25 && accepted == 25 && split_ok == general,
        format!("{agree}/25 equal slab oracle; {accepted}/25 accepted; k+k'=d+1 in {split_ok}/{general} general-position sets"),
    );
}

fn kcenter_opt(metric: &MetricSpace, pts: &[usize], k: usize) -> u64 {
    fn rec(metric: &MetricSpace, pts: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, best: &mut u64) {
        if cur.len() == k {
            let cost = pts.iter().map(|&p| cur.iter().map(|&c| metric.dist(c, p)).min().unwrap()).max().unwrap();
            *best = (*best).min(cost);
            return;
        }
        for c in start..metric.size() {
            cur.push(c);
            rec(metric, pts, k, c + 1, cur, best);
            cur.pop();
        }
    }
    let mut best = u64::MAX;
    rec(metric, pts, k, 0, &mut Vec::new(), &mut best);
    best
}

/// Answers point queries honestly and range counts with the stream length,
/// cheating through the sum-check when the true count is lower.
fn lying_counter(link: &mut Link, field: PrimeField, points: &[i64], ranges: &[i64], n: i64) -> Result<Verdict> {
    loop {
        let f = link.recv()?;
        match f.kind {
            FrameKind::Verdict => return Verdict::decode(&f.body),
            FrameKind::Query => {
                let q = u64::from_le_bytes(f.body[1..9].try_into().unwrap());
                let (freqs, lie) = if f.body[0] == 0 { (points, 0) } else { (ranges, n - ranges[q as usize]) };
                let honest = point_query_prover(field, freqs, q)?;
                let mut p: Box<dyn RoundProver> = if lie != 0 {
                    Box::new(GreedyCheater::new(honest, field.from_i64(lie)))
                } else {
                    Box::new(honest)
                };
                if let Some(v) = verdict_on_reject(sipkit_core::sumcheck::prove_sumcheck(link, f.session, p.as_mut()))? {
                    return Ok(v);
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

fn c8_kcenter(rep: &mut Report) {
    let f = m61();
    let (mut accepted, mut in_range, mut infeasible, mut infeasible_rejected) = (0, 0, 0, 0);
    for t in 0..25u64 {
        let mut r = rng(8000 + t);
        let (k, m) = [(1, 32), (2, 16), (3, 12)][t as usize % 3];
        let metric = random_metric(m, &mut r);
        let pts: Vec<usize> = (0..2 * m).map(|_| r.gen_range(0..m)).collect();
        let rs = RangeSpace::metric_ball_unions(metric.clone(), k).unwrap();
        let claim = kcenter2_prove(&metric, &pts, k).unwrap();
        let opt = kcenter_opt(&metric, &pts, k);
        in_range += (opt <= claim.radius && claim.radius <= 2 * opt) as usize;

        let ups: Vec<StreamUpdate> = pts.iter().map(|&p| StreamUpdate::insert(p as u64)).collect();
        let freqs = frequencies(ups.iter().copied(), m).unwrap();
        let coords: Vec<Point> = pts.iter().map(|&p| vec![p as i64]).collect();
        let ranges = frequencies(derive_range_stream(&coords, &rs), rs.len()).unwrap();
        let verifier = |seed: u64| {
            let mut ver = KCenterVerifier::with_range_space(f, rs.clone(), &mut rng(seed)).unwrap();
            let mut meter = StateMeter::default();
            for &u in &ups {
                ver.observe(u, &mut meter).unwrap();
            }
            ver
        };
        let ver = verifier(t);
        let text = claim.to_text();
        accepted += exchange(
            |link| serve_geometry(link, &text, &coords, freqs.values(), &rs, f, ProverOptions::default()),
            |link, meter| ver.verify(link, meter),
        )
        .is_ok() as usize;

        // Largest realized distance below OPT: no k centers cover at that radius.
        if let Some(&bad) = metric.distinct_distances().iter().filter(|&&x| x < opt).last() {
            for s in 0..4u64 {
                infeasible += 1;
                let ver = verifier(100 * t + s);
                let lie = KCenterClaim { radius: bad, ..claim.clone() };
                let text = lie.to_text();
                let n = pts.len() as i64;
                let res = exchange(
                    |link| {
                        link.send(0, 0, FrameKind::Text, text.into_bytes())?;
                        lying_counter(link, f, freqs.values(), ranges.values(), n)
                    },
                    |link, meter| ver.verify(link, meter),
                );
                infeasible_rejected += res.is_err() as usize;
            }
        }
    }
    let rate = infeasible_rejected as f64 / infeasible.max(1) as f64;
    rep.line(
        8,
        "metric k-center",
        accepted == 25 && in_range == 25 && infeasible > 0 && rate >= 0.90,
        format!("{accepted}/25 honest accepted; {in_range}/25 in [OPT, 2 OPT]; {infeasible_rejected}/{infeasible} infeasible claims rejected"),
    );
}

fn c9_point_query(rep: &mut Report) {
    let ups = random_stream(64, 400, &mut rng(9));
    let freqs = frequencies(ups.iter().copied(), 64).unwrap();
    let input = Input::Stream { u: 64, updates: ups };
    let mut ok = 0;
    for q in 0..64u64 {
        let out = run_local(&RunSettings::new(ProtocolSpec::PointQuery { q }, m61(), q), &input, "pq").unwrap();
        ok += (out.verdict.accepted && out.verdict.output == [format!("value={}", freqs.get(q))]) as usize;
    }
    rep.line(9, "point query", ok == 64, format!("{ok}/64 queries equal the frequency vector, u=64"));
}

fn c10_ortho(rep: &mut Report) {
    let mut all_ok = true;
    let mut batches = 0;
    for seed in 0..20u64 {
        let set = generate_almost_orthogonal(400, 0.2, &mut rng(seed)).unwrap();
        batches += set.batches;
        let limit = 80;
        let pairs_ok = (0..set.signs.len()).all(|i| {
            (i + 1..set.signs.len()).all(|j| {
                let dot: i64 = set.signs[i].iter().zip(&set.signs[j]).map(|(&a, &b)| (a * b) as i64).sum();
                dot.abs() <= limit
            })
        });
        all_ok &= set.signs.len() == 54 && set.signs.iter().all(|s| s.len() == 400) && pairs_ok;
    }
    let mean = batches as f64 / 20.0;
    rep.line(10, "almost-orthogonal vectors", all_ok && mean <= 3.0, format!("54 vectors with |<u,v>| <= 80 in every seed: {all_ok}; mean batches {mean:.2}"));
}

fn over_tcp(s: &RunSettings, input: &Input) -> Vec<u8> {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::scope(|scope| {
        let prover = scope.spawn(|| {
            let (stream, _) = listener.accept().unwrap();
            let mut chan = TcpChannel::new(stream).unwrap();
            run_prover(&mut Link::new(&mut chan, Role::Prover), s, input, None).unwrap()
        });
        let mut chan = TcpChannel::new(TcpStream::connect(addr).unwrap()).unwrap();
        let rs = range_space(s.spec, input).unwrap();
        let out = verify_recorded(&mut chan, s, input, "x", rs).unwrap();
        prover.join().unwrap();
        out.transcript.to_bytes()
    })
}

fn c11_transport(rep: &mut Report) {
    let f = m61();
    let mut cases: Vec<(&str, RunSettings, Input)> = Vec::new();
    cases.push(("F2", RunSettings::new(ProtocolSpec::Moment { k: 2 }, f, 3), f2_input(3000).0));
    let mut r = rng(11);
    let inst = MatMulInstance::new(f, 4, 4, 256, 16, 16).unwrap();
    let mut mat = |rows: usize| -> Vec<Vec<i64>> { (0..rows).map(|_| (0..256).map(|_| r.gen_range(-9..=9)).collect()).collect() };
    let (a, b) = (mat(4), mat(4));
    cases.push(("matmul", RunSettings::new(ProtocolSpec::MatMul, f, 4), Input::MatMul(MatMulInput { instance: inst, a, b })));
    cases.push(("eigen", RunSettings::new(ProtocolSpec::Eigen, f, 5), eigen_example(vec![3, 1], vec![vec![1, 1], vec![1, -1]])));
    let g16 = GridUniverse::new(16, 2).unwrap();
    cases.push(("MEB", RunSettings::new(ProtocolSpec::Meb, f, 6), grid_input(g16, &random_points(g16, 12, &mut rng(6000)))));
    let g8 = GridUniverse::new(8, 2).unwrap();
    cases.push(("width", RunSettings::new(ProtocolSpec::Width, f, 7), grid_input(g8, &random_points(g8, 10, &mut rng(7000)))));
    let metric = random_metric(16, &mut rng(8000));
    let ups = (0..32).map(|i| StreamUpdate::insert(i % 16)).collect();
    cases.push(("k-center", RunSettings::new(ProtocolSpec::KCenter { k: 2 }, f, 8), Input::Metric { metric, updates: ups }));
    cases.push(("point query", RunSettings::new(ProtocolSpec::PointQuery { q: 5 }, f, 9), f2_input(9).0));
    let mut same = Vec::new();
    for (name, s, input) in &cases {
        let local = run_local(s, input, "x").unwrap();
        let identical = local.verdict.accepted && local.transcript.to_bytes() == over_tcp(s, input);
        same.push((*name, identical));
    }
    let ok = same.iter().all(|x| x.1);
    let detail: Vec<String> = same.iter().map(|(n, b)| format!("{n} {}", if *b { "identical" } else { "DIFFERENT" })).collect();
    rep.line(11, "transport equivalence", ok, detail.join(", "));
}

fn main() {
    // Under `cargo test` filters, only run when selected or unfiltered.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let mut rep = Report { failed: 0 };
    c1_sumcheck_completeness(&mut rep);
    c2_sumcheck_soundness(&mut rep);
    c3_frequency_moments(&mut rep);
    c4_matmul(&mut rep);
    c5_eigen(&mut rep);
    c6_meb(&mut rep);
    c7_width(&mut rep);
    c8_kcenter(&mut rep);
    c9_point_query(&mut rep);
    c10_ortho(&mut rep);
    c11_transport(&mut rep);
    println!("acceptance: {} of 11 criteria passed", 11 - rep.failed);
    if rep.failed > 0 {
        std::process::exit(1);
    }
}
