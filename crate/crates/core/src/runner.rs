//! Protocol selection, input loading, and the two parties' top-level drivers
//! over any [`Channel`]: in process, across TCP, or replayed from a
//! transcript.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::extension::UnivariatePoly;
use crate::field::PrimeField;
use crate::geometry::{
    kcenter2_prove, kslab_prove, meb_prove, serve_geometry, width_prove, KCenterVerifier, KSlabVerifier,
    MebVerifier, WidthVerifier,
};
use crate::matmul::{prove_eigen, prove_matmul, EigenInput, EigenVerifier, MatMulInput, MatMulVerifier};
use crate::pq_rc::{serve_queries, verdict_on_reject, PointQueryVerifier, ProverOptions, Universe};
use crate::stream::{
    frequencies, open_stream, GridUniverse, MetricSpace, Point, RangeSpace, StreamHeader, StreamUpdate,
};
use crate::sumcheck::{moment_prover, prove_sumcheck, GreedyCheater, MomentVerifier, RoundProver};
use crate::transport::{
    memory_pair, Channel, FrameKind, Link, ReplayChannel, Role, StateMeter, Transcript, TranscriptHeader, Verdict,
    VERDICT_ROUND,
};

/// Which protocol to run, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolSpec {
    /// `F_k = sum_i a_i^k` by sum-check.
    Moment { k: usize },
    PointQuery { q: u64 },
    MatMul,
    Eigen,
    Meb,
    Width,
    KCenter { k: usize },
    KSlab { k: usize },
}

impl ProtocolSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolSpec::Moment { .. } => "moment",
            ProtocolSpec::PointQuery { .. } => "pq",
            ProtocolSpec::MatMul => "matmul",
            ProtocolSpec::Eigen => "eigen",
            ProtocolSpec::Meb => "meb",
            ProtocolSpec::Width => "width",
            ProtocolSpec::KCenter { .. } => "kcenter",
            ProtocolSpec::KSlab { .. } => "kslab",
        }
    }

    /// `key=value` parameters, comma separated; empty when there are none.
    pub fn params(&self) -> String {
        match self {
            ProtocolSpec::Moment { k } | ProtocolSpec::KCenter { k } | ProtocolSpec::KSlab { k } => format!("k={k}"),
            ProtocolSpec::PointQuery { q } => format!("q={q}"),
            _ => String::new(),
        }
    }

    pub fn from_parts(name: &str, params: &str) -> Result<Self> {
        let mut k = None;
        let mut q = None;
        for kv in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let bad = || Error::InvalidParam(format!("bad protocol parameter `{kv}`"));
            let (key, val) = kv.split_once('=').ok_or_else(bad)?;
            match key {
                "k" => k = Some(val.parse().map_err(|_| bad())?),
                "q" => q = Some(val.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let need_k = || k.ok_or_else(|| Error::InvalidParam(format!("protocol `{name}` needs k")));
        let spec = match name {
            "moment" => ProtocolSpec::Moment { k: need_k()? },
            "pq" => ProtocolSpec::PointQuery { q: q.ok_or_else(|| Error::InvalidParam("protocol `pq` needs q".into()))? },
            "matmul" => ProtocolSpec::MatMul,
            "eigen" => ProtocolSpec::Eigen,
            "meb" => ProtocolSpec::Meb,
            "width" => ProtocolSpec::Width,
            "kcenter" => ProtocolSpec::KCenter { k: need_k()? },
            "kslab" => ProtocolSpec::KSlab { k: need_k()? },
            f if f.starts_with('f') && f.len() > 1 => {
                ProtocolSpec::Moment { k: f[1..].parse().map_err(|_| Error::InvalidParam(format!("unknown protocol `{f}`")))? }
            }
            other => return Err(Error::InvalidParam(format!("unknown protocol `{other}`"))),
        };
        match spec {
            ProtocolSpec::Moment { k: 0 } | ProtocolSpec::KCenter { k: 0 } | ProtocolSpec::KSlab { k: 0 } => {
                Err(Error::InvalidParam("k must be positive".into()))
            }
            s => Ok(s),
        }
    }
}

/// `name` or `name:params`, e.g. `f2`, `moment:k=3`, `pq:q=5`, `kcenter:k=2`.
impl FromStr for ProtocolSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        ProtocolSpec::from_parts(name, params)
    }
}

impl fmt::Display for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.params();
        if p.is_empty() {
            f.write_str(self.name())
        } else {
            write!(f, "{}:{p}", self.name())
        }
    }
}

/// A loaded input file, held whole; the verifier still reads it in one pass.
#[derive(Debug, Clone)]
pub enum Input {
    Stream { u: u64, updates: Vec<StreamUpdate> },
    Grid { grid: GridUniverse, updates: Vec<StreamUpdate> },
    Metric { metric: MetricSpace, updates: Vec<StreamUpdate> },
    MatMul(MatMulInput),
    Eigen(EigenInput),
}

impl Input {
    /// Dispatches on the first non-comment line of the file.
    pub fn load(path: &Path, field: PrimeField) -> Result<Self> {
        let first = BufReader::new(File::open(path)?)
            .lines()
            .map_while(|l| l.ok())
            .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
            .find(|l| !l.is_empty())
            .unwrap_or_default();
        let reader = || -> Result<BufReader<File>> { Ok(BufReader::new(File::open(path)?)) };
        if first.starts_with("matmul") {
            return Ok(Input::MatMul(MatMulInput::read(reader()?, field)?));
        }
        if first.starts_with("eigen") {
            return Ok(Input::Eigen(EigenInput::read(reader()?)?));
        }
        let (stream, metric) = open_stream(path)?;
        let header = stream.header().clone();
        let updates: Vec<StreamUpdate> = stream.collect::<Result<_>>()?;
        Ok(match (header, metric) {
            (StreamHeader::Universe { u }, _) => Input::Stream { u, updates },
            (StreamHeader::Grid(grid), _) => Input::Grid { grid, updates },
            (StreamHeader::Metric { .. }, Some(metric)) => Input::Metric { metric, updates },
            (StreamHeader::Metric { .. }, None) => return Err(Error::Internal("metric stream without metric".into())),
        })
    }

    fn updates(&self) -> Result<&[StreamUpdate]> {
        match self {
            Input::Stream { updates, .. } | Input::Grid { updates, .. } | Input::Metric { updates, .. } => Ok(updates),
            _ => Err(Error::InvalidParam("protocol needs an update stream".into())),
        }
    }

    /// Point-universe size for update streams.
    fn universe(&self) -> u64 {
        match self {
            Input::Stream { u, .. } => *u,
            Input::Grid { grid, .. } => grid.size(),
            Input::Metric { metric, .. } => metric.size() as u64,
            Input::MatMul(_) | Input::Eigen(_) => 0,
        }
    }
}

/// Everything both parties must agree on besides the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSettings {
    pub spec: ProtocolSpec,
    pub field: PrimeField,
    /// Seeds the verifier's randomness.
    pub seed: u64,
    pub opts: ProverOptions,
}

impl RunSettings {
    pub fn new(spec: ProtocolSpec, field: PrimeField, seed: u64) -> Self {
        RunSettings { spec, field, seed, opts: ProverOptions::default() }
    }

    pub fn header(&self, input: &str) -> TranscriptHeader {
        TranscriptHeader {
            protocol: self.spec.name().to_string(),
            params: self.spec.params(),
            modulus: self.field.modulus(),
            seed: self.seed,
            input: input.to_string(),
        }
    }

    pub fn from_header(h: &TranscriptHeader) -> Result<Self> {
        Ok(RunSettings::new(ProtocolSpec::from_parts(&h.protocol, &h.params)?, PrimeField::new(h.modulus)?, h.seed))
    }
}

/// The range space a geometric protocol works over, if any.
pub fn range_space(spec: ProtocolSpec, input: &Input) -> Result<Option<RangeSpace>> {
    let rs = match (spec, input) {
        (ProtocolSpec::Meb, Input::Grid { grid, .. }) => RangeSpace::balls(*grid)?,
        (ProtocolSpec::Width, Input::Grid { grid, .. }) => RangeSpace::slabs(*grid, 1)?,
        (ProtocolSpec::KSlab { k }, Input::Grid { grid, .. }) => RangeSpace::slabs(*grid, k)?,
        (ProtocolSpec::KCenter { k }, Input::Metric { metric, .. }) => RangeSpace::metric_ball_unions(metric.clone(), k)?,
        (ProtocolSpec::Meb | ProtocolSpec::Width | ProtocolSpec::KSlab { .. }, _) => {
            return Err(Error::InvalidParam(format!("{} needs a grid point stream", spec.name())))
        }
        (ProtocolSpec::KCenter { .. }, _) => return Err(Error::InvalidParam("kcenter needs a metric stream".into())),
        _ => return Ok(None),
    };
    Ok(Some(rs))
}

fn power(field: PrimeField, k: usize) -> UnivariatePoly {
    let mut c = vec![field.zero(); k + 1];
    c[k] = field.one();
    UnivariatePoly::new(field, c)
}

fn expect_verdict(link: &mut Link) -> Result<Verdict> {
    let f = link.expect(0, VERDICT_ROUND, FrameKind::Verdict)?;
    Verdict::decode(&f.body)
}

/// Stream elements with positive net multiplicity, repeated accordingly, in
/// index order.
fn multiset(freqs: &[i64]) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for (i, &f) in freqs.iter().enumerate() {
        if f < 0 {
            return Err(Error::InvalidParam(format!("element {i} has negative frequency {f}")));
        }
        out.extend(std::iter::repeat_n(i as u64, f as usize));
    }
    Ok(out)
}

/// Prover side of a whole run. `rs` may pass a prebuilt range space.
pub fn run_prover(link: &mut Link, s: &RunSettings, input: &Input, rs: Option<&RangeSpace>) -> Result<Verdict> {
    let built;
    let rs = match rs {
        Some(r) => Some(r),
        None => {
            built = range_space(s.spec, input)?;
            built.as_ref()
        }
    };
    let field = s.field;
    match (s.spec, input) {
        (ProtocolSpec::MatMul, Input::MatMul(m)) => return prove_matmul(link, m, s.opts),
        (ProtocolSpec::Eigen, Input::Eigen(e)) => return prove_eigen(link, e, field, s.opts),
        (ProtocolSpec::MatMul | ProtocolSpec::Eigen, _) => {
            return Err(Error::InvalidParam(format!("{} needs a {} file", s.spec.name(), s.spec.name())))
        }
        _ => {}
    }
    let freqs = frequencies(input.updates()?.iter().copied(), input.universe() as usize)?;
    let freqs = freqs.values();
    match (s.spec, input) {
        (ProtocolSpec::Moment { k }, _) => {
            let honest = moment_prover(field, freqs, &power(field, k))?;
            let mut prover: Box<dyn RoundProver> =
                if s.opts.cheat { Box::new(GreedyCheater::new(honest, field.one())) } else { Box::new(honest) };
            if let Some(v) = verdict_on_reject(prove_sumcheck(link, 0, prover.as_mut()))? {
                return Ok(v);
            }
            expect_verdict(link)
        }
        (ProtocolSpec::PointQuery { .. }, _) => serve_queries(link, field, freqs, &[], s.opts),
        (_, Input::Grid { grid, .. }) => {
            let rs = rs.expect("geometric protocol has a range space");
            let points: Vec<Point> = multiset(freqs)?.into_iter().map(|i| grid.decode(i)).collect();
            let claim = match s.spec {
                ProtocolSpec::Meb => meb_prove(&points)?.to_text(),
                ProtocolSpec::Width => width_prove(&points, rs)?.to_text(),
                _ => kslab_prove(&points, rs)?.to_text(),
            };
            serve_geometry(link, &claim, &points, freqs, rs, field, s.opts)
        }
        (ProtocolSpec::KCenter { k }, Input::Metric { metric, .. }) => {
            let rs = rs.expect("geometric protocol has a range space");
            let ids: Vec<usize> = multiset(freqs)?.into_iter().map(|i| i as usize).collect();
            let claim = kcenter2_prove(metric, &ids, k)?.to_text();
            let points: Vec<Point> = ids.iter().map(|&i| vec![i as i64]).collect();
            serve_geometry(link, &claim, &points, freqs, rs, field, s.opts)
        }
        _ => Err(Error::Internal("unmatched protocol".into())),
    }
}

fn verify_inner(
    link: &mut Link,
    s: &RunSettings,
    input: &Input,
    rs: Option<RangeSpace>,
    meter: &mut StateMeter,
) -> Result<Vec<String>> {
    let mut rng = ChaCha20Rng::seed_from_u64(s.seed);
    let field = s.field;
    meter.pass();
    match (s.spec, input) {
        (ProtocolSpec::MatMul, Input::MatMul(m)) => {
            let mut v = MatMulVerifier::new(m.instance, &mut rng)?;
            for e in m.entries() {
                v.observe(e)?;
            }
            meter.observe(v.state_size());
            let mut out = Vec::new();
            v.verify_link(link, 1, 0, meter, |i, j, c| out.push(format!("c={i},{j},{}", c.to_signed())))?;
            return Ok(out);
        }
        (ProtocolSpec::Eigen, Input::Eigen(e)) => {
            let mut v = EigenVerifier::new(field, e.n(), e.k(), &mut rng)?;
            for entry in e.entries() {
                v.observe(entry)?;
            }
            v.verify(link, meter)?;
            return Ok(e.lambdas.iter().enumerate().map(|(j, l)| format!("lambda={j},{l}")).collect());
        }
        _ => {}
    }
    let updates = input.updates()?;
    let u = input.universe();
    match s.spec {
        ProtocolSpec::Moment { k } => {
            let mut v = MomentVerifier::new(power(field, k), u, &mut rng)?;
            for &upd in updates {
                v.observe(upd)?;
                meter.observe(v.state_size());
            }
            let value = v.verify(link, 0, meter)?;
            Ok(vec![format!("value={}", value.to_signed())])
        }
        ProtocolSpec::PointQuery { q } => {
            let mut v = PointQueryVerifier::new(field, u, &mut rng)?;
            for &upd in updates {
                v.observe(upd)?;
                meter.observe(v.state_size());
            }
            let a = v.query(link, 1, Universe::Points, q, 0, meter)?;
            Ok(vec![format!("value={}", a.to_signed())])
        }
        ProtocolSpec::Meb => {
            let mut v = MebVerifier::with_range_space(field, rs.expect("range space"), &mut rng)?;
            for &upd in updates {
                v.observe(upd, meter)?;
            }
            v.verify(link, meter)
        }
        ProtocolSpec::Width => {
            let mut v = WidthVerifier::with_range_space(field, rs.expect("range space"), &mut rng)?;
            for &upd in updates {
                v.observe(upd, meter)?;
            }
            v.verify(link, meter)
        }
        ProtocolSpec::KSlab { .. } => {
            let mut v = KSlabVerifier::with_range_space(field, rs.expect("range space"), &mut rng)?;
            for &upd in updates {
                v.observe(upd, meter)?;
            }
            v.verify(link, meter)
        }
        ProtocolSpec::KCenter { .. } => {
            let mut v = KCenterVerifier::with_range_space(field, rs.expect("range space"), &mut rng)?;
            for &upd in updates {
                v.observe(upd, meter)?;
            }
            v.verify(link, meter)
        }
        ProtocolSpec::MatMul | ProtocolSpec::Eigen => {
            Err(Error::InvalidParam(format!("{} needs a {} file", s.spec.name(), s.spec.name())))
        }
    }
}

/// Verifier side of a whole run: one pass over the input, the interaction,
/// then the verdict frame. Rejections become a rejecting verdict; any other
/// failure is returned as an error without a verdict.
pub fn run_verifier(link: &mut Link, s: &RunSettings, input: &Input, rs: Option<RangeSpace>) -> Result<Verdict> {
    let rs = match rs {
        Some(r) => Some(r),
        None => range_space(s.spec, input)?,
    };
    let mut meter = StateMeter::default();
    let verdict = match verify_inner(link, s, input, rs, &mut meter) {
        Ok(out) => Verdict::accept(out, meter),
        Err(Error::Reject(r)) => Verdict::reject(&r, meter),
        Err(e) => return Err(e),
    };
    link.send(0, VERDICT_ROUND, FrameKind::Verdict, verdict.encode())?;
    Ok(verdict)
}

/// Verifier verdict and the transcript it recorded.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub verdict: Verdict,
    pub transcript: Transcript,
}

/// Verifier side over `chan`, recording the transcript.
pub fn verify_recorded(chan: &mut dyn Channel, s: &RunSettings, input: &Input, input_name: &str, rs: Option<RangeSpace>) -> Result<Outcome> {
    let mut link = Link::recording(chan, Role::Verifier);
    let verdict = run_verifier(&mut link, s, input, rs)?;
    Ok(Outcome { verdict, transcript: Transcript::new(s.header(input_name), link.take_frames()) })
}

/// Both parties in one process, on two threads joined by a memory channel.
pub fn run_local(s: &RunSettings, input: &Input, input_name: &str) -> Result<Outcome> {
    let rs = range_space(s.spec, input)?;
    let (mut pc, mut vc) = memory_pair();
    std::thread::scope(|scope| {
        let prover = scope.spawn(|| {
            let mut link = Link::new(&mut pc, Role::Prover);
            run_prover(&mut link, s, input, rs.as_ref())
        });
        let outcome = verify_recorded(&mut vc, s, input, input_name, rs.clone());
        drop(vc);
        let proved = prover.join().map_err(|_| Error::Internal("prover thread panicked".into()))?;
        let outcome = outcome?;
        proved?;
        Ok(outcome)
    })
}

/// Re-runs the verifier against a recorded transcript with its recorded
/// settings.
pub fn replay(t: &Transcript, input: &Input) -> Result<Verdict> {
    let s = RunSettings::from_header(&t.header)?;
    let mut chan = ReplayChannel::new(t.frames.clone());
    let mut link = Link::new(&mut chan, Role::Verifier);
    run_verifier(&mut link, &s, input, None)
}
