//! `sipkit`: generate inputs, run provers and verifiers, replay and report
//! transcripts.
//!
//! Exit status: 0 accept, 1 reject, 2 any other error.

use std::fs;
use std::io::{self, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use sipkit_core::matmul::{random_eigen_input, MatMulInput, MatMulInstance};
use sipkit_core::runner::{range_space, verify_recorded};
use sipkit_core::stream::gen::{metric_stream_to_text, points_to_text, random_metric, random_points, random_stream, stream_to_text};
use sipkit_core::stream::generate_almost_orthogonal;
use sipkit_core::transport::{Link, Role, TcpChannel};
use sipkit_core::{
    replay, run_local, run_prover, Error, GridUniverse, Input, PrimeField, ProtocolSpec, ProverOptions, Result,
    RunSettings, Transcript, Verdict,
};

#[derive(Parser)]
#[command(name = "sipkit", version, about = "Streaming interactive proofs: prover, verifier, and tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an input file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run a protocol on an input.
    Run(RunArgs),
    /// Re-verify a recorded transcript against its input.
    Replay {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Print the header, costs, and verdict of a transcript.
    Report {
        #[arg(long)]
        transcript: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, env = "SIPKIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenKind {
    /// Turnstile stream over `[0, u)`.
    Stream {
        #[arg(long)]
        u: u64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Points on the grid `[m]^d`.
    Points {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Random shortest-path metric on `m` points, written to `--out`, plus
    /// optionally a stream of `n` points over it.
    Metric {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, requires = "n")]
        stream: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Almost-orthogonal sign vectors.
    Ortho {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Random integer matrices `A` (k × n) and `B` (n × kp).
    Matmul {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        kp: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        v: Option<usize>,
        /// Entries are drawn from `[-max, max]`.
        #[arg(long, default_value_t = 100)]
        max: i64,
        #[arg(long)]
        modulus: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Symmetric matrix with a full set of integer eigenpairs, `d <= 4`.
    Eigen {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RoleArg {
    Prove,
    Verify,
    Both,
}

#[derive(Args)]
struct RunArgs {
    /// f2, f<k>, moment:k=<k>, pq:q=<q>, matmul, eigen, meb, width,
    /// kcenter:k=<k>, kslab:k=<k>.
    #[arg(long)]
    protocol: ProtocolSpec,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, env = "SIPKIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Prime field modulus; 2^61 - 1 by default.
    #[arg(long)]
    modulus: Option<u64>,
    #[arg(long, value_enum, default_value_t = RoleArg::Both)]
    role: RoleArg,
    #[arg(long, conflicts_with = "connect")]
    listen: Option<String>,
    #[arg(long)]
    connect: Option<String>,
    /// Where the verifier writes its transcript.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Run the prover's cheating strategy.
    #[arg(long)]
    cheat: bool,
    /// Independent in-process trials with seeds `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Gen { kind } => gen(kind).map(|()| ExitCode::SUCCESS),
        Command::Run(args) => run(args),
        Command::Replay { transcript, input } => {
            let t = Transcript::read(&transcript)?;
            let field = PrimeField::new(t.header.modulus)?;
            let input = load(&input, field)?;
            let verdict = replay(&t, &input)?;
            if let Some(rec) = t.verdict() {
                if rec.accepted != verdict.accepted {
                    say(&format!("recorded_verdict={}\n", if rec.accepted { "accept" } else { "reject" }));
                }
            }
            say(&String::from_utf8_lossy(&verdict.encode()));
            Ok(exit_for(&verdict))
        }
        Command::Report { transcript } => {
            let t = Transcript::read(&transcript)?;
            let h = &t.header;
            say(&format!(
                "protocol={}\nparams={}\nmodulus={}\nseed={}\ninput={}\n",
                h.protocol, h.params, h.modulus, h.seed, h.input
            ));
            say(&t.cost().to_kv());
            match t.verdict() {
                Some(v) => {
                    say(&String::from_utf8_lossy(&v.encode()));
                    Ok(exit_for(&v))
                }
                None => Err(Error::Corrupt { offset: 0, msg: "transcript has no verdict".into() }),
            }
        }
    }
}

/// Writes to standard output, ignoring a closed pipe.
fn say(text: &str) {
    let _ = io::stdout().write_all(text.as_bytes());
}

fn exit_for(v: &Verdict) -> ExitCode {
    if v.accepted {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => say(text),
    }
    Ok(())
}

fn gen(kind: GenKind) -> Result<()> {
    match kind {
        GenKind::Stream { u, n, common } => {
            if u == 0 {
                return Err(Error::InvalidParam("u must be positive".into()));
            }
            let mut rng = ChaCha20Rng::seed_from_u64(common.seed);
            emit(&common.out, &stream_to_text(u, &random_stream(u, n, &mut rng)))
        }
        GenKind::Points { m, d, n, common } => {
            let grid = GridUniverse::new(m, d)?;
            let mut rng = ChaCha20Rng::seed_from_u64(common.seed);
            emit(&common.out, &points_to_text(grid, &random_points(grid, n, &mut rng)))
        }
        GenKind::Metric { m, n, stream, common } => {
            if m == 0 {
                return Err(Error::InvalidParam("m must be positive".into()));
            }
            let mut rng = ChaCha20Rng::seed_from_u64(common.seed);
            let metric = random_metric(m, &mut rng);
            emit(&common.out, &metric.to_text())?;
            if let Some(path) = stream {
                let metric_path = common
                    .out
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParam("--stream needs --out for the metric file".into()))?;
                let points: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
                fs::write(&path, metric_stream_to_text(&relative_to(metric_path, &path), &points))?;
            }
            Ok(())
        }
        GenKind::Ortho { d, eps, common } => {
            let mut rng = ChaCha20Rng::seed_from_u64(common.seed);
            let set = generate_almost_orthogonal(d, eps, &mut rng)?;
            eprintln!("vectors={} batches={} max_abs_dot={} valid={}", set.len(), set.batches, set.max_abs_dot(), set.verify());
            emit(&common.out, &set.to_text())
        }
        GenKind::Matmul { k, kp, n, h, v, max, modulus, common } => {
            let field = field_of(modulus)?;
            let (h, v) = match (h, v) {
                (Some(h), Some(v)) => (h, v),
                (Some(h), None) => (h, n.div_ceil(h)),
                (None, Some(v)) => (n.div_ceil(v), v),
                (None, None) => MatMulInstance::square_split(n),
            };
            let inst = MatMulInstance::new(field, k, kp, n, h, v)?;
            let mut rng = ChaCha20Rng::seed_from_u64(common.seed);
            let mut mat = |rows: usize| -> Vec<Vec<i64>> {
                (0..rows).map(|_| (0..n).map(|_| rng.gen_range(-max..=max)).collect()).collect()
            };
            let a = mat(k);
            let b = mat(kp);
            emit(&common.out, &MatMulInput { instance: inst, a, b }.to_text())
        }
        GenKind::Eigen { d, common } => {
            let mut rng = ChaCha20Rng::seed_from_u64(common.seed);
            emit(&common.out, &random_eigen_input(d, &mut rng)?.to_text())
        }
    }
}

/// `target` as referenced from a file at `from`: just the file name when both
/// share a directory.
fn relative_to(target: &Path, from: &Path) -> String {
    let same_dir = target.parent().map(|p| p.canonicalize().ok()) == from.parent().map(|p| p.canonicalize().ok());
    match (same_dir, target.file_name()) {
        (true, Some(name)) => name.to_string_lossy().into_owned(),
        _ => fs::canonicalize(target).unwrap_or_else(|_| target.to_path_buf()).to_string_lossy().into_owned(),
    }
}

fn load(path: &Path, field: PrimeField) -> Result<Input> {
    Input::load(path, field).map_err(|e| match e {
        Error::Transport(io) => Error::InvalidParam(format!("cannot read {}: {io}", path.display())),
        other => other,
    })
}

fn field_of(modulus: Option<u64>) -> Result<PrimeField> {
    modulus.map_or(Ok(PrimeField::mersenne61()), PrimeField::new)
}

fn normalize(addr: &str, listen: bool) -> String {
    match addr.strip_prefix(':') {
        Some(port) if listen => format!("0.0.0.0:{port}"),
        Some(port) => format!("127.0.0.1:{port}"),
        None => addr.to_string(),
    }
}

fn open_channel(args: &RunArgs) -> Result<TcpChannel> {
    let stream = if let Some(addr) = &args.listen {
        let (s, _) = TcpListener::bind(normalize(addr, true))?.accept()?;
        s
    } else if let Some(addr) = &args.connect {
        let addr = normalize(addr, false);
        let deadline = Instant::now() + Duration::from_secs(20);
        loop {
            match TcpStream::connect(&addr) {
                Ok(s) => break s,
                Err(_) if Instant::now() < deadline => thread::sleep(Duration::from_millis(50)),
                Err(e) => return Err(e.into()),
            }
        }
    } else {
        return Err(Error::InvalidParam("split roles need --listen or --connect".into()));
    };
    Ok(TcpChannel::new(stream)?)
}

fn print_outcome(verdict: &Verdict, transcript: Option<&Transcript>) {
    say(&String::from_utf8_lossy(&verdict.encode()));
    if let Some(t) = transcript {
        say(&t.cost().to_kv());
    }
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let field = field_of(args.modulus)?;
    let input = load(&args.input, field)?;
    let input_name = args.input.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let settings = RunSettings {
        spec: args.protocol,
        field,
        seed: args.seed,
        opts: ProverOptions { cheat: args.cheat },
    };
    if args.trials > 1 {
        return trials(&args, &settings, &input, &input_name);
    }
    match args.role {
        RoleArg::Both => {
            let out = run_local(&settings, &input, &input_name)?;
            if let Some(p) = &args.transcript {
                out.transcript.write(p)?;
            }
            print_outcome(&out.verdict, Some(&out.transcript));
            Ok(exit_for(&out.verdict))
        }
        RoleArg::Prove => {
            let mut chan = open_channel(&args)?;
            let mut link = Link::new(&mut chan, Role::Prover);
            let verdict = run_prover(&mut link, &settings, &input, None)?;
            print_outcome(&verdict, None);
            Ok(exit_for(&verdict))
        }
        RoleArg::Verify => {
            let rs = range_space(settings.spec, &input)?;
            let mut chan = open_channel(&args)?;
            let out = verify_recorded(&mut chan, &settings, &input, &input_name, rs)?;
            if let Some(p) = &args.transcript {
                out.transcript.write(p)?;
            }
            print_outcome(&out.verdict, Some(&out.transcript));
            Ok(exit_for(&out.verdict))
        }
    }
}

fn trials(args: &RunArgs, s: &RunSettings, input: &Input, name: &str) -> Result<ExitCode> {
    if args.role != RoleArg::Both {
        return Err(Error::InvalidParam("--trials runs both roles in process".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let results: Vec<Result<bool>> = pool.install(|| {
        (0..args.trials)
            .into_par_iter()
            .map(|i| {
                let s = RunSettings { seed: s.seed.wrapping_add(i), ..*s };
                run_local(&s, input, name).map(|o| o.verdict.accepted)
            })
            .collect()
    });
    let mut accepted = 0u64;
    for r in results {
        accepted += r? as u64;
    }
    let rejected = args.trials - accepted;
    say(&format!(
        "trials={}\naccepted={accepted}\nrejected={rejected}\nrejection_rate={:.4}\n",
        args.trials,
        rejected as f64 / args.trials as f64
    ));
    Ok(if rejected == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
