use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use vsynth::dioph::{self, Effort};
use vsynth::exact::Circuit;
use vsynth::expr::{parse_epsilon, Expr};
use vsynth::oracle::{Oracle, DEFAULT_MAX_VCOUNT};
use vsynth::region::{enumerate_level, make_upright, ConvexRegion, EpsilonRegion};
use vsynth::ring::DenominatorExponent;
use vsynth::synth::{synthesize, verify, SynthesisRequest};
use vsynth::Error;

const PRECISION_ENV: &str = "VSYNTH_PRECISION";

#[derive(Parser)]
#[command(name = "vsynth", version, about = "Clifford+V approximation of z-rotations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate R_z(θ) to within ε.
    Synth(SynthArgs),
    /// Bound the distance between a circuit and R_z(θ).
    Check(CheckArgs),
    /// Minimal V-count by exhaustive search.
    Oracle(OracleArgs),
    /// Dump the candidates of one level of the ε-region.
    Grid(GridArgs),
    /// Factor n and decompose it as a sum of two squares.
    Dioph(DiophArgs),
    /// Sweep angles and precisions.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    #[arg(long)]
    epsilon: String,
    #[arg(long, default_value = "clifford+v")]
    gate_set: String,
    #[arg(long, default_value = "fast")]
    effort: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long, default_value_t = vsynth::synth::DEFAULT_CANDIDATE_CAP)]
    candidate_cap: u64,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    #[arg(long, allow_hyphen_values = true)]
    circuit: String,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    #[arg(long)]
    epsilon: String,
    #[arg(long, default_value_t = DEFAULT_MAX_VCOUNT)]
    max_vcount: u32,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    #[arg(long)]
    epsilon: String,
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    l: u32,
    #[arg(long, default_value_t = 1000)]
    limit: usize,
    #[arg(long)]
    precision: Option<u32>,
}

#[derive(Args)]
struct DiophArgs {
    #[arg(long)]
    n: String,
    #[arg(long, default_value = "complete")]
    effort: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    /// A count `N` (angles `(2j+1)π/N`) or a comma-separated list of angles.
    #[arg(long, default_value = "8", allow_hyphen_values = true)]
    thetas: String,
    /// A decade range such as `1e-2..1e-8`, or a comma-separated list.
    #[arg(long, default_value = "1e-2..1e-6")]
    eps: String,
    #[arg(long, default_value = "clifford+v")]
    gate_set: String,
    #[arg(long, default_value = "fast")]
    effort: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    precision: Option<u32>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Diverged { .. } | Error::ResourceCap(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

type CliResult<T> = Result<T, Failure>;

/// One synthesis run, as printed by `synth`.
#[derive(Serialize)]
struct OutputRecord {
    theta: String,
    epsilon: String,
    gate_set: String,
    circuit: String,
    v_count: u32,
    error_bound: String,
    candidates_examined: u64,
    levels_visited: u64,
    elapsed_ms: f64,
    seed: u64,
    backend: String,
}

#[derive(Serialize)]
struct BenchRow {
    theta: String,
    epsilon: String,
    v_count: Option<u32>,
    candidates_examined: Option<u64>,
    elapsed_ms: Option<f64>,
    ceiling: f64,
    near_optimal: f64,
    within_ceiling: Option<bool>,
    error: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> CliResult<String> {
    match cmd {
        Command::Synth(a) => cmd_synth(a),
        Command::Check(a) => cmd_check(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Dioph(a) => cmd_dioph(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn precision(flag: Option<u32>) -> CliResult<Option<u32>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("{PRECISION_ENV} must be a bit count, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn request(
    theta: &str,
    epsilon: &str,
    gate_set: &str,
    effort: &str,
    seed: u64,
    prec: Option<u32>,
) -> CliResult<SynthesisRequest> {
    Ok(SynthesisRequest::parse(theta, epsilon)?
        .gate_set(gate_set.parse()?)
        .effort(effort.parse()?)
        .seed(seed)
        .precision(prec))
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn cmd_synth(a: SynthArgs) -> CliResult<String> {
    let req = request(&a.theta, &a.epsilon, &a.gate_set, &a.effort, a.seed, precision(a.precision)?)?
        .candidate_cap(a.candidate_cap);
    let r = synthesize(&req)?;
    let record = OutputRecord {
        theta: a.theta,
        epsilon: a.epsilon,
        gate_set: req.gate_set.to_string(),
        circuit: r.circuit.to_string(),
        v_count: r.v_count,
        error_bound: r.error_bound,
        candidates_examined: r.stats.candidates_examined,
        levels_visited: r.stats.levels_visited,
        elapsed_ms: r.stats.elapsed.as_secs_f64() * 1e3,
        seed: a.seed,
        backend: req.effort.to_string(),
    };
    Ok(match a.format {
        Format::Json => to_json(&record),
        _ => text_record(&serde_json::to_value(&record).expect("serializable")),
    })
}

/// `key: value` lines in field order.
fn text_record(v: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = v {
        for (k, v) in map {
            let shown = match v {
                Value::String(s) => s.clone(),
                Value::Null => "-".into(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "{k}: {shown}");
        }
    }
    out
}

fn cmd_check(a: CheckArgs) -> CliResult<String> {
    let theta: Expr = a.theta.parse()?;
    let circuit: Circuit = a.circuit.parse()?;
    let prec = precision(a.precision)?.unwrap_or(256);
    let d = verify(&circuit, &theta, prec)?;
    let bound = d.upper_decimal(20);
    Ok(match a.format {
        Format::Json => to_json(&json!({
            "theta": a.theta,
            "circuit": circuit.to_string(),
            "v_count": circuit.v_count(),
            "distance": bound,
        })),
        _ => bound + "\n",
    })
}

fn cmd_oracle(a: OracleArgs) -> CliResult<String> {
    let theta: Expr = a.theta.parse()?;
    let epsilon = parse_epsilon(&a.epsilon)?;
    let start = Instant::now();
    let oracle = Oracle::with_levels(a.max_vcount)?;
    let found = oracle.min_vcount(&theta, &epsilon, a.max_vcount)?;
    let (k, circuit) = match found {
        Some((k, c)) => (Some(k), Some(c.to_string())),
        None => (None, None),
    };
    let v = json!({
        "theta": a.theta,
        "epsilon": a.epsilon,
        "max_vcount": a.max_vcount,
        "k": k,
        "circuit": circuit,
        "elapsed_ms": start.elapsed().as_secs_f64() * 1e3,
    });
    Ok(match a.format {
        Format::Json => to_json(&v),
        _ => text_record(&v),
    })
}

fn cmd_grid(a: GridArgs) -> CliResult<String> {
    let region = EpsilonRegion::new(a.theta.parse()?, parse_epsilon(&a.epsilon)?, precision(a.precision)?)?;
    let ellipse = region.enclosing_ellipse();
    let (g, steps) = make_upright(&ellipse);
    let exp = DenominatorExponent::new(a.k, a.l);
    let points = enumerate_level(&region, exp, &g);
    let shown: Vec<String> = points.iter().take(a.limit).map(|p| p.num.to_string()).collect();
    Ok(to_json(&json!({
        "theta": a.theta,
        "epsilon": a.epsilon,
        "k": a.k,
        "l": a.l,
        "grid_operator": g.to_string(),
        "upright_steps": steps,
        "uprightness_before": ellipse.uprightness(64).to_f64(),
        "uprightness_after": ellipse.transform(&g).uprightness(64).to_f64(),
        "count": points.len(),
        "candidates": shown,
    })))
}

fn cmd_dioph(a: DiophArgs) -> CliResult<String> {
    let n: BigInt = a.n.trim().parse().map_err(|_| usage(format!("`{}` is not an integer", a.n)))?;
    let effort: Effort = a.effort.parse()?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let f = dioph::factor(&n, effort, &mut rng)?;
    let (representable, squares) = if f.is_complete() {
        let rep = dioph::euler_representable(&f)?;
        let sq = dioph::two_squares(&f, &mut rng)?.map(|b| vec![b.re.to_string(), b.im.to_string()]);
        (Some(rep), sq)
    } else {
        (None, None)
    };
    let factors: Vec<Value> = f
        .factors
        .iter()
        .map(|(p, e)| json!([p.to_string(), e]))
        .collect();
    let v = json!({
        "n": n.to_string(),
        "effort": effort.to_string(),
        "factors": factors,
        "cofactor": f.cofactor.to_string(),
        "complete": f.is_complete(),
        "representable": representable,
        "two_squares": squares,
    });
    Ok(match a.format {
        Format::Json => to_json(&v),
        _ => text_record(&v),
    })
}

fn bench_thetas(arg: &str) -> CliResult<Vec<String>> {
    if let Ok(n) = arg.trim().parse::<u32>() {
        if n == 0 {
            return Err(usage("--thetas must be positive"));
        }
        return Ok((0..n).map(|j| format!("{}*pi/{n}", 2 * j + 1)).collect());
    }
    Ok(arg.split(',').map(|s| s.trim().to_string()).collect())
}

fn bench_epsilons(arg: &str) -> CliResult<Vec<String>> {
    if let Some((lo, hi)) = arg.split_once("..") {
        let decade = |s: &str| -> CliResult<i32> {
            let x: f64 = s.trim().parse().map_err(|_| usage(format!("bad epsilon `{s}`")))?;
            let e = x.log10().round();
            if x <= 0.0 || (10f64.powf(e) - x).abs() > 1e-9 * x {
                return Err(usage(format!("range endpoints must be powers of ten, got `{s}`")));
            }
            Ok(e as i32)
        };
        let (a, b) = (decade(lo)?, decade(hi)?);
        let range: Vec<i32> = if a >= b { (b..=a).rev().collect() } else { (a..=b).collect() };
        return Ok(range.into_iter().map(|e| format!("1e{e}")).collect());
    }
    Ok(arg.split(',').map(|s| s.trim().to_string()).collect())
}

fn cmd_bench(a: BenchArgs) -> CliResult<String> {
    let thetas = bench_thetas(&a.thetas)?;
    let epsilons = bench_epsilons(&a.eps)?;
    let prec = precision(a.precision)?;
    let cells: Vec<(String, String)> = thetas
        .iter()
        .flat_map(|t| epsilons.iter().map(move |e| (t.clone(), e.clone())))
        .collect();
    let mut requests = Vec::with_capacity(cells.len());
    for (t, e) in &cells {
        requests.push(request(t, e, &a.gate_set, &a.effort, a.seed, prec)?);
    }
    let rows: Vec<BenchRow> = cells
        .par_iter()
        .zip(requests.par_iter())
        .map(|((t, e), req)| {
            let eps = vsynth::real::bigint_to_f64(req.epsilon.numer()) / vsynth::real::bigint_to_f64(req.epsilon.denom());
            let ceiling = 4.0 * (2.0 / eps).ln() / 5f64.ln();
            let near_optimal = 3.0 * (1.0 / eps).ln() / 5f64.ln();
            let mut row = BenchRow {
                theta: t.clone(),
                epsilon: e.clone(),
                v_count: None,
                candidates_examined: None,
                elapsed_ms: None,
                ceiling,
                near_optimal,
                within_ceiling: None,
                error: None,
            };
            match synthesize(req) {
                Ok(r) => {
                    row.v_count = Some(r.v_count);
                    row.candidates_examined = Some(r.stats.candidates_examined);
                    row.elapsed_ms = Some(r.stats.elapsed.as_secs_f64() * 1e3);
                    row.within_ceiling = Some(r.v_count as f64 <= ceiling);
                }
                Err(err) => row.error = Some(err.to_string()),
            }
            row
        })
        .collect();
    let failed = rows.iter().any(|r| r.error.is_some());
    let out = match a.format {
        Format::Csv => {
            let mut s = String::from("theta,epsilon,v_count,candidates_examined,elapsed_ms,ceiling,near_optimal,within_ceiling,error\n");
            let opt = |v: Option<String>| v.unwrap_or_default();
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{:.3},{:.3},{},{}",
                    r.theta,
                    r.epsilon,
                    opt(r.v_count.map(|v| v.to_string())),
                    opt(r.candidates_examined.map(|v| v.to_string())),
                    opt(r.elapsed_ms.map(|v| format!("{v:.3}"))),
                    r.ceiling,
                    r.near_optimal,
                    opt(r.within_ceiling.map(|v| v.to_string())),
                    opt(r.error.clone()),
                );
            }
            s
        }
        _ => to_json(&rows),
    };
    if failed {
        print!("{out}");
        return Err(Failure {
            code: 2,
            message: "some bench cells failed".into(),
        });
    }
    Ok(out)
}
