//! `clipvol`: exact volumes of clipped unit cubes.
//!
//! Exit codes: 0 success; 1 an identity or sweep found a mismatch, or an
//! I/O failure; 2 a precondition fails (good clipping, formula arity,
//! identity parameters); 3 malformed input or unknown identity id; 4 the
//! dimension exceeds a cap.

mod bench;
mod specfile;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use clipvol_core::cube::{check_good_clipping, check_redundancy, ClippedCubeSpec};
use clipvol_core::identity::{self, Form, IdentityError, IdentityId, IdentityParams};
use clipvol_core::oracle::{volume_monte_carlo_cube, volume_recursive_facets_system, OracleError};
use clipvol_core::report::{approx, render_text, term_report};
use clipvol_core::scalar::{parse_rational, Rational, Scalar};
use clipvol_core::volume::{compute_volume, Formula, VolumeError};
use serde_json::{json, Value};

use specfile::{Parsed, SpecFile};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// An error carrying its exit code and a JSON body for stdout.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
    pub detail: Option<Value>,
}

impl Failure {
    pub fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code,
            kind,
            message: message.into(),
            detail: None,
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Failure::new(3, "parse-error", message)
    }

    fn body(&self) -> Value {
        let mut err = json!({"code": self.code, "kind": self.kind, "message": self.message});
        if let Some(d) = &self.detail {
            err["detail"] = d.clone();
        }
        json!({"version": VERSION, "error": err})
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

impl From<VolumeError> for Failure {
    fn from(e: VolumeError) -> Self {
        let message = e.to_string();
        match e {
            VolumeError::GoodClippingViolated(v) => Failure {
                detail: Some(json!({ "violations": v })),
                ..Failure::new(2, "good-clipping-violated", message)
            },
            VolumeError::DimensionTooLarge { .. } => Failure::new(4, "dimension-too-large", message),
            VolumeError::FormulaPreconditionViolated(_) => Failure::new(2, "precondition-violated", message),
            VolumeError::NotSimple { .. } => Failure::new(2, "not-simple", message),
            VolumeError::ParallelEdge { .. } => Failure::new(2, "parallel-edge", message),
            VolumeError::Cube(_) => Failure::new(2, "non-generic", message),
            VolumeError::Scalar(_) => Failure::new(2, "arithmetic", message),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let message = e.to_string();
        match e {
            OracleError::DimensionTooLarge { .. } => Failure::new(4, "dimension-too-large", message),
            OracleError::Unbounded | OracleError::NoSamples => Failure::new(2, "precondition-violated", message),
        }
    }
}

impl From<IdentityError> for Failure {
    fn from(e: IdentityError) -> Self {
        let message = e.to_string();
        match e {
            IdentityError::UnknownIdentity(_) => Failure::new(3, "unknown-identity", message),
            IdentityError::MissingParameter(p) => Failure {
                detail: Some(json!({ "parameter": p })),
                ..Failure::new(2, "precondition-violated", message)
            },
            _ => Failure::new(2, "precondition-violated", message),
        }
    }
}

#[derive(Parser)]
#[command(name = "clipvol", version, about = "Exact volumes of unit cubes clipped by hyperplanes")]
struct Cli {
    /// Worker threads; falls back to CLIPVOL_THREADS, then all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Volume by a vertex-sum formula.
    Volume(VolumeArgs),
    /// Good clipping and redundancy report.
    Check(SpecArg),
    /// Volume by an independent oracle.
    Oracle(OracleArgs),
    /// Evaluate or sweep a combinatorial identity.
    Identity(IdentityArgs),
    /// Time the formulas on random instances.
    Bench(bench::BenchArgs),
}

#[derive(Args)]
struct SpecArg {
    /// Spec file, or `-` for stdin.
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulaArg {
    Auto,
    One,
    Two,
    Three,
    Cup,
    Vee,
    Vee2,
    Lawrence,
}

impl FormulaArg {
    fn resolve(self, m: usize) -> Formula {
        match self {
            FormulaArg::Auto => Formula::auto_for(m),
            FormulaArg::One => Formula::OnePlane,
            FormulaArg::Two => Formula::TwoPlane,
            FormulaArg::Three => Formula::ThreePlane,
            FormulaArg::Cup => Formula::GeneralCup,
            FormulaArg::Vee => Formula::GeneralVee,
            FormulaArg::Vee2 => Formula::GeneralVee2,
            FormulaArg::Lawrence => Formula::Lawrence,
        }
    }
}

#[derive(Args)]
struct VolumeArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long, value_enum, default_value = "auto")]
    formula: FormulaArg,
    /// Include the per-vertex terms.
    #[arg(long)]
    terms: bool,
    /// Take the limit e -> 0 of a spec over Q(e).
    #[arg(long)]
    limit_eps: bool,
    /// Plain-text term table instead of JSON.
    #[arg(long)]
    text: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Facets,
    Mc,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest dimension for the facet oracle.
    #[arg(long, default_value_t = clipvol_core::oracle::DEFAULT_FACET_CAP)]
    cap: usize,
}

#[derive(Args)]
struct IdentityArgs {
    /// Identity to evaluate once with `--params`.
    #[arg(long, conflicts_with = "sweep", requires = "params")]
    id: Option<String>,
    /// JSON parameters, e.g. {"a": ["1", "2"], "y": "3"}.
    #[arg(long)]
    params: Option<String>,
    /// Identity to check on random parameters.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest dimension drawn by a sweep.
    #[arg(long, default_value_t = 8)]
    max_n: usize,
    /// List the registered identities.
    #[arg(long, conflicts_with_all = ["id", "sweep"])]
    list: bool,
}

/// Writes JSON, or a string verbatim, to stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_json(v: &Value) -> std::io::Result<()> {
    use std::io::Write;
    let text = match v {
        Value::String(plain) => plain.trim_end().to_string(),
        _ => serde_json::to_string_pretty(v).expect("JSON values serialize"),
    };
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

/// Puts `version` first.
fn with_version(v: Value) -> Value {
    let Value::Object(fields) = v else { panic!("reports are objects") };
    let mut out = serde_json::Map::new();
    out.insert("version".into(), json!(VERSION));
    out.extend(fields);
    Value::Object(out)
}

fn volume_report<S: Scalar + Limit>(
    spec: &ClippedCubeSpec<S>,
    formula: Formula,
    args: &VolumeArgs,
) -> Result<Value, Failure> {
    let result = compute_volume(spec, formula)?;
    if args.text {
        return Ok(Value::String(render_text(&term_report(&result))));
    }
    let mut out = json!({
        "spec": SpecFile::from_spec(spec),
        "formula": formula,
        "volume": result.volume.to_string(),
    });
    if args.limit_eps {
        let limit = result
            .volume
            .to_rational_limit()
            .map_err(|e| Failure::new(2, "pole-at-zero", e.to_string()))?;
        if limit.to_string() != out["volume"] {
            out["volume_eps"] = out["volume"].take();
        }
        out["volume"] = json!(limit.to_string());
        out["approx"] = json!(approx(&limit));
    } else if let Some(v) = result.volume.to_rational() {
        out["approx"] = json!(approx(&v));
    }
    if args.terms {
        let report = term_report(&result);
        out["terms"] = serde_json::to_value(&report.terms).expect("reports serialize");
        out["strata"] = serde_json::to_value(&report.strata).expect("reports serialize");
        if !report.excluded.is_empty() {
            out["excluded"] = serde_json::to_value(&report.excluded).expect("reports serialize");
        }
        if let Some(stats) = report.stats {
            out["stats"] = serde_json::to_value(stats).expect("reports serialize");
        }
    }
    Ok(with_version(out))
}

/// `e = 0` limit on Q(e); identity on exact rationals.
trait Limit {
    fn to_rational_limit(&self) -> Result<Rational, clipvol_core::scalar::ScalarError>;
}

impl Limit for Rational {
    fn to_rational_limit(&self) -> Result<Rational, clipvol_core::scalar::ScalarError> {
        Ok(self.clone())
    }
}

impl Limit for clipvol_core::eps::EpsRational {
    fn to_rational_limit(&self) -> Result<Rational, clipvol_core::scalar::ScalarError> {
        self.epsilon_limit()
    }
}

fn cmd_volume(args: &VolumeArgs) -> anyhow::Result<Value> {
    let parsed = SpecFile::load(&args.spec.spec)?.parse()?;
    let out = match &parsed {
        Parsed::Exact(s) => volume_report_any(s, args)?,
        Parsed::Eps(s) => volume_report_any(s, args)?,
    };
    Ok(out)
}

fn volume_report_any<S: Scalar + Limit>(spec: &ClippedCubeSpec<S>, args: &VolumeArgs) -> Result<Value, Failure> {
    let formula = args.formula.resolve(spec.m());
    volume_report(spec, formula, args)
}

fn check_report<S: Scalar>(spec: &ClippedCubeSpec<S>) -> Value {
    let gc = check_good_clipping(spec);
    let violations = gc.summary();
    let count = |c: char| violations.iter().filter(|v| v.condition == c).count();
    json!({
        "version": VERSION,
        "spec": SpecFile::from_spec(spec),
        "good_clipping": {
            "holds": gc.holds(),
            "condition_a": count('A') == 0,
            "condition_b": count('B') == 0,
            "violations": violations,
        },
        "redundancy": check_redundancy(spec),
    })
}

fn cmd_check(args: &SpecArg) -> anyhow::Result<Value> {
    Ok(match SpecFile::load(&args.spec)?.parse()? {
        Parsed::Exact(s) => check_report(&s),
        Parsed::Eps(s) => check_report(&s),
    })
}

fn cmd_oracle(args: &OracleArgs) -> anyhow::Result<Value> {
    let spec = SpecFile::load(&args.spec.spec)?.parse()?.at_zero()?;
    let out = match args.method {
        Method::Facets => {
            let v = volume_recursive_facets_system(&spec.to_halfspaces(), args.cap).map_err(Failure::from)?;
            json!({"method": "facets", "volume": v.to_string(), "approx": approx(&v)})
        }
        Method::Mc => {
            let e = volume_monte_carlo_cube(&spec, args.samples, args.seed).map_err(Failure::from)?;
            json!({"method": "mc", "mean": e.mean, "stderr": e.stderr, "samples": e.samples, "seed": e.seed})
        }
    };
    Ok(with_version(out))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    n: Option<usize>,
    #[serde(default)]
    a: Vec<String>,
    #[serde(default)]
    b: Vec<String>,
    y: Option<String>,
    #[serde(default)]
    form: Option<String>,
    k: Option<i64>,
    l: Option<usize>,
    d: Option<String>,
}

fn parse_params(text: &str) -> Result<IdentityParams, Failure> {
    let f: ParamsFile = serde_json::from_str(text).map_err(|e| Failure::parse(format!("params: {e}")))?;
    let rat = |s: &String| parse_rational(s).map_err(|e| Failure::parse(e.to_string()));
    let list = |v: &[String]| v.iter().map(rat).collect::<Result<Vec<_>, _>>();
    let k = || f.k.ok_or_else(|| Failure::parse("form needs an exponent k"));
    let form = match f.form.as_deref().unwrap_or("y") {
        "y" => Form::Y,
        "set-y" => Form::SetY,
        "power" => Form::Power(k()?),
        "set-power" => Form::SetPower(k()?),
        other => return Err(Failure::parse(format!("unknown form {other:?}; use y, set-y, power or set-power"))),
    };
    let a = list(&f.a)?;
    if let (Some(n), false) = (f.n, a.is_empty()) {
        if n != a.len() {
            return Err(Failure {
                detail: Some(json!({"parameter": "n"})),
                ..Failure::new(2, "precondition-violated", format!("n = {n} but a has {} entries", a.len()))
            });
        }
    }
    Ok(IdentityParams {
        a,
        b: list(&f.b)?,
        y: f.y.as_ref().map(rat).transpose()?.unwrap_or_else(Rational::zero),
        form,
        l: f.l,
        d: f.d.as_ref().map(rat).transpose()?,
        n: f.n,
    })
}

fn cmd_identity(args: &IdentityArgs) -> anyhow::Result<(Value, bool)> {
    if args.list {
        let ids: Vec<Value> = IdentityId::ALL
            .iter()
            .map(|id| json!({"id": id.key(), "description": id.description()}))
            .collect();
        return Ok((json!({"version": VERSION, "identities": ids}), true));
    }
    if let Some(name) = &args.sweep {
        let id: IdentityId = name.parse().map_err(Failure::from)?;
        let s = identity::sweep(id, args.trials, args.seed, args.max_n).map_err(Failure::from)?;
        let ok = s.failures.is_empty();
        return Ok((with_version(serde_json::to_value(s).expect("summaries serialize")), ok));
    }
    let Some(name) = &args.id else {
        return Err(Failure::parse("pass --id with --params, --sweep, or --list").into());
    };
    let id: IdentityId = name.parse().map_err(Failure::from)?;
    let params = parse_params(args.params.as_deref().unwrap_or("{}"))?;
    identity::validate(id, &params).map_err(Failure::from)?;
    let out = identity::eval_identity(id, &params).map_err(Failure::from)?;
    let body = json!({
        "version": VERSION,
        "id": id,
        "form": params.form,
        "lhs": out.lhs.to_string(),
        "rhs": out.rhs.to_string(),
        "equal": out.equal,
    });
    Ok((body, out.equal))
}

fn configure_threads(flag: Option<usize>) -> anyhow::Result<()> {
    let from_env = match std::env::var("CLIPVOL_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .with_context(|| format!("CLIPVOL_THREADS={v:?} is not a count"))?,
        ),
        Err(_) => None,
    };
    if let Some(k) = flag.or(from_env).filter(|&k| k > 0) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    configure_threads(cli.threads)?;
    let (out, ok) = match &cli.command {
        Command::Volume(a) => (cmd_volume(a)?, true),
        Command::Check(a) => (cmd_check(a)?, true),
        Command::Oracle(a) => (cmd_oracle(a)?, true),
        Command::Identity(a) => cmd_identity(a)?,
        Command::Bench(a) => (bench::run(a)?, true),
    };
    print_json(&out).context("writing to stdout")?;
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => match e.downcast_ref::<Failure>() {
            Some(f) => {
                let _ = print_json(&f.body());
                eprintln!("error: {f}");
                ExitCode::from(f.code)
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}
