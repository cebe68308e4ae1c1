//! `periodmap`: curve information, period-map differentials and the invariant
//! suite, with JSON output.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 input error, 3 precision
//! exhausted, 4 unsupported order.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use period_jets::checks::{
    default_fixtures, run_selected, CheckConfig, Fixture, FixtureInput, Status, CRITERIA,
};
use period_jets::curve::{expand_curve, min_precision, CurveExpansion};
use period_jets::hodge::{duality_matrix, HomMatrix};
use period_jets::linalg::RatMatrix;
use period_jets::period::{
    d2phi, ell1_n, ell2, ell2_via_lie, ell_k_n, fundamental_form_ii, nu1, nu2, T2Rep,
    DEFAULT_MAX_ORDER,
};
use period_jets::rational::format_rational;
use period_jets::{Error, WittElement};

const PRECISION_ENV: &str = "PERIODMAP_PRECISION";
const DEFAULT_CRITERIA: &[&str] = &["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10"];

#[derive(Parser)]
#[command(
    name = "periodmap",
    version,
    about = "Differentials of the period map of y² = p(x)"
)]
struct Cli {
    /// JSON job file; command-line flags take precedence over its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Genus, gap sequences, basis pole orders and the duality matrix.
    Info(Common),
    /// Evaluate one of the period-map differentials.
    Compute {
        which: Which,
        #[command(flatten)]
        common: Common,
        /// Witt fields: inline JSON or a path to a JSON file.
        #[arg(long)]
        fields: Option<String>,
        /// Number of fields expected by `elln`.
        #[arg(long)]
        n: Option<usize>,
        /// Number of blocks for `elln`; omit for the first-order term.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        max_order: Option<usize>,
    },
    /// Run the invariant suite (A1–A10 unless `--criteria` says otherwise).
    Check {
        #[command(flatten)]
        common: Common,
        /// Comma-separated criterion ids, e.g. `A1,A11`, or `all`.
        #[arg(long)]
        criteria: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct Common {
    /// Curve JSON: {"p": ["c0", ..., "1"], "precision": N}.
    #[arg(long)]
    curve: Option<PathBuf>,
    #[arg(long)]
    precision: Option<i64>,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Nu1,
    Ell2,
    #[value(name = "ell2-lie")]
    Ell2Lie,
    D2phi,
    Nu2,
    Ii,
    Elln,
}

/// Job file: every entry optional, overridden by flags.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobConfig {
    curve: Option<CurveSource>,
    precision: Option<i64>,
    fields: Option<Value>,
    n: Option<usize>,
    k: Option<usize>,
    max_order: Option<usize>,
    criteria: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CurveSource {
    Path(PathBuf),
    Inline(FixtureInput),
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PrecisionExhausted(_) => 3,
            Error::UnsupportedOrder { .. } => 4,
            Error::UnreducibleExponent(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    let job = match &cli.config {
        Some(path) => {
            let text = read(path)?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
        }
        None => JobConfig::default(),
    };
    match cli.command {
        Command::Info(common) => {
            let exp = load_expansion(&common, &job)?;
            emit(&info_json(&exp)?, &common, &job)?;
            Ok(0)
        }
        Command::Compute {
            which,
            common,
            fields,
            n,
            k,
            max_order,
        } => {
            let exp = load_expansion(&common, &job)?;
            let fields = match fields {
                Some(s) => parse_json_or_path(&s)?,
                None => job
                    .fields
                    .clone()
                    .ok_or_else(|| Failure::input("--fields is required for compute"))?,
            };
            let params = ComputeParams {
                n: n.or(job.n),
                k: k.or(job.k),
                max_order: max_order.or(job.max_order).unwrap_or(DEFAULT_MAX_ORDER),
            };
            let out = compute(which, &fields, &params, &exp)?;
            emit(&out, &common, &job)?;
            Ok(0)
        }
        Command::Check {
            common,
            criteria,
            seed,
        } => check(&common, criteria, seed, &job),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_json_or_path(s: &str) -> CliResult<Value> {
    if let Ok(v) = serde_json::from_str(s) {
        return Ok(v);
    }
    let text = read(Path::new(s))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{s}: {e}")))
}

fn load_input(common: &Common, job: &JobConfig) -> CliResult<FixtureInput> {
    let from_path = |path: &Path| -> CliResult<FixtureInput> {
        serde_json::from_str(&read(path)?)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    };
    match (&common.curve, &job.curve) {
        (Some(path), _) | (None, Some(CurveSource::Path(path))) => from_path(path),
        (None, Some(CurveSource::Inline(input))) => Ok(input.clone()),
        (None, None) => Err(Failure::input("--curve is required")),
    }
}

/// Flag, then job file, then the curve file, then the environment, then `8g + 24`.
fn resolve_precision(
    input: &FixtureInput,
    fixture: &Fixture,
    common: &Common,
    job: &JobConfig,
) -> CliResult<i64> {
    if let Some(p) = common.precision.or(job.precision).or(input.curve.precision) {
        return Ok(p);
    }
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::input(format!("{PRECISION_ENV}={v:?} is not an integer"))),
        Err(_) => Ok(fixture.curve.default_precision()),
    }
}

fn load_expansion(common: &Common, job: &JobConfig) -> CliResult<CurveExpansion> {
    let input = load_input(common, job)?;
    let fixture = Fixture::from_input(&input)?;
    let precision = resolve_precision(&input, &fixture, common, job)?;
    Ok(expand_curve(&fixture.curve, precision)?)
}

fn emit(value: &Value, common: &Common, job: &JobConfig) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n";
    match common.out.as_ref().or(job.out.as_ref()) {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn matrix_json(m: &RatMatrix) -> Value {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(format_rational).collect::<Vec<_>>())
        .collect()
}

fn info_json(exp: &CurveExpansion) -> CliResult<Value> {
    let d = duality_matrix(exp)?;
    let g = exp.genus();
    Ok(json!({
        "genus": g,
        "degree": exp.curve().degree(),
        "precision": exp.precision(),
        "min_precision": min_precision(g),
        "gaps_o": exp.gaps_o(),
        "gaps_theta": exp.gaps_theta(),
        "dim_h1_o": exp.gaps_o().len(),
        "dim_h1_theta": exp.gaps_theta().len(),
        "k0_pole_orders": exp.k0_basis().iter().map(|e| e.pole_order).collect::<Vec<_>>(),
        "theta_pole_orders": exp.theta_basis().iter().map(|e| e.pole_order).collect::<Vec<_>>(),
        "duality_matrix": matrix_json(&d),
        "duality_det": format_rational(&d.det()),
    }))
}

struct ComputeParams {
    n: Option<usize>,
    k: Option<usize>,
    max_order: usize,
}

/// `HomMatrix` JSON plus whether `D · M` is symmetric.
fn hom_json(m: &HomMatrix, d: &RatMatrix) -> Value {
    let mut v = serde_json::to_value(m).expect("HomMatrix serializes");
    v["symmetry"] = Value::Bool(m.is_symmetric(d));
    v
}

fn product_json(factors: &[HomMatrix], d: &RatMatrix) -> Value {
    factors.iter().map(|m| hom_json(m, d)).collect()
}

fn parse_fields(value: &Value) -> CliResult<Vec<WittElement>> {
    let parse = |v: &Value| {
        serde_json::from_value::<WittElement>(v.clone())
            .map_err(|e| Failure::input(format!("bad field: {e}")))
    };
    match value {
        Value::Array(items) => items.iter().map(parse).collect(),
        single => Ok(vec![parse(single)?]),
    }
}

fn expect_fields(fields: &[WittElement], count: usize, which: &str) -> CliResult<()> {
    if fields.len() != count {
        return Err(Failure::input(format!(
            "{which} takes {count} field(s), got {}",
            fields.len()
        )));
    }
    Ok(())
}

fn compute(
    which: Which,
    raw: &Value,
    params: &ComputeParams,
    exp: &CurveExpansion,
) -> CliResult<Value> {
    let d = duality_matrix(exp)?;
    if let Which::Nu2 = which {
        let rep = if raw.is_object() && raw.get("upsilon").is_some() {
            serde_json::from_value::<T2Rep>(raw.clone())
                .map_err(|e| Failure::input(format!("bad second-order representative: {e}")))?
        } else {
            let f = parse_fields(raw)?;
            expect_fields(&f, 2, "nu2")?;
            T2Rep::lemma_representative(&f[0], &f[1])
        };
        return Ok(hom_json(&nu2(&rep, exp)?, &d));
    }
    let f = parse_fields(raw)?;
    Ok(match which {
        Which::Nu1 => {
            expect_fields(&f, 1, "nu1")?;
            hom_json(&nu1(&f[0], exp)?, &d)
        }
        Which::Ell2 => {
            expect_fields(&f, 2, "ell2")?;
            hom_json(&ell2(&f[0], &f[1], exp)?, &d)
        }
        Which::Ell2Lie => {
            expect_fields(&f, 2, "ell2-lie")?;
            hom_json(&ell2_via_lie(&f[0], &f[1], exp)?, &d)
        }
        Which::D2phi => {
            expect_fields(&f, 2, "d2phi")?;
            let jet = d2phi(&f[0], &f[1], exp)?;
            json!({
                "linear": hom_json(&jet.linear, &d),
                "quadratic": jet.quadratic.iter().map(|q| product_json(q.factors(), &d)).collect::<Vec<_>>(),
            })
        }
        Which::Ii => {
            expect_fields(&f, 2, "ii")?;
            let ii = fundamental_form_ii(&f[0], &f[1], exp)?;
            json!({
                "representative": hom_json(&ii.representative, &d),
                "modulo": period_jets::period::SecondFundamentalForm::MODULO,
            })
        }
        Which::Elln => {
            if let Some(n) = params.n {
                expect_fields(&f, n, "elln")?;
            }
            match params.k {
                None => hom_json(&ell1_n(&f, exp, params.max_order)?, &d),
                Some(k) => {
                    let jet = ell_k_n(&f, k, exp, params.max_order)?;
                    let mut v = json!({
                        "n": jet.n,
                        "k": jet.k,
                        "terms": jet.terms.iter().map(|t| product_json(t.factors(), &d)).collect::<Vec<_>>(),
                    });
                    if let Some(tag) = jet.interpretation {
                        v["interpretation"] = Value::String(tag.into());
                    }
                    v
                }
            }
        }
        Which::Nu2 => unreachable!(),
    })
}

fn check(
    common: &Common,
    criteria: Option<String>,
    seed: Option<u64>,
    job: &JobConfig,
) -> CliResult<u8> {
    let fixtures = match (&common.curve, &job.curve) {
        (None, None) => default_fixtures(),
        _ => vec![Fixture::from_input(&load_input(common, job)?)?],
    };
    let list = criteria.or_else(|| job.criteria.clone());
    let selected: Vec<String> = match list.as_deref() {
        None => DEFAULT_CRITERIA.iter().map(|s| s.to_string()).collect(),
        Some("all") => CRITERIA.iter().map(|(id, _)| id.to_string()).collect(),
        Some(s) => s.split(',').map(|id| id.trim().to_uppercase()).collect(),
    };
    let selected: Vec<&str> = selected.iter().map(String::as_str).collect();
    let mut config = CheckConfig {
        precision: common.precision.or(job.precision),
        ..CheckConfig::default()
    };
    if let Some(seed) = seed.or(job.seed) {
        config.seed = seed;
    }
    let reports = run_selected(&fixtures, &config, &selected)?;
    let code = reports
        .iter()
        .find_map(|r| match (&r.status, &r.error) {
            (Status::Error, Some(e)) => Some(Failure::from(e.clone()).code),
            (Status::Error, None) | (Status::Fail, _) => Some(1),
            (Status::Pass, _) => None,
        })
        .unwrap_or(0);
    let report = json!({
        "fixtures": fixtures.iter().map(|f| f.name.clone()).collect::<Vec<_>>(),
        "seed": config.seed,
        "passed": code == 0,
        "checks": reports,
    });
    emit(&report, common, job)?;
    for r in &reports {
        eprintln!("{}", r.line());
    }
    if let Some(first) = reports.iter().find(|r| !r.passed()) {
        eprintln!("first failing check: {} ({})", first.id, first.title);
    }
    Ok(code)
}
