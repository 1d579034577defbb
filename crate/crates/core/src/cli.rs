//! Command-line front end.
//!
//! Every subcommand shares one flag set; a JSON file passed with `--config`
//! supplies defaults using the same field names, and flags given on the
//! command line win. Exit codes: 0 success, 1 hypothesis or validation
//! failure, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::charsum::{
    joint_census, restricted_census, shifted_census, twisted_sum, weil_check, CensusMode,
    CensusSpec,
};
use crate::curvewin::{
    beta_residue_scan, cor4_exceptional, gauss_lemma_check, theorem_experiment, Curve,
    ExperimentHistogram, ExperimentInputs, ExperimentKind, HypothesisPolicy, Interval, ModelRun,
    Rect, RestrictedIndex, ScanSpec,
};
use crate::ffield::{Character, FieldSpec};
use crate::polyff::Poly;
use crate::report::{emit, histogram_rows, joint_rows, rational_value, Format, Report};
use crate::rwalk::{exact_prop21a, exact_prop21b, exact_prop21c, simulate_phi, WalkConfig};
use crate::{verify, Error};

#[derive(Debug, Parser)]
#[command(
    name = "curvestat",
    version,
    about = "Residue statistics of window point counts on curves y^l = P(x) over F_p",
    after_help = "Polynomials are comma-separated coefficients, constant term first: \
                  --poly 1,0,1 is x^2 + 1. Repeat --poly for several polynomials."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Window-count residues of one curve against the single-curve bound
    Phi(Params),
    /// Joint residues of several curves against the joint bound
    Joint(Params),
    /// Window counts restricted to a rectangle
    Restricted(Params),
    /// Counts of beta-residues and nonresidues in windows
    Beta(Params),
    /// Monte Carlo of the residue walk
    Walk(Params),
    /// Exact enumeration of the walk moment sums (--part a, b or c)
    Prop21(Params),
    /// Incomplete character sum against the Weil-type bound
    Charsum(Params),
    /// Character-pattern census along an arithmetic progression
    Census(Params),
    /// Shifted census on a restricted curve
    Shifted(Params),
    /// Gauss lemma over every a in 1..p-1
    Gauss(Params),
    /// Starts of windows missing a given character value
    Gaps(Params),
    /// Full acceptance suite
    Verify(Params),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Phi(_) => "phi",
            Command::Joint(_) => "joint",
            Command::Restricted(_) => "restricted",
            Command::Beta(_) => "beta",
            Command::Walk(_) => "walk",
            Command::Prop21(_) => "prop21",
            Command::Charsum(_) => "charsum",
            Command::Census(_) => "census",
            Command::Shifted(_) => "shifted",
            Command::Gauss(_) => "gauss",
            Command::Gaps(_) => "gaps",
            Command::Verify(_) => "verify",
        }
    }

    fn params(&self) -> &Params {
        match self {
            Command::Phi(p)
            | Command::Joint(p)
            | Command::Restricted(p)
            | Command::Beta(p)
            | Command::Walk(p)
            | Command::Prop21(p)
            | Command::Charsum(p)
            | Command::Census(p)
            | Command::Shifted(p)
            | Command::Gauss(p)
            | Command::Gaps(p)
            | Command::Verify(p) => p,
        }
    }
}

/// Flags shared by all subcommands. The same names (with `-` as `_`) are
/// accepted as keys of the `--config` file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// JSON file with default values for any of these fields
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub ell: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    /// Coefficients, constant term first; repeat for several polynomials
    #[arg(long = "poly", allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub poly: Vec<String>,
    /// Window length I
    #[arg(long = "I")]
    #[serde(rename = "I")]
    pub window: Option<u64>,
    /// Block length L (also the census stride and the walk length)
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub block: Option<u64>,
    #[arg(long)]
    pub x_start: Option<u64>,
    #[arg(long)]
    pub scan_len: Option<u64>,
    #[arg(long)]
    pub x_lo: Option<u64>,
    #[arg(long)]
    pub x_hi: Option<u64>,
    #[arg(long)]
    pub y_lo: Option<u64>,
    #[arg(long)]
    pub y_hi: Option<u64>,
    /// Fraction `num/den` in (0, 1/2]
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Trials of the block model to compare against (needs --seed)
    #[arg(long)]
    pub model_trials: Option<u64>,
    /// Enumeration part: a, b or c
    #[arg(long)]
    pub part: Option<String>,
    #[arg(long)]
    pub k: Option<u32>,
    /// Comma-separated offsets (shifts for `shifted`)
    #[arg(long)]
    pub offsets: Option<String>,
    /// Target vector(s): `0,1,1`; separate polynomials with `;`
    #[arg(long)]
    pub v: Option<String>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub mu: Option<u32>,
    /// Comma-separated window lengths for `gaps`
    #[arg(long)]
    pub windows: Option<String>,
    /// Comma-separated frequencies for twisted sums
    #[arg(long)]
    pub t: Option<String>,
    /// Comma-separated criterion numbers for `verify`
    #[arg(long)]
    pub criteria: Option<String>,
    /// Count without enforcing the census hypotheses
    #[arg(long)]
    #[serde(default)]
    pub count_only: bool,
    /// Record, rather than enforce, the asymptotic growth conditions
    #[arg(long)]
    #[serde(default)]
    pub record_asymptotic: bool,
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip)]
    pub format: Option<Format>,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

/// File form: the fields the echo skips, plus everything else, which must
/// deserialize into [`Params`] (unknown keys are rejected there).
#[derive(Debug, Default, Deserialize)]
struct FileConfig {
    command: Option<String>,
    threads: Option<usize>,
    format: Option<Format>,
    output: Option<PathBuf>,
    #[serde(flatten)]
    params: Value,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad or missing input; exit code 2.
    Usage(String),
    /// Library rejection; exit code 1.
    Failed(Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Failed(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failed(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("`{field}`: {reason}"))
}

fn need<T>(v: Option<T>, field: &str) -> CliResult<T> {
    v.ok_or_else(|| usage(field, "required"))
}

/// Parses argv, runs the command inside a pool of `--threads` workers, and
/// writes the report. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(&cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(CliError::Failed(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run_parsed(cli: &Cli) -> CliResult<i32> {
    let start = Instant::now();
    let (params, file) = resolve(cli.command.params())?;
    if let Some(cmd) = &file.command {
        if cmd != cli.command.name() {
            return Err(usage("command", format!("config is for `{cmd}`, not `{}`", cli.command.name())));
        }
    }
    let threads = params.threads.or(file.threads).unwrap_or(1);
    if threads == 0 {
        return Err(usage("threads", "must be >= 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| usage("threads", e))?;
    let mut report = pool.install(|| execute(cli.command.name(), &params))?;
    report.meta.threads = threads;
    report.meta.duration_ms = start.elapsed().as_millis() as u64;
    let format = params.format.or(file.format).unwrap_or_default();
    let output = params.output.clone().or(file.output);
    emit(&report, format, output.as_deref())?;
    let failed = report.command == "verify" && report.result["pass"] != Value::Bool(true);
    Ok(i32::from(failed))
}

/// Parses argv and runs the command in the current thread pool, returning
/// the report without writing it.
pub fn execute_args<I, T>(args: I) -> CliResult<Report>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    let (params, _) = resolve(cli.command.params())?;
    execute(cli.command.name(), &params)
}

/// Merges the config file (if any) under the command-line flags.
fn resolve(flags: &Params) -> CliResult<(Params, FileConfig)> {
    let Some(path) = &flags.config else {
        return Ok((flags.clone(), FileConfig::default()));
    };
    let file = read_config(path)?;
    let base: Params = serde_json::from_value(file.params.clone()).map_err(|e| usage("config", e))?;
    let mut merged = flags.clone();
    macro_rules! fill {
        ($($f:ident),*) => { $( if merged.$f.is_none() { merged.$f = base.$f.clone(); } )* };
    }
    fill!(
        p, ell, m, window, block, x_start, scan_len, x_lo, x_hi, y_lo, y_hi, beta, seed, trials,
        model_trials, part, k, offsets, v, n, mu, windows, t, criteria
    );
    if merged.poly.is_empty() {
        merged.poly = base.poly;
    }
    merged.count_only |= base.count_only;
    merged.record_asymptotic |= base.record_asymptotic;
    Ok((merged, file))
}

fn read_config(path: &Path) -> CliResult<FileConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage("config", format!("cannot read {}: {e}", path.display())))?;
    let file: FileConfig = serde_json::from_str(&text).map_err(|e| usage("config", e))?;
    if !file.params.is_object() && !file.params.is_null() {
        return Err(usage("config", "expected a JSON object"));
    }
    Ok(file)
}

fn execute(command: &str, params: &Params) -> CliResult<Report> {
    let echo = serde_json::to_value(params).expect("params serialize");
    let mut report = Report::new(command, echo);
    match command {
        "phi" => experiment(&mut report, params, ExperimentKind::Thm1)?,
        "joint" => experiment(&mut report, params, ExperimentKind::Thm2)?,
        "restricted" => experiment(&mut report, params, ExperimentKind::Thm3)?,
        "beta" => beta(&mut report, params)?,
        "walk" => walk(&mut report, params)?,
        "prop21" => prop21(&mut report, params)?,
        "charsum" => charsum(&mut report, params)?,
        "census" => census(&mut report, params)?,
        "shifted" => shifted(&mut report, params)?,
        "gauss" => gauss(&mut report, params)?,
        "gaps" => gaps(&mut report, params)?,
        "verify" => run_verify(&mut report, params)?,
        other => return Err(usage("command", format!("unknown command {other}"))),
    }
    Ok(report)
}

fn field(params: &Params) -> CliResult<FieldSpec> {
    Ok(FieldSpec::new(need(params.p, "p")?)?)
}

fn parse_list<T: std::str::FromStr>(s: &str, field: &str) -> CliResult<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| usage(field, format!("{x:?}: {e}"))))
        .collect()
}

fn polys(params: &Params, p: u64) -> CliResult<Vec<Poly>> {
    if params.poly.is_empty() {
        return Err(usage("poly", "required"));
    }
    params
        .poly
        .iter()
        .map(|s| Ok(Poly::from_signed(&parse_list::<i64>(s, "poly")?, p)))
        .collect()
}

fn scan(params: &Params, p: u64) -> CliResult<ScanSpec> {
    let window = need(params.window, "I")?;
    let x_start = params.x_start.unwrap_or(0);
    let scan_len = match params.scan_len {
        Some(n) => n,
        None => p
            .checked_sub(window)
            .and_then(|r| r.checked_sub(x_start))
            .ok_or_else(|| usage("I", format!("window plus start exceeds p = {p}")))?,
    };
    let spec = ScanSpec::new(x_start, scan_len, window);
    Ok(match params.block {
        Some(l) => spec.with_block(l),
        None => spec,
    })
}

fn rect(params: &Params, p: u64) -> CliResult<Rect> {
    let x = Interval::new(params.x_lo.unwrap_or(0), params.x_hi.unwrap_or(p - 1))?;
    let y = Interval::new(params.y_lo.unwrap_or(0), need(params.y_hi, "y_hi")?)?;
    Ok(Rect::new(x, y, p)?)
}

fn experiment(report: &mut Report, params: &Params, kind: ExperimentKind) -> CliResult<()> {
    let field = field(params)?;
    let p = field.p();
    let spec = scan(params, p)?;
    if spec.block.is_none() {
        return Err(usage("L", "required"));
    }
    let model = match params.model_trials {
        Some(trials) => Some(ModelRun {
            trials,
            seed: need(params.seed, "seed")?,
        }),
        None => None,
    };
    let inputs = ExperimentInputs {
        kind,
        ell: need(params.ell, "ell")?,
        m: need(params.m, "m")?,
        polys: polys(params, p)?,
        scan: spec,
        rect: match kind {
            ExperimentKind::Thm3 => Some(rect(params, p)?),
            _ => None,
        },
        policy: if params.record_asymptotic {
            HypothesisPolicy::Record
        } else {
            HypothesisPolicy::Enforce
        },
        model,
        field,
    };
    let r = theorem_experiment(&inputs)?;
    report.checks = r.checks.clone();
    report.histogram = match &r.histogram {
        ExperimentHistogram::Single(h) => histogram_rows(h),
        ExperimentHistogram::Joint(h) => joint_rows(h),
    };
    let model = r.model.as_ref().map(|c| {
        json!({
            "spec": c.spec,
            "q50": c.quantiles.q50,
            "q95": c.quantiles.q95,
            "q99": c.quantiles.q99,
            "below_q99": c.below_q99,
        })
    });
    report.result = json!({
        "discrepancy": rational_value(&r.discrepancy),
        "bound": r.bound,
        "pass": r.pass,
        "model": model,
    });
    Ok(())
}

fn parse_beta(s: &str) -> CliResult<Ratio<u64>> {
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: u64 = num.trim().parse().map_err(|e| usage("beta", e))?;
    let den: u64 = den.trim().parse().map_err(|e| usage("beta", e))?;
    if den == 0 {
        return Err(usage("beta", "zero denominator"));
    }
    Ok(Ratio::new(num, den))
}

fn beta(report: &mut Report, params: &Params) -> CliResult<()> {
    let field = field(params)?;
    let beta = parse_beta(&need(params.beta.clone(), "beta")?)?;
    let spec = scan(params, field.p())?;
    let m = need(params.m, "m")?;
    let s = beta_residue_scan(&field, beta, &spec, m)?;
    let partition = s
        .residues
        .iter()
        .zip(&s.nonresidues)
        .all(|(r, n)| r + n == spec.window);
    report.histogram = histogram_rows(&s.residue_hist);
    report.result = json!({
        "j_max": s.j_max,
        "windows": s.residues.len(),
        "partition_holds": partition,
        "residue_discrepancy": rational_value(&s.residue_hist.discrepancy()?),
        "nonresidue_counts": s.nonresidue_hist.counts(),
        "nonresidue_discrepancy": rational_value(&s.nonresidue_hist.discrepancy()?),
    });
    Ok(())
}

fn walk(report: &mut Report, params: &Params) -> CliResult<()> {
    let cfg = WalkConfig {
        ell: need(params.ell, "ell")?,
        m: need(params.m, "m")?,
        len: need(params.block, "L")?,
        trials: need(params.trials, "trials")?,
        seed: need(params.seed, "seed")?,
    };
    let sim = simulate_phi(&cfg)?;
    let se: Vec<f64> = (0..cfg.m as usize).map(|a| sim.std_error(a)).collect();
    report.result = json!({
        "mean": sim.mean,
        "variance": sim.variance,
        "std_error": se,
        "x_hits": sim.x_hits,
    });
    Ok(())
}

fn prop21(report: &mut Report, params: &Params) -> CliResult<()> {
    let part = need(params.part.clone(), "part")?;
    let m = need(params.m, "m")?;
    let len = u32::try_from(need(params.block, "L")?).map_err(|e| usage("L", e))?;
    let r = match part.as_str() {
        "a" => exact_prop21a::<f64>(need(params.ell, "ell")?, m, len)?,
        "b" => exact_prop21b::<f64>(need(params.ell, "ell")?, m, len, need(params.k, "k")?)?,
        "c" => exact_prop21c::<f64>(m, len)?,
        other => return Err(usage("part", format!("expected a, b or c, got {other:?}"))),
    };
    report.result = json!({"part": part, "lhs": r.lhs, "bound": r.bound, "pass": r.pass});
    Ok(())
}

fn charsum(report: &mut Report, params: &Params) -> CliResult<()> {
    let field = field(params)?;
    let p = field.p();
    let chi = Character::new(&field, need(params.ell, "ell")?)?;
    let poly = single_poly(params, p)?;
    let lo = params.x_lo.unwrap_or(0);
    let hi = params.x_hi.unwrap_or(p - 1);
    if lo > hi || hi >= p {
        return Err(usage("x_hi", format!("need x_lo <= x_hi <= {}", p - 1)));
    }
    let w = weil_check(&poly, &chi, lo..hi + 1)?;
    let complete = (poly.degree().unwrap_or(0) + 1) as f64 * (p as f64).sqrt();
    let twisted = match &params.t {
        None => Vec::new(),
        Some(s) => parse_list::<u64>(s, "t")?
            .into_iter()
            .map(|t| {
                let z = twisted_sum(&poly, &chi, t)?;
                Ok(json!({
                    "t": t,
                    "re": z.re,
                    "im": z.im,
                    "norm": z.norm(),
                    "bound": complete,
                    "pass": z.norm() <= complete * (1.0 + 1e-9),
                }))
            })
            .collect::<CliResult<Vec<_>>>()?,
    };
    report.result = json!({"weil": w, "twisted": twisted});
    Ok(())
}

fn single_poly(params: &Params, p: u64) -> CliResult<Poly> {
    let mut list = polys(params, p)?;
    if list.len() != 1 {
        return Err(usage("poly", "exactly one polynomial expected"));
    }
    Ok(list.remove(0))
}

fn census(report: &mut Report, params: &Params) -> CliResult<()> {
    let field = field(params)?;
    let p = field.p();
    let chi = Character::new(&field, need(params.ell, "ell")?)?;
    let polys = polys(params, p)?;
    let stride = params.block.unwrap_or(1);
    if stride == 0 {
        return Err(usage("L", "must be >= 1"));
    }
    let offsets = parse_list::<u64>(&need(params.offsets.clone(), "offsets")?, "offsets")?;
    let targets = need(params.v.clone(), "v")?
        .split(';')
        .map(|s| parse_list::<u32>(s, "v"))
        .collect::<CliResult<Vec<_>>>()?;
    let spec = CensusSpec {
        polys,
        stride,
        offsets,
        n: params.n.unwrap_or((p - 1) / stride),
        targets,
        mode: if params.count_only {
            CensusMode::Count
        } else {
            CensusMode::Theorem
        },
    };
    let r = joint_census(&chi, &spec)?;
    report.result = serde_json::to_value(r).expect("census serializes");
    Ok(())
}

fn shifted(report: &mut Report, params: &Params) -> CliResult<()> {
    let field = field(params)?;
    let p = field.p();
    let curve = Curve::new(&field, single_poly(params, p)?, need(params.ell, "ell")?)?;
    let index = RestrictedIndex::new(&curve, rect(params, p)?)?;
    let shifts = parse_list::<u64>(&need(params.offsets.clone(), "offsets")?, "offsets")?;
    let stride = params.block.unwrap_or(1);
    let s = shifted_census(&index, &shifts, stride)?;
    let pattern = match &params.v {
        None => Value::Null,
        Some(v) => {
            let v: Vec<bool> = parse_list::<u8>(v, "v")?.into_iter().map(|b| b != 0).collect();
            json!(restricted_census(&index, &shifts, stride, &v)?)
        }
    };
    report.result = json!({"shifted": s, "pattern_count": pattern});
    Ok(())
}

fn gauss(report: &mut Report, params: &Params) -> CliResult<()> {
    let field = field(params)?;
    let rows = (1..field.p())
        .map(|a| gauss_lemma_check(&field, a))
        .collect::<Result<Vec<_>, _>>()?;
    let all_ok = rows.iter().all(|g| g.ok);
    report.result = json!({"rows": rows, "all_ok": all_ok});
    Ok(())
}

fn gaps(report: &mut Report, params: &Params) -> CliResult<()> {
    let field = field(params)?;
    let windows = match (&params.windows, params.window) {
        (Some(s), _) => parse_list::<u64>(s, "windows")?,
        (None, Some(w)) => vec![w],
        (None, None) => return Err(usage("windows", "required")),
    };
    let mu = params.mu.unwrap_or(0);
    let counts = cor4_exceptional(&field, need(params.ell, "ell")?, mu, &windows)?;
    report.result = json!({"windows": windows, "mu": mu, "exceptional": counts});
    Ok(())
}

fn run_verify(report: &mut Report, params: &Params) -> CliResult<()> {
    let ids: Vec<u8> = match &params.criteria {
        Some(s) => parse_list::<u8>(s, "criteria")?,
        None => verify::CRITERIA.iter().map(|c| c.0).collect(),
    };
    let outcomes: Vec<verify::Outcome> = ids
        .iter()
        .map(|&id| {
            let o = verify::run(id);
            eprintln!("{}", o.line());
            o
        })
        .collect();
    let pass = outcomes.iter().all(|o| o.pass);
    report.result = json!({"criteria": outcomes, "pass": pass});
    Ok(())
}
