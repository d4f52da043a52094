//! Command-line front end: argument parsing, dispatch, and JSON/CSV reports.
//!
//! Every report is an object `{schema_version, command, config, result}`
//! with keys in a fixed order and every float printed with 17 significant
//! digits.  Exit codes: 0 on success, 2 on precondition violations and
//! usage errors, 3 on poles, divergence and numeric breakdown.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::b_integral::{closed_form, monte_carlo_estimate, BIntegralParams};
use crate::berezin::gram_report;
use crate::error::{Error, Result};
use crate::gamma_special::ComplexValue;
use crate::geometry::TorusCoord;
use crate::plancherel::{calibrate_constant, decomposition_report, reconstruct, Budget, DEFAULT_ALPHA_REF};
use crate::quadrature::AxisRule;
use crate::report::{complex_json, f17, SCHEMA_VERSION};
use crate::rng::{FALLBACK_SEED, SEED_ENV};
use crate::spherical::{KAverage, SphericalBatch};
use crate::symbolic::{component_by_cascade, enumerate_support, gk_density, gk_density_elementary, support::support_coordinate, SeriesConstants};

/// A complex spectral value parsed from `re`, `im i` or `re±im i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectral(pub ComplexValue);

impl FromStr for Spectral {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let t = s.trim();
        if let Ok(x) = t.parse::<f64>() {
            return Ok(Spectral(ComplexValue::new(x, 0.0)));
        }
        ComplexValue::from_str(t).map(Spectral).map_err(|_| format!("cannot parse complex value {s:?}"))
    }
}

impl Serialize for Spectral {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        complex_json(self.0).serialize(s)
    }
}

/// A torus point written as comma-separated coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusArg(pub Vec<f64>);

impl FromStr for TorusArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad coordinate {x:?}: {e}"))).collect::<std::result::Result<_, _>>().map(TorusArg)
    }
}

/// Output format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// JSON report.
    Json,
    /// CSV table (density and verify-plancherel only).
    Csv,
}

/// K-average rule selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KRule {
    /// Rank-one quadrature when p = 1, Monte Carlo otherwise.
    Auto,
    /// Haar Monte Carlo.
    Mc,
    /// Exact rank-one reduction (p = 1 only).
    RankOne,
}

/// Axis rule selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleArg {
    /// Gauss–Legendre.
    GaussLegendre,
    /// Gauss–Legendre graded towards the origin.
    Graded,
    /// Trapezoid.
    Trapezoid,
}

impl From<RuleArg> for AxisRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::GaussLegendre => AxisRule::GaussLegendre,
            RuleArg::Graded => AxisRule::GradedGaussLegendre,
            RuleArg::Trapezoid => AxisRule::Trapezoid,
        }
    }
}

/// Signature `(p, q)` of O(p,q).
#[derive(Args, Clone, Debug, Serialize)]
pub struct Signature {
    /// Rank p.
    #[arg(long)]
    pub p: usize,
    /// Second index q ≥ p.
    #[arg(long)]
    pub q: usize,
}

/// Seed with an environment default.
#[derive(Args, Clone, Debug, Serialize)]
pub struct SeedArg {
    /// Random seed (defaults to the BEREZIN_SEED environment variable).
    #[arg(long, env = SEED_ENV, default_value_t = FALLBACK_SEED)]
    pub seed: u64,
}

/// Arguments of `support`.
#[derive(Args, Clone, Debug, Serialize)]
pub struct SupportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sig: Signature,
    /// Kernel parameter α.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
}

/// Arguments of `density`.
#[derive(Args, Clone, Debug, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sig: Signature,
    /// Kernel parameter α.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Number of pinned coordinates.
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    /// Shifts u_1 ≤ … ≤ u_m (comma-separated; zeros by default).
    #[arg(long, value_delimiter = ',')]
    pub u: Vec<u64>,
    /// Largest sampled |y| along the first free axis.
    #[arg(long, default_value_t = 10.0)]
    pub y_max: f64,
    /// Number of sample points on [0, y_max].
    #[arg(long, default_value_t = 41)]
    pub points: usize,
}

/// Arguments of `verify-plancherel`.
#[derive(Args, Clone, Debug, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sig: Signature,
    /// Kernel parameter α.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Torus point, comma-separated p coordinates; repeat for several points.
    #[arg(long, required = true)]
    pub t: Vec<TorusArg>,
    /// Haar samples for Monte-Carlo K-averages.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    /// Fixed truncation radius (chosen from the tail bound when absent).
    #[arg(long)]
    pub truncation: Option<f64>,
    /// Quadrature nodes per half-axis.
    #[arg(long, default_value_t = 200)]
    pub nodes: usize,
    /// Axis rule.
    #[arg(long, value_enum, default_value_t = RuleArg::GaussLegendre)]
    pub rule: RuleArg,
    /// K-average rule.
    #[arg(long, value_enum, default_value_t = KRule::Auto)]
    pub k_rule: KRule,
    /// Nodes of the rank-one rule.
    #[arg(long, default_value_t = 64)]
    pub rank_one_nodes: usize,
    /// Reference α of the calibration (default max(9, (p+q)/2 + 2)).
    #[arg(long)]
    pub alpha_ref: Option<f64>,
}

/// Arguments of `b-integral`.
#[derive(Args, Clone, Debug, Serialize)]
pub struct BIntegralArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sig: Signature,
    /// λ_1, …, λ_p (comma-separated, complex allowed).
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub lambda: Vec<Spectral>,
    /// σ_1, …, σ_p (comma-separated, complex allowed).
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub sigma: Vec<Spectral>,
    /// Monte-Carlo samples (0 skips the estimate).
    #[arg(long, default_value_t = 1_000_000)]
    pub mc_samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    /// Width of the importance proposal.
    #[arg(long, default_value_t = 0.5)]
    pub proposal_scale: f64,
}

/// Arguments of `spherical`.
#[derive(Args, Clone, Debug, Serialize)]
pub struct SphericalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sig: Signature,
    /// Spectral parameter s_1, …, s_p (comma-separated, complex allowed).
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub s: Vec<Spectral>,
    /// Torus point, comma-separated p coordinates.
    #[arg(long)]
    pub t: TorusArg,
    /// Haar samples.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    /// K-average rule.
    #[arg(long, value_enum, default_value_t = KRule::Mc)]
    pub k_rule: KRule,
    /// Nodes of the rank-one rule.
    #[arg(long, default_value_t = 64)]
    pub rank_one_nodes: usize,
}

/// Arguments of `gram`.
#[derive(Args, Clone, Debug, Serialize)]
pub struct GramArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sig: Signature,
    /// Kernel parameter α.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Number of random ball points.
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
    /// Spread of the torus coordinates of the points.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

/// Arguments of `gk-density`.
#[derive(Args, Clone, Debug, Serialize)]
pub struct GkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub sig: Signature,
    /// Imaginary parts y_1, …, y_p of s = i y (comma-separated).
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub s: Vec<f64>,
}

/// Subcommands.
#[derive(Subcommand, Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Support components (m, u) with pinned coordinates and weights.
    Support(SupportArgs),
    /// Weight and residual density of one component, with samples on the imaginary axis.
    Density(DensityArgs),
    /// Both sides of the Plancherel identity at torus points.
    VerifyPlancherel(VerifyArgs),
    /// Closed form and Monte Carlo of the matrix B-integral.
    BIntegral(BIntegralArgs),
    /// Estimate of a spherical function.
    Spherical(SphericalArgs),
    /// Smallest Gram eigenvalue of the Berezin kernel on random points.
    Gram(GramArgs),
    /// Gindikin–Karpelevich density in Gamma and elementary form.
    GkDensity(GkArgs),
}

impl Command {
    /// Kebab-case name of the subcommand.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Support(_) => "support",
            Command::Density(_) => "density",
            Command::VerifyPlancherel(_) => "verify-plancherel",
            Command::BIntegral(_) => "b-integral",
            Command::Spherical(_) => "spherical",
            Command::Gram(_) => "gram",
            Command::GkDensity(_) => "gk-density",
        }
    }

    fn config(&self) -> Value {
        let v = serde_json::to_value(self).unwrap_or(Value::Null);
        match v {
            Value::Object(mut m) => m.remove(self.name()).unwrap_or(Value::Null),
            other => other,
        }
    }
}

/// Top-level arguments.
#[derive(Parser, Clone, Debug, Serialize)]
#[command(name = "berezin-plancherel", version, about = "Plancherel decomposition of Berezin kernels on O(p,q)")]
pub struct Cli {
    /// The subcommand.
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

/// Result of a command: a JSON result plus an optional CSV table.
pub struct Outcome {
    /// JSON result.
    pub result: Value,
    /// CSV header and rows, for tabular commands.
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

fn constants(sig: &Signature) -> Result<SeriesConstants> {
    SeriesConstants::new(sig.p, sig.q)
}

fn cplx(v: &[Spectral]) -> Vec<ComplexValue> {
    v.iter().map(|x| x.0).collect()
}

fn num(x: f64) -> String {
    f17(x).to_string()
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn support(a: &SupportArgs) -> Result<Outcome> {
    let c = constants(&a.sig)?;
    let dec = decomposition_report(&c, a.alpha)?;
    let comps: Vec<Value> = dec
        .components
        .iter()
        .map(|x| json!({"m": x.m, "u": x.u, "fixed_coordinates": x.fixed_coordinates.iter().map(|&v| f17(v)).collect::<Vec<_>>(), "weight": f17(x.weight.re), "vanishes": x.vanishes}))
        .collect();
    Ok(Outcome { result: json!({"n_components": comps.len(), "components": comps}), table: None })
}

fn density(a: &DensityArgs) -> Result<Outcome> {
    let c = constants(&a.sig)?;
    let u = if a.u.is_empty() { vec![0; a.m] } else { a.u.clone() };
    if a.points < 2 || !(a.y_max > 0.0) {
        return Err(Error::Precondition("need at least two points and y_max > 0".into()));
    }
    let (w, d) = component_by_cascade(&c, a.alpha, a.m, &u)?;
    let in_support = enumerate_support(&c, a.alpha).contains(&(a.m, u.clone()));
    let dims = c.p - a.m;
    let fixed: Vec<f64> = (1..=a.m).map(|t| support_coordinate(&c, a.alpha, t, u[t - 1])).collect();
    let alpha = ComplexValue::new(a.alpha, 0.0);
    let mut samples = Vec::new();
    let mut rows = Vec::new();
    let n = if dims == 0 { 1 } else { a.points };
    for i in 0..n {
        let y = if dims == 0 { 0.0 } else { a.y_max * i as f64 / (a.points - 1) as f64 };
        let mut s = vec![ComplexValue::new(0.0, 0.0); dims];
        if dims > 0 {
            s[0] = ComplexValue::new(0.0, y);
        }
        let v = d.evaluate(alpha, &s)?;
        samples.push(json!({"y": f17(y), "value": complex_json(v)}));
        rows.push(vec![num(y), num(v.re), num(v.im)]);
    }
    let result = json!({
        "m": a.m,
        "u": u,
        "in_support": in_support,
        "weight": f17(w),
        "fixed_coordinates": fixed.iter().map(|&v| f17(v)).collect::<Vec<_>>(),
        "density": to_value(&d),
        "samples": samples,
    });
    Ok(Outcome { result, table: Some((vec!["y".into(), "re".into(), "im".into()], rows)) })
}

fn k_average(rule: KRule, p: usize, samples: usize, seed: u64, nodes: usize) -> KAverage {
    match (rule, p) {
        (KRule::RankOne, _) | (KRule::Auto, 1) => KAverage::RankOne { nodes },
        _ => KAverage::MonteCarlo { samples, seed },
    }
}

fn default_alpha_ref(c: &SeriesConstants) -> f64 {
    DEFAULT_ALPHA_REF.max(c.half_sum_f64() + 2.0)
}

/// Fills defaults that depend on other arguments, so the echoed config is fully resolved.
pub fn resolve(cli: &mut Cli) {
    if let Command::VerifyPlancherel(a) = &mut cli.command {
        if a.alpha_ref.is_none() {
            if let Ok(c) = constants(&a.sig) {
                a.alpha_ref = Some(default_alpha_ref(&c));
            }
        }
    }
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let c = constants(&a.sig)?;
    let mut budget = Budget::new(k_average(a.k_rule, c.p, a.samples, a.seed.seed, a.rank_one_nodes), a.nodes, a.rule.into());
    budget.truncation_radius = a.truncation;
    let alpha_ref = a.alpha_ref.unwrap_or_else(|| default_alpha_ref(&c));
    let cal = calibrate_constant(&c, alpha_ref, &budget)?;
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for t in &a.t {
        let r = reconstruct(&c, a.alpha, &TorusCoord::new(t.0.clone()), &cal, &budget)?;
        rows.push(vec![
            t.0.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";"),
            num(r.lhs),
            num(r.rhs.re),
            num(r.rhs.im),
            num(r.rel_error),
            num(r.error_budget),
        ]);
        reports.push(to_value(&r));
    }
    let header = ["t", "lhs", "rhs_re", "rhs_im", "rel_error", "error_budget"].iter().map(|s| s.to_string()).collect();
    Ok(Outcome { result: json!({"calibration": to_value(&cal), "reports": reports}), table: Some((header, rows)) })
}

fn b_integral(a: &BIntegralArgs) -> Result<Outcome> {
    let params = BIntegralParams::new(a.sig.p, a.sig.q, cplx(&a.lambda), cplx(&a.sigma))?;
    params.check_strip()?;
    let closed = closed_form(&params)?;
    let mc = if a.mc_samples > 0 { Some(monte_carlo_estimate(&params, a.mc_samples, a.seed.seed, a.proposal_scale)?) } else { None };
    let (z, rel_se) = match &mc {
        Some(m) if m.std_error > 0.0 => (f17((m.value - closed).norm() / m.std_error), f17(m.std_error / m.value.norm())),
        _ => (Value::Null, Value::Null),
    };
    let result = json!({
        "closed": complex_json(closed),
        "mc": mc.as_ref().map(|m| complex_json(m.value)),
        "se": mc.as_ref().map(|m| f17(m.std_error)),
        "n_samples": mc.as_ref().map(|m| m.n_samples),
        "z_score": z,
        "relative_se": rel_se,
    });
    Ok(Outcome { result, table: None })
}

fn spherical(a: &SphericalArgs) -> Result<Outcome> {
    let s = cplx(&a.s);
    if s.len() != a.sig.p || a.t.0.len() != a.sig.p {
        return Err(Error::Shape(format!("need {} spectral values and torus coordinates", a.sig.p)));
    }
    let batch = SphericalBatch::build(a.sig.p, a.sig.q, &TorusCoord::new(a.t.0.clone()), k_average(a.k_rule, a.sig.p, a.samples, a.seed.seed, a.rank_one_nodes))?;
    let est = batch.estimate(&s)?;
    let margin = batch.bound_margin(&s)?;
    Ok(Outcome { result: json!({"estimate": to_value(&est), "bound_margin": f17(margin)}), table: None })
}

fn gram(a: &GramArgs) -> Result<Outcome> {
    let r = gram_report(a.alpha, a.sig.p, a.sig.q, a.points, a.scale, a.seed.seed)?;
    Ok(Outcome { result: to_value(&r), table: None })
}

fn gk(a: &GkArgs) -> Result<Outcome> {
    let c = constants(&a.sig)?;
    if a.s.len() != c.p {
        return Err(Error::Shape(format!("need {} values of y", c.p)));
    }
    let s: Vec<ComplexValue> = a.s.iter().map(|&y| ComplexValue::new(0.0, y)).collect();
    let gamma = gk_density(&c).evaluate(ComplexValue::new(0.0, 0.0), &s)?;
    let elem = gk_density_elementary(&c, &s)?;
    let gap = (gamma - elem).norm() / gamma.norm().max(elem.norm()).max(f64::MIN_POSITIVE);
    Ok(Outcome { result: json!({"gamma_form": complex_json(gamma), "elementary_form": complex_json(elem), "relative_gap": f17(gap)}), table: None })
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let out = match &cli.command {
        Command::Support(a) => support(a)?,
        Command::Density(a) => density(a)?,
        Command::VerifyPlancherel(a) => verify(a)?,
        Command::BIntegral(a) => b_integral(a)?,
        Command::Spherical(a) => spherical(a)?,
        Command::Gram(a) => gram(a)?,
        Command::GkDensity(a) => gk(a)?,
    };
    if cli.format == OutputFormat::Csv && out.table.is_none() {
        return Err(Error::Precondition(format!("csv output is not available for {}", cli.command.name())));
    }
    Ok(out)
}

/// Rewrites every non-integer JSON number with 17 significant digits.
pub fn normalize_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n.as_f64().map(f17).unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize_floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, normalize_floats(v))).collect()),
        other => other,
    }
}

fn envelope(cli: &Cli, body: (&str, Value)) -> Value {
    let mut config = cli.command.config();
    if let Value::Object(m) = &mut config {
        m.insert("format".into(), to_value(&cli.format));
    }
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), Value::String(SCHEMA_VERSION.into()));
    m.insert("command".into(), Value::String(cli.command.name().into()));
    m.insert("config".into(), config);
    m.insert(body.0.into(), body.1);
    normalize_floats(Value::Object(m))
}

/// Process outcome: exit code and the text for standard output and standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    /// Exit code.
    pub code: i32,
    /// Standard output.
    pub stdout: String,
    /// Standard error.
    pub stderr: String,
}

fn render(cli: &Cli, out: &Outcome) -> std::result::Result<String, String> {
    let head = envelope(cli, ("result", Value::Null));
    match cli.format {
        OutputFormat::Json => {
            let v = envelope(cli, ("result", out.result.clone()));
            serde_json::to_string_pretty(&v).map(|s| s + "\n").map_err(|e| e.to_string())
        }
        OutputFormat::Csv => {
            let (header, rows) = out.table.as_ref().ok_or("no table")?;
            let mut meta = head;
            if let Value::Object(m) = &mut meta {
                m.remove("result");
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).map_err(|e| e.to_string())?;
            for r in rows {
                w.write_record(r).map_err(|e| e.to_string())?;
            }
            let body = String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            Ok(format!("# {}\n{}", serde_json::to_string(&meta).map_err(|e| e.to_string())?, body))
        }
    }
}

/// Parses `args` (including the program name), runs the command and renders the report.
///
/// The report goes to `--output` when given, else to the returned stdout.
pub fn run<I, T>(args: I) -> Run
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { Run { code, stdout: text, stderr: String::new() } } else { Run { code, stdout: String::new(), stderr: text } };
        }
    };
    resolve(&mut cli);
    match execute(&cli) {
        Ok(out) => match render(&cli, &out) {
            Ok(text) => match &cli.output {
                Some(path) => match std::fs::write(path, &text) {
                    Ok(()) => Run { code: 0, stdout: String::new(), stderr: String::new() },
                    Err(e) => Run { code: 2, stdout: String::new(), stderr: format!("cannot write {}: {e}\n", path.display()) },
                },
                None => Run { code: 0, stdout: text, stderr: String::new() },
            },
            Err(e) => Run { code: 2, stdout: String::new(), stderr: e + "\n" },
        },
        Err(e) => {
            let v = envelope(&cli, ("error", json!({"kind": e.kind(), "message": e.to_string()})));
            let text = serde_json::to_string_pretty(&v).unwrap_or_default() + "\n";
            Run { code: e.exit_code(), stdout: String::new(), stderr: text }
        }
    }
}
