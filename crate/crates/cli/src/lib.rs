//! Command-line front end: argument types, input parsing, report rendering.
//!
//! Everything here is callable in-process; `main.rs` only parses arguments
//! and forwards the [`Output`] of [`run`] to the terminal.

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rnc_core::coordinatization::is_syzygy_probabilistic;
use rnc_core::gc::expand_to_brackets;
use rnc_core::rational::to_decimal;
use rnc_core::rnc::{
    check_membership_on, random_parameters, random_transform, sample_moment_curve, Param, SubsetResult,
};
use rnc_core::syzygy::straighten;
use rnc_core::white::{white_demo, WhiteReport};
use rnc_core::{BracketPolynomial, GcExpr, Label, MembershipReport, Method, PointConfiguration, SubsetI, Verdict};

pub const EXIT_IN_V: i32 = 0;
pub const EXIT_NOT_IN_V: i32 = 1;
pub const EXIT_HYPERPLANE: i32 = 2;
pub const EXIT_INPUT_ERROR: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] rnc_core::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid input document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "rnc", version, about = "Exact tests for points on rational normal curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether d+4 points of P^d lie on a rational normal curve.
    Check(RunOptions),
    /// Expand a Grassmann-Cayley expression into brackets.
    Expand(ExpandOptions),
    /// Rewrite a bracket polynomial in standard form.
    Straighten(StraightenOptions),
    /// Dual planes of seven points on a twisted cubic, for all 30 Fano systems.
    White(WhiteOptions),
    /// Emit d+4 points on the moment curve as an input document.
    Sample(SampleOptions),
}

#[derive(Clone, Debug, Args)]
pub struct RunOptions {
    /// Configuration document; standard input when absent or "-".
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "both", value_parser = parse_method)]
    pub method: Method,
    /// Only test this 6-subset, e.g. "1,2,3,4,5,6".
    #[arg(long, value_delimiter = ',')]
    pub subset: Option<Vec<Label>>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Seed for the transform trials; echoed in the report.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Re-check under this many random projective transforms.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long, default_value_t = 8)]
    pub max_dim: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            input: None,
            method: Method::Both,
            subset: None,
            format: Format::Text,
            seed: None,
            trials: 0,
            max_dim: 8,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct ExpandOptions {
    /// Expression such as "(1 2 ^ 4 5) v (2 3 ^ 5 6) v (3 4 ^ 6 1)".
    pub expression: String,
    /// Ambient dimension m = d+1 of the vector space.
    #[arg(long)]
    pub ambient: usize,
    /// Also print the straightened form.
    #[arg(long)]
    pub straighten: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Clone, Debug, Args)]
pub struct StraightenOptions {
    /// Polynomial such as "[123][145][246][356]-[124][135][236][456]".
    pub polynomial: String,
    /// Random evaluations confirming input and output agree.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Clone, Debug, Args)]
pub struct WhiteOptions {
    /// Seven points in P^3; default is the twisted cubic at 0, 1, -1, 2, -2, 3, 1/2.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Use random curve parameters from this seed instead.
    #[arg(long, conflicts_with = "input")]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Clone, Debug, Args)]
pub struct SampleOptions {
    #[arg(long)]
    pub dimension: usize,
    /// Comma-separated parameters ("inf" for the point at infinity); random when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<String>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Apply a random projective transform drawn from the seed.
    #[arg(long)]
    pub transform: bool,
    #[arg(long, default_value_t = 8)]
    pub max_dim: usize,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: rnc_core::Error| e.to_string())
}

/// Exit status, standard output and standard error of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(code: i32, stdout: String) -> Self {
        Output { code, stdout, stderr: String::new() }
    }

    fn error(e: &CliError) -> Self {
        Output { code: EXIT_INPUT_ERROR, stdout: String::new(), stderr: format!("error: {e}\n") }
    }
}

pub fn exit_code(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::InV => EXIT_IN_V,
        Verdict::NotInV => EXIT_NOT_IN_V,
        Verdict::HyperplaneCase => EXIT_HYPERPLANE,
    }
}

/// Parses `{"dimension": d, "points": [[...], ...]}`; entries are integers
/// or strings `"p"` / `"p/q"`, and points are labelled in array order.
pub fn parse_configuration(document: &str) -> Result<PointConfiguration, CliError> {
    Ok(serde_json::from_str(document)?)
}

fn read_input(path: Option<&PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })
        }
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|source| CliError::Io { path: "standard input".into(), source })?;
            Ok(text)
        }
    }
}

pub fn run(command: &Command) -> Output {
    let result = match command {
        Command::Check(o) => return run_check(o),
        Command::Expand(o) => expand(o).map(|s| (0, s)),
        Command::Straighten(o) => straighten_command(o).map(|s| (0, s)),
        Command::White(o) => white(o),
        Command::Sample(o) => sample(o).map(|s| (0, s)),
    };
    match result {
        Ok((code, stdout)) => Output::ok(code, stdout),
        Err(e) => Output::error(&e),
    }
}

pub fn run_check(options: &RunOptions) -> Output {
    let report = read_input(options.input.as_ref())
        .and_then(|text| parse_configuration(&text))
        .and_then(|config| check_configuration(&config, options));
    match report {
        Ok(r) => Output::ok(exit_code(r.verdict), render_report(&r, options.format)),
        Err(e) => Output::error(&e),
    }
}

/// Membership report for a parsed configuration under the given options.
pub fn check_configuration(config: &PointConfiguration, options: &RunOptions) -> Result<MembershipReport, CliError> {
    let d = config.dimension();
    if d > options.max_dim {
        return Err(CliError::Usage(format!(
            "dimension {d} exceeds the ceiling {}; raise it with --max-dim",
            options.max_dim
        )));
    }
    let only = options.subset.as_ref().map(|s| SubsetI::new(s, d + 4)).transpose()?;
    let only = only.as_ref().map(std::slice::from_ref);
    let mut report = check_membership_on(config, options.method, only)?;
    report.seed = options.seed;
    if options.trials > 0 {
        let seed = options.seed.unwrap_or(0);
        report.seed = Some(seed);
        let mut changed = Vec::new();
        for t in 0..options.trials {
            let moved = config.transform(&random_transform(d + 1, seed.wrapping_add(t as u64)))?;
            let verdict = check_membership_on(&moved, options.method, only)?.verdict;
            if verdict != report.verdict {
                changed.push(format!("trial {t} gave {verdict}"));
            }
        }
        let line = if changed.is_empty() {
            format!("verdict unchanged under {} random projective transforms", options.trials)
        } else {
            format!("verdict changed under projective transforms: {}", changed.join(", "))
        };
        report.note = Some(match report.note.take() {
            Some(n) => format!("{n}; {line}"),
            None => line,
        });
    }
    Ok(report)
}

fn subset_label(labels: &[Label]) -> String {
    let parts: Vec<String> = labels.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

/// Exact value, or a decimal approximation once the fraction gets long;
/// the JSON report always carries the exact string.
fn cell(value: Option<&rnc_core::Rational>) -> String {
    match value {
        None => "-".into(),
        Some(q) => {
            let exact = q.to_string();
            if exact.len() > 12 {
                to_decimal(q)
            } else {
                exact
            }
        }
    }
}

pub fn render_report(report: &MembershipReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        Format::Text => render_text(report),
    }
}

fn render_text(report: &MembershipReport) -> String {
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let mut out = String::new();
    if let Some(seed) = report.seed {
        let _ = writeln!(out, "seed: {seed}");
    }
    let _ = writeln!(
        out,
        "dimension {}, {} points, method {}",
        report.dimension,
        report.n,
        serde_json::to_value(report.method).expect("method serializes").as_str().unwrap_or_default()
    );
    let _ = writeln!(
        out,
        "on a hyperplane: {}; general position: {}",
        yes_no(report.on_hyperplane),
        yes_no(report.general_position)
    );
    let width = report.subsets.iter().map(|s| subset_label(&s.i).len()).max().unwrap_or(1).max(1);
    let _ = writeln!(out, "{:<width$}  {:>12}  {:>12}", "I", "residue", "determinant");
    for s in &report.subsets {
        let flag = if s.degenerate { "  degenerate" } else { "" };
        let _ = writeln!(
            out,
            "{:<width$}  {:>12}  {:>12}{flag}",
            subset_label(&s.i),
            cell(s.residue.as_ref()),
            cell(s.geometric_determinant.as_ref())
        );
    }
    if let Some(note) = &report.note {
        let _ = writeln!(out, "note: {note}");
    }
    if let Some(SubsetResult { i, .. }) = report.first_failure() {
        let _ = writeln!(out, "first failing I: {}", subset_label(i));
    }
    let _ = writeln!(out, "verdict: {}", report.verdict);
    out
}

fn expand(o: &ExpandOptions) -> Result<String, CliError> {
    let expr: GcExpr = o.expression.parse()?;
    let labels: Vec<Label> = expr.labels().into_iter().collect();
    let expansion = expand_to_brackets(&expr, &labels, o.ambient)?;
    let standard = o.straighten.then(|| straighten(&expansion));
    Ok(match o.format {
        Format::Text => {
            let mut out = format!("{expansion}\n");
            if let Some(s) = &standard {
                let _ = writeln!(out, "standard: {s}");
            }
            out
        }
        Format::Json => {
            let mut v = json!({
                "expression": expr.to_string(),
                "ambient": o.ambient,
                "expansion": expansion.to_string(),
            });
            if let Some(s) = &standard {
                v["standard"] = Value::String(s.to_string());
            }
            serde_json::to_string_pretty(&v)? + "\n"
        }
    })
}

fn straighten_command(o: &StraightenOptions) -> Result<String, CliError> {
    let input = BracketPolynomial::parse(&o.polynomial)?;
    let standard = straighten(&input);
    // the difference is a syzygy iff straightening kept the value
    let agrees = (o.trials > 0).then(|| {
        let diff = input.checked_sub(&standard).expect("same width");
        is_syzygy_probabilistic(&diff, o.trials, o.seed)
    });
    Ok(match o.format {
        Format::Text => {
            let mut out = format!("{standard}\n");
            if let Some(ok) = agrees {
                let result = if ok { "agree" } else { "DISAGREE" };
                let _ = writeln!(out, "random evaluations: {} trials, seed {}, {result}", o.trials, o.seed);
            }
            out
        }
        Format::Json => {
            let mut v = json!({ "input": input.to_string(), "standard": standard.to_string() });
            if let Some(ok) = agrees {
                v["trials"] = json!(o.trials);
                v["seed"] = json!(o.seed);
                v["evaluations_agree"] = json!(ok);
            }
            serde_json::to_string_pretty(&v)? + "\n"
        }
    })
}

fn default_white_parameters() -> Vec<Param> {
    ["0", "1", "-1", "2", "-2", "3", "1/2"].iter().map(|t| t.parse().expect("valid parameter")).collect()
}

fn white(o: &WhiteOptions) -> Result<(i32, String), CliError> {
    let config = match (&o.input, o.seed) {
        (Some(_), _) => parse_configuration(&read_input(o.input.as_ref())?)?,
        (None, Some(seed)) => sample_moment_curve(3, &random_parameters(7, seed), None)?,
        (None, None) => sample_moment_curve(3, &default_white_parameters(), None)?,
    };
    let report = white_demo(&config)?;
    let code = if report.all_hold() { 0 } else { EXIT_NOT_IN_V };
    let out = match o.format {
        Format::Json => {
            let mut v = serde_json::to_value(&report)?;
            if let Some(seed) = o.seed {
                v["seed"] = json!(seed);
            }
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Text => render_white(&report, o.seed),
    };
    Ok((code, out))
}

fn render_white(report: &WhiteReport, seed: Option<u64>) -> String {
    let mut out = String::new();
    if let Some(seed) = seed {
        let _ = writeln!(out, "seed: {seed}");
    }
    for s in &report.systems {
        let held = s.incidences.iter().filter(|r| r.incidence.is_point && r.incidence.on_hj).count();
        let triples: Vec<String> = s.triples.iter().map(|t| format!("{}{}{}", t[0], t[1], t[2])).collect();
        let position = if s.general_position { "" } else { "  (planes not in general position)" };
        let _ = writeln!(out, "{}  {}  incidences {held}/7{position}", triples.join(" "), s.verdict);
    }
    let summary = if report.all_hold() { "all systems hold" } else { "some system fails" };
    let _ = writeln!(out, "{summary}");
    out
}

fn sample(o: &SampleOptions) -> Result<String, CliError> {
    let d = o.dimension;
    if d > o.max_dim {
        return Err(CliError::Usage(format!(
            "dimension {d} exceeds the ceiling {}; raise it with --max-dim",
            o.max_dim
        )));
    }
    let params = match &o.params {
        Some(list) => list.iter().map(|t| t.trim().parse()).collect::<Result<Vec<Param>, _>>()?,
        None => random_parameters(d + 4, o.seed),
    };
    if params.len() != d + 4 {
        return Err(CliError::Usage(format!("expected {} parameters, got {}", d + 4, params.len())));
    }
    let transform = o.transform.then(|| random_transform(d + 1, o.seed));
    let config = sample_moment_curve(d, &params, transform.as_ref())?;
    let mut v = serde_json::to_value(&config)?;
    v["parameters"] = json!(params.iter().map(ToString::to_string).collect::<Vec<_>>());
    v["seed"] = json!(o.seed);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}
