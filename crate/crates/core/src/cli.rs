//! The `hdr` command line front end.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::error::{HdrError, Result};
use crate::format::{percent, render_text, IntegerIntervalSet, Interval};
use crate::mass::{MassFunction, Support};
use crate::sequence::SequenceFunction;
use crate::solver::{
    compute_cscr, enumerate_canonical, HdrResult, SolverOptions, DEFAULT_ENUMERATION_CAP,
    DEFAULT_ITER_CAP,
};
use crate::spec::parse_dist_spec_with;
use crate::verify::{check_certificate, check_subset_bounds, search_set, ConditionReport};

/// Number of random subsets drawn per subset check.
pub const SUBSET_TRIALS: usize = 200;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_TERMINATED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

/// Compute the highest density region of a discrete distribution.
#[derive(Debug, Clone, Parser)]
#[command(name = "hdr", version)]
pub struct CliConfig {
    /// Distribution spec, e.g. `binom(10, 0.5)`, `mix(0.3:pois(12), 0.7:pois(40))`
    /// or `@table.csv` for a file of `x,mass` lines.
    #[arg(long = "dist")]
    pub dist_spec: String,

    /// Minimum coverage probability, in [0, 1].
    #[arg(long)]
    pub cover_prob: f64,

    /// Override the lower support bound.
    #[arg(long, allow_hyphen_values = true)]
    pub supp_min: Option<i64>,

    /// Override the upper support bound.
    #[arg(long, allow_hyphen_values = true)]
    pub supp_max: Option<i64>,

    /// Output format.
    #[arg(long = "format", value_enum, default_value_t = OutputFormat::Text)]
    pub output_format: OutputFormat,

    /// List every canonical solution.
    #[arg(long)]
    pub all_solutions: bool,

    /// Certify the region and report the conditions.
    #[arg(long)]
    pub check: bool,

    /// Maximum number of support elements to visit.
    #[arg(long, default_value_t = DEFAULT_ITER_CAP)]
    pub iter_cap: u64,

    /// Seed for the randomized subset checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Write `x,mass,in_region` rows for every visited element to this file.
    #[arg(long)]
    pub emit_masses: Option<PathBuf>,

    /// Description used in the report header instead of the spec text.
    #[arg(long)]
    pub label: Option<String>,

    /// Renormalize mass tables that do not sum to one instead of rejecting them.
    #[arg(long)]
    pub permissive: bool,
}

impl CliConfig {
    pub fn new(dist_spec: impl Into<String>, cover_prob: f64) -> Self {
        CliConfig {
            dist_spec: dist_spec.into(),
            cover_prob,
            supp_min: None,
            supp_max: None,
            output_format: OutputFormat::Text,
            all_solutions: false,
            check: false,
            iter_cap: DEFAULT_ITER_CAP,
            seed: 0,
            emit_masses: None,
            label: None,
            permissive: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct CheckJson {
    #[serde(flatten)]
    report: ConditionReport,
    subsets_ok: bool,
    subset_trials: usize,
    seed: u64,
}

#[derive(Debug, Clone, Serialize)]
struct JsonReport<'a> {
    label: &'a str,
    cover_prob: f64,
    coverage: f64,
    intervals: &'a [Interval],
    region_size: usize,
    search_set_size: u64,
    variation_set: &'a [i64],
    required_from_variation: usize,
    warnings: Vec<&'a str>,
    iterations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<CheckJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solutions: Option<Vec<Vec<Interval>>>,
}

struct Outcome {
    mf: MassFunction,
    seq: SequenceFunction,
    result: HdrResult,
}

fn solve(config: &CliConfig) -> Result<Outcome> {
    if !(0.0..=1.0).contains(&config.cover_prob) {
        return Err(HdrError::CoverProb(config.cover_prob));
    }
    let mut mf = parse_dist_spec_with(&config.dist_spec, config.permissive)?;
    if config.supp_min.is_some() || config.supp_max.is_some() {
        let declared = mf.support();
        mf = mf.with_support(Support::new(
            config.supp_min.or(declared.min),
            config.supp_max.or(declared.max),
        ));
    }
    if let Some(label) = &config.label {
        mf = mf.with_label(label.clone());
    }
    let seq = SequenceFunction::for_support(mf.support())?;
    let opts = SolverOptions {
        iter_cap: config.iter_cap,
        ..SolverOptions::default()
    };
    let result = compute_cscr(&mf, config.cover_prob, Some(&seq), &opts)?;
    Ok(Outcome { mf, seq, result })
}

/// JSON report of a result without certificate or solution listing, in the
/// same schema as `--format json`.
pub fn render_json(result: &HdrResult) -> Result<String> {
    let set = IntegerIntervalSet::from_elements(result.region.iter().copied());
    json_string(&json_report(result, &set, None, None))
}

fn json_report<'a>(
    result: &'a HdrResult,
    set: &'a IntegerIntervalSet,
    check: Option<CheckJson>,
    solutions: Option<Vec<Vec<i64>>>,
) -> JsonReport<'a> {
    JsonReport {
        label: &result.label,
        cover_prob: result.cover_prob,
        coverage: result.coverage,
        intervals: set.intervals(),
        region_size: result.region_size,
        search_set_size: result.search_set_size,
        variation_set: &result.variation_set,
        required_from_variation: result.required_from_variation,
        warnings: result.warning.iter().map(String::as_str).collect(),
        iterations: result.iterations,
        check,
        solutions: solutions.map(|sols| {
            sols.into_iter()
                .map(|s| IntegerIntervalSet::from_elements(s).intervals().to_vec())
                .collect()
        }),
    }
}

fn json_string(report: &JsonReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| HdrError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn certify(outcome: &Outcome, seed: u64) -> Result<CheckJson> {
    let search = search_set(&outcome.result, &outcome.seq);
    let report = check_certificate(
        &outcome.mf,
        &outcome.result.region,
        outcome.result.cover_prob,
        &search,
    )?;
    let subsets_ok = check_subset_bounds(
        &outcome.mf,
        &outcome.result.region,
        outcome.result.cover_prob,
        &search,
        SUBSET_TRIALS,
        seed,
    )?;
    Ok(CheckJson {
        report,
        subsets_ok,
        subset_trials: SUBSET_TRIALS,
        seed,
    })
}

fn emit_masses(outcome: &Outcome, path: &PathBuf) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,mass,in_region")?;
    for x in search_set(&outcome.result, &outcome.seq) {
        let m = outcome.mf.mass(x)?;
        let inside = outcome.result.region.binary_search(&x).is_ok() as u8;
        writeln!(w, "{x},{m},{inside}")?;
    }
    w.flush()?;
    Ok(())
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn render_check(check: &CheckJson) -> String {
    let r = &check.report;
    format!(
        "\nCertificate\n  minimum coverage:   {} (coverage {})\n  moderation:         {}\n  \
         inner-boundedness:  {} (smallest inside {:e}, largest visited outside {:e})\n  \
         outer-boundedness:  {} (unvisited mass {:e})\n  highest density:    {}\n  \
         subset bounds:      {} ({} trials, seed {})\n",
        flag(r.min_coverage_ok),
        r.coverage,
        flag(r.moderation_ok),
        flag(r.inner_ok),
        r.nabla_h,
        r.delta_complement,
        flag(r.outer_ok),
        r.outside_mass,
        flag(r.highest_density_ok),
        flag(check.subsets_ok),
        check.subset_trials,
        check.seed
    )
}

fn render(config: &CliConfig, outcome: &Outcome) -> Result<String> {
    let result = &outcome.result;
    let check = config
        .check
        .then(|| certify(outcome, config.seed))
        .transpose()?;
    let solutions = config
        .all_solutions
        .then(|| enumerate_canonical(result, DEFAULT_ENUMERATION_CAP))
        .transpose()?;
    let set = IntegerIntervalSet::from_elements(result.region.iter().copied());

    Ok(match config.output_format {
        OutputFormat::Text => {
            let mut out = render_text(result);
            if let Some(check) = &check {
                out.push_str(&render_check(check));
            }
            if let Some(sols) = &solutions {
                out.push_str(&format!(
                    "\nCanonical solutions ({}), each with coverage {}:\n",
                    sols.len(),
                    percent(result.coverage)
                ));
                for s in sols {
                    out.push_str(&format!(
                        "  {}\n",
                        IntegerIntervalSet::from_elements(s.iter().copied())
                    ));
                }
            }
            out
        }
        OutputFormat::Json => json_string(&json_report(result, &set, check, solutions))?,
        OutputFormat::Csv => {
            let mut out = String::from("lower,upper,lc,rc\n");
            for iv in set.intervals() {
                out.push_str(&format!("{},{},closed,closed\n", iv.lower, iv.upper));
            }
            out
        }
    })
}

/// Runs one invocation and returns the process exit code.
pub fn run_cli(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let rendered = solve(config).and_then(|outcome| {
        if let Some(path) = &config.emit_masses {
            emit_masses(&outcome, path)?;
        }
        let text = render(config, &outcome)?;
        Ok((text, outcome.result.warning))
    });
    match rendered {
        Ok((text, warning)) => {
            if let (Some(w), OutputFormat::Csv) = (warning, config.output_format) {
                let _ = writeln!(err, "warning: {w}");
            }
            match out.write_all(text.as_bytes()) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_INPUT
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                HdrError::TerminationNotReached { .. } => EXIT_NOT_TERMINATED,
                _ => EXIT_INPUT,
            }
        }
    }
}

/// Parses `args` (program name first) and runs. Usage errors exit with 1.
pub fn run_from_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match CliConfig::try_parse_from(args) {
        Ok(config) => run_cli(&config, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            code
        }
    }
}
