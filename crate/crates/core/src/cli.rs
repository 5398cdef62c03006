//! Command-line front end: argument parsing into a [`RunConfig`], dispatch, and
//! report output.
//!
//! Exit status: 0 when every result is certified, 2 when something is
//! uncertified, aliased or failing, 1 on errors. Nothing is written when the
//! arguments do not parse.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::checks::{self, CheckOutcome, CRITERIA};
use crate::class::{
    check_conditions, compute_x_tilde, find_subadditivity_s, verify_subadditivity, GridSpec1D, SubadditivitySearch,
};
use crate::corpus::{fourier_decay_fit, gevrey_order, standard_corpus, FunctionSpec};
use crate::decomposition::Grid;
use crate::error::{Error, Result};
use crate::lab::algebra::{algebra_report, holder_exponent, LabSettings};
use crate::lab::constants::{subalgebra_constant, ConstantParams, Variant};
use crate::lab::superposition::{exp_map_continuity, superposition_growth, SuperpositionOptions, DEFAULT_LAMBDAS};
use crate::norm::{modulation_norm, NormParams};
use crate::report::{csv_real, write_atomic, Envelope};
use crate::sequence::{associated_sequence, check_log_convexity, check_lower_bound};
use crate::weight::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    ValidateWeight,
    AssocSeq,
    FindS,
    Norm,
    Algebra,
    Superposition,
    Constants,
    Decay,
    ReportAll,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::ValidateWeight => "validate-weight",
            CommandKind::AssocSeq => "assoc-seq",
            CommandKind::FindS => "find-s",
            CommandKind::Norm => "norm",
            CommandKind::Algebra => "algebra",
            CommandKind::Superposition => "superposition",
            CommandKind::Constants => "constants",
            CommandKind::Decay => "decay",
            CommandKind::ReportAll => "report-all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "modspace", version, about = "Weighted modulation spaces: weights, norms and inequality checks")]
struct Cli {
    #[arg(value_enum)]
    command: CommandKind,
    /// Weight in the mini-language, e.g. `gevrey:s=2`, `loglog`, `family:s=3,r=1`.
    #[arg(long = "weight-spec", visible_alias = "weight", default_value = "gevrey:s=2")]
    weight_spec: String,
    /// Corpus function id (repeatable), e.g. `gaussian:sigma=1,m=5`, `gevrey:mu=-1`, `window`.
    #[arg(long = "function-ids", visible_alias = "function")]
    function_ids: Vec<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 2.0)]
    p1: f64,
    #[arg(long, default_value_t = 2.0)]
    p2: f64,
    /// Half-width of the box `[-L, L]^n`.
    #[arg(long = "L", default_value_t = 32.0)]
    l: f64,
    /// Samples per axis; for `constants` the decay order of the SV constant.
    #[arg(long = "N")]
    big_n: Option<u64>,
    /// Dimension (1 or 2).
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long = "k-max", default_value_t = 48)]
    k_max: usize,
    #[arg(long = "tail-tol", default_value_t = 1e-8)]
    tail_tol: f64,
    #[arg(long, value_delimiter = ',')]
    lambdas: Vec<f64>,
    /// `R` schedule for `constants`.
    #[arg(long = "R", value_delimiter = ',')]
    r: Vec<f64>,
    #[arg(long, value_parser = parse_variant, default_value = "rv-a")]
    variant: Variant,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    /// Highest index of the associated sequence.
    #[arg(long = "p-max", default_value_t = 50)]
    p_max: usize,
    /// Search square `[0, X]^2` of `find-s`.
    #[arg(long, default_value_t = 200.0)]
    bound: f64,
    /// Grid step of `find-s`.
    #[arg(long, default_value_t = 0.25)]
    h: f64,
    /// Base point and increments for the continuity moduli (`superposition`).
    #[arg(long, default_value_t = 1.0)]
    xi0: f64,
    #[arg(long, value_delimiter = ',')]
    deltas: Vec<f64>,
    /// Acceptance criteria to run in `report-all` (default: all).
    #[arg(long, value_delimiter = ',')]
    checks: Vec<u8>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// Fully resolved run configuration in canonical form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub weight_spec: String,
    pub function_ids: Vec<String>,
    pub p: f64,
    pub q: f64,
    pub p1: f64,
    pub p2: f64,
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub samples: usize,
    pub n: usize,
    pub k_max: usize,
    pub tail_tol: f64,
    pub lambdas: Vec<f64>,
    #[serde(rename = "R")]
    pub r_schedule: Vec<f64>,
    pub variant: Variant,
    pub alpha: f64,
    pub s: f64,
    pub c: f64,
    pub delta: f64,
    pub order: u32,
    pub p_max: usize,
    pub bound: f64,
    pub h: f64,
    pub xi0: f64,
    pub deltas: Vec<f64>,
    pub checks: Vec<u8>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

fn default_functions(cmd: CommandKind) -> Vec<String> {
    match cmd {
        CommandKind::Norm => vec!["gaussian:sigma=1".into()],
        CommandKind::Algebra => standard_corpus().iter().map(ToString::to_string).collect(),
        CommandKind::Superposition => vec![FunctionSpec::unit_bump(-1.0).to_string()],
        CommandKind::Decay => vec!["gevrey:mu=-1".into()],
        _ => Vec::new(),
    }
}

fn fmt_real(x: f64) -> String {
    format!("{x}")
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_real(*x)).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Parses command-line arguments (without the program name).
    pub fn parse_args<I, T>(args: I) -> std::result::Result<Self, ParseFailure>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let argv = std::iter::once(OsString::from("modspace")).chain(args.into_iter().map(Into::into));
        let cli = Cli::try_parse_from(argv).map_err(ParseFailure::Clap)?;
        Self::from_cli(cli).map_err(ParseFailure::Invalid)
    }

    fn from_cli(cli: Cli) -> Result<Self> {
        let weight: WeightSpec = cli.weight_spec.parse()?;
        weight.build()?;
        let ids = if cli.function_ids.is_empty() { default_functions(cli.command) } else { cli.function_ids };
        let function_ids = ids
            .iter()
            .map(|id| id.parse::<FunctionSpec>().and_then(|f| f.validate().map(|_| f.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let (samples, order) = match cli.command {
            CommandKind::Constants => (4096, cli.big_n.unwrap_or(3) as u32),
            _ => (cli.big_n.unwrap_or(4096) as usize, 3),
        };
        let p = match cli.command {
            CommandKind::Algebra => {
                let p = holder_exponent(cli.p1, cli.p2)?;
                if let Some(given) = cli.p {
                    if (1.0 / given - 1.0 / p).abs() > 1e-12 {
                        return Err(Error::InvalidParameter(format!(
                            "p = {given} violates 1/p = 1/p1 + 1/p2 (expected p = {p})"
                        )));
                    }
                }
                p
            }
            _ => cli.p.unwrap_or(2.0),
        };
        let grid_commands = [CommandKind::Norm, CommandKind::Algebra, CommandKind::Superposition, CommandKind::Decay];
        if grid_commands.contains(&cli.command) {
            let grid = Grid::new(cli.n, cli.l, samples)?;
            if cli.command != CommandKind::Decay && cli.k_max as f64 + 1.0 > grid.max_frequency() {
                return Err(Error::GridOverflow {
                    requested: cli.k_max as f64 + 1.0,
                    limit: grid.max_frequency(),
                });
            }
        }
        if cli.command == CommandKind::Superposition && !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("superposition needs 1 < p < inf, got {p}")));
        }
        if let Some(bad) = cli.checks.iter().find(|&&c| !(1..=14).contains(&c)) {
            return Err(Error::InvalidParameter(format!("no acceptance criterion {bad}")));
        }
        let mut r_schedule = cli.r;
        if cli.command == CommandKind::Constants {
            if r_schedule.is_empty() {
                r_schedule = vec![2.0, 4.0, 8.0, 16.0, 32.0];
            }
            if let Some(bad) = r_schedule.iter().find(|r| !(**r >= 2.0)) {
                return Err(Error::InvalidParameter(format!("R = {bad} must be >= 2")));
            }
        }
        let lambdas = if cli.lambdas.is_empty() && cli.command == CommandKind::Superposition {
            DEFAULT_LAMBDAS.to_vec()
        } else {
            cli.lambdas
        };
        Ok(Self {
            command: cli.command,
            weight_spec: weight.to_string(),
            function_ids,
            p,
            q: cli.q,
            p1: cli.p1,
            p2: cli.p2,
            half_width: cli.l,
            samples,
            n: cli.n,
            k_max: cli.k_max,
            tail_tol: cli.tail_tol,
            lambdas,
            r_schedule,
            variant: cli.variant,
            alpha: cli.alpha,
            s: cli.s,
            c: cli.c,
            delta: cli.delta,
            order,
            p_max: cli.p_max,
            bound: cli.bound,
            h: cli.h,
            xi0: cli.xi0,
            deltas: cli.deltas,
            checks: cli.checks,
            output: cli.output,
            format: cli.format,
        })
    }

    /// Canonical argument list; parsing it yields an equal configuration.
    pub fn canonical_args(&self) -> Vec<String> {
        let mut a: Vec<String> = vec![self.command.name().into(), "--weight-spec".into(), self.weight_spec.clone()];
        for id in &self.function_ids {
            a.push("--function-ids".into());
            a.push(id.clone());
        }
        let mut kv = |k: &str, v: String| {
            a.push(format!("--{k}"));
            a.push(v);
        };
        kv("p", fmt_real(self.p));
        kv("q", fmt_real(self.q));
        kv("p1", fmt_real(self.p1));
        kv("p2", fmt_real(self.p2));
        kv("L", fmt_real(self.half_width));
        let big_n = if self.command == CommandKind::Constants { self.order as usize } else { self.samples };
        kv("N", big_n.to_string());
        kv("n", self.n.to_string());
        kv("k-max", self.k_max.to_string());
        kv("tail-tol", fmt_real(self.tail_tol));
        if !self.lambdas.is_empty() {
            kv("lambdas", join(&self.lambdas));
        }
        if !self.r_schedule.is_empty() {
            kv("R", join(&self.r_schedule));
        }
        kv("variant", self.variant.to_string());
        kv("alpha", fmt_real(self.alpha));
        kv("s", fmt_real(self.s));
        kv("c", fmt_real(self.c));
        kv("delta", fmt_real(self.delta));
        kv("p-max", self.p_max.to_string());
        kv("bound", fmt_real(self.bound));
        kv("h", fmt_real(self.h));
        kv("xi0", fmt_real(self.xi0));
        if !self.deltas.is_empty() {
            kv("deltas", join(&self.deltas));
        }
        if !self.checks.is_empty() {
            kv("checks", self.checks.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
        }
        if let Some(o) = &self.output {
            kv("output", o.display().to_string());
        }
        kv(
            "format",
            match self.format {
                Format::Json => "json".into(),
                Format::Csv => "csv".into(),
            },
        );
        a
    }

    pub fn canonical(&self) -> String {
        std::iter::once("modspace".to_string()).chain(self.canonical_args()).collect::<Vec<_>>().join(" ")
    }

    fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.half_width, self.samples)
    }

    fn functions(&self) -> Result<Vec<FunctionSpec>> {
        self.function_ids.iter().map(|s| s.parse()).collect()
    }

    fn settings(&self) -> Result<LabSettings> {
        Ok(LabSettings::new(self.weight_spec.parse::<WeightSpec>()?.build()?, self.k_max).with_tail_tol(self.tail_tol))
    }
}

#[derive(Debug)]
pub enum ParseFailure {
    Clap(clap::Error),
    Invalid(Error),
}

impl std::fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseFailure::Clap(e) => write!(f, "{e}"),
            ParseFailure::Invalid(e) => write!(f, "error: {e}"),
        }
    }
}

/// Result of one command: exit status, summary line, and the serialized report.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: i32,
    pub summary: String,
    pub report: Value,
    pub csv: String,
}

fn status(ok: bool) -> i32 {
    if ok { 0 } else { 2 }
}

fn csv_rows(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

/// Runs the configured command without touching the file system.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let weight = || -> Result<_> { cfg.weight_spec.parse::<WeightSpec>()?.build() };
    match cfg.command {
        CommandKind::ValidateWeight => {
            let r = check_conditions(&weight()?, &GridSpec1D::default())?;
            let ok = r.all_pass();
            let csv = csv_rows(
                "condition,status",
                r.verdicts.iter().map(|(k, v)| {
                    let s = serde_json::to_value(v).ok().and_then(|v| v["status"].as_str().map(String::from));
                    format!("{k},{}", s.unwrap_or_default())
                }),
            );
            Ok(RunOutcome {
                status: status(ok),
                summary: format!(
                    "{}: {} (subclass {:?}, index {:.4})",
                    r.weight,
                    if ok { "all conditions pass" } else { "some conditions do not pass" },
                    r.subclass,
                    r.alpha_estimate
                ),
                report: serde_json::to_value(&r)?,
                csv,
            })
        }
        CommandKind::AssocSeq => {
            let seq = associated_sequence(&weight()?, cfg.p_max)?;
            let violations = check_log_convexity(&seq);
            let lower = check_lower_bound(&seq);
            let mut csv = Vec::new();
            seq.write_csv(&mut csv)?;
            Ok(RunOutcome {
                status: status(!seq.cap_hit),
                summary: format!(
                    "{}: M_p for p <= {}, H = {:.4}, log-convexity violations {}",
                    seq.weight,
                    cfg.p_max,
                    seq.h,
                    violations.len()
                ),
                report: json!({"sequence": seq, "convexity_violations": violations, "lower_bound": lower}),
                csv: String::from_utf8_lossy(&csv).into_owned(),
            })
        }
        CommandKind::FindS => {
            let w = weight()?;
            let th = compute_x_tilde(&w)?;
            let search = find_subadditivity_s(&w, th.x_tilde, cfg.bound, cfg.h)?;
            let (ok, summary, verification, row) = match &search {
                SubadditivitySearch::Certified(c) => {
                    let v = verify_subadditivity(&w, c, cfg.bound)?;
                    let clean = v.is_clean();
                    (
                        clean,
                        format!("{}: s = {} certified, re-verification violations {}", c.weight, c.s, v.total_violations),
                        Some(v),
                        format!("certified,{},{},{}", c.s, csv_real(c.x_tilde), c.points_checked),
                    )
                }
                SubadditivitySearch::Failed(f) => (
                    false,
                    format!("{}: no s > 0 certified (worst point ({}, {}))", f.weight, f.x, f.y),
                    None,
                    format!("failed,{},{},0", csv_real(f.s_bound), csv_real(f.x_tilde)),
                ),
            };
            Ok(RunOutcome {
                status: status(ok),
                summary,
                report: json!({"thresholds": th, "search": search, "verification": verification}),
                csv: csv_rows("outcome,s,x_tilde,points", [row]),
            })
        }
        CommandKind::Norm => {
            let grid = cfg.grid()?;
            let w = weight()?;
            let params = NormParams::new(w, cfg.p, cfg.q).with_k_max(cfg.k_max).with_tail_tol(cfg.tail_tol);
            let mut results = Vec::new();
            let mut rows = Vec::new();
            for (id, f) in cfg.function_ids.iter().zip(cfg.functions()?) {
                let r = modulation_norm(&f.sample(&grid)?, &params)?;
                for (k, c) in &r.contributions {
                    let k: Vec<String> = k.iter().map(ToString::to_string).collect();
                    rows.push(format!("{id},{},{}", k.join(";"), csv_real(*c)));
                }
                results.push((id.clone(), r));
            }
            let ok = results.iter().all(|(_, r)| r.certified);
            let summary = results
                .iter()
                .map(|(id, r)| format!("{id}: {:.10e} (certified {})", r.value, r.certified))
                .collect::<Vec<_>>()
                .join("; ");
            let report = if results.len() == 1 {
                serde_json::to_value(&results[0].1)?
            } else {
                Value::Array(results.iter().map(|(id, r)| json!({"function": id, "result": r})).collect())
            };
            Ok(RunOutcome {
                status: status(ok),
                summary,
                report,
                csv: csv_rows("function,k,contribution", rows),
            })
        }
        CommandKind::Algebra => {
            let r = algebra_report(&cfg.functions()?, &cfg.grid()?, cfg.p1, cfg.p2, cfg.q, &cfg.settings()?)?;
            let rows = r.entries.iter().map(|e| {
                format!("{},{},{},{}", e.f_id.replace(',', ";"), e.g_id.replace(',', ";"), csv_real(e.ratio), e.certified)
            });
            Ok(RunOutcome {
                status: status(r.all_certified && r.all_finite),
                summary: format!(
                    "{} pairs: max ratio {:.6}, median {:.6}, certified {}",
                    r.entries.len(),
                    r.max_ratio,
                    r.median_ratio,
                    r.all_certified
                ),
                csv: csv_rows("f,g,ratio,certified", rows),
                report: serde_json::to_value(&r)?,
            })
        }
        CommandKind::Superposition => {
            let grid = cfg.grid()?;
            let spec = cfg.functions()?.into_iter().next().ok_or_else(|| Error::InvalidParameter("no function".into()))?;
            let u = spec.sample(&grid)?;
            let settings = cfg.settings()?;
            let opts = SuperpositionOptions {
                p: cfg.p,
                q: cfg.q,
                lambdas: cfg.lambdas.clone(),
                ..Default::default()
            };
            let r = superposition_growth(&u, &cfg.function_ids[0], &settings, &opts)?;
            let cont = if cfg.deltas.is_empty() {
                None
            } else {
                Some(exp_map_continuity(&u, &cfg.function_ids[0], &settings, cfg.p, cfg.q, cfg.xi0, &cfg.deltas)?)
            };
            let ok = r.all_certified() && cont.as_ref().is_none_or(|c| c.certified && !c.aliased);
            let mut csv = Vec::new();
            r.write_csv(&mut csv)?;
            Ok(RunOutcome {
                status: status(ok),
                summary: format!(
                    "{}: growth exponent {:.4}, excess exponent {:.4}, aliased lambdas {:?}",
                    r.u_id, r.fitted_exponent, r.excess_exponent, r.aliased
                ),
                report: json!({"growth": r, "continuity": cont}),
                csv: String::from_utf8_lossy(&csv).into_owned(),
            })
        }
        CommandKind::Constants => {
            let params = ConstantParams {
                variant: cfg.variant,
                n: cfg.n,
                q: cfg.q,
                alpha: cfg.alpha,
                s: cfg.s,
                c: cfg.c,
                delta: cfg.delta,
                big_n: cfg.order,
            };
            let rows = cfg.r_schedule.iter().map(|&r| subalgebra_constant(&params, r)).collect::<Result<Vec<_>>>()?;
            let csv = csv_rows(
                "R,constant,integral_value",
                rows.iter().map(|c| format!("{},{},{}", csv_real(c.r), csv_real(c.constant), csv_real(c.integral_value))),
            );
            Ok(RunOutcome {
                status: 0,
                summary: format!("{} constants for R in {:?} (prefactor excluded)", cfg.variant, cfg.r_schedule),
                report: json!({"params": params, "rows": rows}),
                csv,
            })
        }
        CommandKind::Decay => {
            let grid = cfg.grid()?;
            let mut fits = Vec::new();
            for (id, f) in cfg.function_ids.iter().zip(cfg.functions()?) {
                let model = match f {
                    FunctionSpec::GevreyBump { mu, .. } => 1.0 / gevrey_order(mu),
                    FunctionSpec::Gaussian { .. } => 2.0,
                    _ => f64::NAN,
                };
                fits.push((id.clone(), fourier_decay_fit(&f.sample(&grid)?, model)?));
            }
            let csv = csv_rows(
                "function,c,eps,fitted_exponent,model_exponent,xi_lo,xi_hi",
                fits.iter().map(|(id, d)| {
                    format!(
                        "{},{},{},{},{},{},{}",
                        id.replace(',', ";"),
                        csv_real(d.c),
                        csv_real(d.eps),
                        d.fitted_exponent,
                        csv_real(d.model_exponent),
                        csv_real(d.xi_range.0),
                        csv_real(d.xi_range.1)
                    )
                }),
            );
            Ok(RunOutcome {
                status: 0,
                summary: fits
                    .iter()
                    .map(|(id, d)| format!("{id}: fitted exponent {:.4} (model {:.4})", d.fitted_exponent, d.model_exponent))
                    .collect::<Vec<_>>()
                    .join("; "),
                report: Value::Array(fits.iter().map(|(id, d)| json!({"function": id, "fit": d})).collect()),
                csv,
            })
        }
        CommandKind::ReportAll => {
            let ids: Vec<u8> = if cfg.checks.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { cfg.checks.clone() };
            let mut outcomes: Vec<CheckOutcome> = ids
                .iter()
                .map(|&id| {
                    checks::run_check(id).unwrap_or_else(|e| CheckOutcome {
                        id,
                        name: CRITERIA[id as usize - 1].1.to_string(),
                        pass: false,
                        summary: format!("error: {e}"),
                        details: Value::Null,
                        seconds: 0.0,
                    })
                })
                .collect();
            let w = weight()?;
            let class = check_conditions(&w, &GridSpec1D::default())?;
            outcomes.push(CheckOutcome {
                id: 0,
                name: format!("weight class of {}", cfg.weight_spec),
                pass: class.all_pass(),
                summary: class
                    .verdicts
                    .iter()
                    .map(|(k, v)| format!("{k}:{}", if v.is_pass() { "pass" } else if v.is_fail() { "fail" } else { "inconclusive" }))
                    .collect::<Vec<_>>()
                    .join(" "),
                details: serde_json::to_value(&class)?,
                seconds: 0.0,
            });
            let passed = outcomes.iter().filter(|o| o.pass).count();
            let failed = outcomes.len() - passed;
            let mut csv = String::from("id,name,pass,summary\n");
            for o in &outcomes {
                let _ = writeln!(csv, "{},{},{},\"{}\"", o.id, o.name, o.pass, o.summary.replace('"', "'"));
            }
            Ok(RunOutcome {
                status: status(failed == 0),
                summary: format!("{passed} passed, {failed} failed"),
                report: json!({"checks": outcomes, "passed": passed, "failed": failed}),
                csv,
            })
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("MODSPACE_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring MODSPACE_THREADS = `{v}`"),
        }
    }
}

/// Full command-line entry point; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::parse_args(args) {
        Ok(cfg) => cfg,
        Err(ParseFailure::Clap(e)) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    configure_threads();
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if let Some(path) = &cfg.output {
        let bytes = match cfg.format {
            Format::Json => match Envelope::new(&cfg.canonical(), &outcome.report).to_json() {
                Ok(s) => s.into_bytes(),
                Err(e) => {
                    eprintln!("error: {e}");
                    return 1;
                }
            },
            Format::Csv => outcome.csv.clone().into_bytes(),
        };
        if let Err(e) = write_atomic(path, &bytes) {
            eprintln!("error: {e}");
            return 1;
        }
        println!("{}: {} -> {}", cfg.command.name(), outcome.summary, path.display());
    } else {
        println!("{}: {}", cfg.command.name(), outcome.summary);
    }
    outcome.status
}
