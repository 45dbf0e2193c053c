//! Command-line front end. [`run`] is the whole process boundary: it parses
//! arguments, dispatches, and returns the exit code with everything that
//! should go to stdout and stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::acoe::{
    acoe_residuals, constrained_acoe_residuals, extract_constrained_greedy_policy, extract_greedy_policy,
    AcoeReport, GreedyPolicy,
};
use crate::constrained::{lex_solve, solve_constrained, ConstrainedOutcome, LexOutcome};
use crate::lp::{solve_simplex_traced, Tolerances};
use crate::model::{build_queue_truncation, load_instance, FiniteMdp, ModelError, QueueSpec};
use crate::occupation::{average_cost, build_primal, solve_unconstrained, SolveError};
use crate::oracles::{
    brute_force_constrained_value, brute_force_minimum_value, relative_value_iteration, ConstrainedOracleValue,
    OracleError, RviOptions,
};
use crate::report::{verify_solution, SolutionDocument, SolutionKind, VerifyReport};
use crate::simulation::{simulate, SimOptions, SimResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID_INSTANCE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

/// Agreement tolerances of the `oracle` command.
const BRUTE_FORCE_TOL: f64 = 1e-6;
const RVI_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Solve,
    SolveConstrained,
    Lex,
    Verify,
    Simulate,
    Sweep,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltinModel {
    Queue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Structured,
    Csv,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "acmdp", version, about = "Average-cost MDP solver and certificate checker")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Instance document (JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in model family instead of --input.
    #[arg(long, value_enum)]
    pub model: Option<BuiltinModel>,
    #[arg(long, default_value_t = 0.3)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.6)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hc: f64,
    #[arg(long, default_value_t = 5.0)]
    pub rc: f64,
    /// Truncation level of the queue model.
    #[arg(long = "N", default_value_t = 10)]
    pub truncation: usize,
    /// Budgets, comma separated; defaults to the instance budgets.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub kappa: Option<Vec<f64>>,
    #[arg(long = "tol-feas")]
    pub tol_feas: Option<f64>,
    #[arg(long = "tol-opt")]
    pub tol_opt: Option<f64>,
    #[arg(long = "tol-gap")]
    pub tol_gap: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub steps: u64,
    #[arg(long = "burn-in", default_value_t = 0)]
    pub burn_in: u64,
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
    /// Write the primary output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "sweep-N", value_delimiter = ',')]
    pub sweep_n: Vec<usize>,
    /// Solution document for verify, simulate and oracle.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// CSV trajectory trace written by simulate.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Repeat to dump simplex pivots to stderr.
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

impl RunConfig {
    fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            feas: self.tol_feas.unwrap_or(d.feas),
            opt: self.tol_opt.unwrap_or(d.opt),
            gap: self.tol_gap.unwrap_or(d.gap),
            pivot: d.pivot,
        }
    }

    fn queue_spec(&self, truncation: usize) -> QueueSpec {
        QueueSpec {
            arrival_prob: self.lambda,
            service_prob: self.sigma,
            holding_coeff: self.hc,
            rejection_cost: self.rc,
            truncation_level: truncation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::new(EXIT_INVALID_INSTANCE, e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::InvalidModel(_) => EXIT_INVALID_INSTANCE,
            SolveError::Usage(_) => EXIT_USAGE,
            SolveError::Lp(_) | SolveError::Internal(_) => EXIT_INTERNAL,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let code = match e {
            OracleError::Guard(_) | OracleError::Usage(_) | OracleError::InadmissibleAction { .. } => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        Failure::new(code, e.to_string())
    }
}

/// Primary output of a command plus its exit code.
struct Emitted {
    code: i32,
    body: String,
    log: String,
}

impl Emitted {
    fn ok(body: String) -> Self {
        Emitted { code: EXIT_OK, body, log: String::new() }
    }
}

pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                RunOutput { code, stdout: text, stderr: String::new() }
            } else {
                RunOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    run_config(&config)
}

pub fn run_config(config: &RunConfig) -> RunOutput {
    match dispatch(config) {
        Ok(emitted) => {
            let mut out = RunOutput { code: emitted.code, stdout: String::new(), stderr: emitted.log };
            match &config.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, &emitted.body) {
                        out.code = EXIT_USAGE;
                        let _ = writeln!(out.stderr, "cannot write {}: {e}", path.display());
                    }
                }
                None => out.stdout = emitted.body,
            }
            out
        }
        Err(f) => RunOutput { code: f.code, stdout: String::new(), stderr: format!("error: {}\n", f.message) },
    }
}

fn dispatch(cfg: &RunConfig) -> Result<Emitted, Failure> {
    match cfg.command {
        Command::Validate => cmd_validate(cfg),
        Command::Solve => cmd_solve(cfg),
        Command::SolveConstrained => cmd_solve_constrained(cfg),
        Command::Lex => cmd_lex(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::Oracle => cmd_oracle(cfg),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_model(cfg: &RunConfig) -> Result<FiniteMdp, Failure> {
    match (&cfg.input, cfg.model) {
        (Some(_), Some(_)) => Err(Failure::usage("give either --input or --model, not both")),
        (None, None) => Err(Failure::usage("an instance is required: --input PATH or --model queue")),
        (Some(path), None) => Ok(load_instance(&read(path)?)?),
        (None, Some(BuiltinModel::Queue)) => Ok(build_queue_truncation(&cfg.queue_spec(cfg.truncation))?),
    }
}

fn load_solution(cfg: &RunConfig) -> Result<Option<SolutionDocument>, Failure> {
    match &cfg.solution {
        None => Ok(None),
        Some(path) => SolutionDocument::from_json(&read(path)?)
            .map(Some)
            .map_err(|e| Failure::usage(format!("malformed solution document: {e}"))),
    }
}

fn kappa_for(cfg: &RunConfig, mdp: &FiniteMdp) -> Result<Vec<f64>, Failure> {
    cfg.kappa
        .clone()
        .or_else(|| mdp.budgets().map(<[f64]>::to_vec))
        .ok_or_else(|| Failure::usage("budgets required: pass --kappa or include budgets in the instance"))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

fn cmd_validate(cfg: &RunConfig) -> Result<Emitted, Failure> {
    let mdp = load_model(cfg)?;
    let report = mdp.validate();
    let body = match cfg.format {
        Format::Structured => json(&serde_json::json!({
            "valid": report.is_empty(),
            "n_states": mdp.n_states(),
            "n_pairs": mdp.n_pairs(),
            "n_constraints": mdp.n_constraints(),
            "issues": report.issues,
        })),
        _ => format!(
            "valid: {} states, {} admissible pairs, {} constraint costs\n",
            mdp.n_states(),
            mdp.n_pairs(),
            mdp.n_constraints()
        ),
    };
    Ok(Emitted::ok(body))
}

fn pivot_log(cfg: &RunConfig, mdp: &FiniteMdp) -> String {
    let mut log = String::new();
    if cfg.verbose == 0 {
        return log;
    }
    if let Ok(lp) = build_primal(mdp) {
        if let Ok((_, trace)) = solve_simplex_traced(&lp, &cfg.tolerances()) {
            for step in trace {
                let _ = writeln!(
                    log,
                    "pivot {:?} enter {} leave {} objective {}",
                    step.phase, step.entering, step.leaving, step.objective
                );
            }
        }
    }
    log
}

fn acoe_csv(report: &AcoeReport, greedy: Option<&GreedyPolicy>) -> String {
    let mut s = String::from("state,p,h,slack,argmin_action,in_absorbing_set\n");
    for row in &report.per_state {
        let inside = greedy.is_some_and(|g| g.absorbing_set.contains(&row.state));
        let _ = writeln!(s, "{},{},{},{},{},{}", row.state, row.p, row.h, row.slack, row.argmin_action, inside);
    }
    s
}

fn human_summary(doc: &SolutionDocument) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "kind: {:?}", doc.kind);
    let _ = writeln!(s, "value: {}", doc.value);
    let _ = writeln!(s, "rho: {}", doc.rho);
    if let Some(beta) = &doc.beta {
        let _ = writeln!(s, "beta: {beta:?}");
    }
    if let Some(alpha) = &doc.alpha {
        let _ = writeln!(s, "alpha: {alpha:?}");
    }
    if let Some(lex) = &doc.lex_values {
        let _ = writeln!(s, "lex values: {lex:?}");
    }
    let r = &doc.residuals;
    let _ = writeln!(
        s,
        "residuals: normalization {:e}, balance {:e}, min dual slack {:e}, gap {:e}",
        r.normalization, r.balance_max, r.dual_feas_min_slack, r.gap
    );
    let _ = writeln!(s, "support: {:?}", doc.p.iter().enumerate().filter(|(_, p)| **p > 1e-9).map(|(x, _)| x).collect::<Vec<_>>());
    if let Some(acoe) = &doc.acoe {
        let _ = writeln!(
            s,
            "acoe: inequality {} (min slack {:e}), support covered {}, randomized form {}",
            acoe.inequality_ok, acoe.min_slack, acoe.support_covered, acoe.randomized_ok
        );
    }
    if let Some(g) = &doc.greedy {
        let _ = writeln!(s, "greedy policy: {:?}", g.action);
        let _ = writeln!(s, "absorbing set: {:?}", g.absorbing_set);
    }
    if doc.dual_degenerate {
        let _ = writeln!(s, "note: degenerate optimum, other optimal bases exist");
    }
    s
}

fn emit_doc(cfg: &RunConfig, doc: &SolutionDocument, log: String) -> Emitted {
    let body = match cfg.format {
        Format::Structured => doc.to_json(),
        Format::Csv => acoe_csv(doc.acoe.as_ref().expect("acoe attached"), doc.greedy.as_ref()),
        Format::Human => human_summary(doc),
    };
    Emitted { code: EXIT_OK, body, log }
}

fn cmd_solve(cfg: &RunConfig) -> Result<Emitted, Failure> {
    let mdp = load_model(cfg)?;
    let sol = solve_unconstrained(&mdp, &cfg.tolerances())?;
    let mut log = pivot_log(cfg, &mdp);
    let mut doc = SolutionDocument::unconstrained(&mdp, &sol);
    doc.acoe = Some(acoe_residuals(&mdp, &sol.cert, &sol.pair, mdp.cost(0)));
    match extract_greedy_policy(&mdp, &sol.cert, &sol.pair, mdp.cost(0)) {
        Ok(g) => doc.greedy = Some(g),
        Err(e) => {
            let _ = writeln!(log, "warning: {e}");
        }
    }
    Ok(emit_doc(cfg, &doc, log))
}

fn infeasible(cfg: &RunConfig, kappa: &[f64]) -> Emitted {
    let body = match cfg.format {
        Format::Structured => json(&serde_json::json!({ "status": "infeasible", "kappa": kappa })),
        _ => format!("infeasible: no stationary pair meets the budgets {kappa:?}\n"),
    };
    Emitted { code: EXIT_INFEASIBLE, body, log: String::new() }
}

fn cmd_solve_constrained(cfg: &RunConfig) -> Result<Emitted, Failure> {
    let mdp = load_model(cfg)?;
    let kappa = kappa_for(cfg, &mdp)?;
    let sol = match solve_constrained(&mdp, &kappa, &cfg.tolerances())? {
        ConstrainedOutcome::Infeasible => return Ok(infeasible(cfg, &kappa)),
        ConstrainedOutcome::Optimal(sol) => sol,
    };
    let mut log = String::new();
    let mut doc = SolutionDocument::constrained(&mdp, &sol);
    doc.acoe = Some(constrained_acoe_residuals(&mdp, &sol.cert, &sol.pair, &kappa, sol.value));
    match extract_constrained_greedy_policy(&mdp, &sol.cert, &sol.pair, &kappa, sol.value) {
        Ok(g) => doc.greedy = Some(g),
        Err(e) => {
            let _ = writeln!(log, "warning: {e}");
        }
    }
    if sol.dual_degenerate {
        let _ = writeln!(log, "note: dual degenerate; the reported multipliers are one of several certificates");
    }
    Ok(emit_doc(cfg, &doc, log))
}

fn cmd_lex(cfg: &RunConfig) -> Result<Emitted, Failure> {
    let mdp = load_model(cfg)?;
    let kappa = kappa_for(cfg, &mdp)?;
    let lex = match lex_solve(&mdp, &kappa, &cfg.tolerances())? {
        LexOutcome::Infeasible => return Ok(infeasible(cfg, &kappa)),
        LexOutcome::Optimal(lex) => lex,
    };
    let mut doc = SolutionDocument::lex(&mdp, &lex);
    let stage0 = &lex.stage0;
    doc.acoe = Some(constrained_acoe_residuals(&mdp, &stage0.cert, &lex.pair, &kappa, stage0.value));
    Ok(emit_doc(cfg, &doc, String::new()))
}

fn verify_body(cfg: &RunConfig, report: &VerifyReport) -> String {
    match cfg.format {
        Format::Structured => json(report),
        Format::Csv => {
            let mut s = String::from("check,value,limit,ok,detail\n");
            for c in &report.checks {
                let _ = writeln!(s, "{},{},{},{},\"{}\"", c.name, c.value, c.limit, c.ok, c.detail);
            }
            s
        }
        Format::Human => {
            let mut s = String::new();
            for c in &report.checks {
                let mark = if c.ok { "ok  " } else { "FAIL" };
                let _ = write!(s, "{mark} {:<22} {:e} (limit {:e})", c.name, c.value, c.limit);
                if !c.detail.is_empty() {
                    let _ = write!(s, "  {}", c.detail);
                }
                s.push('\n');
            }
            let _ = writeln!(s, "{}", if report.ok { "verified" } else { "verification FAILED" });
            s
        }
    }
}

fn cmd_verify(cfg: &RunConfig) -> Result<Emitted, Failure> {
    let mdp = load_model(cfg)?;
    let doc = load_solution(cfg)?.ok_or_else(|| Failure::usage("verify needs --solution PATH"))?;
    let report = verify_solution(&mdp, &doc, &cfg.tolerances());
    let code = if report.ok { EXIT_OK } else { EXIT_VERIFY_FAILED };
    Ok(Emitted { code, body: verify_body(cfg, &report), log: String::new() })
}

#[derive(Serialize)]
struct SimDocument<'a> {
    #[serde(flatten)]
    result: &'a SimResult,
    burn_in: u64,
    expected: Vec<f64>,
    band: Vec<f64>,
    within_band: Vec<bool>,
}

fn cmd_simulate(cfg: &RunConfig) -> Result<Emitted, Failure> {
    let mdp = load_model(cfg)?;
    let pair = match load_solution(cfg)? {
        Some(doc) => doc.pair(&mdp).map_err(Failure::usage)?,
        None => solve_unconstrained(&mdp, &cfg.tolerances())?.pair,
    };
    let opts = SimOptions { initial: None, burn_in: cfg.burn_in, record_trace: cfg.trace.is_some() };
    let result = simulate(&mdp, &pair, cfg.steps, cfg.seed, &opts).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(path) = &cfg.trace {
        let mut s = String::from("step,state,action");
        for i in 0..mdp.n_costs() {
            let _ = write!(s, ",c{i}");
        }
        s.push('\n');
        for row in &result.trace {
            let _ = write!(s, "{},{},{}", row.step, row.state, row.action);
            for c in &row.costs {
                let _ = write!(s, ",{c}");
            }
            s.push('\n');
        }
        fs::write(path, s).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let expected: Vec<f64> = (0..mdp.n_costs())
        .map(|i| average_cost(&pair, &mdp, i))
        .collect::<Result<_, _>>()?;
    let band: Vec<f64> = expected
        .iter()
        .zip(&result.stderr_est)
        .map(|(j, se)| (3.0 * se).max(0.01 * (1.0 + j.abs())))
        .collect();
    let within_band = result
        .pathwise_avg
        .iter()
        .zip(&expected)
        .zip(&band)
        .map(|((m, j), b)| (m - j).abs() <= *b)
        .collect();
    let doc = SimDocument { result: &result, burn_in: cfg.burn_in, expected, band, within_band };
    let body = match cfg.format {
        Format::Structured => json(&doc),
        _ => {
            let mut s = String::from("cost,pathwise_avg,stderr,expected,within_band\n");
            for i in 0..mdp.n_costs() {
                let _ = writeln!(
                    s,
                    "c{i},{},{},{},{}",
                    result.pathwise_avg[i], result.stderr_est[i], doc.expected[i], doc.within_band[i]
                );
            }
            s
        }
    };
    Ok(Emitted::ok(body))
}

#[derive(Serialize)]
struct SweepRow {
    #[serde(rename = "N")]
    n: usize,
    rho: f64,
}

fn cmd_sweep(cfg: &RunConfig) -> Result<Emitted, Failure> {
    if cfg.input.is_some() {
        return Err(Failure::usage("sweep runs over the built-in queue family; drop --input"));
    }
    if cfg.sweep_n.is_empty() {
        return Err(Failure::usage("sweep needs --sweep-N n1,n2,..."));
    }
    let mut rows = Vec::with_capacity(cfg.sweep_n.len());
    for &n in &cfg.sweep_n {
        let mdp = build_queue_truncation(&cfg.queue_spec(n))?;
        let sol = solve_unconstrained(&mdp, &cfg.tolerances())?;
        rows.push(SweepRow { n, rho: sol.value });
    }
    let body = match cfg.format {
        Format::Structured => json(&rows),
        _ => {
            let mut s = String::from("N,rho\n");
            for r in &rows {
                let _ = writeln!(s, "{},{}", r.n, r.rho);
            }
            s
        }
    };
    Ok(Emitted::ok(body))
}

#[derive(Serialize)]
struct OracleDocument {
    reference_value: f64,
    brute_force: Option<f64>,
    brute_force_policy: Option<Vec<usize>>,
    rvi_rho: Option<f64>,
    rvi_note: Option<String>,
    constrained_brute_force: Option<ConstrainedOracleValue>,
    agree: bool,
}

fn cmd_oracle(cfg: &RunConfig) -> Result<Emitted, Failure> {
    let mdp = load_model(cfg)?;
    let tols = cfg.tolerances();
    let doc = load_solution(cfg)?;
    let constrained = match &doc {
        Some(d) => d.kind != SolutionKind::Unconstrained,
        None => cfg.kappa.is_some(),
    };
    let mut out = OracleDocument {
        reference_value: f64::NAN,
        brute_force: None,
        brute_force_policy: None,
        rvi_rho: None,
        rvi_note: None,
        constrained_brute_force: None,
        agree: true,
    };
    if constrained {
        let kappa = match doc.as_ref().and_then(|d| d.kappa.clone()) {
            Some(k) => k,
            None => kappa_for(cfg, &mdp)?,
        };
        let oracle = brute_force_constrained_value(&mdp, &kappa)?;
        let reference = match &doc {
            Some(d) => Some(d.value),
            None => match solve_constrained(&mdp, &kappa, &tols)? {
                ConstrainedOutcome::Optimal(s) => Some(s.value),
                ConstrainedOutcome::Infeasible => None,
            },
        };
        out.agree = match (oracle, reference) {
            (ConstrainedOracleValue::Optimal(v), Some(r)) => (v - r).abs() <= BRUTE_FORCE_TOL,
            (ConstrainedOracleValue::Infeasible, None) => true,
            _ => false,
        };
        out.reference_value = reference.unwrap_or(f64::INFINITY);
        out.constrained_brute_force = Some(oracle);
    } else {
        let reference = match &doc {
            Some(d) => d.value,
            None => solve_unconstrained(&mdp, &tols)?.value,
        };
        out.reference_value = reference;
        let brute = brute_force_minimum_value(&mdp)?;
        out.agree &= (brute.value - reference).abs() <= BRUTE_FORCE_TOL;
        out.brute_force = Some(brute.value);
        out.brute_force_policy = Some(brute.policy);
        match relative_value_iteration(&mdp, &RviOptions::default()) {
            Ok(r) => {
                out.agree &= (r.rho - reference).abs() <= RVI_TOL;
                out.rvi_rho = Some(r.rho);
            }
            Err(e @ (OracleError::Multichain { .. } | OracleError::NoConvergence { .. })) => {
                out.rvi_note = Some(e.to_string());
            }
            Err(e) => return Err(e.into()),
        }
    }
    let code = if out.agree { EXIT_OK } else { EXIT_VERIFY_FAILED };
    let body = match cfg.format {
        Format::Structured => {
            // infinities are not representable in JSON
            let mut v = serde_json::to_value(&out).expect("serializable");
            if !out.reference_value.is_finite() {
                v["reference_value"] = serde_json::Value::Null;
            }
            json(&v)
        }
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "reference value: {}", out.reference_value);
            if let Some(b) = out.brute_force {
                let _ = writeln!(s, "brute force: {b} (policy {:?})", out.brute_force_policy.as_ref().unwrap());
            }
            if let Some(r) = out.rvi_rho {
                let _ = writeln!(s, "relative value iteration: {r}");
            }
            if let Some(note) = &out.rvi_note {
                let _ = writeln!(s, "relative value iteration skipped: {note}");
            }
            if let Some(c) = out.constrained_brute_force {
                let _ = writeln!(s, "constrained vertex enumeration: {c:?}");
            }
            let _ = writeln!(s, "{}", if out.agree { "oracles agree" } else { "oracles DISAGREE" });
            s
        }
    };
    Ok(Emitted { code, body, log: String::new() })
}
