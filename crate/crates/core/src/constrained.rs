//! Budget-constrained average-cost problems: the program over `(gamma, alpha)`
//! with budget rows `<gamma, c_i> + alpha_i = kappa_i`, its multipliers
//! `beta <= 0`, and the staged lexicographic solve.

use serde::Serialize;

use crate::lp::{solve_simplex, LpSolution, LpStatus, StandardLp, Tolerances};
use crate::model::FiniteMdp;
use crate::occupation::{
    anchored_bias, decompose, ensure_valid, occupation_rows, support_of, OccupationMeasure, SolveError,
    StationaryPair,
};

/// Slack threshold under which a budget row counts as binding.
pub const BINDING_EPS: f64 = 1e-9;
/// Default two-sided tolerance of the lexicographic stage pins.
pub const LEX_EPS: f64 = 1e-8;

/// Dual solution `(rho, h, beta)`; `h(anchor) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstrainedDual {
    pub rho: f64,
    pub h: Vec<f64>,
    pub beta: Vec<f64>,
    pub anchor: usize,
}

impl ConstrainedDual {
    /// Lagrangian cost `c*(x,a) = c0(x,a) - sum_i beta_i c_i(x,a)`.
    pub fn adjusted_cost(&self, mdp: &FiniteMdp) -> Vec<f64> {
        let mut c = mdp.cost(0).to_vec();
        for (i, b) in self.beta.iter().enumerate() {
            for (cj, ci) in c.iter_mut().zip(mdp.cost(i + 1)) {
                *cj -= b * ci;
            }
        }
        c
    }

    /// Dual objective `rho + sum_i beta_i kappa_i`.
    pub fn objective(&self, kappa: &[f64]) -> f64 {
        self.rho + self.beta.iter().zip(kappa).map(|(b, k)| b * k).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedSolution {
    pub kappa: Vec<f64>,
    pub gamma: OccupationMeasure,
    pub alpha: Vec<f64>,
    pub value: f64,
    pub pair: StationaryPair,
    pub cert: ConstrainedDual,
    pub dual_degenerate: bool,
}

impl ConstrainedSolution {
    /// Budget rows with slack `alpha_i <= BINDING_EPS` (1-based constraint
    /// indices).
    pub fn binding_constraints(&self) -> Vec<usize> {
        self.alpha
            .iter()
            .enumerate()
            .filter(|(_, a)| **a <= BINDING_EPS)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// `max_i |beta_i|`.
    pub fn multiplier_magnitude(&self) -> f64 {
        self.cert.beta.iter().fold(0.0, |acc, b| acc.max(b.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstrainedOutcome {
    Optimal(Box<ConstrainedSolution>),
    /// No occupation measure meets the budgets.
    Infeasible,
}

fn check_budgets(mdp: &FiniteMdp, kappa: &[f64]) -> Result<(), SolveError> {
    ensure_valid(mdp)?;
    let d = mdp.n_constraints();
    if d == 0 {
        return Err(SolveError::Usage(
            "model has no constraint costs; use build_primal / solve_unconstrained".into(),
        ));
    }
    if kappa.len() != d {
        return Err(SolveError::Usage(format!("expected {d} budgets, got {}", kappa.len())));
    }
    if let Some(k) = kappa.iter().find(|k| !k.is_finite() || **k < 0.0) {
        return Err(SolveError::Usage(format!("budget {k} is negative")));
    }
    Ok(())
}

/// Variables `(gamma, alpha)`; rows: normalization, one balance row per state,
/// then `<gamma, c_i> + alpha_i = kappa_i` for `i = 1..d`.
pub fn build_constrained(mdp: &FiniteMdp, kappa: &[f64]) -> Result<StandardLp, SolveError> {
    check_budgets(mdp, kappa)?;
    let (rows, rhs) = constrained_rows(mdp, kappa);
    let mut objective = mdp.cost(0).to_vec();
    objective.resize(mdp.n_pairs() + mdp.n_constraints(), 0.0);
    Ok(StandardLp::new(objective, rows, rhs)?)
}

fn constrained_rows(mdp: &FiniteMdp, kappa: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let d = mdp.n_constraints();
    let pairs = mdp.n_pairs();
    let (mut rows, mut rhs) = occupation_rows(mdp);
    for row in &mut rows {
        row.resize(pairs + d, 0.0);
    }
    for (i, &k) in kappa.iter().enumerate() {
        let mut row = mdp.cost(i + 1).to_vec();
        row.resize(pairs + d, 0.0);
        row[pairs + i] = 1.0;
        rows.push(row);
        rhs.push(k);
    }
    (rows, rhs)
}

fn extract(mdp: &FiniteMdp, kappa: &[f64], sol: &LpSolution) -> Result<ConstrainedSolution, SolveError> {
    let pairs = mdp.n_pairs();
    let n = mdp.n_states();
    let d = kappa.len();
    let gamma = OccupationMeasure { weights: sol.primal[..pairs].to_vec() };
    let alpha = sol.primal[pairs..pairs + d].to_vec();
    let anchor = support_of(&gamma.marginal(mdp))
        .first()
        .copied()
        .ok_or_else(|| SolveError::Internal("optimal occupation measure has empty support".into()))?;
    // The alpha columns have zero cost, so their reduced costs -y_i are
    // nonnegative at optimum: the raw budget-row duals already satisfy beta <= 0.
    let cert = ConstrainedDual {
        rho: sol.dual[0],
        h: anchored_bias(&sol.dual, n, anchor),
        beta: sol.dual[1 + n..1 + n + d].to_vec(),
        anchor,
    };
    let adjusted = cert.adjusted_cost(mdp);
    let pair = decompose(&gamma, mdp, &adjusted, &cert.h);
    Ok(ConstrainedSolution {
        kappa: kappa.to_vec(),
        value: gamma.integrate(mdp.cost(0)),
        gamma,
        alpha,
        pair,
        cert,
        dual_degenerate: sol.dual_degenerate,
    })
}

pub fn solve_constrained(
    mdp: &FiniteMdp,
    kappa: &[f64],
    tols: &Tolerances,
) -> Result<ConstrainedOutcome, SolveError> {
    let lp = build_constrained(mdp, kappa)?;
    let sol = solve_simplex(&lp, tols)?;
    match sol.status {
        LpStatus::Infeasible => Ok(ConstrainedOutcome::Infeasible),
        LpStatus::Unbounded => Err(SolveError::Internal("constrained LP reported unbounded".into())),
        LpStatus::Optimal => Ok(ConstrainedOutcome::Optimal(Box::new(extract(mdp, kappa, &sol)?))),
    }
}

/// `|<alpha, beta>|`.
pub fn complementarity_check(sol: &ConstrainedSolution) -> f64 {
    sol.alpha.iter().zip(&sol.cert.beta).map(|(a, b)| a * b).sum::<f64>().abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexSolution {
    /// `(kappa*_0, ..., kappa*_d)`: stagewise optimal values.
    pub kappa_star: Vec<f64>,
    pub gamma: OccupationMeasure,
    pub alpha: Vec<f64>,
    pub pair: StationaryPair,
    /// Stage-0 constrained solve, whose dual certifies `kappa*_0`.
    pub stage0: ConstrainedSolution,
    /// Pin tolerance actually used at each stage `1..=d`.
    pub pin_eps: Vec<f64>,
}

impl LexSolution {
    /// `(<gamma, c_0>, ..., <gamma, c_d>)` of the final occupation measure.
    pub fn cost_vector(&self, mdp: &FiniteMdp) -> Vec<f64> {
        (0..mdp.n_costs()).map(|i| self.gamma.integrate(mdp.cost(i))).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LexOutcome {
    Optimal(Box<LexSolution>),
    Infeasible,
}

/// Stage-`stage` program: minimize `<gamma, c_stage>` over the constrained
/// polytope with `|<gamma, c_l> - kappa*_l| <= eps` for every `l < stage`.
fn lex_stage_lp(mdp: &FiniteMdp, kappa: &[f64], pins: &[f64], eps: f64) -> Result<StandardLp, SolveError> {
    let stage = pins.len();
    let pairs = mdp.n_pairs();
    let d = mdp.n_constraints();
    let base = pairs + d;
    let width = base + 2 * stage;
    let (mut rows, mut rhs) = constrained_rows(mdp, kappa);
    for row in &mut rows {
        row.resize(width, 0.0);
    }
    for (l, &target) in pins.iter().enumerate() {
        let mut upper = mdp.cost(l).to_vec();
        upper.resize(width, 0.0);
        let mut lower = upper.clone();
        upper[base + 2 * l] = 1.0;
        lower[base + 2 * l + 1] = -1.0;
        rows.push(upper);
        rhs.push(target + eps);
        rows.push(lower);
        rhs.push(target - eps);
    }
    let mut objective = mdp.cost(stage).to_vec();
    objective.resize(width, 0.0);
    Ok(StandardLp::new(objective, rows, rhs)?)
}

pub fn lex_solve(mdp: &FiniteMdp, kappa: &[f64], tols: &Tolerances) -> Result<LexOutcome, SolveError> {
    lex_solve_with(mdp, kappa, tols, LEX_EPS)
}

pub fn lex_solve_with(
    mdp: &FiniteMdp,
    kappa: &[f64],
    tols: &Tolerances,
    lex_eps: f64,
) -> Result<LexOutcome, SolveError> {
    let stage0 = match solve_constrained(mdp, kappa, tols)? {
        ConstrainedOutcome::Infeasible => return Ok(LexOutcome::Infeasible),
        ConstrainedOutcome::Optimal(sol) => *sol,
    };
    let pairs = mdp.n_pairs();
    let d = mdp.n_constraints();
    let mut kappa_star = vec![stage0.value];
    let mut gamma = stage0.gamma.clone();
    let mut alpha = stage0.alpha.clone();
    let mut pin_eps = Vec::with_capacity(d);
    for stage in 1..=d {
        let mut solved = None;
        for eps in [lex_eps, 10.0 * lex_eps] {
            let lp = lex_stage_lp(mdp, kappa, &kappa_star, eps)?;
            let sol = solve_simplex(&lp, tols)?;
            match sol.status {
                LpStatus::Optimal => {
                    solved = Some((sol, eps));
                    break;
                }
                LpStatus::Infeasible => continue,
                LpStatus::Unbounded => {
                    return Err(SolveError::Internal(format!("lexicographic stage {stage} unbounded")));
                }
            }
        }
        let (sol, eps) = solved.ok_or_else(|| {
            SolveError::Internal(format!("lexicographic stage {stage} infeasible after relaxing the pins"))
        })?;
        kappa_star.push(sol.objective_value);
        gamma = OccupationMeasure { weights: sol.primal[..pairs].to_vec() };
        alpha = sol.primal[pairs..pairs + d].to_vec();
        pin_eps.push(eps);
    }
    let adjusted = stage0.cert.adjusted_cost(mdp);
    let pair = decompose(&gamma, mdp, &adjusted, &stage0.cert.h);
    Ok(LexOutcome::Optimal(Box::new(LexSolution {
        kappa_star,
        gamma,
        alpha,
        pair,
        stage0,
        pin_eps,
    })))
}
