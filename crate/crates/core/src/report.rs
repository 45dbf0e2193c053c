//! Solution documents and the solver-free verifier that re-checks them against
//! an instance.

use serde::{Deserialize, Serialize};

use crate::acoe::{AcoeReport, GreedyPolicy};
use crate::constrained::{complementarity_check, ConstrainedSolution, LexSolution};
use crate::lp::Tolerances;
use crate::model::FiniteMdp;
use crate::occupation::{
    dual_slacks, invariance_residual, OccupationMeasure, StationaryPair, UnconstrainedSolution, SUPPORT_EPS,
};

/// Tolerance of the occupation-measure and stationary-pair invariants.
pub const INVARIANT_TOL: f64 = 1e-8;
/// Tolerance on the gap of lexicographic documents, whose final measure is
/// only pinned to the stage-0 optimum.
pub const LEX_GAP_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionKind {
    Unconstrained,
    Constrained,
    Lex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaEntry {
    pub x: usize,
    pub a: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuEntry {
    pub x: usize,
    pub a: usize,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub normalization: f64,
    pub balance_max: f64,
    pub dual_feas_min_slack: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub kind: SolutionKind,
    pub value: f64,
    pub gamma: Vec<GammaEntry>,
    pub p: Vec<f64>,
    pub mu: Vec<MuEntry>,
    pub rho: f64,
    pub h: Vec<f64>,
    pub anchor: usize,
    pub residuals: Residuals,
    pub dual_degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complementarity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binding_constraints: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier_magnitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lex_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acoe: Option<AcoeReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub greedy: Option<GreedyPolicy>,
}

fn gamma_entries(mdp: &FiniteMdp, gamma: &OccupationMeasure) -> Vec<GammaEntry> {
    mdp.index()
        .pairs()
        .iter()
        .zip(&gamma.weights)
        .map(|(&(x, a), &weight)| GammaEntry { x, a, weight })
        .collect()
}

fn mu_entries(mdp: &FiniteMdp, pair: &StationaryPair) -> Vec<MuEntry> {
    mdp.index()
        .pairs()
        .iter()
        .zip(&pair.policy)
        .map(|(&(x, a), &prob)| MuEntry { x, a, prob })
        .collect()
}

fn residuals(mdp: &FiniteMdp, gamma: &OccupationMeasure, rho: f64, h: &[f64], cost: &[f64], gap: f64) -> Residuals {
    Residuals {
        normalization: gamma.normalization_residual(),
        balance_max: gamma.balance_residuals(mdp).iter().fold(0.0, |acc, r| acc.max(r.abs())),
        dual_feas_min_slack: dual_slacks(mdp, rho, h, cost).into_iter().fold(f64::INFINITY, f64::min),
        gap,
    }
}

impl SolutionDocument {
    pub fn unconstrained(mdp: &FiniteMdp, sol: &UnconstrainedSolution) -> Self {
        SolutionDocument {
            kind: SolutionKind::Unconstrained,
            value: sol.value,
            gamma: gamma_entries(mdp, &sol.gamma),
            p: sol.pair.dist.clone(),
            mu: mu_entries(mdp, &sol.pair),
            rho: sol.cert.rho,
            h: sol.cert.h.clone(),
            anchor: sol.cert.anchor,
            residuals: residuals(
                mdp,
                &sol.gamma,
                sol.cert.rho,
                &sol.cert.h,
                mdp.cost(0),
                (sol.value - sol.cert.rho).abs(),
            ),
            dual_degenerate: sol.dual_degenerate,
            kappa: None,
            alpha: None,
            beta: None,
            complementarity: None,
            binding_constraints: None,
            multiplier_magnitude: None,
            lex_values: None,
            acoe: None,
            greedy: None,
        }
    }

    pub fn constrained(mdp: &FiniteMdp, sol: &ConstrainedSolution) -> Self {
        let adjusted = sol.cert.adjusted_cost(mdp);
        let gap = (sol.value - sol.cert.objective(&sol.kappa)).abs();
        SolutionDocument {
            kind: SolutionKind::Constrained,
            value: sol.value,
            gamma: gamma_entries(mdp, &sol.gamma),
            p: sol.pair.dist.clone(),
            mu: mu_entries(mdp, &sol.pair),
            rho: sol.cert.rho,
            h: sol.cert.h.clone(),
            anchor: sol.cert.anchor,
            residuals: residuals(mdp, &sol.gamma, sol.cert.rho, &sol.cert.h, &adjusted, gap),
            dual_degenerate: sol.dual_degenerate,
            kappa: Some(sol.kappa.clone()),
            alpha: Some(sol.alpha.clone()),
            beta: Some(sol.cert.beta.clone()),
            complementarity: Some(complementarity_check(sol)),
            binding_constraints: Some(sol.binding_constraints()),
            multiplier_magnitude: Some(sol.multiplier_magnitude()),
            lex_values: None,
            acoe: None,
            greedy: None,
        }
    }

    pub fn lex(mdp: &FiniteMdp, lex: &LexSolution) -> Self {
        let stage0 = &lex.stage0;
        let value = lex.gamma.integrate(mdp.cost(0));
        let adjusted = stage0.cert.adjusted_cost(mdp);
        let gap = (value - stage0.cert.objective(&stage0.kappa)).abs();
        let complementarity = lex
            .alpha
            .iter()
            .zip(&stage0.cert.beta)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .abs();
        SolutionDocument {
            kind: SolutionKind::Lex,
            value,
            gamma: gamma_entries(mdp, &lex.gamma),
            p: lex.pair.dist.clone(),
            mu: mu_entries(mdp, &lex.pair),
            rho: stage0.cert.rho,
            h: stage0.cert.h.clone(),
            anchor: stage0.cert.anchor,
            residuals: residuals(mdp, &lex.gamma, stage0.cert.rho, &stage0.cert.h, &adjusted, gap),
            dual_degenerate: stage0.dual_degenerate,
            kappa: Some(stage0.kappa.clone()),
            alpha: Some(lex.alpha.clone()),
            beta: Some(stage0.cert.beta.clone()),
            complementarity: Some(complementarity),
            binding_constraints: Some(
                lex.alpha
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| **a <= crate::constrained::BINDING_EPS)
                    .map(|(i, _)| i + 1)
                    .collect(),
            ),
            multiplier_magnitude: Some(stage0.multiplier_magnitude()),
            lex_values: Some(lex.kappa_star.clone()),
            acoe: None,
            greedy: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Rebuilds the stationary pair stored in the document.
    pub fn pair(&self, mdp: &FiniteMdp) -> Result<StationaryPair, String> {
        if self.p.len() != mdp.n_states() {
            return Err(format!("p has {} entries, model has {} states", self.p.len(), mdp.n_states()));
        }
        let mut policy = vec![0.0; mdp.n_pairs()];
        for e in &self.mu {
            let j = mdp
                .index()
                .lookup(e.x, e.a)
                .ok_or_else(|| format!("mu entry ({},{}) is not an admissible pair", e.x, e.a))?;
            policy[j] = e.prob;
        }
        Ok(StationaryPair::new(mdp, policy, self.p.clone()))
    }

    fn gamma_measure(&self, mdp: &FiniteMdp) -> Result<OccupationMeasure, String> {
        let mut weights = vec![0.0; mdp.n_pairs()];
        for e in &self.gamma {
            let j = mdp
                .index()
                .lookup(e.x, e.a)
                .ok_or_else(|| format!("gamma entry ({},{}) is not an admissible pair", e.x, e.a))?;
            weights[j] = e.weight;
        }
        Ok(OccupationMeasure { weights })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.ok)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    /// Records `value <= limit`.
    fn at_most(&mut self, name: &str, value: f64, limit: f64, detail: String) {
        self.0.push(Check { name: name.into(), value, limit, ok: value <= limit, detail });
    }

    fn structural(&mut self, name: &str, detail: String) {
        self.0.push(Check { name: name.into(), value: 1.0, limit: 0.0, ok: false, detail });
    }
}

/// Re-checks every primal, dual and pair invariant of a document without
/// solving anything.
pub fn verify_solution(mdp: &FiniteMdp, doc: &SolutionDocument, tols: &Tolerances) -> VerifyReport {
    let mut checks = Checks(Vec::new());
    let n = mdp.n_states();
    let d = mdp.n_constraints();

    let model = mdp.validate();
    if !model.is_empty() {
        checks.structural("model", model.to_string());
    }
    let gamma = match doc.gamma_measure(mdp) {
        Ok(g) => g,
        Err(e) => {
            checks.structural("gamma", e);
            return finish(checks);
        }
    };
    let pair = match doc.pair(mdp) {
        Ok(p) => p,
        Err(e) => {
            checks.structural("pair", e);
            return finish(checks);
        }
    };
    if doc.h.len() != n || doc.anchor >= n {
        checks.structural("h", format!("h has {} entries and anchor {}, model has {n} states", doc.h.len(), doc.anchor));
        return finish(checks);
    }

    let min_gamma = gamma.weights.iter().copied().fold(f64::INFINITY, f64::min);
    checks.at_most("gamma_nonnegative", (-min_gamma).max(0.0), tols.feas, format!("min weight {min_gamma}"));
    checks.at_most("normalization", gamma.normalization_residual(), INVARIANT_TOL, String::new());
    let balance = gamma.balance_residuals(mdp);
    let (worst, worst_val) = balance
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (y, r)| if r.abs() > acc.1 { (y, r.abs()) } else { acc });
    checks.at_most("balance", worst_val, INVARIANT_TOL, format!("worst balance row: state {worst}"));
    let objective = gamma.integrate(mdp.cost(0));
    checks.at_most(
        "objective",
        (objective - doc.value).abs(),
        tols.gap,
        format!("<gamma, c0> = {objective}, document value {}", doc.value),
    );
    checks.at_most("anchor", doc.h[doc.anchor].abs(), 0.0, format!("h({}) = {}", doc.anchor, doc.h[doc.anchor]));

    let marginal = gamma.marginal(mdp);
    let p_dev = marginal.iter().zip(&pair.dist).map(|(m, p)| (m - p).abs()).fold(0.0, f64::max);
    checks.at_most("p_marginal", p_dev, INVARIANT_TOL, String::new());
    let mu_row_dev = (0..n)
        .map(|x| (mdp.index().columns_of(x).map(|j| pair.policy[j]).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    let mu_neg = pair.policy.iter().fold(0.0f64, |acc, v| acc.max(-v));
    checks.at_most("mu_stochastic", mu_row_dev.max(mu_neg), INVARIANT_TOL, String::new());
    let rebuilt = pair.occupation(mdp);
    let recon = mdp
        .index()
        .pairs()
        .iter()
        .enumerate()
        .filter(|(_, &(x, _))| pair.dist[x] > SUPPORT_EPS)
        .map(|(j, _)| (rebuilt.weights[j] - gamma.weights[j]).abs())
        .fold(0.0, f64::max);
    checks.at_most("mu_p_reconstruction", recon, INVARIANT_TOL, String::new());
    checks.at_most("invariance", invariance_residual(&pair, mdp), INVARIANT_TOL, String::new());

    match doc.kind {
        SolutionKind::Unconstrained => {
            let slack = dual_slacks(mdp, doc.rho, &doc.h, mdp.cost(0)).into_iter().fold(f64::INFINITY, f64::min);
            checks.at_most("dual_feasibility", (-slack).max(0.0), INVARIANT_TOL, format!("min slack {slack}"));
            checks.at_most("duality_gap", (doc.value - doc.rho).abs(), tols.gap, String::new());
        }
        SolutionKind::Constrained | SolutionKind::Lex => {
            let (Some(kappa), Some(alpha), Some(beta)) = (&doc.kappa, &doc.alpha, &doc.beta) else {
                checks.structural("constrained_fields", "kappa, alpha and beta are required".into());
                return finish(checks);
            };
            if kappa.len() != d || alpha.len() != d || beta.len() != d {
                checks.structural("constrained_fields", format!("kappa/alpha/beta must have length {d}"));
                return finish(checks);
            }
            for i in 0..d {
                let dev = (gamma.integrate(mdp.cost(i + 1)) + alpha[i] - kappa[i]).abs();
                checks.at_most(&format!("budget_{}", i + 1), dev, INVARIANT_TOL, String::new());
            }
            let alpha_neg = alpha.iter().fold(0.0f64, |acc, v| acc.max(-v));
            checks.at_most("alpha_nonnegative", alpha_neg, tols.feas, String::new());
            let beta_pos = beta.iter().fold(0.0f64, |acc, v| acc.max(*v));
            checks.at_most("beta_nonpositive", beta_pos, 1e-9, String::new());
            let mut adjusted = mdp.cost(0).to_vec();
            for (i, b) in beta.iter().enumerate() {
                for (cj, ci) in adjusted.iter_mut().zip(mdp.cost(i + 1)) {
                    *cj -= b * ci;
                }
            }
            let slack = dual_slacks(mdp, doc.rho, &doc.h, &adjusted).into_iter().fold(f64::INFINITY, f64::min);
            checks.at_most("dual_feasibility", (-slack).max(0.0), INVARIANT_TOL, format!("min slack {slack}"));
            let dual_obj = doc.rho + beta.iter().zip(kappa).map(|(b, k)| b * k).sum::<f64>();
            let gap_tol = if doc.kind == SolutionKind::Lex { LEX_GAP_TOL } else { tols.gap };
            checks.at_most("duality_gap", (doc.value - dual_obj).abs(), gap_tol, String::new());
            let comp = alpha.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>().abs();
            checks.at_most("complementarity", comp, gap_tol, String::new());
        }
    }
    finish(checks)
}

fn finish(checks: Checks) -> VerifyReport {
    VerifyReport { ok: checks.0.iter().all(|c| c.ok), checks: checks.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constrained::{solve_constrained, ConstrainedOutcome};
    use crate::fixtures;
    use crate::occupation::solve_unconstrained;

    #[test]
    fn solved_document_verifies_and_round_trips() {
        let mdp = fixtures::stay_or_go();
        let sol = solve_unconstrained(&mdp, &Tolerances::default()).unwrap();
        let doc = SolutionDocument::unconstrained(&mdp, &sol);
        let back = SolutionDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        let report = verify_solution(&mdp, &back, &Tolerances::default());
        assert!(report.ok, "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn tampered_gamma_names_balance_row() {
        let mdp = fixtures::two_cycle();
        let sol = solve_unconstrained(&mdp, &Tolerances::default()).unwrap();
        let mut doc = SolutionDocument::unconstrained(&mdp, &sol);
        doc.gamma[1].weight += 1e-3;
        let report = verify_solution(&mdp, &doc, &Tolerances::default());
        assert!(!report.ok);
        let balance = report.checks.iter().find(|c| c.name == "balance").unwrap();
        assert!(!balance.ok);
        assert!(balance.detail.contains("state"));
    }

    #[test]
    fn constrained_document_verifies() {
        let mdp = fixtures::mixing(0.0, 1.0);
        let ConstrainedOutcome::Optimal(sol) = solve_constrained(&mdp, &[1.0], &Tolerances::default()).unwrap()
        else {
            panic!("feasible");
        };
        let doc = SolutionDocument::constrained(&mdp, &sol);
        assert_eq!(doc.binding_constraints, Some(vec![1]));
        let report = verify_solution(&mdp, &doc, &Tolerances::default());
        assert!(report.ok, "{:?}", report.failures().collect::<Vec<_>>());

        let mut bad = doc.clone();
        bad.beta = Some(vec![0.5]);
        assert!(!verify_solution(&mdp, &bad, &Tolerances::default()).ok);
    }

    #[test]
    fn unknown_pair_is_structural_failure() {
        let mdp = fixtures::two_cycle();
        let sol = solve_unconstrained(&mdp, &Tolerances::default()).unwrap();
        let mut doc = SolutionDocument::unconstrained(&mdp, &sol);
        doc.gamma[0].a = 9;
        let report = verify_solution(&mdp, &doc, &Tolerances::default());
        assert!(!report.ok);
        assert_eq!(report.checks.last().unwrap().name, "gamma");
    }
}
