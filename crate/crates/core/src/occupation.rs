//! The occupation-measure program for the unconstrained average-cost problem,
//! its dual certificate `(rho, h)`, and the decomposition of an occupation
//! measure into a stationary pair `(mu, p)`.

use serde::Serialize;
use thiserror::Error;

use crate::lp::{solve_simplex, LpError, LpStatus, StandardLp, Tolerances};
use crate::model::{FiniteMdp, ValidationReport};

/// States with `p(x) > SUPPORT_EPS` make up the support of a stationary pair.
pub const SUPPORT_EPS: f64 = 1e-9;
/// Relative width of a tie in greedy minimizations; tied actions go to the
/// lowest index.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid model: {0}")]
    InvalidModel(ValidationReport),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub(crate) fn ensure_valid(mdp: &FiniteMdp) -> Result<(), SolveError> {
    let report = mdp.validate();
    if report.is_empty() {
        Ok(())
    } else {
        Err(SolveError::InvalidModel(report))
    }
}

/// Weights `gamma(x,a)` over the admissible pairs, in pair-column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationMeasure {
    pub weights: Vec<f64>,
}

impl OccupationMeasure {
    /// State marginal `sum_a gamma(x,a)`.
    pub fn marginal(&self, mdp: &FiniteMdp) -> Vec<f64> {
        (0..mdp.n_states())
            .map(|x| mdp.index().columns_of(x).map(|j| self.weights[j]).sum())
            .collect()
    }

    /// `<gamma, c>` for a cost vector over pair columns.
    pub fn integrate(&self, cost: &[f64]) -> f64 {
        self.weights.iter().zip(cost).map(|(g, c)| g * c).sum()
    }

    /// `|sum gamma - 1|`.
    pub fn normalization_residual(&self) -> f64 {
        (self.weights.iter().sum::<f64>() - 1.0).abs()
    }

    /// Per-state balance residual `gamma_hat(y) - sum q(y|x,a) gamma(x,a)`.
    pub fn balance_residuals(&self, mdp: &FiniteMdp) -> Vec<f64> {
        let mut r = self.marginal(mdp);
        for (j, g) in self.weights.iter().enumerate() {
            if *g == 0.0 {
                continue;
            }
            for (ry, q) in r.iter_mut().zip(mdp.kernel_row(j)) {
                *ry -= q * g;
            }
        }
        r
    }
}

/// A randomized stationary policy with an invariant distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryPair {
    /// `mu(a|x)` in pair-column order.
    pub policy: Vec<f64>,
    pub dist: Vec<f64>,
    pub support: Vec<usize>,
}

impl StationaryPair {
    pub fn new(mdp: &FiniteMdp, policy: Vec<f64>, dist: Vec<f64>) -> Self {
        debug_assert_eq!(policy.len(), mdp.n_pairs());
        let support = support_of(&dist);
        StationaryPair { policy, dist, support }
    }

    /// The pair of a deterministic policy `f` with distribution `dist`.
    pub fn deterministic(mdp: &FiniteMdp, f: &[usize], dist: Vec<f64>) -> Self {
        let mut policy = vec![0.0; mdp.n_pairs()];
        for (x, &a) in f.iter().enumerate() {
            if let Some(j) = mdp.index().lookup(x, a) {
                policy[j] = 1.0;
            }
        }
        Self::new(mdp, policy, dist)
    }

    /// `gamma(x,a) = mu(a|x) p(x)`.
    pub fn occupation(&self, mdp: &FiniteMdp) -> OccupationMeasure {
        let weights = mdp
            .index()
            .pairs()
            .iter()
            .zip(&self.policy)
            .map(|(&(x, _), mu)| mu * self.dist[x])
            .collect();
        OccupationMeasure { weights }
    }
}

pub(crate) fn support_of(dist: &[f64]) -> Vec<usize> {
    dist.iter()
        .enumerate()
        .filter(|(_, p)| **p > SUPPORT_EPS)
        .map(|(x, _)| x)
        .collect()
}

/// Dual solution `(rho, h)` of the unconstrained program; `h(anchor) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualCertificate {
    pub rho: f64,
    pub h: Vec<f64>,
    pub anchor: usize,
}

impl DualCertificate {
    /// Smallest `c(x,a) - (rho + h(x) - sum_y h(y) q(y|x,a))` over the pairs.
    pub fn min_dual_slack(&self, mdp: &FiniteMdp, cost: &[f64]) -> f64 {
        dual_slacks(mdp, self.rho, &self.h, cost).into_iter().fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn dual_slacks(mdp: &FiniteMdp, rho: f64, h: &[f64], cost: &[f64]) -> Vec<f64> {
    mdp.index()
        .pairs()
        .iter()
        .enumerate()
        .map(|(j, &(x, _))| cost[j] - (rho + h[x] - mdp.expected(j, h)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnconstrainedSolution {
    pub gamma: OccupationMeasure,
    pub value: f64,
    pub pair: StationaryPair,
    pub cert: DualCertificate,
    pub dual_degenerate: bool,
}

/// Columns are the admissible pairs; row 0 normalizes, row `1 + y` balances
/// state `y`. One balance row is redundant and is kept.
pub fn build_primal(mdp: &FiniteMdp) -> Result<StandardLp, SolveError> {
    ensure_valid(mdp)?;
    let (rows, rhs) = occupation_rows(mdp);
    Ok(StandardLp::new(mdp.cost(0).to_vec(), rows, rhs)?)
}

/// Normalization and balance rows over the pair columns.
pub(crate) fn occupation_rows(mdp: &FiniteMdp) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = mdp.n_states();
    let cols = mdp.n_pairs();
    let mut rows = vec![vec![0.0; cols]; n + 1];
    rows[0].fill(1.0);
    for (j, &(x, _)) in mdp.index().pairs().iter().enumerate() {
        rows[1 + x][j] += 1.0;
        for (y, q) in mdp.kernel_row(j).iter().enumerate() {
            rows[1 + y][j] -= q;
        }
    }
    let mut rhs = vec![0.0; n + 1];
    rhs[0] = 1.0;
    (rows, rhs)
}

/// Bias from the balance-row duals, shifted so the anchor reads zero.
pub(crate) fn anchored_bias(dual: &[f64], n_states: usize, anchor: usize) -> Vec<f64> {
    let base = dual[1 + anchor];
    (0..n_states).map(|x| dual[1 + x] - base).collect()
}

pub fn solve_unconstrained(mdp: &FiniteMdp, tols: &Tolerances) -> Result<UnconstrainedSolution, SolveError> {
    let lp = build_primal(mdp)?;
    let sol = solve_simplex(&lp, tols)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(SolveError::Internal("occupation LP reported infeasible".into()));
        }
        LpStatus::Unbounded => {
            return Err(SolveError::Internal("occupation LP reported unbounded".into()));
        }
    }
    let gamma = OccupationMeasure { weights: sol.primal.clone() };
    let marginal = gamma.marginal(mdp);
    let anchor = support_of(&marginal)
        .first()
        .copied()
        .ok_or_else(|| SolveError::Internal("optimal occupation measure has empty support".into()))?;
    let cert = DualCertificate {
        rho: sol.dual[0],
        h: anchored_bias(&sol.dual, mdp.n_states(), anchor),
        anchor,
    };
    let pair = decompose(&gamma, mdp, mdp.cost(0), &cert.h);
    Ok(UnconstrainedSolution {
        value: gamma.integrate(mdp.cost(0)),
        gamma,
        pair,
        cert,
        dual_degenerate: sol.dual_degenerate,
    })
}

/// Lowest-index minimizer of `cost(x,a) + sum_y h(y) q(y|x,a)` over `A(x)`,
/// returned as a pair column together with the minimal value.
pub(crate) fn greedy_column(mdp: &FiniteMdp, x: usize, cost: &[f64], h: &[f64]) -> (usize, f64) {
    let values: Vec<(usize, f64)> = mdp.index().columns_of(x).map(|j| (j, cost[j] + mdp.expected(j, h))).collect();
    let min = values.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
    let tie = TIE_TOL * min.abs().max(1.0);
    *values.iter().find(|&&(_, v)| v <= min + tie).expect("admissible action sets are nonempty")
}

/// Splits `gamma` into `p(x) = sum_a gamma(x,a)` and `mu(a|x) = gamma(x,a)/p(x)`.
/// Off the support, `mu(.|x)` is the Dirac at the greedy action for
/// `(cost, h)` with ties to the lowest action index.
pub fn decompose(gamma: &OccupationMeasure, mdp: &FiniteMdp, cost: &[f64], h: &[f64]) -> StationaryPair {
    let dist = gamma.marginal(mdp);
    let mut policy = vec![0.0; mdp.n_pairs()];
    for (x, &px) in dist.iter().enumerate() {
        if px > SUPPORT_EPS {
            for j in mdp.index().columns_of(x) {
                policy[j] = gamma.weights[j] / px;
            }
        } else {
            let (j, _) = greedy_column(mdp, x, cost, h);
            policy[j] = 1.0;
        }
    }
    StationaryPair::new(mdp, policy, dist)
}

/// `J_i(mu, p) = sum_x sum_a c_i(x,a) mu(a|x) p(x)`.
pub fn average_cost(pair: &StationaryPair, mdp: &FiniteMdp, cost_index: usize) -> Result<f64, SolveError> {
    if cost_index >= mdp.n_costs() {
        return Err(SolveError::Usage(format!(
            "cost index {cost_index} out of range (model has {} costs)",
            mdp.n_costs()
        )));
    }
    Ok(pair.occupation(mdp).integrate(mdp.cost(cost_index)))
}

/// `max_y |p(y) - sum_x sum_a q(y|x,a) mu(a|x) p(x)|`.
pub fn invariance_residual(pair: &StationaryPair, mdp: &FiniteMdp) -> f64 {
    let mut next = vec![0.0; mdp.n_states()];
    for (j, &(x, _)) in mdp.index().pairs().iter().enumerate() {
        let w = pair.policy[j] * pair.dist[x];
        if w == 0.0 {
            continue;
        }
        for (ny, q) in next.iter_mut().zip(mdp.kernel_row(j)) {
            *ny += q * w;
        }
    }
    pair.dist
        .iter()
        .zip(&next)
        .map(|(p, n)| (p - n).abs())
        .fold(0.0, f64::max)
}
