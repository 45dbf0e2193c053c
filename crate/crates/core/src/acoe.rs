//! Average-cost optimality equation checks driven by dual certificates, and
//! greedy nonrandomized policies with an absorbing set on which they attain
//! the minimum.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constrained::ConstrainedDual;
use crate::model::FiniteMdp;
use crate::occupation::{greedy_column, DualCertificate, StationaryPair, SUPPORT_EPS, TIE_TOL};

/// `|slack| <= EQ_TOL` marks an equality state.
pub const EQ_TOL: f64 = 1e-7;
/// Dual feasibility tolerance for the inequality form.
pub const INEQ_TOL: f64 = 1e-8;
/// Largest probability a state of the absorbing set may leak out of it.
pub const LEAK_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum AcoeError {
    #[error("no nonempty set of equality states is closed under the greedy policy")]
    EmptyAbsorbingSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSlack {
    pub state: usize,
    pub p: f64,
    pub h: f64,
    /// `min_a {c(x,a) + sum_y h(y) q(y|x,a)} - rho - h(x)`.
    pub slack: f64,
    pub argmin_action: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSlack {
    pub x: usize,
    pub a: usize,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcoeReport {
    pub rho: f64,
    pub inequality_ok: bool,
    pub min_slack: f64,
    pub equality_states: Vec<usize>,
    pub support_covered: bool,
    /// Largest `|sum_a mu(a|x) {c + sum h q} - rho - h(x)|` over the support.
    pub randomized_max_dev: f64,
    pub randomized_ok: bool,
    pub per_state: Vec<StateSlack>,
    pub per_pair: Vec<PairSlack>,
}

fn residuals(mdp: &FiniteMdp, rho: f64, h: &[f64], pair: &StationaryPair, cost: &[f64]) -> AcoeReport {
    let index = mdp.index();
    let per_pair: Vec<PairSlack> = index
        .pairs()
        .iter()
        .enumerate()
        .map(|(j, &(x, a))| PairSlack { x, a, slack: cost[j] + mdp.expected(j, h) - rho - h[x] })
        .collect();
    let mut per_state = Vec::with_capacity(mdp.n_states());
    let mut randomized_max_dev: f64 = 0.0;
    for x in 0..mdp.n_states() {
        let (j, best) = greedy_column(mdp, x, cost, h);
        per_state.push(StateSlack {
            state: x,
            p: pair.dist[x],
            h: h[x],
            slack: best - rho - h[x],
            argmin_action: index.pair(j).1,
        });
        if pair.dist[x] > SUPPORT_EPS {
            let averaged: f64 = index.columns_of(x).map(|j| pair.policy[j] * per_pair[j].slack).sum();
            randomized_max_dev = randomized_max_dev.max(averaged.abs());
        }
    }
    let min_slack = per_state.iter().map(|s| s.slack).fold(f64::INFINITY, f64::min);
    let equality_states: Vec<usize> = per_state
        .iter()
        .filter(|s| s.slack.abs() <= EQ_TOL)
        .map(|s| s.state)
        .collect();
    let support_covered = per_state
        .iter()
        .filter(|s| s.p > SUPPORT_EPS)
        .all(|s| s.slack.abs() <= EQ_TOL);
    AcoeReport {
        rho,
        inequality_ok: min_slack >= -INEQ_TOL,
        min_slack,
        equality_states,
        support_covered,
        randomized_max_dev,
        randomized_ok: randomized_max_dev <= EQ_TOL,
        per_state,
        per_pair,
    }
}

/// ACOE slacks of `(rho, h)` for the one-stage cost `cost`.
pub fn acoe_residuals(mdp: &FiniteMdp, cert: &DualCertificate, pair: &StationaryPair, cost: &[f64]) -> AcoeReport {
    residuals(mdp, cert.rho, &cert.h, pair, cost)
}

/// Constrained optimality equation: the same checks with the Lagrangian cost
/// `c* = c0 - sum beta_i c_i` and level `value - sum beta_i kappa_i`.
pub fn constrained_acoe_residuals(
    mdp: &FiniteMdp,
    cdual: &ConstrainedDual,
    pair: &StationaryPair,
    kappa: &[f64],
    value: f64,
) -> AcoeReport {
    let adjusted = cdual.adjusted_cost(mdp);
    let level = value - cdual.beta.iter().zip(kappa).map(|(b, k)| b * k).sum::<f64>();
    residuals(mdp, level, &cdual.h, pair, &adjusted)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyPolicy {
    /// Chosen action id per state.
    pub action: Vec<usize>,
    pub absorbing_set: Vec<usize>,
}

/// Greedy policy for `(rho, h, cost)` plus the largest set of equality states
/// that the policy never leaves. Ties go to the lowest action index, except
/// on the support of `pair`, where a tied action that `pair` charges wins.
pub fn extract_greedy_policy(
    mdp: &FiniteMdp,
    cert: &DualCertificate,
    pair: &StationaryPair,
    cost: &[f64],
) -> Result<GreedyPolicy, AcoeError> {
    greedy_with_level(mdp, cert.rho, &cert.h, pair, cost)
}

pub(crate) fn greedy_with_level(
    mdp: &FiniteMdp,
    rho: f64,
    h: &[f64],
    pair: &StationaryPair,
    cost: &[f64],
) -> Result<GreedyPolicy, AcoeError> {
    let report = residuals(mdp, rho, h, pair, cost);
    let mut action: Vec<usize> = report.per_state.iter().map(|s| s.argmin_action).collect();
    for x in (0..mdp.n_states()).filter(|&x| pair.dist[x] > SUPPORT_EPS) {
        let (_, best) = greedy_column(mdp, x, cost, h);
        let tie = TIE_TOL * best.abs().max(1.0);
        let charged = mdp
            .index()
            .columns_of(x)
            .find(|&j| pair.policy[j] > SUPPORT_EPS && cost[j] + mdp.expected(j, h) <= best + tie);
        if let Some(j) = charged {
            action[x] = mdp.index().pair(j).1;
        }
    }
    let mut member = vec![false; mdp.n_states()];
    for &x in &report.equality_states {
        member[x] = true;
    }
    // greatest fixed point: drop states whose greedy action leaks mass outside
    loop {
        let mut changed = false;
        for x in 0..mdp.n_states() {
            if !member[x] {
                continue;
            }
            let j = mdp.index().lookup(x, action[x]).expect("greedy action is admissible");
            let inside: f64 = mdp
                .kernel_row(j)
                .iter()
                .zip(&member)
                .filter(|(_, m)| **m)
                .map(|(q, _)| q)
                .sum();
            if inside < 1.0 - LEAK_TOL {
                member[x] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let absorbing_set: Vec<usize> = (0..mdp.n_states()).filter(|&x| member[x]).collect();
    if absorbing_set.is_empty() {
        return Err(AcoeError::EmptyAbsorbingSet);
    }
    Ok(GreedyPolicy { action, absorbing_set })
}

/// Greedy policy for the constrained optimality equation.
pub fn extract_constrained_greedy_policy(
    mdp: &FiniteMdp,
    cdual: &ConstrainedDual,
    pair: &StationaryPair,
    kappa: &[f64],
    value: f64,
) -> Result<GreedyPolicy, AcoeError> {
    let adjusted = cdual.adjusted_cost(mdp);
    let level = value - cdual.beta.iter().zip(kappa).map(|(b, k)| b * k).sum::<f64>();
    greedy_with_level(mdp, level, &cdual.h, pair, &adjusted)
}
