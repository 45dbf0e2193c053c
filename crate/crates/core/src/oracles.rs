//! Brute-force ground truth that shares no solving code with the LP path:
//! deterministic-policy enumeration over closed recurrent classes, relative
//! value iteration for unichain models, and a constrained optimum by vertex
//! enumeration of an independently assembled program.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::solve_square;
use crate::lp::{enumerate_bfs_optimum, LpError, LpStatus, StandardLp};
use crate::model::FiniteMdp;

pub const POLICY_ENUM_LIMIT: u128 = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("action {action} is not admissible at state {state}")]
    InadmissibleAction { state: usize, action: usize },
    #[error("singular stationary system on closed class {0:?}")]
    SingularClass(Vec<usize>),
    #[error("enumeration guard exceeded: {0}")]
    Guard(String),
    #[error("relative value iteration did not converge in {iters} sweeps (span {span:e})")]
    NoConvergence { iters: usize, span: f64 },
    #[error("model is multichain under the greedy policy ({classes} recurrent classes)")]
    Multichain { classes: usize },
    #[error("constraint assembly produced a {rows}x{cols} system, expected {want_rows}x{want_cols}")]
    ShapeMismatch { rows: usize, cols: usize, want_rows: usize, want_cols: usize },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Recurrent structure of the chain induced by a deterministic policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainAnalysis {
    pub classes: Vec<Vec<usize>>,
    /// `class_dists[k][m]` is the stationary mass of state `classes[k][m]`.
    pub class_dists: Vec<Vec<f64>>,
    /// `class_costs[k][i]` is the stationary average of `c_i` on class `k`.
    pub class_costs: Vec<Vec<f64>>,
    pub transient: Vec<usize>,
}

fn policy_columns(mdp: &FiniteMdp, f: &[usize]) -> Result<Vec<usize>, OracleError> {
    if f.len() != mdp.n_states() {
        return Err(OracleError::Usage(format!(
            "policy covers {} states, model has {}",
            f.len(),
            mdp.n_states()
        )));
    }
    f.iter()
        .enumerate()
        .map(|(x, &a)| {
            mdp.index()
                .lookup(x, a)
                .ok_or(OracleError::InadmissibleAction { state: x, action: a })
        })
        .collect()
}

/// Closed classes via reachability: `x` is recurrent iff every state it
/// reaches reaches it back. Classes are listed by smallest member.
pub fn analyze_policy_chain(mdp: &FiniteMdp, f: &[usize]) -> Result<ChainAnalysis, OracleError> {
    let n = mdp.n_states();
    let cols = policy_columns(mdp, f)?;
    let succ: Vec<Vec<usize>> = cols
        .iter()
        .map(|&j| {
            mdp.kernel_row(j)
                .iter()
                .enumerate()
                .filter(|(_, q)| **q > 0.0)
                .map(|(y, _)| y)
                .collect()
        })
        .collect();
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(x) = stack.pop() {
                for &y in &succ[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            seen
        })
        .collect();

    let mut assigned = vec![false; n];
    let mut classes = Vec::new();
    let mut transient = Vec::new();
    for x in 0..n {
        if assigned[x] {
            continue;
        }
        let recurrent = (0..n).all(|y| !reach[x][y] || reach[y][x]);
        if recurrent {
            let class: Vec<usize> = (0..n).filter(|&y| reach[x][y]).collect();
            for &y in &class {
                assigned[y] = true;
            }
            classes.push(class);
        } else {
            assigned[x] = true;
            transient.push(x);
        }
    }

    let mut class_dists = Vec::with_capacity(classes.len());
    let mut class_costs = Vec::with_capacity(classes.len());
    for class in &classes {
        let dist = class_distribution(mdp, &cols, class)?;
        let costs = (0..mdp.n_costs())
            .map(|i| class.iter().zip(&dist).map(|(&x, p)| p * mdp.cost(i)[cols[x]]).sum())
            .collect();
        class_dists.push(dist);
        class_costs.push(costs);
    }
    Ok(ChainAnalysis { classes, class_dists, class_costs, transient })
}

/// Solves `p (P_C - I) = 0, sum p = 1` on a closed class, replacing the last
/// balance equation by the normalization.
fn class_distribution(mdp: &FiniteMdp, cols: &[usize], class: &[usize]) -> Result<Vec<f64>, OracleError> {
    let k = class.len();
    let mut m = DMatrix::<f64>::zeros(k, k);
    for (r, &y) in class.iter().enumerate() {
        for (c, &x) in class.iter().enumerate() {
            // row r is the balance of state y: sum_x p(x) P(y|x) - p(y)
            m[(r, c)] = mdp.kernel_row(cols[x])[y] - if x == y { 1.0 } else { 0.0 };
        }
    }
    for c in 0..k {
        m[(k - 1, c)] = 1.0;
    }
    let mut rhs = vec![0.0; k];
    rhs[k - 1] = 1.0;
    let p = solve_square(m, &rhs).ok_or_else(|| OracleError::SingularClass(class.to_vec()))?;
    let resid = class
        .iter()
        .map(|&y| {
            let inflow: f64 = class.iter().zip(&p).map(|(&x, px)| px * mdp.kernel_row(cols[x])[y]).sum();
            let py = p[class.iter().position(|&z| z == y).expect("member")];
            (inflow - py).abs()
        })
        .fold(0.0, f64::max);
    if resid > 1e-10 {
        return Err(OracleError::SingularClass(class.to_vec()));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceMinimum {
    pub value: f64,
    pub policy: Vec<usize>,
    pub class: Vec<usize>,
}

/// Number of deterministic stationary policies, saturating.
pub fn policy_count(mdp: &FiniteMdp) -> u128 {
    (0..mdp.n_states()).fold(1u128, |acc, x| acc.saturating_mul(mdp.actions(x).len() as u128))
}

/// Visits every deterministic policy in mixed-radix order (state 0 slowest).
pub fn for_each_policy(mdp: &FiniteMdp, mut visit: impl FnMut(&[usize]) -> Result<(), OracleError>) -> Result<(), OracleError> {
    let n = mdp.n_states();
    let mut digits = vec![0usize; n];
    loop {
        let f: Vec<usize> = (0..n).map(|x| mdp.actions(x)[digits[x]]).collect();
        visit(&f)?;
        let mut x = n;
        loop {
            if x == 0 {
                return Ok(());
            }
            x -= 1;
            digits[x] += 1;
            if digits[x] < mdp.actions(x).len() {
                break;
            }
            digits[x] = 0;
        }
    }
}

/// Minimum class-average `c0` over all deterministic policies and all their
/// closed recurrent classes.
pub fn brute_force_minimum_value(mdp: &FiniteMdp) -> Result<BruteForceMinimum, OracleError> {
    let count = policy_count(mdp);
    if count > POLICY_ENUM_LIMIT {
        return Err(OracleError::Guard(format!("{count} deterministic policies")));
    }
    let mut best: Option<BruteForceMinimum> = None;
    for_each_policy(mdp, |f| {
        let chain = analyze_policy_chain(mdp, f)?;
        for (class, costs) in chain.classes.iter().zip(&chain.class_costs) {
            if best.as_ref().is_none_or(|b| costs[0] < b.value) {
                best = Some(BruteForceMinimum { value: costs[0], policy: f.to_vec(), class: class.clone() });
            }
        }
        Ok(())
    })?;
    Ok(best.expect("at least one policy and one closed class"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RviOptions {
    pub max_iters: usize,
    pub span_tol: f64,
    /// Self-loop weight `tau` of the damped kernel `(1 - tau) q + tau I`.
    pub damping: f64,
    pub anchor: usize,
}

impl Default for RviOptions {
    fn default() -> Self {
        RviOptions { max_iters: 1_000_000, span_tol: 1e-11, damping: 0.5, anchor: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RviResult {
    pub rho: f64,
    /// Bias of the undamped model, `h(anchor) = 0`.
    pub h: Vec<f64>,
    pub policy: Vec<usize>,
    pub iterations: usize,
}

/// Relative value iteration on the damped kernel. The damping leaves the
/// average cost unchanged and scales the bias by `1 / (1 - tau)`, which is
/// undone before returning.
pub fn relative_value_iteration(mdp: &FiniteMdp, opts: &RviOptions) -> Result<RviResult, OracleError> {
    let n = mdp.n_states();
    if opts.anchor >= n {
        return Err(OracleError::Usage(format!("anchor {} out of range", opts.anchor)));
    }
    if !(0.0..1.0).contains(&opts.damping) {
        return Err(OracleError::Usage(format!("damping {} not in [0,1)", opts.damping)));
    }
    let tau = opts.damping;
    let cost = mdp.cost(0);
    let mut h = vec![0.0; n];
    let mut th = vec![0.0; n];
    let mut policy = vec![0usize; n];
    let mut span = f64::INFINITY;
    for iter in 1..=opts.max_iters {
        for x in 0..n {
            let mut best = f64::INFINITY;
            for j in mdp.index().columns_of(x) {
                let v = cost[j] + (1.0 - tau) * mdp.expected(j, &h) + tau * h[x];
                if v < best {
                    best = v;
                    policy[x] = mdp.index().pair(j).1;
                }
            }
            th[x] = best;
        }
        let (lo, hi) = th
            .iter()
            .zip(&h)
            .map(|(t, v)| t - v)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
        span = hi - lo;
        let offset = th[opts.anchor];
        for (hx, tx) in h.iter_mut().zip(&th) {
            *hx = tx - offset;
        }
        if span <= opts.span_tol {
            let chain = analyze_policy_chain(mdp, &policy)?;
            if chain.classes.len() != 1 {
                return Err(OracleError::Multichain { classes: chain.classes.len() });
            }
            let h = h.iter().map(|v| (1.0 - tau) * v).collect();
            return Ok(RviResult { rho: 0.5 * (lo + hi), h, policy, iterations: iter });
        }
    }
    let chain = analyze_policy_chain(mdp, &policy)?;
    if chain.classes.len() != 1 {
        return Err(OracleError::Multichain { classes: chain.classes.len() });
    }
    Err(OracleError::NoConvergence { iters: opts.max_iters, span })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ConstrainedOracleValue {
    Optimal(f64),
    Infeasible,
}

/// Assembles the constrained program column by column: each pair contributes
/// `(1, e_x - q(.|x,a), c_1(x,a), ..., c_d(x,a))`, each slack a unit vector
/// on its budget row.
fn assemble_columns(mdp: &FiniteMdp, kappa: &[f64]) -> Result<StandardLp, OracleError> {
    let n = mdp.n_states();
    let d = mdp.n_constraints();
    let height = 1 + n + d;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut objective = Vec::new();
    for (j, &(x, _)) in mdp.index().pairs().iter().enumerate() {
        let mut col = Vec::with_capacity(height);
        col.push(1.0);
        col.extend((0..n).map(|y| if y == x { 1.0 } else { 0.0 } - mdp.kernel_row(j)[y]));
        col.extend((1..=d).map(|i| mdp.cost(i)[j]));
        columns.push(col);
        objective.push(mdp.cost(0)[j]);
    }
    for i in 0..d {
        let mut col = vec![0.0; height];
        col[1 + n + i] = 1.0;
        columns.push(col);
        objective.push(0.0);
    }
    let width = columns.len();
    let rows: Vec<Vec<f64>> = (0..height).map(|r| columns.iter().map(|c| c[r]).collect()).collect();
    let mut rhs = vec![0.0; height];
    rhs[0] = 1.0;
    rhs[1 + n..].copy_from_slice(kappa);
    let (want_rows, want_cols) = (1 + n + d, mdp.n_pairs() + d);
    if rows.len() != want_rows || width != want_cols {
        return Err(OracleError::ShapeMismatch { rows: rows.len(), cols: width, want_rows, want_cols });
    }
    Ok(StandardLp::new(objective, rows, rhs)?)
}

pub fn brute_force_constrained_value(mdp: &FiniteMdp, kappa: &[f64]) -> Result<ConstrainedOracleValue, OracleError> {
    if kappa.len() != mdp.n_constraints() {
        return Err(OracleError::Usage(format!(
            "expected {} budgets, got {}",
            mdp.n_constraints(),
            kappa.len()
        )));
    }
    let lp = assemble_columns(mdp, kappa)?;
    let sol = enumerate_bfs_optimum(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(ConstrainedOracleValue::Optimal(sol.objective_value)),
        LpStatus::Infeasible => Ok(ConstrainedOracleValue::Infeasible),
        LpStatus::Unbounded => Err(OracleError::Usage("nonnegative costs cannot be unbounded".into())),
    }
}
