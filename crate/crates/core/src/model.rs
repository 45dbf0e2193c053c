//! Finite MDP data model, instance documents and the truncated admission-control
//! queue family.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on `|sum_y q(y|x,a) - 1|` for every admissible pair.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid queue parameters: {0}")]
    InvalidSpec(String),
}

/// Dense enumeration of the admissible pairs `(x, a)`, ordered lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct PairIndex {
    pairs: Vec<(usize, usize)>,
    // offsets[x]..offsets[x+1] are the columns of state x
    offsets: Vec<usize>,
}

impl PairIndex {
    fn new(actions: &[Vec<usize>]) -> Self {
        let mut pairs = Vec::new();
        let mut offsets = Vec::with_capacity(actions.len() + 1);
        for (x, acts) in actions.iter().enumerate() {
            offsets.push(pairs.len());
            pairs.extend(acts.iter().map(|&a| (x, a)));
        }
        offsets.push(pairs.len());
        PairIndex { pairs, offsets }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair(&self, column: usize) -> (usize, usize) {
        self.pairs[column]
    }

    /// Columns belonging to state `x`.
    pub fn columns_of(&self, x: usize) -> std::ops::Range<usize> {
        self.offsets[x]..self.offsets[x + 1]
    }

    /// Dense column of `(x, a)`, if `a` is admissible at `x`.
    pub fn lookup(&self, x: usize, a: usize) -> Option<usize> {
        if x + 1 >= self.offsets.len() {
            return None;
        }
        let range = self.columns_of(x);
        let start = range.start;
        self.pairs[range]
            .binary_search_by_key(&a, |&(_, b)| b)
            .ok()
            .map(|k| start + k)
    }
}

/// A finite MDP with explicit admissible action sets.
///
/// Construction only checks shapes; the semantic invariants (stochastic rows,
/// nonempty action sets, nonnegative costs and budgets) are reported by
/// [`FiniteMdp::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMdp {
    name: Option<String>,
    n_states: usize,
    actions: Vec<Vec<usize>>,
    index: PairIndex,
    kernel: Vec<Vec<f64>>,
    costs: Vec<Vec<f64>>,
    budgets: Option<Vec<f64>>,
}

impl FiniteMdp {
    /// `kernel[j]` is the distribution `q(.|x,a)` of pair column `j` and
    /// `costs[i][j]` is `c_i(x,a)`; columns follow the lexicographic pair order.
    pub fn from_parts(
        n_states: usize,
        actions: Vec<Vec<usize>>,
        kernel: Vec<Vec<f64>>,
        costs: Vec<Vec<f64>>,
        budgets: Option<Vec<f64>>,
    ) -> Result<Self, ModelError> {
        if n_states == 0 {
            return Err(ModelError::Shape("n_states must be positive".into()));
        }
        if actions.len() != n_states {
            return Err(ModelError::Shape(format!(
                "expected {} action lists, got {}",
                n_states,
                actions.len()
            )));
        }
        for (x, acts) in actions.iter().enumerate() {
            if acts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ModelError::Shape(format!(
                    "actions of state {x} must be strictly increasing"
                )));
            }
        }
        let index = PairIndex::new(&actions);
        if kernel.len() != index.len() {
            return Err(ModelError::Shape(format!(
                "expected {} kernel rows, got {}",
                index.len(),
                kernel.len()
            )));
        }
        if let Some(j) = kernel.iter().position(|row| row.len() != n_states) {
            let (x, a) = index.pair(j);
            return Err(ModelError::Shape(format!(
                "kernel row ({x},{a}) has length {}, expected {n_states}",
                kernel[j].len()
            )));
        }
        if costs.is_empty() {
            return Err(ModelError::Shape("at least the objective cost c0 is required".into()));
        }
        if let Some(i) = costs.iter().position(|c| c.len() != index.len()) {
            return Err(ModelError::Shape(format!(
                "cost c{i} has {} entries, expected {}",
                costs[i].len(),
                index.len()
            )));
        }
        let budgets = budgets.filter(|b| !b.is_empty() || costs.len() > 1);
        if let Some(b) = &budgets {
            if b.len() != costs.len() - 1 {
                return Err(ModelError::Shape(format!(
                    "{} budgets for {} constraint costs",
                    b.len(),
                    costs.len() - 1
                )));
            }
        }
        Ok(FiniteMdp {
            name: None,
            n_states,
            actions,
            index,
            kernel,
            costs,
            budgets,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn actions(&self, x: usize) -> &[usize] {
        &self.actions[x]
    }

    pub fn index(&self) -> &PairIndex {
        &self.index
    }

    pub fn n_pairs(&self) -> usize {
        self.index.len()
    }

    /// Transition distribution of pair column `j`.
    pub fn kernel_row(&self, j: usize) -> &[f64] {
        &self.kernel[j]
    }

    /// Cost function `c_i` as a vector over pair columns.
    pub fn cost(&self, i: usize) -> &[f64] {
        &self.costs[i]
    }

    pub fn n_costs(&self) -> usize {
        self.costs.len()
    }

    /// Number of constraint costs `d`.
    pub fn n_constraints(&self) -> usize {
        self.costs.len() - 1
    }

    pub fn budgets(&self) -> Option<&[f64]> {
        self.budgets.as_deref()
    }

    /// `sum_y h(y) q(y|x,a)` for pair column `j`.
    pub fn expected(&self, j: usize, h: &[f64]) -> f64 {
        self.kernel[j].iter().zip(h).map(|(q, v)| q * v).sum()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        for x in 0..self.n_states {
            if self.actions[x].is_empty() {
                issues.push(Issue::at_state(x, format!("state {x} has no admissible action")));
            }
        }
        for (j, row) in self.kernel.iter().enumerate() {
            let (x, a) = self.index.pair(j);
            if let Some(y) = row.iter().position(|p| !p.is_finite() || *p < 0.0 || *p > 1.0) {
                issues.push(Issue::at_pair(
                    x,
                    a,
                    format!("q({y}|{x},{a}) = {} is not a probability", row[y]),
                ));
                continue;
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                issues.push(Issue::at_pair(x, a, format!("row ({x},{a}) sums to {sum}")));
            }
        }
        for (i, cost) in self.costs.iter().enumerate() {
            for (j, &c) in cost.iter().enumerate() {
                if !c.is_finite() || c < 0.0 {
                    let (x, a) = self.index.pair(j);
                    issues.push(Issue::at_pair(x, a, format!("c{i}({x},{a}) = {c} is not finite and nonnegative")));
                }
            }
        }
        if let Some(b) = &self.budgets {
            for (i, &k) in b.iter().enumerate() {
                if !k.is_finite() || k < 0.0 {
                    issues.push(Issue::global(format!("budget kappa{} = {k} is negative", i + 1)));
                }
            }
        }
        ValidationReport { issues }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub state: Option<usize>,
    pub action: Option<usize>,
    pub message: String,
}

impl Issue {
    fn at_state(x: usize, message: String) -> Self {
        Issue { state: Some(x), action: None, message }
    }

    fn at_pair(x: usize, a: usize, message: String) -> Self {
        Issue { state: Some(x), action: Some(a), message }
    }

    fn global(message: String) -> Self {
        Issue { state: None, action: None, message }
    }
}

/// Every violated model invariant, with its location.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "valid");
        }
        for (k, issue) in self.issues.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", issue.message)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Instance documents

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    n_states: usize,
    actions: Vec<Vec<usize>>,
    transitions: Vec<TransitionEntry>,
    costs: Vec<Vec<CostEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    budgets: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionEntry {
    x: usize,
    a: usize,
    y: usize,
    p: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostEntry {
    x: usize,
    a: usize,
    value: f64,
}

/// Parses an instance document and checks it against every model invariant.
pub fn load_instance(text: &str) -> Result<FiniteMdp, ModelError> {
    let doc: InstanceDoc =
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
    let n = doc.n_states;
    if n == 0 {
        return Err(ModelError::Semantic("n_states must be positive".into()));
    }
    if doc.actions.len() != n {
        return Err(ModelError::Semantic(format!(
            "actions lists {} states, n_states is {n}",
            doc.actions.len()
        )));
    }
    let mut actions = doc.actions;
    for (x, acts) in actions.iter_mut().enumerate() {
        acts.sort_unstable();
        if acts.windows(2).any(|w| w[0] == w[1]) {
            return Err(ModelError::Semantic(format!("duplicate action in A({x})")));
        }
    }
    let index = PairIndex::new(&actions);
    let locate = |x: usize, a: usize| -> Result<usize, ModelError> {
        if x >= n {
            return Err(ModelError::Semantic(format!("state {x} out of range for {n}-state model")));
        }
        index
            .lookup(x, a)
            .ok_or_else(|| ModelError::Semantic(format!("action {a} is not admissible at state {x}")))
    };

    let mut kernel = vec![vec![0.0; n]; index.len()];
    let mut seen = vec![vec![false; n]; index.len()];
    for t in &doc.transitions {
        let j = locate(t.x, t.a)?;
        if t.y >= n {
            return Err(ModelError::Semantic(format!(
                "transition ({},{}) references state {} of a {n}-state model",
                t.x, t.a, t.y
            )));
        }
        if seen[j][t.y] {
            return Err(ModelError::Semantic(format!(
                "duplicate transition ({},{}) -> {}",
                t.x, t.a, t.y
            )));
        }
        seen[j][t.y] = true;
        if !t.p.is_finite() || !(0.0..=1.0).contains(&t.p) {
            return Err(ModelError::Semantic(format!(
                "q({}|{},{}) = {} is not a probability",
                t.y, t.x, t.a, t.p
            )));
        }
        kernel[j][t.y] = t.p;
    }
    for (j, row) in kernel.iter_mut().enumerate() {
        let sum: f64 = row.iter().sum();
        let dev = (sum - 1.0).abs();
        if dev > ROW_SUM_TOL {
            let (x, a) = index.pair(j);
            return Err(ModelError::Semantic(format!("row ({x},{a}) sums to {sum}")));
        }
        // a few ulps of drift is left alone so that reloading is a fixed point
        if dev > 8.0 * f64::EPSILON {
            row.iter_mut().for_each(|p| *p /= sum);
        }
    }

    if doc.costs.is_empty() {
        return Err(ModelError::Semantic("costs must contain at least c0".into()));
    }
    let mut costs = vec![vec![0.0; index.len()]; doc.costs.len()];
    for (i, entries) in doc.costs.iter().enumerate() {
        let mut set = vec![false; index.len()];
        for e in entries {
            let j = locate(e.x, e.a)?;
            if set[j] {
                return Err(ModelError::Semantic(format!(
                    "duplicate cost entry c{i}({},{})",
                    e.x, e.a
                )));
            }
            set[j] = true;
            costs[i][j] = e.value;
        }
    }

    let d = costs.len() - 1;
    if let Some(b) = &doc.budgets {
        if b.len() != d {
            return Err(ModelError::Semantic(format!(
                "{} budgets given for {d} constraint costs",
                b.len()
            )));
        }
    }
    let mut mdp = FiniteMdp::from_parts(n, actions, kernel, costs, doc.budgets)
        .map_err(|e| ModelError::Semantic(e.to_string()))?;
    mdp.name = doc.name;
    let report = mdp.validate();
    if !report.is_empty() {
        return Err(ModelError::Semantic(report.to_string()));
    }
    Ok(mdp)
}

/// Serializes a model; zero transition probabilities are omitted, every cost
/// entry on the admissible set is written.
pub fn save_instance(mdp: &FiniteMdp) -> String {
    let index = mdp.index();
    let mut transitions = Vec::new();
    for (j, &(x, a)) in index.pairs().iter().enumerate() {
        for (y, &p) in mdp.kernel_row(j).iter().enumerate() {
            if p != 0.0 {
                transitions.push(TransitionEntry { x, a, y, p });
            }
        }
    }
    let costs = (0..mdp.n_costs())
        .map(|i| {
            index
                .pairs()
                .iter()
                .zip(mdp.cost(i))
                .map(|(&(x, a), &value)| CostEntry { x, a, value })
                .collect()
        })
        .collect();
    let doc = InstanceDoc {
        name: mdp.name.clone(),
        n_states: mdp.n_states(),
        actions: mdp.actions.clone(),
        transitions,
        costs,
        budgets: mdp.budgets.clone(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("instance documents always serialize");
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// Admission-control queue

pub const ADMIT: usize = 0;
pub const REJECT: usize = 1;

/// Slotted single-server queue with admission control.
///
/// Each slot an arrival occurs with probability `arrival_prob` and, when the
/// queue is nonempty, a service completes with probability `service_prob`,
/// independently. Under `REJECT` the arrival is turned away.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueSpec {
    pub arrival_prob: f64,
    pub service_prob: f64,
    pub holding_coeff: f64,
    pub rejection_cost: f64,
    pub truncation_level: usize,
}

impl QueueSpec {
    pub fn check(&self) -> Result<(), ModelError> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.arrival_prob) {
            return Err(ModelError::InvalidSpec(format!(
                "arrival probability {} not in (0,1)",
                self.arrival_prob
            )));
        }
        if !open_unit(self.service_prob) {
            return Err(ModelError::InvalidSpec(format!(
                "service probability {} not in (0,1)",
                self.service_prob
            )));
        }
        if !(self.holding_coeff > 0.0 && self.holding_coeff.is_finite()) {
            return Err(ModelError::InvalidSpec("holding coefficient must be positive".into()));
        }
        if !(self.rejection_cost >= 0.0 && self.rejection_cost.is_finite()) {
            return Err(ModelError::InvalidSpec("rejection cost must be nonnegative".into()));
        }
        if self.truncation_level < 2 {
            return Err(ModelError::InvalidSpec("truncation level must be at least 2".into()));
        }
        Ok(())
    }
}

/// Builds the queue on states `0..=N`; mass that would leave the range is
/// kept at the boundary state `N`.
pub fn build_queue_truncation(spec: &QueueSpec) -> Result<FiniteMdp, ModelError> {
    spec.check()?;
    let n_max = spec.truncation_level;
    let n = n_max + 1;
    let (lam, sig) = (spec.arrival_prob, spec.service_prob);
    let mut kernel = Vec::with_capacity(2 * n);
    let mut cost = Vec::with_capacity(2 * n);
    for x in 0..n {
        for a in [ADMIT, REJECT] {
            let mut row = vec![0.0; n];
            let lam_eff = if a == ADMIT { lam } else { 0.0 };
            let sig_eff = if x > 0 { sig } else { 0.0 };
            let up = lam_eff * (1.0 - sig_eff);
            let down = sig_eff * (1.0 - lam_eff);
            row[(x + 1).min(n_max)] += up;
            if x > 0 {
                row[x - 1] += down;
            }
            row[x] += 1.0 - up - down;
            kernel.push(row);
            let reject_cost = if a == REJECT { spec.rejection_cost } else { 0.0 };
            cost.push(spec.holding_coeff * x as f64 + reject_cost);
        }
    }
    let mdp = FiniteMdp::from_parts(n, vec![vec![ADMIT, REJECT]; n], kernel, vec![cost], None)?;
    Ok(mdp.with_name(format!("queue-N{n_max}")))
}
