//! Dense standard-form linear programming.
//!
//! [`solve_simplex`] is a two-phase tableau simplex using Bland's
//! smallest-index rule for both the entering and the leaving variable, so it
//! terminates on degenerate problems and is fully deterministic. On an optimal
//! return the primal and dual vectors are recomputed from the final basis
//! against the original data.
//!
//! [`enumerate_bfs_optimum`] is an independent brute-force oracle: it solves
//! every square basis system and keeps the best feasible vertex.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{matrix_from_rows, rank, solve_square};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
    #[error("enumeration guard exceeded: {0}")]
    EnumerationGuard(String),
}

/// Numerical tolerances of the simplex kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Primal feasibility (`|Ax - b|`, `x >= -feas`, phase-1 optimum).
    pub feas: f64,
    /// Reduced-cost optimality.
    pub opt: f64,
    /// Primal/dual objective gap.
    pub gap: f64,
    /// Smallest admissible pivot magnitude.
    pub pivot: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { feas: 1e-9, opt: 1e-9, gap: 1e-8, pivot: 1e-10 }
    }
}

/// `min c^T x  s.t.  A x = b, x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    objective: Vec<f64>,
    matrix: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl StandardLp {
    pub fn new(objective: Vec<f64>, matrix: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self, LpError> {
        let n = objective.len();
        if matrix.len() != rhs.len() {
            return Err(LpError::Dimension(format!(
                "{} constraint rows but {} right-hand sides",
                matrix.len(),
                rhs.len()
            )));
        }
        if let Some(i) = matrix.iter().position(|r| r.len() != n) {
            return Err(LpError::Dimension(format!(
                "row {i} has {} entries, expected {n}",
                matrix[i].len()
            )));
        }
        if objective.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        if matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("constraint matrix"));
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("right-hand side"));
        }
        Ok(StandardLp { objective, matrix, rhs })
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// `max_i |(Ax - b)_i|`.
    pub fn primal_residual(&self, x: &[f64]) -> f64 {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| (dot(row, x) - b).abs())
            .fold(0.0, f64::max)
    }

    /// `c - A^T y`.
    pub fn reduced_costs(&self, y: &[f64]) -> Vec<f64> {
        let mut r = self.objective.clone();
        for (row, yi) in self.matrix.iter().zip(y) {
            for (rj, aij) in r.iter_mut().zip(row) {
                *rj -= aij * yi;
            }
        }
        r
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of an LP solve. `primal`, `dual` and `basis` are empty unless the
/// status is `Optimal`; `objective_value` is `+inf` when infeasible and
/// `-inf` when unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub objective_value: f64,
    pub basis: Vec<usize>,
    /// Some nonbasic column has a zero reduced cost at the optimum.
    pub dual_degenerate: bool,
}

impl LpSolution {
    fn infeasible() -> Self {
        LpSolution {
            status: LpStatus::Infeasible,
            primal: Vec::new(),
            dual: Vec::new(),
            objective_value: f64::INFINITY,
            basis: Vec::new(),
            dual_degenerate: false,
        }
    }

    fn unbounded() -> Self {
        LpSolution {
            status: LpStatus::Unbounded,
            objective_value: f64::NEG_INFINITY,
            ..Self::infeasible()
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    One,
    Two,
}

/// One simplex pivot, recorded for debug dumps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PivotStep {
    pub phase: Phase,
    pub entering: usize,
    pub leaving: usize,
    pub objective: f64,
}

struct Tableau {
    cols: usize,
    a: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    reduced: Vec<f64>,
    z: f64,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    fn set_costs(&mut self, costs: &[f64]) {
        self.reduced.copy_from_slice(costs);
        self.z = 0.0;
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs[b];
            if cb == 0.0 {
                continue;
            }
            let row = &self.a[i * self.cols..(i + 1) * self.cols];
            for (d, aij) in self.reduced.iter_mut().zip(row) {
                *d -= cb * aij;
            }
            self.z += cb * self.rhs[i];
        }
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let cols = self.cols;
        let p = self.at(r, s);
        for v in &mut self.a[r * cols..(r + 1) * cols] {
            *v /= p;
        }
        self.rhs[r] /= p;
        let pivot_row: Vec<f64> = self.a[r * cols..(r + 1) * cols].to_vec();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.basis.len() {
            if i == r {
                continue;
            }
            let f = self.a[i * cols + s];
            if f == 0.0 {
                continue;
            }
            for (v, pr) in self.a[i * cols..(i + 1) * cols].iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            self.a[i * cols + s] = 0.0;
            self.rhs[i] -= f * pivot_rhs;
        }
        let f = self.reduced[s];
        for (d, pr) in self.reduced.iter_mut().zip(&pivot_row) {
            *d -= f * pr;
        }
        self.reduced[s] = 0.0;
        self.z += f * pivot_rhs;
        self.is_basic[self.basis[r]] = false;
        self.is_basic[s] = true;
        self.basis[r] = s;
    }

    /// Bland ratio test: minimum ratio, ties to the smallest basic index.
    fn leaving_row(&self, s: usize, pivot_tol: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.basis.len() {
            let aij = self.at(i, s);
            if aij <= pivot_tol {
                continue;
            }
            let ratio = self.rhs[i].max(0.0) / aij;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let tie = 1e-12 * br.abs().max(1.0);
                    if ratio < br - tie || ((ratio - br).abs() <= tie && self.basis[i] < self.basis[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

fn run_phase(
    t: &mut Tableau,
    phase: Phase,
    eligible: usize,
    tols: &Tolerances,
    budget: &mut usize,
    trace: &mut Vec<PivotStep>,
) -> Result<PhaseEnd, LpError> {
    loop {
        let entering = (0..eligible).find(|&j| !t.is_basic[j] && t.reduced[j] < -tols.opt);
        let Some(s) = entering else {
            return Ok(PhaseEnd::Optimal);
        };
        let Some(r) = t.leaving_row(s, tols.pivot) else {
            return Ok(PhaseEnd::Unbounded);
        };
        if *budget == 0 {
            return Err(LpError::IterationLimit(trace.len()));
        }
        *budget -= 1;
        let leaving = t.basis[r];
        t.pivot(r, s);
        trace.push(PivotStep { phase, entering: s, leaving, objective: t.z });
    }
}

pub fn solve_simplex(lp: &StandardLp, tols: &Tolerances) -> Result<LpSolution, LpError> {
    solve_simplex_traced(lp, tols).map(|(sol, _)| sol)
}

/// Same as [`solve_simplex`], also returning every pivot performed.
pub fn solve_simplex_traced(
    lp: &StandardLp,
    tols: &Tolerances,
) -> Result<(LpSolution, Vec<PivotStep>), LpError> {
    let m = lp.n_rows();
    let n = lp.n_vars();
    let cols = n + m;
    let mut trace = Vec::new();

    // rows with negative rhs are negated so the artificial basis is feasible
    let sign: Vec<f64> = lp.rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut a = vec![0.0; m * cols];
    for i in 0..m {
        for j in 0..n {
            a[i * cols + j] = sign[i] * lp.matrix[i][j];
        }
        a[i * cols + n + i] = 1.0;
    }
    let mut t = Tableau {
        cols,
        a,
        rhs: lp.rhs.iter().zip(&sign).map(|(b, s)| b * s).collect(),
        basis: (n..cols).collect(),
        is_basic: (0..cols).map(|j| j >= n).collect(),
        reduced: vec![0.0; cols],
        z: 0.0,
    };
    let mut budget = 50_000 + 200 * cols;

    let phase_one_costs: Vec<f64> = (0..cols).map(|j| if j >= n { 1.0 } else { 0.0 }).collect();
    t.set_costs(&phase_one_costs);
    run_phase(&mut t, Phase::One, cols, tols, &mut budget, &mut trace)?;
    if t.z > tols.feas {
        return Ok((LpSolution::infeasible(), trace));
    }

    // Drive zero-level artificials out of the basis. Rows where no original
    // column has a usable entry are redundant and keep their artificial.
    for r in 0..m {
        if t.basis[r] < n {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            let v = t.at(r, j).abs();
            if !t.is_basic[j] && v > 1e-9 && best.is_none_or(|(_, bv)| v > bv) {
                best = Some((j, v));
            }
        }
        if let Some((s, _)) = best {
            let leaving = t.basis[r];
            t.pivot(r, s);
            trace.push(PivotStep { phase: Phase::One, entering: s, leaving, objective: t.z });
        }
    }

    let mut costs = vec![0.0; cols];
    costs[..n].copy_from_slice(&lp.objective);
    t.set_costs(&costs);
    if let PhaseEnd::Unbounded = run_phase(&mut t, Phase::Two, n, tols, &mut budget, &mut trace)? {
        return Ok((LpSolution::unbounded(), trace));
    }

    let (primal, dual) = recover_from_basis(lp, &t.basis, &sign).unwrap_or_else(|| {
        let mut x = vec![0.0; n];
        for (i, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.rhs[i].max(0.0);
            }
        }
        let y = (0..m).map(|i| -t.reduced[n + i] * sign[i]).collect();
        (x, y)
    });
    let reduced = lp.reduced_costs(&dual);
    let dual_degenerate = (0..n).any(|j| !t.is_basic[j] && reduced[j].abs() <= tols.opt);
    let mut basis = t.basis.clone();
    basis.sort_unstable();
    Ok((
        LpSolution {
            status: LpStatus::Optimal,
            objective_value: lp.value(&primal),
            primal,
            dual,
            basis,
            dual_degenerate,
        },
        trace,
    ))
}

/// Recomputes `x_B = B^{-1} b` and `y = B^{-T} c_B` from the original data.
fn recover_from_basis(lp: &StandardLp, basis: &[usize], sign: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let m = lp.n_rows();
    let n = lp.n_vars();
    let column = |k: usize, i: usize| -> f64 {
        if k < n {
            lp.matrix[i][k]
        } else if k - n == i {
            // artificial of a negated row, expressed in the original orientation
            sign[i]
        } else {
            0.0
        }
    };
    let b_mat = DMatrix::from_fn(m, m, |i, k| column(basis[k], i));
    let x_b = solve_square(b_mat.clone(), &lp.rhs)?;
    let c_b: Vec<f64> = basis.iter().map(|&k| if k < n { lp.objective[k] } else { 0.0 }).collect();
    let y = solve_square(b_mat.transpose(), &c_b)?;
    let mut x = vec![0.0; n];
    for (k, &col) in basis.iter().enumerate() {
        if col < n {
            x[col] = x_b[k].max(0.0);
        }
    }
    Some((x, y))
}

// ---------------------------------------------------------------------------
// Brute-force oracle

pub const ENUM_MAX_VARS: usize = 24;
pub const ENUM_MAX_BASES: u128 = 1_000_000;
const ENUM_FEAS_TOL: f64 = 1e-9;

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Lexicographic k-subsets of `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for t in i + 1..k {
                    self.idx[t] = self.idx[t - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Independent rows of `[A | b]`, or `None` when the system is inconsistent.
fn independent_rows(rows: &[Vec<f64>], rhs: &[f64], n: usize) -> Option<Vec<usize>> {
    let a = matrix_from_rows(rows, n);
    let ab = DMatrix::from_fn(rows.len(), n + 1, |i, j| if j < n { rows[i][j] } else { rhs[i] });
    if rank(&ab) > rank(&a) {
        return None;
    }
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut trial = keep.clone();
        trial.push(i);
        let sub: Vec<Vec<f64>> = trial.iter().map(|&r| rows[r].clone()).collect();
        if rank(&matrix_from_rows(&sub, n)) == trial.len() {
            keep = trial;
        }
    }
    Some(keep)
}

struct Vertex {
    basis: Vec<usize>,
    x: Vec<f64>,
}

/// All basic feasible solutions of `rows x = rhs, x >= 0`, in lexicographic
/// basis order. `Ok(None)` means the system is inconsistent.
fn basic_feasible_solutions(rows: &[Vec<f64>], rhs: &[f64], n: usize) -> Result<Option<Vec<Vertex>>, LpError> {
    let Some(keep) = independent_rows(rows, rhs, n) else {
        return Ok(None);
    };
    let r = keep.len();
    let count = binomial(n, r);
    if count > ENUM_MAX_BASES {
        return Err(LpError::EnumerationGuard(format!("C({n},{r}) = {count} bases")));
    }
    let sub_rhs: Vec<f64> = keep.iter().map(|&i| rhs[i]).collect();
    let scale = sub_rhs.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut out = Vec::new();
    for cols in Combinations::new(n, r) {
        let b = DMatrix::from_fn(r, r, |i, k| rows[keep[i]][cols[k]]);
        let Some(x_b) = solve_square(b.clone(), &sub_rhs) else {
            continue;
        };
        if x_b.iter().any(|v| *v < -ENUM_FEAS_TOL) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (k, &c) in cols.iter().enumerate() {
            x[c] = x_b[k].max(0.0);
        }
        let resid = rows
            .iter()
            .zip(rhs)
            .map(|(row, bi)| (dot(row, &x) - bi).abs())
            .fold(0.0, f64::max);
        if resid > 1e-8 * scale {
            continue;
        }
        out.push(Vertex { basis: cols, x });
    }
    Ok(Some(out))
}

fn check_enum_size(lp: &StandardLp) -> Result<(), LpError> {
    if lp.n_vars() > ENUM_MAX_VARS {
        return Err(LpError::EnumerationGuard(format!(
            "{} variables exceeds the limit of {ENUM_MAX_VARS}",
            lp.n_vars()
        )));
    }
    Ok(())
}

/// Every distinct basic feasible solution (vertex) of the LP's polytope.
pub fn enumerate_vertices(lp: &StandardLp) -> Result<Vec<Vec<f64>>, LpError> {
    check_enum_size(lp)?;
    let vertices = basic_feasible_solutions(&lp.matrix, &lp.rhs, lp.n_vars())?.unwrap_or_default();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vertices {
        let duplicate = out
            .iter()
            .any(|u| u.iter().zip(&v.x).all(|(p, q)| (p - q).abs() <= 1e-9));
        if !duplicate {
            out.push(v.x);
        }
    }
    Ok(out)
}

/// Exhaustive vertex enumeration; unboundedness is detected by enumerating
/// the normalized extreme rays `{A d = 0, 1^T d = 1, d >= 0}`.
pub fn enumerate_bfs_optimum(lp: &StandardLp) -> Result<LpSolution, LpError> {
    check_enum_size(lp)?;
    let n = lp.n_vars();
    let Some(vertices) = basic_feasible_solutions(&lp.matrix, &lp.rhs, n)? else {
        return Ok(LpSolution::infeasible());
    };
    if vertices.is_empty() {
        return Ok(LpSolution::infeasible());
    }

    let mut ray_rows = lp.matrix.clone();
    ray_rows.push(vec![1.0; n]);
    let mut ray_rhs = vec![0.0; lp.n_rows()];
    ray_rhs.push(1.0);
    if let Some(rays) = basic_feasible_solutions(&ray_rows, &ray_rhs, n)? {
        if rays.iter().any(|d| lp.value(&d.x) < -1e-9) {
            return Ok(LpSolution::unbounded());
        }
    }

    let mut best: Option<&Vertex> = None;
    for v in &vertices {
        if best.is_none_or(|b| lp.value(&v.x) < lp.value(&b.x) - 1e-12) {
            best = Some(v);
        }
    }
    let best = best.expect("nonempty vertex list");

    // dual from the square basis system on a maximal independent row set
    let keep = independent_rows(&lp.matrix, &lp.rhs, n).unwrap_or_default();
    let b = DMatrix::from_fn(keep.len(), keep.len(), |i, k| lp.matrix[keep[i]][best.basis[k]]);
    let c_b: Vec<f64> = best.basis.iter().map(|&k| lp.objective[k]).collect();
    let mut dual = vec![0.0; lp.n_rows()];
    if let Some(y) = solve_square(b.transpose(), &c_b) {
        for (i, &row) in keep.iter().enumerate() {
            dual[row] = y[i];
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: lp.value(&best.x),
        primal: best.x.clone(),
        dual,
        basis: best.basis.clone(),
        dual_degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(c: &[f64], a: &[&[f64]], b: &[f64]) -> StandardLp {
        StandardLp::new(c.to_vec(), a.iter().map(|r| r.to_vec()).collect(), b.to_vec()).unwrap()
    }

    #[test]
    fn single_constraint_picks_first_column() {
        let p = lp(&[-1.0, -1.0], &[&[1.0, 1.0]], &[1.0]);
        let sol = solve_simplex(&p, &Tolerances::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective_value, -1.0);
        assert_eq!(sol.primal, vec![1.0, 0.0]);
        assert_eq!(sol.dual, vec![-1.0]);
    }

    #[test]
    fn sign_contradiction_is_infeasible() {
        let p = lp(&[1.0], &[&[1.0]], &[-1.0]);
        let sol = solve_simplex(&p, &Tolerances::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert_eq!(enumerate_bfs_optimum(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn free_descent_ray_is_unbounded() {
        let p = lp(&[-1.0, 0.0], &[&[0.0, 1.0]], &[1.0]);
        let sol = solve_simplex(&p, &Tolerances::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        assert_eq!(enumerate_bfs_optimum(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn oracle_on_single_constraint() {
        let p = lp(&[-1.0, -1.0], &[&[1.0, 1.0]], &[1.0]);
        let sol = enumerate_bfs_optimum(&p).unwrap();
        assert_eq!(sol.objective_value, -1.0);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        // x1 + x2 = 1 twice, x1 - x2 = 0
        let p = lp(
            &[1.0, 2.0],
            &[&[1.0, 1.0], &[1.0, 1.0], &[1.0, -1.0]],
            &[1.0, 1.0, 0.0],
        );
        let sol = solve_simplex(&p, &Tolerances::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 1.5).abs() < 1e-12);
        let gap = sol.objective_value - p.rhs().iter().zip(&sol.dual).map(|(b, y)| b * y).sum::<f64>();
        assert!(gap.abs() < 1e-12);
        assert!(p.reduced_costs(&sol.dual).iter().all(|r| *r > -1e-9));
        assert!((enumerate_bfs_optimum(&p).unwrap().objective_value - 1.5).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_redundant_rows_are_infeasible() {
        let p = lp(&[1.0, 1.0], &[&[1.0, 1.0], &[2.0, 2.0]], &[1.0, 3.0]);
        assert_eq!(solve_simplex(&p, &Tolerances::default()).unwrap().status, LpStatus::Infeasible);
        assert_eq!(enumerate_bfs_optimum(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn rejects_bad_dimensions_and_nan() {
        assert!(matches!(
            StandardLp::new(vec![1.0], vec![vec![1.0, 2.0]], vec![1.0]),
            Err(LpError::Dimension(_))
        ));
        assert!(matches!(
            StandardLp::new(vec![f64::NAN], vec![vec![1.0]], vec![1.0]),
            Err(LpError::NonFinite(_))
        ));
    }

    #[test]
    fn enumeration_guard() {
        let p = StandardLp::new(vec![0.0; 30], vec![vec![1.0; 30]], vec![1.0]).unwrap();
        assert!(matches!(enumerate_bfs_optimum(&p), Err(LpError::EnumerationGuard(_))));
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(binomial(24, 12), 2_704_156);
    }

    #[test]
    fn trace_records_pivots() {
        let p = lp(&[-1.0, -1.0], &[&[1.0, 1.0]], &[1.0]);
        let (_, trace) = solve_simplex_traced(&p, &Tolerances::default()).unwrap();
        assert!(!trace.is_empty());
        assert_eq!(trace[0].phase, Phase::One);
    }
}
