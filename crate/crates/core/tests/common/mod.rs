#![allow(dead_code)]

use acmdp::lp::StandardLp;
use acmdp::oracles::analyze_policy_chain;
use acmdp::FiniteMdp;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normalized(weights: Vec<f64>) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mut row: Vec<f64> = weights.iter().map(|w| w / total).collect();
    // push the rounding error onto the largest entry
    let err = 1.0 - row.iter().sum::<f64>();
    let k = (0..row.len()).max_by(|&i, &j| row[i].total_cmp(&row[j])).unwrap();
    row[k] += err;
    row
}

fn sparse_row(rng: &mut ChaCha8Rng, targets: &[usize], n: usize) -> Vec<f64> {
    let k = rng.gen_range(1..=targets.len().min(3));
    let chosen: Vec<usize> = targets.choose_multiple(rng, k).copied().collect();
    let weights = normalized((0..k).map(|_| rng.gen_range(0.1..1.0)).collect());
    let mut row = vec![0.0; n];
    for (y, w) in chosen.into_iter().zip(weights) {
        row[y] = w;
    }
    row
}

fn action_sets(rng: &mut ChaCha8Rng, n: usize, max_actions: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=max_actions);
            let mut ids: Vec<usize> = (0..max_actions + 1).collect::<Vec<_>>().choose_multiple(rng, k).copied().collect();
            ids.sort_unstable();
            ids
        })
        .collect()
}

fn cost_vector(rng: &mut ChaCha8Rng, pairs: usize) -> Vec<f64> {
    (0..pairs).map(|_| (rng.gen_range(0.0..10.0f64) * 100.0).round() / 100.0).collect()
}

/// Sparse model with up to `max_states` states and 3 actions per state.
/// About a third of the draws split the states into two closed blocks so
/// that some policies, or all of them, are multichain.
pub fn random_mdp_with(rng: &mut ChaCha8Rng, max_states: usize, n_constraints: usize) -> FiniteMdp {
    let n = rng.gen_range(1..=max_states);
    let actions = action_sets(rng, n, 3);
    let split = n >= 2 && rng.gen_bool(0.35);
    let cut = if split { rng.gen_range(1..n) } else { n };
    let mut kernel = Vec::new();
    for (x, acts) in actions.iter().enumerate() {
        let block: Vec<usize> = if x < cut { (0..cut).collect() } else { (cut..n).collect() };
        for _ in acts {
            kernel.push(sparse_row(rng, &block, n));
        }
    }
    let pairs = kernel.len();
    let costs = (0..=n_constraints).map(|_| cost_vector(rng, pairs)).collect();
    FiniteMdp::from_parts(n, actions, kernel, costs, None).expect("generator emits well-formed models")
}

pub fn random_mdp(seed: u64) -> FiniteMdp {
    random_mdp_with(&mut rng(seed), 6, 0)
}

/// Every kernel entry is positive, so every policy is unichain and aperiodic.
pub fn random_unichain(seed: u64) -> FiniteMdp {
    let mut rng = rng(seed);
    let n = rng.gen_range(2..=6);
    let actions = action_sets(&mut rng, n, 3);
    let mut kernel = Vec::new();
    for acts in &actions {
        for _ in acts {
            kernel.push(normalized((0..n).map(|_| rng.gen_range(0.05..1.0)).collect()));
        }
    }
    let costs = vec![cost_vector(&mut rng, kernel.len())];
    FiniteMdp::from_parts(n, actions, kernel, costs, None).unwrap()
}

/// Budgets anchored at a random deterministic policy's recurrent class
/// (feasible by construction) or, one time in five, below the smallest
/// pair cost of some constraint (infeasible by construction).
pub fn random_budgets(rng: &mut ChaCha8Rng, mdp: &FiniteMdp) -> Vec<f64> {
    let d = mdp.n_constraints();
    if rng.gen_bool(0.2) {
        let i = rng.gen_range(1..=d);
        let floor = mdp.cost(i).iter().copied().fold(f64::INFINITY, f64::min);
        if floor > 0.0 {
            let mut kappa = vec![100.0; d];
            kappa[i - 1] = floor / 2.0;
            return kappa;
        }
    }
    let f: Vec<usize> = (0..mdp.n_states()).map(|x| *mdp.actions(x).choose(rng).unwrap()).collect();
    let chain = analyze_policy_chain(mdp, &f).expect("policy is admissible");
    let class = rng.gen_range(0..chain.classes.len());
    (1..=d)
        .map(|i| {
            let slack = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..2.0) };
            chain.class_costs[class][i] + slack
        })
        .collect()
}

pub fn random_constrained(seed: u64) -> (FiniteMdp, Vec<f64>) {
    let mut rng = rng(seed);
    let d = rng.gen_range(1..=2);
    let mdp = random_mdp_with(&mut rng, 4, d);
    let kappa = random_budgets(&mut rng, &mdp);
    (mdp, kappa)
}

pub fn random_lex(seed: u64) -> (FiniteMdp, Vec<f64>) {
    let mut rng = rng(seed);
    let d = rng.gen_range(1..=2);
    let mdp = random_mdp_with(&mut rng, 3, d);
    let kappa = random_budgets(&mut rng, &mdp);
    (mdp, kappa)
}

/// Standard-form LP with small integer data; some draws are infeasible or
/// unbounded.
pub fn random_lp(seed: u64) -> StandardLp {
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=10);
    let m = rng.gen_range(1..=6.min(n));
    let int = |rng: &mut ChaCha8Rng, lo: i32, hi: i32| rng.gen_range(lo..=hi) as f64;
    let matrix: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| if rng.gen_bool(0.3) { 0.0 } else { int(&mut rng, -3, 5) }).collect())
        .collect();
    let rhs = if rng.gen_bool(0.8) {
        let x0: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { 0.0 } else { int(&mut rng, 0, 3) }).collect();
        matrix.iter().map(|row| row.iter().zip(&x0).map(|(a, x)| a * x).sum()).collect()
    } else {
        (0..m).map(|_| int(&mut rng, -4, 6)).collect()
    };
    let objective = (0..n).map(|_| int(&mut rng, -4, 6)).collect();
    StandardLp::new(objective, matrix, rhs).unwrap()
}
