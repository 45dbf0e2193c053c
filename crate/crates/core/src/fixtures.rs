//! Small hand-checkable models used by tests, the CLI and the docs.

use crate::model::{build_queue_truncation, FiniteMdp, QueueSpec};

pub const STAY: usize = 0;
pub const GO: usize = 1;

/// One state, one self-loop action with cost `cost`.
pub fn self_loop(cost: f64) -> FiniteMdp {
    FiniteMdp::from_parts(1, vec![vec![0]], vec![vec![1.0]], vec![vec![cost]], None)
        .expect("well-formed")
        .with_name("self-loop")
}

/// Deterministic 2-cycle `0 -> 1 -> 0` with `c0 = (0, 2)`.
pub fn two_cycle() -> FiniteMdp {
    FiniteMdp::from_parts(
        2,
        vec![vec![0], vec![0]],
        vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        vec![vec![0.0, 2.0]],
        None,
    )
    .expect("well-formed")
    .with_name("two-cycle")
}

/// State 0 may stay (cost 3) or go to state 1 (cost 0); state 1 returns (cost 1).
pub fn stay_or_go() -> FiniteMdp {
    FiniteMdp::from_parts(
        2,
        vec![vec![STAY, GO], vec![0]],
        vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]],
        vec![vec![3.0, 0.0, 1.0]],
        None,
    )
    .expect("well-formed")
    .with_name("stay-or-go")
}

/// One state with self-loop actions `a1, a2`; `c0 = (0, 1)`, `c1 = (2, c1_a2)`.
pub fn mixing(c1_a2: f64, kappa: f64) -> FiniteMdp {
    FiniteMdp::from_parts(
        1,
        vec![vec![0, 1]],
        vec![vec![1.0], vec![1.0]],
        vec![vec![0.0, 1.0], vec![2.0, c1_a2]],
        Some(vec![kappa]),
    )
    .expect("well-formed")
    .with_name("mixing")
}

/// One state with three self-loop actions; `c0 = (0, 0, 1)`, `c1 = (5, 2, 0)`.
pub fn three_actions(kappa: f64) -> FiniteMdp {
    FiniteMdp::from_parts(
        1,
        vec![vec![0, 1, 2]],
        vec![vec![1.0]; 3],
        vec![vec![0.0, 0.0, 1.0], vec![5.0, 2.0, 0.0]],
        Some(vec![kappa]),
    )
    .expect("well-formed")
    .with_name("three-actions")
}

/// Two isolated self-loop states with costs 3 and 1.
pub fn two_islands() -> FiniteMdp {
    FiniteMdp::from_parts(
        2,
        vec![vec![0], vec![0]],
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![vec![3.0, 1.0]],
        None,
    )
    .expect("well-formed")
    .with_name("two-islands")
}

/// Queue parameters used throughout the tests: `lambda = 0.3`, `sigma = 0.6`,
/// `hc = 1`, `rc = 5`.
pub fn queue_spec(n: usize) -> QueueSpec {
    QueueSpec {
        arrival_prob: 0.3,
        service_prob: 0.6,
        holding_coeff: 1.0,
        rejection_cost: 5.0,
        truncation_level: n,
    }
}

pub fn queue(n: usize) -> FiniteMdp {
    build_queue_truncation(&queue_spec(n)).expect("valid queue parameters")
}
