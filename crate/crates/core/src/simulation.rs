//! Seeded Monte-Carlo simulation of the chain induced by a stationary pair.
//!
//! Randomness comes from ChaCha8 keyed with the little-endian seed bytes
//! (remaining key bytes zero, stream 0). Each uniform is
//! `(next_u64 >> 11) * 2^-53`, and every categorical draw uses inverse-CDF
//! sampling over the entries in index order. Per step the draws are: action,
//! then next state; the initial state takes one draw before the first step.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::model::FiniteMdp;
use crate::occupation::StationaryPair;

pub const GENERATOR: &str = "chacha8-le-seed-key/u53-inverse-cdf";
pub const BATCHES: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("horizon must be at least one step")]
    EmptyHorizon,
    #[error("stationary pair has empty support")]
    EmptySupport,
    #[error("initial distribution has length {0}, expected {1}")]
    InitialLength(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimOptions {
    /// Start from this distribution instead of the pair's `p`.
    pub initial: Option<Vec<f64>>,
    /// Steps simulated before averaging starts.
    pub burn_in: u64,
    /// Record every averaged step.
    pub record_trace: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: u64,
    pub state: usize,
    pub action: usize,
    pub costs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub horizon: u64,
    pub seed: u64,
    pub generator: &'static str,
    /// `T^-1 sum_k c_i(x_k, a_k)` for every cost `i`.
    pub pathwise_avg: Vec<f64>,
    /// Batch-means standard error per cost.
    pub stderr_est: Vec<f64>,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Sampler { rng: ChaCha8Rng::from_seed(key) }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Index drawn from the weights `probs`; rounding slack falls on the
    /// last positive entry.
    fn categorical(&mut self, probs: impl Iterator<Item = f64> + Clone) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        let mut last = 0;
        for (k, p) in probs.enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = k;
            if u < acc {
                return k;
            }
        }
        last
    }
}

pub fn simulate(
    mdp: &FiniteMdp,
    pair: &StationaryPair,
    steps: u64,
    seed: u64,
    opts: &SimOptions,
) -> Result<SimResult, SimError> {
    if steps == 0 {
        return Err(SimError::EmptyHorizon);
    }
    if pair.support.is_empty() {
        return Err(SimError::EmptySupport);
    }
    let start = opts.initial.as_deref().unwrap_or(&pair.dist);
    if start.len() != mdp.n_states() {
        return Err(SimError::InitialLength(start.len(), mdp.n_states()));
    }
    let n_costs = mdp.n_costs();
    let index = mdp.index();
    let mut sampler = Sampler::new(seed);
    let mut x = sampler.categorical(start.iter().copied());

    let batches = BATCHES.min(steps as usize) as u64;
    let batch_len = steps / batches;
    let mut totals = vec![0.0; n_costs];
    let mut batch_sums = vec![vec![0.0; batches as usize]; n_costs];
    let mut trace = Vec::new();

    for step in 0..opts.burn_in + steps {
        let cols = index.columns_of(x);
        let offset = cols.start;
        let j = offset + sampler.categorical(pair.policy[cols].iter().copied());
        let k = step.checked_sub(opts.burn_in);
        if let Some(k) = k {
            let batch = k / batch_len;
            for i in 0..n_costs {
                let c = mdp.cost(i)[j];
                totals[i] += c;
                if batch < batches {
                    batch_sums[i][batch as usize] += c;
                }
            }
            if opts.record_trace {
                trace.push(TraceRow {
                    step: k,
                    state: x,
                    action: index.pair(j).1,
                    costs: (0..n_costs).map(|i| mdp.cost(i)[j]).collect(),
                });
            }
        }
        x = sampler.categorical(mdp.kernel_row(j).iter().copied());
    }

    let pathwise_avg: Vec<f64> = totals.iter().map(|t| t / steps as f64).collect();
    let stderr_est = batch_sums
        .iter()
        .map(|sums| {
            if batches < 2 {
                return 0.0;
            }
            let means: Vec<f64> = sums.iter().map(|s| s / batch_len as f64).collect();
            let mean = means.iter().sum::<f64>() / batches as f64;
            let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
            (var / batches as f64).sqrt()
        })
        .collect();
    Ok(SimResult {
        horizon: steps,
        seed,
        generator: GENERATOR,
        pathwise_avg,
        stderr_est,
        trace,
    })
}
