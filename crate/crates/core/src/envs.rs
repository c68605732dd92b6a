//! Benchmark environments.
//!
//! The spreading process lives on a line by default. Each agent carries two
//! binary flags `(s1, s2)`, encoded as local state `s1 + 2 * s2`, so local
//! state 1 is the penalized "reached but unprotected" state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decay::{c_matrix, DEFAULT_DIAGNOSTIC_CAP};
use crate::error::{Error, Result};
use crate::graph::GraphSpec;
use crate::mdp::{AgentSpace, FactoredMdp, InitialDistribution, MdpParts, MixtureComponent};

pub fn spreading_state(s1: usize, s2: usize) -> usize {
    s1 + 2 * s2
}

pub fn spreading_flags(state: usize) -> (usize, usize) {
    (state & 1, state >> 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadingParams {
    pub n: usize,
    /// Probability that a reached agent's first flag does not switch on.
    #[serde(default = "default_p1")]
    pub p1: f64,
    /// Probability that the protection flag is lost.
    #[serde(default = "default_p2")]
    pub p2: f64,
    /// Cost of the protective action.
    #[serde(default = "default_cost")]
    pub c: f64,
    /// Chance that the protective action takes hold.
    #[serde(default = "default_p_eff")]
    pub p_eff: f64,
    /// Overrides the line graph. Must have `n` agents.
    #[serde(default)]
    pub graph: Option<GraphSpec>,
}

fn default_p1() -> f64 {
    0.6
}
fn default_p2() -> f64 {
    0.7
}
fn default_cost() -> f64 {
    0.3
}
fn default_p_eff() -> f64 {
    0.4
}

impl SpreadingParams {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            p1: default_p1(),
            p2: default_p2(),
            c: default_cost(),
            p_eff: default_p_eff(),
            graph: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2), ("p_eff", self.p_eff)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} = {p} must lie in (0, 1)")));
            }
        }
        if !(0.0..=1.0).contains(&self.c) {
            return Err(Error::InvalidParameter(format!("c = {} must lie in [0, 1]", self.c)));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("spreading needs at least one agent".into()));
        }
        Ok(())
    }
}

/// Initial distribution with the protection flag uniform everywhere and the
/// first flag on at exactly one uniformly chosen agent.
pub fn single_seed_start(n: usize) -> InitialDistribution {
    let off = vec![0.5, 0.0, 0.5, 0.0];
    let on = vec![0.0, 0.5, 0.0, 0.5];
    InitialDistribution::Mixture {
        components: (0..n)
            .map(|seed| MixtureComponent {
                weight: 1.0 / n as f64,
                marginals: (0..n).map(|i| if i == seed { on.clone() } else { off.clone() }).collect(),
            })
            .collect(),
    }
}

/// Builds the spreading process. `rho = None` uses [`single_seed_start`].
/// Defaults (used by truncation) are all-clear states and no action.
pub fn spreading_env(p: &SpreadingParams, gamma: f64, tau: f64, rho: Option<InitialDistribution>) -> Result<FactoredMdp> {
    p.validate()?;
    let graph = match &p.graph {
        Some(spec) if spec.n() != p.n => {
            return Err(Error::InvalidParameter("spreading graph size differs from n".into()))
        }
        Some(spec) => spec.build()?,
        None => GraphSpec::Line { n: p.n }.build()?,
    };
    let n = p.n;
    let spaces = vec![AgentSpace { states: 4, actions: 2 }; n];
    let kernels = (0..n)
        .map(|i| {
            let members = graph.neighborhood(i, 1).members;
            let own = members.iter().position(|&j| j == i).expect("center is a member");
            let rows = 4usize.pow(members.len() as u32);
            let mut table = Vec::with_capacity(rows * 2 * 4);
            for x in 0..rows {
                let digits: Vec<usize> = (0..members.len()).map(|k| (x >> (2 * k)) & 3).collect();
                let reached = digits.iter().any(|&d| spreading_flags(d).0 == 1);
                let protected = spreading_flags(digits[own]).1 == 1;
                for a in 0..2 {
                    let on1 = if reached { 1.0 - p.p1 } else { 0.0 };
                    let bar2 = if protected {
                        1.0
                    } else if a == 1 {
                        p.p_eff
                    } else {
                        0.0
                    };
                    let on2 = bar2 * (1.0 - p.p2);
                    for next in 0..4 {
                        let (f1, f2) = spreading_flags(next);
                        let q1 = if f1 == 1 { on1 } else { 1.0 - on1 };
                        let q2 = if f2 == 1 { on2 } else { 1.0 - on2 };
                        table.push(q1 * q2);
                    }
                }
            }
            table
        })
        .collect();
    let reward: Vec<f64> = (0..4)
        .flat_map(|s| {
            let state_part = if spreading_flags(s) == (1, 0) { 0.0 } else { 1.0 };
            [state_part + 1.0, state_part + 1.0 - p.c]
        })
        .collect();
    FactoredMdp::new(MdpParts {
        rho: rho.unwrap_or_else(|| single_seed_start(n)),
        graph,
        spaces,
        kernels,
        rewards: vec![reward; n],
        reward_bound: 2.0,
        gamma,
        tau,
        default_state: vec![0; n],
        default_action: vec![0; n],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMdpParams {
    pub graph: GraphSpec,
    #[serde(default = "two")]
    pub states: usize,
    #[serde(default = "two")]
    pub actions: usize,
    /// Budget for `max_i sum_j C_ij`.
    pub interaction_budget: f64,
    #[serde(default = "one")]
    pub reward_bound: f64,
    pub gamma: f64,
    pub tau: f64,
    #[serde(default)]
    pub seed: u64,
}

fn two() -> usize {
    2
}
fn one() -> f64 {
    1.0
}

const BISECTION_STEPS: usize = 64;

/// Random instance whose kernels mix a neighbor-dependent random part with
/// weight `lambda` and a constant row with weight `1 - lambda`. `lambda` is
/// the largest value (found by bisection) whose C matrix meets the budget.
/// Rewards are uniform in `[0, reward_bound]`; `rho` is uniform.
pub fn random_factored_mdp(p: &RandomMdpParams) -> Result<FactoredMdp> {
    if !(p.interaction_budget >= 0.0) {
        return Err(Error::InvalidParameter("interaction budget must be non-negative".into()));
    }
    if p.states == 0 || p.actions == 0 {
        return Err(Error::InvalidParameter("state and action counts must be positive".into()));
    }
    let graph = p.graph.build()?;
    let n = graph.n();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let spaces = vec![AgentSpace { states: p.states, actions: p.actions }; n];
    let mut random_rows = Vec::with_capacity(n);
    let mut base_rows = Vec::with_capacity(n);
    for i in 0..n {
        let rows = p.states.pow(graph.neighborhood(i, 1).len() as u32) * p.actions;
        random_rows.push((0..rows).flat_map(|_| random_distribution(p.states, &mut rng)).collect::<Vec<f64>>());
        base_rows.push(random_distribution(p.states, &mut rng));
    }
    let rewards: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p.states * p.actions).map(|_| rng.gen::<f64>() * p.reward_bound).collect())
        .collect();
    let build = |lambda: f64| -> Result<FactoredMdp> {
        let kernels = random_rows
            .iter()
            .zip(&base_rows)
            .map(|(r, b)| {
                r.chunks(p.states)
                    .flat_map(|row| row.iter().zip(b).map(|(x, y)| lambda * x + (1.0 - lambda) * y))
                    .collect()
            })
            .collect();
        FactoredMdp::new(MdpParts {
            graph: graph.clone(),
            spaces: spaces.clone(),
            kernels,
            rewards: rewards.clone(),
            reward_bound: p.reward_bound,
            gamma: p.gamma,
            tau: p.tau,
            rho: InitialDistribution::uniform(&spaces),
            default_state: vec![0; n],
            default_action: vec![0; n],
        })
    };
    let worst = |m: &FactoredMdp| -> Result<f64> {
        let c = c_matrix(m, DEFAULT_DIAGNOSTIC_CAP)?;
        Ok((0..n).map(|i| c.row_sum(i)).fold(0.0, f64::max))
    };
    let full = build(1.0)?;
    if worst(&full)? <= p.interaction_budget {
        return Ok(full);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if worst(&build(mid)?)? <= p.interaction_budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let m = build(lo)?;
    if worst(&m)? > p.interaction_budget {
        return Err(Error::InvalidParameter(format!(
            "bisection did not meet interaction budget {} in {BISECTION_STEPS} steps",
            p.interaction_budget
        )));
    }
    Ok(m)
}

/// Strictly positive random distribution.
fn random_distribution<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| 0.05 + rng.gen::<f64>()).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / z).collect()
}
