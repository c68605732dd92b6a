//! Factored networked MDPs.
//!
//! Every agent owns a finite local state and action space. Its next local
//! state is drawn from a kernel that only sees the states of its 1-hop
//! neighborhood and its own action, and its reward only depends on its own
//! state and action. The global kernel is the product of the local kernels.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codec::SubsetCodec;
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, NetworkGraph};

/// Rows must sum to one within this tolerance.
pub const PROB_TOL: f64 = 1e-12;
/// Rows within this tolerance are renormalized, anything further is rejected.
pub const RENORM_TOL: f64 = 1e-9;

/// Default cap on any enumerated product space.
pub const DEFAULT_SPACE_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSpace {
    pub states: usize,
    pub actions: usize,
}

/// Dense local kernel `P_i(s_i' | s_{N_i}, a_i)`.
#[derive(Debug, Clone)]
pub struct LocalKernel {
    codec: SubsetCodec,
    actions: usize,
    next_states: usize,
    table: Vec<f64>,
}

impl LocalKernel {
    pub fn codec(&self) -> &SubsetCodec {
        &self.codec
    }

    /// Distribution over the next local state given the neighborhood-state
    /// index and the local action.
    pub fn row(&self, neighborhood_index: usize, action: usize) -> &[f64] {
        let start = (neighborhood_index * self.actions + action) * self.next_states;
        &self.table[start..start + self.next_states]
    }

    pub fn row_for(&self, global_state: &[usize], action: usize) -> &[f64] {
        self.row(self.codec.encode_global(global_state), action)
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }
}

/// Initial state distribution `rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialDistribution {
    /// Independent per-agent marginals.
    Product { marginals: Vec<Vec<f64>> },
    /// Weighted mixture of product distributions.
    Mixture { components: Vec<MixtureComponent> },
    /// Point mass at one global state.
    PointMass { state: Vec<usize> },
    /// Explicit table over global state indices.
    Dense { probs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub marginals: Vec<Vec<f64>>,
}

impl InitialDistribution {
    pub fn uniform(spaces: &[AgentSpace]) -> Self {
        InitialDistribution::Product {
            marginals: spaces
                .iter()
                .map(|s| vec![1.0 / s.states as f64; s.states])
                .collect(),
        }
    }

    fn validate(&self, spaces: &[AgentSpace]) -> Result<()> {
        let check_marginals = |m: &Vec<Vec<f64>>| -> Result<()> {
            if m.len() != spaces.len() {
                return Err(Error::InvalidModel("rho marginal count != agent count".into()));
            }
            for (k, (row, sp)) in m.iter().zip(spaces).enumerate() {
                if row.len() != sp.states {
                    return Err(Error::InvalidModel(format!("rho marginal {k} has wrong length")));
                }
                check_distribution(row, &format!("rho marginal {k}"))?;
            }
            Ok(())
        };
        match self {
            InitialDistribution::Product { marginals } => check_marginals(marginals),
            InitialDistribution::Mixture { components } => {
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if components.iter().any(|c| c.weight < 0.0) || (total - 1.0).abs() > PROB_TOL {
                    return Err(Error::InvalidModel("rho mixture weights must sum to 1".into()));
                }
                components.iter().try_for_each(|c| check_marginals(&c.marginals))
            }
            InitialDistribution::PointMass { state } => {
                if state.len() != spaces.len() || state.iter().zip(spaces).any(|(s, sp)| *s >= sp.states) {
                    return Err(Error::InvalidModel("rho point mass out of range".into()));
                }
                Ok(())
            }
            InitialDistribution::Dense { probs } => {
                let size: u128 = spaces.iter().map(|s| s.states as u128).product();
                if probs.len() as u128 != size {
                    return Err(Error::InvalidModel("dense rho has wrong length".into()));
                }
                check_distribution(probs, "dense rho")
            }
        }
    }

    /// Probability of a global state (given as a tuple and its global index).
    pub fn prob(&self, state: &[usize], index: usize) -> f64 {
        let product = |m: &Vec<Vec<f64>>| state.iter().zip(m).map(|(&s, row)| row[s]).product::<f64>();
        match self {
            InitialDistribution::Product { marginals } => product(marginals),
            InitialDistribution::Mixture { components } => components
                .iter()
                .map(|c| c.weight * product(&c.marginals))
                .sum(),
            InitialDistribution::PointMass { state: p } => {
                if p.as_slice() == state {
                    1.0
                } else {
                    0.0
                }
            }
            InitialDistribution::Dense { probs } => probs[index],
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, spaces: &[AgentSpace], rng: &mut R) -> Vec<usize> {
        match self {
            InitialDistribution::Product { marginals } => {
                marginals.iter().map(|row| sample_categorical(row, rng)).collect()
            }
            InitialDistribution::Mixture { components } => {
                let weights: Vec<f64> = components.iter().map(|c| c.weight).collect();
                let c = &components[sample_categorical(&weights, rng)];
                c.marginals.iter().map(|row| sample_categorical(row, rng)).collect()
            }
            InitialDistribution::PointMass { state } => state.clone(),
            InitialDistribution::Dense { probs } => {
                let mut idx = sample_categorical(probs, rng);
                spaces
                    .iter()
                    .map(|sp| {
                        let v = idx % sp.states;
                        idx /= sp.states;
                        v
                    })
                    .collect()
            }
        }
    }
}

/// Draws an index from a probability vector with a single uniform draw.
pub fn sample_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = k;
            acc += p;
            if u < acc {
                return k;
            }
        }
    }
    last_positive
}

fn check_distribution(row: &[f64], what: &str) -> Result<()> {
    if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidModel(format!("{what} has a negative or non-finite entry")));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidModel(format!("{what} sums to {sum}, not 1")));
    }
    Ok(())
}

/// Raw ingredients of a [`FactoredMdp`]; validated by [`FactoredMdp::new`].
#[derive(Debug, Clone)]
pub struct MdpParts {
    pub graph: NetworkGraph,
    pub spaces: Vec<AgentSpace>,
    /// Per agent, rows laid out as `[(neighborhood_index * actions + a) * states + s']`
    /// where the neighborhood index encodes the 1-hop neighborhood states
    /// (sorted members, first member least significant).
    pub kernels: Vec<Vec<f64>>,
    /// Per agent, `rewards[i][s_i * actions + a_i]`.
    pub rewards: Vec<Vec<f64>>,
    pub reward_bound: f64,
    pub gamma: f64,
    pub tau: f64,
    pub rho: InitialDistribution,
    pub default_state: Vec<usize>,
    pub default_action: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct FactoredMdp {
    graph: NetworkGraph,
    spaces: Vec<AgentSpace>,
    kernels: Vec<LocalKernel>,
    rewards: Vec<Vec<f64>>,
    reward_bound: f64,
    gamma: f64,
    tau: f64,
    rho: InitialDistribution,
    default_state: Vec<usize>,
    default_action: Vec<usize>,
}

impl FactoredMdp {
    pub fn new(parts: MdpParts) -> Result<Self> {
        let MdpParts {
            graph,
            spaces,
            kernels,
            rewards,
            reward_bound,
            gamma,
            tau,
            rho,
            default_state,
            default_action,
        } = parts;
        let n = graph.n();
        if spaces.len() != n || kernels.len() != n || rewards.len() != n {
            return Err(Error::InvalidModel("per-agent table count does not match the graph".into()));
        }
        if spaces.iter().any(|s| s.states == 0 || s.actions == 0) {
            return Err(Error::InvalidModel("state and action spaces must be non-empty".into()));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidModel(format!("gamma = {gamma} must lie in (0, 1)")));
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::InvalidModel(format!("tau = {tau} must be non-negative")));
        }
        if !(reward_bound >= 0.0 && reward_bound.is_finite()) {
            return Err(Error::InvalidModel("reward bound must be finite and non-negative".into()));
        }
        let state_sizes: Vec<usize> = spaces.iter().map(|s| s.states).collect();
        let mut local = Vec::with_capacity(n);
        for (i, mut table) in kernels.into_iter().enumerate() {
            let members = graph.neighborhood(i, 1).members;
            let codec = SubsetCodec::new(&members, &state_sizes, DEFAULT_SPACE_CAP)?;
            let sp = spaces[i];
            let expected = codec.size() * sp.actions * sp.states;
            if table.len() != expected {
                return Err(Error::InvalidModel(format!(
                    "kernel of agent {i} has {} entries, expected {expected}",
                    table.len()
                )));
            }
            for (r, row) in table.chunks_mut(sp.states).enumerate() {
                normalize_row(row).map_err(|msg| {
                    Error::InvalidModel(format!("kernel of agent {i}, row {r}: {msg}"))
                })?;
            }
            local.push(LocalKernel {
                codec,
                actions: sp.actions,
                next_states: sp.states,
                table,
            });
        }
        for (i, (r, sp)) in rewards.iter().zip(&spaces).enumerate() {
            if r.len() != sp.states * sp.actions {
                return Err(Error::InvalidModel(format!("reward table of agent {i} has wrong size")));
            }
            if r.iter().any(|&x| !(x >= 0.0 && x <= reward_bound)) {
                return Err(Error::InvalidModel(format!(
                    "reward of agent {i} outside [0, {reward_bound}]"
                )));
            }
        }
        rho.validate(&spaces)?;
        for (what, tuple, size) in [
            ("default state", &default_state, spaces.iter().map(|s| s.states).collect::<Vec<_>>()),
            ("default action", &default_action, spaces.iter().map(|s| s.actions).collect()),
        ] {
            if tuple.len() != n || tuple.iter().zip(&size).any(|(v, s)| v >= s) {
                return Err(Error::InvalidModel(format!("{what} out of range")));
            }
        }
        Ok(Self {
            graph,
            spaces,
            kernels: local,
            rewards,
            reward_bound,
            gamma,
            tau,
            rho,
            default_state,
            default_action,
        })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    pub fn spaces(&self) -> &[AgentSpace] {
        &self.spaces
    }

    pub fn state_sizes(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.states).collect()
    }

    pub fn action_sizes(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.actions).collect()
    }

    pub fn max_actions(&self) -> usize {
        self.spaces.iter().map(|s| s.actions).max().unwrap_or(1)
    }

    pub fn kernel(&self, i: usize) -> &LocalKernel {
        &self.kernels[i]
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn reward_bound(&self) -> f64 {
        self.reward_bound
    }

    pub fn rho(&self) -> &InitialDistribution {
        &self.rho
    }

    pub fn default_state(&self) -> &[usize] {
        &self.default_state
    }

    pub fn default_action(&self) -> &[usize] {
        &self.default_action
    }

    /// Same model with a different discount and entropy weight.
    pub fn with_discount_and_tau(&self, gamma: f64, tau: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) || !(tau >= 0.0) {
            return Err(Error::InvalidModel("gamma must lie in (0,1) and tau >= 0".into()));
        }
        let mut out = self.clone();
        out.gamma = gamma;
        out.tau = tau;
        Ok(out)
    }

    pub fn with_defaults(&self, state: Vec<usize>, action: Vec<usize>) -> Result<Self> {
        let mut parts = self.to_parts();
        parts.default_state = state;
        parts.default_action = action;
        Self::new(parts)
    }

    pub fn with_rho(&self, rho: InitialDistribution) -> Result<Self> {
        rho.validate(&self.spaces)?;
        let mut out = self.clone();
        out.rho = rho;
        Ok(out)
    }

    pub fn to_parts(&self) -> MdpParts {
        MdpParts {
            graph: self.graph.clone(),
            spaces: self.spaces.clone(),
            kernels: self.kernels.iter().map(|k| k.table.clone()).collect(),
            rewards: self.rewards.clone(),
            reward_bound: self.reward_bound,
            gamma: self.gamma,
            tau: self.tau,
            rho: self.rho.clone(),
            default_state: self.default_state.clone(),
            default_action: self.default_action.clone(),
        }
    }

    pub fn local_reward(&self, i: usize, state: usize, action: usize) -> f64 {
        self.rewards[i][state * self.spaces[i].actions + action]
    }

    /// Mean of the local rewards.
    pub fn global_reward(&self, s: &[usize], a: &[usize]) -> f64 {
        let total: f64 = (0..self.n()).map(|i| self.local_reward(i, s[i], a[i])).sum();
        total / self.n() as f64
    }

    /// Product of the local kernels.
    pub fn global_transition_prob(&self, s: &[usize], a: &[usize], next: &[usize]) -> f64 {
        self.kernels
            .iter()
            .enumerate()
            .map(|(i, k)| k.row_for(s, a[i])[next[i]])
            .product()
    }

    /// Draws the next global state, agents in ascending order.
    pub fn sample_step<R: Rng + ?Sized>(&self, s: &[usize], a: &[usize], rng: &mut R) -> Vec<usize> {
        self.kernels
            .iter()
            .enumerate()
            .map(|(i, k)| sample_categorical(k.row_for(s, a[i]), rng))
            .collect()
    }

    pub fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        self.rho.sample(&self.spaces, rng)
    }

    /// Global state that agrees with `partial` on `subset` and with the
    /// default state elsewhere.
    pub fn extend_state(&self, subset: &[usize], partial: &[usize]) -> Vec<usize> {
        extend(&self.default_state, subset, partial)
    }

    pub fn extend_action(&self, subset: &[usize], partial: &[usize]) -> Vec<usize> {
        extend(&self.default_action, subset, partial)
    }

    /// Codec over all agents' states, guarded by `cap`.
    pub fn global_state_codec(&self, cap: usize) -> Result<SubsetCodec> {
        let members: Vec<usize> = (0..self.n()).collect();
        SubsetCodec::new(&members, &self.state_sizes(), cap)
    }

    pub fn global_action_codec(&self, cap: usize) -> Result<SubsetCodec> {
        let members: Vec<usize> = (0..self.n()).collect();
        SubsetCodec::new(&members, &self.action_sizes(), cap)
    }
}

fn extend(default: &[usize], subset: &[usize], partial: &[usize]) -> Vec<usize> {
    debug_assert_eq!(subset.len(), partial.len());
    let mut out = default.to_vec();
    for (&j, &v) in subset.iter().zip(partial) {
        out[j] = v;
    }
    out
}

fn normalize_row(row: &mut [f64]) -> std::result::Result<(), String> {
    if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err("negative or non-finite probability".into());
    }
    let sum: f64 = row.iter().sum();
    let gap = (sum - 1.0).abs();
    if gap > RENORM_TOL {
        return Err(format!("row sums to {sum}"));
    }
    if gap > PROB_TOL {
        row.iter_mut().for_each(|p| *p /= sum);
    }
    Ok(())
}

/// On-disk description of a factored MDP (TOML).
///
/// ```toml
/// gamma = 0.9
/// tau = 0.1
/// reward_bound = 1.0            # optional, defaults to the largest reward
/// default_state = [0, 0]        # optional, all zeros
/// default_action = [0, 0]       # optional, all zeros
/// graph = { kind = "line", n = 2 }
/// rho = { kind = "product", marginals = [[0.5, 0.5], [0.5, 0.5]] }  # optional, uniform
///
/// [[agents]]
/// states = 2
/// actions = 2
/// reward = [[1.0, 0.5], [0.0, 0.2]]            # [state][action]
/// kernel = [[0.9, 0.1], [0.5, 0.5], ...]       # one row per (neighborhood state, action)
/// ```
///
/// Kernel rows are ordered by neighborhood-state index (sorted 1-hop
/// members, first member least significant) and then by action.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdpFile {
    pub gamma: f64,
    pub tau: f64,
    #[serde(default)]
    pub reward_bound: Option<f64>,
    #[serde(default)]
    pub default_state: Option<Vec<usize>>,
    #[serde(default)]
    pub default_action: Option<Vec<usize>>,
    pub graph: GraphSpec,
    #[serde(default)]
    pub rho: Option<InitialDistribution>,
    pub agents: Vec<AgentFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentFile {
    pub states: usize,
    pub actions: usize,
    pub reward: Vec<Vec<f64>>,
    pub kernel: Vec<Vec<f64>>,
}

impl MdpFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn into_mdp(self) -> Result<FactoredMdp> {
        let graph = self.graph.build()?;
        let n = graph.n();
        if self.agents.len() != n {
            return Err(Error::InvalidModel(format!(
                "{} agent blocks for a graph with {n} agents",
                self.agents.len()
            )));
        }
        let spaces: Vec<AgentSpace> = self
            .agents
            .iter()
            .map(|a| AgentSpace {
                states: a.states,
                actions: a.actions,
            })
            .collect();
        let mut rewards = Vec::with_capacity(n);
        let mut kernels = Vec::with_capacity(n);
        for (i, a) in self.agents.into_iter().enumerate() {
            if a.reward.len() != a.states || a.reward.iter().any(|r| r.len() != a.actions) {
                return Err(Error::InvalidModel(format!("reward table of agent {i} must be [states][actions]")));
            }
            if a.kernel.iter().any(|r| r.len() != a.states) {
                return Err(Error::InvalidModel(format!("kernel rows of agent {i} must have {} entries", a.states)));
            }
            rewards.push(a.reward.into_iter().flatten().collect());
            kernels.push(a.kernel.into_iter().flatten().collect());
        }
        let reward_bound = self.reward_bound.unwrap_or_else(|| {
            rewards
                .iter()
                .flat_map(|r: &Vec<f64>| r.iter().copied())
                .fold(0.0, f64::max)
        });
        FactoredMdp::new(MdpParts {
            rho: self.rho.unwrap_or_else(|| InitialDistribution::uniform(&spaces)),
            graph,
            kernels,
            rewards,
            reward_bound,
            gamma: self.gamma,
            tau: self.tau,
            default_state: self.default_state.unwrap_or_else(|| vec![0; n]),
            default_action: self.default_action.unwrap_or_else(|| vec![0; n]),
            spaces,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn coin_mdp() -> FactoredMdp {
        // two agents on a line, every kernel row is a fair coin
        let graph = NetworkGraph::line(2).unwrap();
        let spaces = vec![AgentSpace { states: 2, actions: 1 }; 2];
        let kernels = vec![vec![0.5; 4 * 2], vec![0.5; 4 * 2]];
        FactoredMdp::new(MdpParts {
            rho: InitialDistribution::uniform(&spaces),
            graph,
            spaces,
            kernels,
            rewards: vec![vec![0.0, 0.0], vec![1.0, 1.0]],
            reward_bound: 1.0,
            gamma: 0.9,
            tau: 0.1,
            default_state: vec![0, 0],
            default_action: vec![0, 0],
        })
        .unwrap()
    }

    fn identity_mdp() -> FactoredMdp {
        let graph = NetworkGraph::line(2).unwrap();
        let spaces = vec![AgentSpace { states: 2, actions: 2 }; 2];
        let kernel = |i: usize| {
            let codec = graph.neighborhood(i, 1).members;
            let pos = codec.iter().position(|&m| m == i).unwrap();
            let mut t = Vec::new();
            for nb in 0..4 {
                let own = (nb >> pos) & 1;
                for _a in 0..2 {
                    let mut row = vec![0.0; 2];
                    row[own] = 1.0;
                    t.extend(row);
                }
            }
            t
        };
        FactoredMdp::new(MdpParts {
            rho: InitialDistribution::uniform(&spaces),
            kernels: vec![kernel(0), kernel(1)],
            graph,
            spaces,
            rewards: vec![vec![1.0; 4], vec![1.0; 4]],
            reward_bound: 1.0,
            gamma: 0.9,
            tau: 0.1,
            default_state: vec![0, 0],
            default_action: vec![0, 0],
        })
        .unwrap()
    }

    #[test]
    fn identity_kernel_is_deterministic() {
        let m = identity_mdp();
        assert_eq!(m.global_transition_prob(&[1, 0], &[0, 1], &[1, 0]), 1.0);
        assert_eq!(m.global_transition_prob(&[1, 0], &[0, 1], &[0, 0]), 0.0);
        let mut r1 = ChaCha8Rng::seed_from_u64(1);
        let mut r2 = ChaCha8Rng::seed_from_u64(99);
        assert_eq!(m.sample_step(&[1, 0], &[1, 1], &mut r1), vec![1, 0]);
        assert_eq!(m.sample_step(&[1, 0], &[1, 1], &mut r2), vec![1, 0]);
    }

    #[test]
    fn fair_coins_give_quarter() {
        let m = coin_mdp();
        for t in 0..4 {
            let next = [t & 1, t >> 1];
            assert!((m.global_transition_prob(&[0, 1], &[0, 0], &next) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn global_reward_is_mean() {
        assert_eq!(identity_mdp().global_reward(&[0, 1], &[1, 0]), 1.0);
        assert_eq!(coin_mdp().global_reward(&[0, 1], &[0, 0]), 0.5);
    }

    #[test]
    fn extension_operator() {
        let graph = NetworkGraph::line(3).unwrap();
        let spaces = vec![AgentSpace { states: 3, actions: 1 }; 3];
        let kernels = (0..3)
            .map(|i| vec![1.0 / 3.0; 3usize.pow(graph.neighborhood(i, 1).len() as u32) * 3])
            .collect();
        let m = FactoredMdp::new(MdpParts {
            rho: InitialDistribution::uniform(&spaces),
            graph,
            spaces,
            kernels,
            rewards: vec![vec![0.0; 3]; 3],
            reward_bound: 1.0,
            gamma: 0.5,
            tau: 0.0,
            default_state: vec![2, 1, 0],
            default_action: vec![0, 0, 0],
        })
        .unwrap();
        assert_eq!(m.extend_state(&[0, 1, 2], &[0, 2, 1]), vec![0, 2, 1]);
        assert_eq!(m.extend_state(&[], &[]), vec![2, 1, 0]);
        assert_eq!(m.extend_state(&[0], &[1]), vec![1, 1, 0]);
        // idempotent
        let x = m.extend_state(&[1], &[2]);
        assert_eq!(m.extend_state(&[1], &[x[1]]), x);
    }

    #[test]
    fn kernel_rows_are_validated() {
        let mut parts = coin_mdp().to_parts();
        parts.kernels[0][0] = 0.5 + 5e-10;
        let m = FactoredMdp::new(parts.clone()).unwrap();
        let row = m.kernel(0).row(0, 0);
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        parts.kernels[0][0] = 0.6;
        assert!(FactoredMdp::new(parts.clone()).is_err());
        parts.kernels[0][0] = 0.5;
        parts.rewards[0][0] = 2.0;
        assert!(FactoredMdp::new(parts).is_err());
    }

    #[test]
    fn parses_mdp_file() {
        let text = r#"
gamma = 0.5
tau = 0.1
graph = { kind = "line", n = 1 }

[[agents]]
states = 2
actions = 2
reward = [[1.0, 0.5], [0.0, 0.25]]
kernel = [[0.9, 0.1], [0.5, 0.5], [0.2, 0.8], [0.0, 1.0]]
"#;
        let m = MdpFile::from_toml(text).unwrap().into_mdp().unwrap();
        assert_eq!(m.reward_bound(), 1.0);
        assert_eq!(m.kernel(0).row(1, 0), &[0.2, 0.8]);
        assert!(MdpFile::from_toml("gamma = 0.5\ntau = 0.1\nbogus = 1\ngraph = { kind = \"line\", n = 1 }\nagents = []").is_err());
    }
}
