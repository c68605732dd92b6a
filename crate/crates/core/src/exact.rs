//! Exact dynamic programming on instances small enough to enumerate.
//!
//! [`ExactModel`] enumerates the global state and action spaces once and
//! stores the sparse global kernel. Everything else (policy values, local Q
//! tables, the regularized Bellman operator, policy iteration, stationary
//! distributions) is computed from it.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::codec::SubsetCodec;
use crate::error::{Error, Result};
use crate::mdp::FactoredMdp;
use crate::mw::maximize_product;
use crate::policy::{policy_entropy, JointPolicy, KHopPolicy};

pub const DEFAULT_TOL: f64 = 1e-9;
/// Default cap on enumerated state-action pairs.
pub const DEFAULT_EXACT_CAP: usize = 1 << 20;
/// Default cap on stored nonzero transition entries.
pub const DEFAULT_TRANSITION_CAP: usize = 1 << 25;
pub const DEFAULT_MW_BUDGET: usize = 10_000;
const MAX_SWEEPS: usize = 10_000_000;

#[derive(Debug, Clone)]
pub struct ExactModel<'a> {
    mdp: &'a FactoredMdp,
    states: SubsetCodec,
    actions: SubsetCodec,
    reward: Vec<f64>,
    offsets: Vec<usize>,
    next: Vec<u32>,
    prob: Vec<f64>,
    mw_budget: usize,
}

impl<'a> ExactModel<'a> {
    pub fn new(mdp: &'a FactoredMdp, cap: usize) -> Result<Self> {
        let states = mdp.global_state_codec(cap)?;
        let actions = mdp.global_action_codec(cap)?;
        let pairs = states.size() as u128 * actions.size() as u128;
        if pairs > cap as u128 {
            return Err(Error::CapExceeded {
                what: "state-action pairs",
                size: pairs,
                cap: cap as u128,
            });
        }
        let (ns, na) = (states.size(), actions.size());
        let rows: Vec<(Vec<u32>, Vec<f64>, f64)> = (0..ns * na)
            .into_par_iter()
            .map(|sa| {
                let (s, a) = (states.decode(sa / na), actions.decode(sa % na));
                let mut entries: Vec<(u32, f64)> = vec![(0, 1.0)];
                for (i, &ai) in a.iter().enumerate() {
                    let row = mdp.kernel(i).row_for(&s, ai);
                    let stride = states.stride(i) as u32;
                    let mut grown = Vec::with_capacity(entries.len() * row.len());
                    for &(idx, p) in &entries {
                        for (x, &q) in row.iter().enumerate() {
                            if q > 0.0 {
                                grown.push((idx + x as u32 * stride, p * q));
                            }
                        }
                    }
                    entries = grown;
                }
                entries.sort_unstable_by_key(|e| e.0);
                let (next, prob) = entries.into_iter().unzip();
                (next, prob, mdp.global_reward(&s, &a))
            })
            .collect();
        let total: usize = rows.iter().map(|r| r.0.len()).sum();
        if total > DEFAULT_TRANSITION_CAP {
            return Err(Error::CapExceeded {
                what: "nonzero transition entries",
                size: total as u128,
                cap: DEFAULT_TRANSITION_CAP as u128,
            });
        }
        let mut offsets = Vec::with_capacity(ns * na + 1);
        let mut next = Vec::with_capacity(total);
        let mut prob = Vec::with_capacity(total);
        let mut reward = Vec::with_capacity(ns * na);
        offsets.push(0);
        for (nx, pr, r) in rows {
            next.extend(nx);
            prob.extend(pr);
            reward.push(r);
            offsets.push(next.len());
        }
        Ok(Self {
            mdp,
            states,
            actions,
            reward,
            offsets,
            next,
            prob,
            mw_budget: DEFAULT_MW_BUDGET,
        })
    }

    pub fn with_mw_budget(mut self, budget: usize) -> Self {
        self.mw_budget = budget;
        self
    }

    pub fn mdp(&self) -> &FactoredMdp {
        self.mdp
    }

    pub fn num_states(&self) -> usize {
        self.states.size()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.size()
    }

    pub fn state_codec(&self) -> &SubsetCodec {
        &self.states
    }

    pub fn action_codec(&self) -> &SubsetCodec {
        &self.actions
    }

    /// Global reward `r(s, a)`.
    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.reward[s * self.num_actions() + a]
    }

    /// Sparse next-state distribution of the pair `(s, a)`.
    pub fn transitions(&self, s: usize, a: usize) -> (&[u32], &[f64]) {
        let k = s * self.num_actions() + a;
        let range = self.offsets[k]..self.offsets[k + 1];
        (&self.next[range.clone()], &self.prob[range])
    }

    pub fn expected_next(&self, s: usize, a: usize, v: &[f64]) -> f64 {
        let (nx, pr) = self.transitions(s, a);
        nx.iter().zip(pr).map(|(&j, &p)| p * v[j as usize]).sum()
    }

    /// `r(s, a) + gamma * E V(s')` as an `S x A` table.
    pub fn q_from_values(&self, v: &[f64]) -> Vec<f64> {
        let na = self.num_actions();
        let gamma = self.mdp.gamma();
        (0..self.num_states() * na)
            .into_par_iter()
            .map(|k| self.reward[k] + gamma * self.expected_next(k / na, k % na, v))
            .collect()
    }

    /// Joint action probabilities of `policy` at every state, dense `S x A`.
    fn action_table(&self, policy: &JointPolicy) -> Vec<f64> {
        let na = self.num_actions();
        let n = self.mdp.n();
        let mut out = vec![0.0; self.num_states() * na];
        out.par_chunks_mut(na).enumerate().for_each(|(s, row)| {
            let st = self.states.decode(s);
            let rows: Vec<&[f64]> = (0..n).map(|i| policy.part(i).row_for(&st)).collect();
            for (a, slot) in row.iter_mut().enumerate() {
                let mut p = 1.0;
                let mut rest = a;
                for (i, r) in rows.iter().enumerate() {
                    let k = self.actions.radix(i);
                    p *= r[rest % k];
                    rest /= k;
                }
                *slot = p;
            }
        });
        out
    }

    /// Per-state expected regularized reward for agent `agent` (local form,
    /// entropy weight `n * tau`) or globally (`None`).
    fn regularized_reward(&self, policy: &JointPolicy, agent: Option<usize>) -> Vec<f64> {
        let m = self.mdp;
        let n = m.n();
        let tau = m.tau();
        (0..self.num_states())
            .into_par_iter()
            .map(|s| {
                let st = self.states.decode(s);
                match agent {
                    Some(i) => {
                        let row = policy.part(i).row_for(&st);
                        let mean: f64 = row
                            .iter()
                            .enumerate()
                            .map(|(a, &p)| p * m.local_reward(i, st[i], a))
                            .sum();
                        mean + n as f64 * tau * policy_entropy(row)
                    }
                    None => {
                        let mean: f64 = (0..n)
                            .map(|i| {
                                let row = policy.part(i).row_for(&st);
                                row.iter()
                                    .enumerate()
                                    .map(|(a, &p)| p * m.local_reward(i, st[i], a))
                                    .sum::<f64>()
                            })
                            .sum::<f64>()
                            / n as f64;
                        mean + tau * policy.entropy(&st)
                    }
                }
            })
            .collect()
    }

    /// Sparse state chain induced by `policy`.
    pub fn policy_chain(&self, policy: &JointPolicy) -> StateChain {
        let na = self.num_actions();
        let ns = self.num_states();
        let table = self.action_table(policy);
        let rows: Vec<Vec<(u32, f64)>> = (0..ns)
            .into_par_iter()
            .map(|s| {
                let mut acc: Vec<(u32, f64)> = Vec::new();
                for a in 0..na {
                    let w = table[s * na + a];
                    if w == 0.0 {
                        continue;
                    }
                    let (nx, pr) = self.transitions(s, a);
                    acc.extend(nx.iter().zip(pr).map(|(&j, &p)| (j, w * p)));
                }
                acc.sort_unstable_by_key(|e| e.0);
                let mut merged: Vec<(u32, f64)> = Vec::with_capacity(acc.len());
                for (j, p) in acc {
                    match merged.last_mut() {
                        Some(last) if last.0 == j => last.1 += p,
                        _ => merged.push((j, p)),
                    }
                }
                merged
            })
            .collect();
        let mut offsets = vec![0];
        let mut next = Vec::new();
        let mut prob = Vec::new();
        for r in rows {
            for (j, p) in r {
                next.push(j);
                prob.push(p);
            }
            offsets.push(next.len());
        }
        StateChain {
            offsets,
            next,
            prob,
        }
    }
}

/// Sparse row-stochastic matrix over global states.
#[derive(Debug, Clone)]
pub struct StateChain {
    offsets: Vec<usize>,
    next: Vec<u32>,
    prob: Vec<f64>,
}

impl StateChain {
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, s: usize) -> (&[u32], &[f64]) {
        let r = self.offsets[s]..self.offsets[s + 1];
        (&self.next[r.clone()], &self.prob[r])
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|s| {
                let (nx, pr) = self.row(s);
                nx.iter().zip(pr).map(|(&j, &p)| p * v[j as usize]).sum()
            })
            .collect()
    }

    /// Fixed point of `v = reward + gamma * P v`, stopped once the sup-norm
    /// change is at most `tol * (1 - gamma)`.
    pub fn solve(&self, reward: &[f64], gamma: f64, tol: f64) -> Result<Vec<f64>> {
        let threshold = tol * (1.0 - gamma);
        let mut v = reward.to_vec();
        for _ in 0..MAX_SWEEPS {
            let pv = self.apply(&v);
            let next: Vec<f64> = reward.iter().zip(&pv).map(|(r, x)| r + gamma * x).collect();
            let change = sup_diff(&next, &v);
            v = next;
            if change <= threshold {
                return Ok(v);
            }
        }
        Err(Error::InvalidParameter("policy evaluation did not settle".into()))
    }
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Regularized value `V^zeta`.
pub fn policy_value(model: &ExactModel, policy: &JointPolicy, tol: f64) -> Result<Vec<f64>> {
    let chain = model.policy_chain(policy);
    chain.solve(&model.regularized_reward(policy, None), model.mdp.gamma(), tol)
}

/// Local value `V_i^zeta` with reward `r_i - n tau log zeta_i`.
pub fn local_policy_value(model: &ExactModel, policy: &JointPolicy, agent: usize, tol: f64) -> Result<Vec<f64>> {
    let chain = model.policy_chain(policy);
    local_value_on_chain(model, &chain, policy, agent, tol)
}

fn local_value_on_chain(
    model: &ExactModel,
    chain: &StateChain,
    policy: &JointPolicy,
    agent: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    if agent >= model.mdp.n() {
        return Err(Error::AgentOutOfRange {
            agent,
            n: model.mdp.n(),
        });
    }
    chain.solve(&model.regularized_reward(policy, Some(agent)), model.mdp.gamma(), tol)
}

/// Local Q table `Q_i(s, a) = r_i(s_i, a_i) + gamma E V_i(s')`, dense `S x A`.
pub fn local_q(model: &ExactModel, policy: &JointPolicy, agent: usize, tol: f64) -> Result<Vec<f64>> {
    let v = local_policy_value(model, policy, agent, tol)?;
    Ok(local_q_from_values(model, agent, &v))
}

/// Local Q tables of every agent, sharing one induced chain.
pub fn all_local_q(model: &ExactModel, policy: &JointPolicy, tol: f64) -> Result<Vec<Vec<f64>>> {
    let chain = model.policy_chain(policy);
    (0..model.mdp.n())
        .map(|i| {
            let v = local_value_on_chain(model, &chain, policy, i, tol)?;
            Ok(local_q_from_values(model, i, &v))
        })
        .collect()
}

fn local_q_from_values(model: &ExactModel, agent: usize, v: &[f64]) -> Vec<f64> {
    let m = model.mdp;
    let na = model.num_actions();
    let gamma = m.gamma();
    let (sstride, sradix) = (model.states.stride(agent), model.states.radix(agent));
    let (astride, aradix) = (model.actions.stride(agent), model.actions.radix(agent));
    (0..model.num_states() * na)
        .into_par_iter()
        .map(|k| {
            let (s, a) = (k / na, k % na);
            let r = m.local_reward(agent, (s / sstride) % sradix, (a / astride) % aradix);
            r + gamma * model.expected_next(s, a, v)
        })
        .collect()
}

/// Global Q table `r + gamma E V^zeta`, dense `S x A`.
pub fn global_q(model: &ExactModel, policy: &JointPolicy, tol: f64) -> Result<Vec<f64>> {
    Ok(model.q_from_values(&policy_value(model, policy, tol)?))
}

/// Result of one application of the regularized Bellman optimal operator.
#[derive(Debug, Clone)]
pub struct BellmanOutcome {
    pub values: Vec<f64>,
    /// `maximizer[s][i]` is agent `i`'s action distribution at state `s`.
    pub maximizer: Vec<Vec<Vec<f64>>>,
    /// States where only a damped step size converged.
    pub uncertified_states: Vec<usize>,
    pub max_iterations: usize,
}

impl BellmanOutcome {
    pub fn certified(&self) -> bool {
        self.uncertified_states.is_empty()
    }

    /// Maximizer as a centralized joint policy (every agent sees all states).
    pub fn policy(&self, m: &FactoredMdp) -> Result<JointPolicy> {
        centralized_policy(m, &self.maximizer)
    }
}

pub fn centralized_policy(m: &FactoredMdp, rows: &[Vec<Vec<f64>>]) -> Result<JointPolicy> {
    let radius = m.graph().diameter();
    JointPolicy::new(
        (0..m.n())
            .map(|i| {
                let table: Vec<f64> = rows.iter().flat_map(|r| r[i].iter().copied()).collect();
                KHopPolicy::new(m, i, radius, table)
            })
            .collect::<Result<_>>()?,
    )
}

#[allow(clippy::type_complexity)]
/// `[T V](s) = max over product policies of E[r - tau log pi + gamma E V]`.
pub fn bellman_optimal_apply(model: &ExactModel, v: &[f64], tol: f64) -> Result<BellmanOutcome> {
    let q = model.q_from_values(v);
    let na = model.num_actions();
    let radices: Vec<usize> = model.mdp.action_sizes();
    let tau = model.mdp.tau();
    let inner_tol = (tol * 1e-2).max(1e-14);
    let budget = model.mw_budget;
    // (value, maximizer rows, certified, iterations) per state
    let solved: Vec<Result<(f64, Vec<Vec<f64>>, bool, usize)>> = q
        .par_chunks(na)
        .enumerate()
        .map(|(s, row)| {
            let (out, certified) = maximize_product(row, &radices, tau, budget, inner_tol).ok_or(Error::MwBudget {
                state: s,
                budget,
                last_change: f64::NAN,
            })?;
            Ok((out.value, out.rows, certified, out.iterations))
        })
        .collect();
    let mut values = Vec::with_capacity(q.len() / na);
    let mut maximizer = Vec::with_capacity(values.capacity());
    let mut uncertified_states = Vec::new();
    let mut max_iterations = 0;
    for (s, r) in solved.into_iter().enumerate() {
        let (value, rows, certified, iters) = r?;
        values.push(value);
        maximizer.push(rows);
        if !certified {
            uncertified_states.push(s);
        }
        max_iterations = max_iterations.max(iters);
    }
    Ok(BellmanOutcome {
        values,
        maximizer,
        uncertified_states,
        max_iterations,
    })
}

#[derive(Debug, Clone)]
pub struct OptimalSolution {
    pub values: Vec<f64>,
    pub policy: JointPolicy,
    pub certified: bool,
    pub sweeps: usize,
}

/// Value iteration on the regularized Bellman optimal operator.
pub fn optimal_value(model: &ExactModel, tol: f64) -> Result<OptimalSolution> {
    let gamma = model.mdp.gamma();
    let threshold = tol * (1.0 - gamma);
    let mut v = vec![0.0; model.num_states()];
    let mut certified = true;
    for sweep in 1..=MAX_SWEEPS {
        let out = bellman_optimal_apply(model, &v, tol)?;
        certified &= out.certified();
        let change = sup_diff(&out.values, &v);
        v = out.values.clone();
        if change <= threshold {
            let policy = out.policy(model.mdp)?;
            return Ok(OptimalSolution {
                values: v,
                policy,
                certified,
                sweeps: sweep,
            });
        }
    }
    Err(Error::InvalidParameter("value iteration did not settle".into()))
}

#[derive(Debug, Clone)]
pub struct PolicyIterationOutcome {
    pub policy: JointPolicy,
    /// `trace[m] = sup |V^{zeta_m} - V*|` for `m = 0..=steps`.
    pub trace: Vec<f64>,
    pub policies: Vec<JointPolicy>,
    pub optimal: Vec<f64>,
    pub certified: bool,
}

/// Alternates exact evaluation and the Bellman maximizer for `steps` rounds.
pub fn exact_policy_iteration(
    model: &ExactModel,
    init: &JointPolicy,
    steps: usize,
    tol: f64,
) -> Result<PolicyIterationOutcome> {
    let opt = optimal_value(model, tol)?;
    let mut certified = opt.certified;
    let mut policy = init.clone();
    let mut policies = vec![policy.clone()];
    let mut v = policy_value(model, &policy, tol)?;
    let mut trace = vec![sup_diff(&v, &opt.values)];
    for _ in 0..steps {
        let out = bellman_optimal_apply(model, &v, tol)?;
        certified &= out.certified();
        policy = out.policy(model.mdp)?;
        v = policy_value(model, &policy, tol)?;
        trace.push(sup_diff(&v, &opt.values));
        policies.push(policy.clone());
    }
    Ok(PolicyIterationOutcome {
        policy,
        trace,
        policies,
        optimal: opt.values,
        certified,
    })
}

/// `E_{s ~ rho} V(s)`.
pub fn objective_from_values(model: &ExactModel, v: &[f64]) -> f64 {
    let rho = model.mdp.rho();
    let mut s = vec![0; model.mdp.n()];
    (0..model.num_states())
        .map(|idx| {
            model.states.scatter(idx, &mut s);
            rho.prob(&s, idx) * v[idx]
        })
        .sum()
}

pub fn objective(model: &ExactModel, policy: &JointPolicy, tol: f64) -> Result<f64> {
    Ok(objective_from_values(model, &policy_value(model, policy, tol)?))
}

#[derive(Debug, Clone)]
pub struct StationaryReport {
    pub states: Vec<f64>,
    /// Smallest marginal probability of any β-hop neighborhood state-action
    /// cell, over all agents.
    pub xi: f64,
    pub iterations: usize,
    pub period: usize,
}

/// Checks that the induced state chain is irreducible and aperiodic.
pub fn chain_structure(chain: &StateChain) -> Result<usize> {
    let ns = chain.len();
    let bfs = |forward: bool| -> Vec<usize> {
        let mut level = vec![usize::MAX; ns];
        let mut reverse: Vec<Vec<u32>> = Vec::new();
        if !forward {
            reverse = vec![Vec::new(); ns];
            for s in 0..ns {
                let (nx, pr) = chain.row(s);
                for (&j, &p) in nx.iter().zip(pr) {
                    if p > 0.0 {
                        reverse[j as usize].push(s as u32);
                    }
                }
            }
        }
        let mut queue = VecDeque::from([0usize]);
        level[0] = 0;
        while let Some(u) = queue.pop_front() {
            let succ: Vec<usize> = if forward {
                let (nx, pr) = chain.row(u);
                nx.iter().zip(pr).filter(|(_, &p)| p > 0.0).map(|(&j, _)| j as usize).collect()
            } else {
                reverse[u].iter().map(|&j| j as usize).collect()
            };
            for v in succ {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    };
    let fwd = bfs(true);
    if let Some(s) = fwd.iter().position(|&l| l == usize::MAX) {
        let unreachable = fwd.iter().filter(|&&l| l == usize::MAX).count();
        return Err(Error::Chain {
            kind: "reducible",
            detail: format!("{unreachable} states (first: {s}) are unreachable from state 0"),
        });
    }
    let bwd = bfs(false);
    if let Some(s) = bwd.iter().position(|&l| l == usize::MAX) {
        let outside = bwd.iter().filter(|&&l| l == usize::MAX).count();
        return Err(Error::Chain {
            kind: "reducible",
            detail: format!("{outside} states (first: {s}) cannot return to state 0; they form a closed class"),
        });
    }
    let mut period = 0usize;
    for u in 0..ns {
        let (nx, pr) = chain.row(u);
        for (&j, &p) in nx.iter().zip(pr) {
            if p > 0.0 {
                let d = (fwd[u] + 1).abs_diff(fwd[j as usize]);
                period = gcd(period, d);
            }
        }
    }
    if period != 1 {
        return Err(Error::Chain {
            kind: "periodic",
            detail: format!("induced chain has period {period}"),
        });
    }
    Ok(period)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Stationary distribution of the induced chain by power iteration, plus the
/// smallest β-hop state-action marginal.
pub fn stationary_distribution(
    model: &ExactModel,
    policy: &JointPolicy,
    beta: usize,
    tol: f64,
) -> Result<StationaryReport> {
    let chain = model.policy_chain(policy);
    let period = chain_structure(&chain)?;
    let ns = model.num_states();
    let mut d = vec![1.0 / ns as f64; ns];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut next = vec![0.0; ns];
        for (s, &mass) in d.iter().enumerate() {
            let (nx, pr) = chain.row(s);
            for (&j, &p) in nx.iter().zip(pr) {
                next[j as usize] += mass * p;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let residual: f64 = next.iter().zip(&d).map(|(a, b)| (a - b).abs()).sum();
        d = next;
        if residual <= tol {
            break;
        }
        if iterations >= MAX_SWEEPS {
            return Err(Error::Chain {
                kind: "slow mixing",
                detail: format!("power iteration residual {residual:e} after {iterations} steps"),
            });
        }
    }
    let xi = min_cell_marginal(model, policy, &d, beta)?;
    Ok(StationaryReport {
        states: d,
        xi,
        iterations,
        period,
    })
}

/// Smallest marginal of `d(s) zeta(a|s)` over every agent's β-hop cells.
pub fn min_cell_marginal(model: &ExactModel, policy: &JointPolicy, d: &[f64], beta: usize) -> Result<f64> {
    let m = model.mdp;
    let table = model.action_table(policy);
    let na = model.num_actions();
    let mut xi = f64::INFINITY;
    for i in 0..m.n() {
        let members = m.graph().neighborhood(i, beta).members;
        let sc = SubsetCodec::new(&members, &m.state_sizes(), DEFAULT_EXACT_CAP)?;
        let ac = SubsetCodec::new(&members, &m.action_sizes(), DEFAULT_EXACT_CAP)?;
        let mut cells = vec![0.0; sc.size() * ac.size()];
        let mut s = vec![0; m.n()];
        let mut a = vec![0; m.n()];
        for (si, &mass) in d.iter().enumerate() {
            model.states.scatter(si, &mut s);
            let cs = sc.encode_global(&s);
            for ai in 0..na {
                let w = table[si * na + ai];
                if w > 0.0 {
                    model.actions.scatter(ai, &mut a);
                    cells[cs * ac.size() + ac.encode_global(&a)] += mass * w;
                }
            }
        }
        xi = cells.iter().cloned().fold(xi, f64::min);
    }
    Ok(xi)
}

/// `state,value` CSV for regression baselines.
pub fn values_csv(values: &[f64]) -> String {
    let mut out = String::from("# schema: netlpi-values/v1\nstate,value\n");
    for (s, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{s},{v:.17e}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NetworkGraph;
    use crate::mdp::{AgentSpace, InitialDistribution, MdpParts};
    use crate::policy::uniform_policy;

    fn single(states: usize, actions: usize, reward: Vec<f64>, kernel: Vec<f64>, gamma: f64, tau: f64) -> FactoredMdp {
        let spaces = vec![AgentSpace { states, actions }];
        FactoredMdp::new(MdpParts {
            rho: InitialDistribution::uniform(&spaces),
            graph: NetworkGraph::line(1).unwrap(),
            spaces,
            kernels: vec![kernel],
            rewards: vec![reward],
            reward_bound: 1.0,
            gamma,
            tau,
            default_state: vec![0],
            default_action: vec![0],
        })
        .unwrap()
    }

    #[test]
    fn geometric_series() {
        let m = single(1, 1, vec![1.0], vec![1.0], 0.5, 0.3);
        let model = ExactModel::new(&m, DEFAULT_EXACT_CAP).unwrap();
        let v = policy_value(&model, &uniform_policy(&m, 0).unwrap(), 1e-12).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-12);
        let opt = optimal_value(&model, 1e-12).unwrap();
        assert!((opt.values[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_only_value() {
        let m = single(1, 2, vec![0.0, 0.0], vec![1.0, 1.0], 0.5, 1.0);
        let model = ExactModel::new(&m, DEFAULT_EXACT_CAP).unwrap();
        let p = uniform_policy(&m, 0).unwrap();
        let v = policy_value(&model, &p, 1e-12).unwrap();
        assert!((v[0] - 2.0 * 2f64.ln()).abs() < 1e-11);
        let vi = local_policy_value(&model, &p, 0, 1e-12).unwrap();
        assert!((vi[0] - v[0]).abs() < 1e-11);
    }

    #[test]
    fn one_step_soft_max() {
        let m = single(1, 2, vec![0.0, 1.0], vec![1.0, 1.0], 1e-9, 1.0);
        let model = ExactModel::new(&m, DEFAULT_EXACT_CAP).unwrap();
        let opt = optimal_value(&model, 1e-12).unwrap();
        assert!((opt.values[0] - (1.0 + 1f64.exp()).ln()).abs() < 1e-8);
        let t = bellman_optimal_apply(&model, &[0.0], 1e-12).unwrap();
        assert!((t.values[0] - (1.0 + 1f64.exp()).ln()).abs() < 1e-12);
    }

    #[test]
    fn two_state_stationary() {
        let m = single(2, 1, vec![0.0, 0.0], vec![0.9, 0.1, 0.2, 0.8], 0.5, 0.1);
        let model = ExactModel::new(&m, DEFAULT_EXACT_CAP).unwrap();
        let r = stationary_distribution(&model, &uniform_policy(&m, 0).unwrap(), 0, 1e-13).unwrap();
        assert!((r.states[0] - 2.0 / 3.0).abs() < 1e-10);
        assert!((r.xi - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn periodic_and_reducible_chains_are_reported() {
        let flip = single(2, 1, vec![0.0, 0.0], vec![0.0, 1.0, 1.0, 0.0], 0.5, 0.1);
        let model = ExactModel::new(&flip, DEFAULT_EXACT_CAP).unwrap();
        let err = stationary_distribution(&model, &uniform_policy(&flip, 0).unwrap(), 0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Chain { kind: "periodic", .. }));
        let trap = single(2, 1, vec![0.0, 0.0], vec![1.0, 0.0, 0.5, 0.5], 0.5, 0.1);
        let model = ExactModel::new(&trap, DEFAULT_EXACT_CAP).unwrap();
        let err = stationary_distribution(&model, &uniform_policy(&trap, 0).unwrap(), 0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Chain { kind: "reducible", .. }));
    }

    #[test]
    fn csv_dump() {
        let text = values_csv(&[1.5, -2.0]);
        assert!(text.starts_with("# schema: netlpi-values/v1\nstate,value\n0,1.5"));
        assert_eq!(text.lines().count(), 4);
    }
}
