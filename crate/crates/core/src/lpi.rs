//! Localized policy iteration.
//!
//! Each outer iteration runs the current κ-hop policy for one trajectory,
//! hands the β-hop views of that trajectory to a [`PolicyEvaluator`], and
//! rebuilds the policy with a few synchronous multiplicative-weights steps on
//! locally aggregated Q tables.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::SubsetCodec;
use crate::error::{Error, Result};
use crate::exact::{objective_from_values, optimal_value, policy_value, sup_diff, all_local_q, ExactModel, DEFAULT_TOL};
use crate::mdp::{FactoredMdp, DEFAULT_SPACE_CAP};
use crate::mw::{expectation_at, mw_update};
use crate::policy::{sigma_regularity, uniform_policy, JointPolicy, KHopPolicy};
use crate::td::{localized_td0, StepSchedule};
use crate::truncated::{point_mass_truncation, TruncatedQ};

/// Cap on the joint action space of one κ-hop neighborhood.
pub const DEFAULT_NEIGHBOR_ACTION_CAP: usize = 1 << 16;

/// One agent's β-hop slice of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentView {
    pub state_index: Vec<u32>,
    pub action_index: Vec<u32>,
    pub reward: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    n: usize,
    beta: usize,
    states: Vec<usize>,
    actions: Vec<usize>,
    views: Vec<AgentView>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.states.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn state(&self, t: usize) -> &[usize] {
        &self.states[t * self.n..(t + 1) * self.n]
    }

    pub fn action(&self, t: usize) -> &[usize] {
        &self.actions[t * self.n..(t + 1) * self.n]
    }

    pub fn view(&self, agent: usize) -> &AgentView {
        &self.views[agent]
    }
}

/// Samples `s(0) ~ rho` and runs `policy` for `len` steps, recording each
/// agent's β-hop view of every visited state-action pair.
pub fn collect_trajectory<R: Rng + ?Sized>(
    m: &FactoredMdp,
    policy: &JointPolicy,
    len: usize,
    beta: usize,
    rng: &mut R,
) -> Result<TrajectoryRecord> {
    let n = m.n();
    let codecs: Vec<(SubsetCodec, SubsetCodec)> = (0..n)
        .map(|i| {
            let members = m.graph().neighborhood(i, beta).members;
            Ok((
                SubsetCodec::new(&members, &m.state_sizes(), DEFAULT_SPACE_CAP)?,
                SubsetCodec::new(&members, &m.action_sizes(), DEFAULT_SPACE_CAP)?,
            ))
        })
        .collect::<Result<_>>()?;
    let mut states = Vec::with_capacity(len * n);
    let mut actions = Vec::with_capacity(len * n);
    let mut views: Vec<AgentView> = (0..n)
        .map(|_| AgentView {
            state_index: Vec::with_capacity(len),
            action_index: Vec::with_capacity(len),
            reward: Vec::with_capacity(len),
        })
        .collect();
    let mut s = if len > 0 { m.sample_initial(rng) } else { Vec::new() };
    for t in 0..len {
        let a = policy.sample_action(&s, rng);
        for (i, (view, (sc, ac))) in views.iter_mut().zip(&codecs).enumerate() {
            view.state_index.push(sc.encode_global(&s) as u32);
            view.action_index.push(ac.encode_global(&a) as u32);
            view.reward.push(m.local_reward(i, s[i], a[i]));
        }
        states.extend_from_slice(&s);
        actions.extend_from_slice(&a);
        if t + 1 < len {
            s = m.sample_step(&s, &a, rng);
        }
    }
    Ok(TrajectoryRecord {
        n,
        beta,
        states,
        actions,
        views,
    })
}

/// Produces one truncated Q table per agent from a trajectory.
pub trait PolicyEvaluator: Sync {
    fn name(&self) -> &'static str;

    fn evaluate(
        &self,
        m: &FactoredMdp,
        policy: &JointPolicy,
        beta: usize,
        traj: &TrajectoryRecord,
    ) -> Result<Vec<TruncatedQ>>;
}

/// Localized TD(0) on the recorded trajectory; agents run in parallel.
#[derive(Debug, Clone)]
pub struct TdEvaluator {
    pub schedule: StepSchedule,
}

impl PolicyEvaluator for TdEvaluator {
    fn name(&self) -> &'static str {
        "localized-td0"
    }

    fn evaluate(
        &self,
        m: &FactoredMdp,
        policy: &JointPolicy,
        beta: usize,
        traj: &TrajectoryRecord,
    ) -> Result<Vec<TruncatedQ>> {
        if traj.beta() != beta {
            return Err(Error::InvalidParameter("trajectory views were recorded for a different beta".into()));
        }
        policy
            .parts()
            .par_iter()
            .map(|p| localized_td0(m, traj, p, &self.schedule))
            .collect()
    }
}

/// Exact local Q tables truncated at the default state-action. Ignores the
/// trajectory; only usable under the exact-solver cap.
#[derive(Debug, Clone)]
pub struct ExactOracleEvaluator {
    pub cap: usize,
    pub tol: f64,
}

impl PolicyEvaluator for ExactOracleEvaluator {
    fn name(&self) -> &'static str {
        "exact-oracle"
    }

    fn evaluate(
        &self,
        m: &FactoredMdp,
        policy: &JointPolicy,
        beta: usize,
        _traj: &TrajectoryRecord,
    ) -> Result<Vec<TruncatedQ>> {
        let model = ExactModel::new(m, self.cap)?;
        let qs = all_local_q(&model, policy, self.tol)?;
        qs.iter()
            .enumerate()
            .map(|(i, q)| point_mass_truncation(&model, q, i, beta))
            .collect()
    }
}

/// `(1/n) sum_{j in N_i^kappa} Qhat_j` at the extension of a κ-hop
/// state-action tuple. `s_local` and `a_local` follow the sorted member order
/// of agent `agent`'s κ-hop neighborhood.
pub fn aggregate_q(
    m: &FactoredMdp,
    agent: usize,
    kappa: usize,
    tables: &[TruncatedQ],
    s_local: &[usize],
    a_local: &[usize],
) -> f64 {
    let members = m.graph().neighborhood(agent, kappa).members;
    let s = m.extend_state(&members, s_local);
    let a = m.extend_action(&members, a_local);
    members.iter().map(|&j| tables[j].at_global(&s, &a)).sum::<f64>() / m.n() as f64
}

/// Aggregated table of one agent over its κ-hop state and action spaces,
/// laid out as `[state_index * actions + action_index]`.
fn aggregate_table(
    m: &FactoredMdp,
    sc: &SubsetCodec,
    ac: &SubsetCodec,
    tables: &[TruncatedQ],
) -> Vec<f64> {
    let members = sc.members();
    let n = m.n() as f64;
    let mut out = vec![0.0; sc.size() * ac.size()];
    let mut s = m.default_state().to_vec();
    let mut a = m.default_action().to_vec();
    for x in 0..sc.size() {
        sc.scatter(x, &mut s);
        let offsets: Vec<(usize, usize)> = members
            .iter()
            .map(|&j| {
                let t = &tables[j];
                (t.state_codec().encode_global(&s), j)
            })
            .collect();
        for y in 0..ac.size() {
            ac.scatter(y, &mut a);
            let total: f64 = offsets
                .iter()
                .map(|&(xs, j)| {
                    let t = &tables[j];
                    t.get(xs, t.action_codec().encode_global(&a))
                })
                .sum();
            out[x * ac.size() + y] = total / n;
        }
    }
    out
}

struct ImprovementLayout {
    radius: usize,
    state: SubsetCodec,
    action: SubsetCodec,
    own_pos: usize,
    /// `neighbor_rows[x * k + pos]`: row index of member `pos`'s policy at the
    /// extension of κ-hop state `x`.
    neighbor_rows: Vec<usize>,
}

fn improvement_layouts(m: &FactoredMdp, kappa: usize, cap: usize) -> Result<Vec<ImprovementLayout>> {
    let n = m.n();
    let member_codecs: Vec<SubsetCodec> = (0..n)
        .map(|j| SubsetCodec::new(&m.graph().neighborhood(j, kappa).members, &m.state_sizes(), DEFAULT_SPACE_CAP))
        .collect::<Result<_>>()?;
    (0..n)
        .map(|i| {
            let members = m.graph().neighborhood(i, kappa).members;
            let state = SubsetCodec::new(&members, &m.state_sizes(), DEFAULT_SPACE_CAP)?;
            let action = SubsetCodec::new(&members, &m.action_sizes(), cap)?;
            let k = members.len();
            let mut neighbor_rows = Vec::with_capacity(state.size() * k);
            let mut s = m.default_state().to_vec();
            for x in 0..state.size() {
                state.scatter(x, &mut s);
                neighbor_rows.extend(members.iter().map(|&j| member_codecs[j].encode_global(&s)));
            }
            Ok(ImprovementLayout {
                radius: kappa,
                own_pos: members.iter().position(|&j| j == i).expect("center is a member"),
                state,
                action,
                neighbor_rows,
            })
        })
        .collect()
}

/// Rebuilds a κ-hop policy from truncated Q tables with `p_max` synchronous
/// multiplicative-weights steps from the uniform policy.
pub fn soft_policy_improvement(
    m: &FactoredMdp,
    tables: &[TruncatedQ],
    kappa: usize,
    eta: f64,
    tau: f64,
    p_max: usize,
) -> Result<JointPolicy> {
    let layouts = improvement_layouts(m, kappa, DEFAULT_NEIGHBOR_ACTION_CAP)?;
    improve_with_layouts(m, &layouts, tables, eta, tau, p_max)
}

fn improve_with_layouts(
    m: &FactoredMdp,
    layouts: &[ImprovementLayout],
    tables: &[TruncatedQ],
    eta: f64,
    tau: f64,
    p_max: usize,
) -> Result<JointPolicy> {
    if !(eta > 0.0 && tau >= 0.0) {
        return Err(Error::InvalidParameter("eta must be positive and tau non-negative".into()));
    }
    if eta * tau > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "eta * tau = {} exceeds 1; the prior exponent would be negative",
            eta * tau
        )));
    }
    if tables.len() != m.n() {
        return Err(Error::InvalidParameter("one truncated Q table per agent required".into()));
    }
    let coef = (1.0 - eta * tau).max(0.0);
    let aggregates: Vec<Vec<f64>> = layouts
        .par_iter()
        .map(|l| aggregate_table(m, &l.state, &l.action, tables))
        .collect();
    let mut tables_now: Vec<Vec<f64>> = layouts
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let a = m.spaces()[i].actions;
            vec![1.0 / a as f64; l.state.size() * a]
        })
        .collect();
    let action_sizes = m.action_sizes();
    for _ in 0..p_max {
        let snapshot = &tables_now;
        let next: Vec<Vec<f64>> = layouts
            .par_iter()
            .enumerate()
            .map(|(i, l)| {
                let k = l.state.members().len();
                let na_i = action_sizes[i];
                let radices: Vec<usize> = (0..k).map(|p| l.action.radix(p)).collect();
                let width = l.action.size();
                let mut out = snapshot[i].clone();
                for x in 0..l.state.size() {
                    let rows: Vec<&[f64]> = l.state
                        .members()
                        .iter()
                        .enumerate()
                        .map(|(p, &j)| {
                            let r = l.neighbor_rows[x * k + p];
                            let na = action_sizes[j];
                            &snapshot[j][r * na..(r + 1) * na]
                        })
                        .collect();
                    let gains = expectation_at(&aggregates[i][x * width..(x + 1) * width], &radices, &rows, l.own_pos);
                    mw_update(&mut out[x * na_i..(x + 1) * na_i], &gains, coef, eta);
                }
                out
            })
            .collect();
        tables_now = next;
    }
    JointPolicy::new(
        layouts
            .iter()
            .zip(tables_now)
            .enumerate()
            .map(|(i, (l, t))| {
                KHopPolicy::new(m, i, l.radius, t)
            })
            .collect::<Result<_>>()?,
    )
}

/// Monte Carlo estimate of `E sum_{t < horizon} gamma^t (r - tau log zeta)`.
pub fn regularized_return_estimate<R: Rng + ?Sized>(
    m: &FactoredMdp,
    policy: &JointPolicy,
    episodes: usize,
    horizon: usize,
    rng: &mut R,
) -> f64 {
    if episodes == 0 {
        return 0.0;
    }
    let gamma = m.gamma();
    let tau = m.tau();
    let mut total = 0.0;
    for _ in 0..episodes {
        let mut s = m.sample_initial(rng);
        let mut discount = 1.0;
        let mut g = 0.0;
        for _ in 0..horizon {
            let a = policy.sample_action(&s, rng);
            g += discount * (m.global_reward(&s, &a) - tau * policy.log_prob(&s, &a));
            discount *= gamma;
            s = m.sample_step(&s, &a, rng);
        }
        total += g;
    }
    total / episodes as f64
}

/// Horizon after which `gamma^t` falls below `1e-4`.
pub fn default_horizon(gamma: f64) -> usize {
    (1e-4f64.ln() / gamma.ln()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluatorKind {
    #[serde(rename = "localized-td0")]
    LocalizedTd0,
    ExactOracle,
}

impl EvaluatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EvaluatorKind::LocalizedTd0 => "localized-td0",
            EvaluatorKind::ExactOracle => "exact-oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpiConfig {
    pub kappa: usize,
    pub beta: usize,
    pub eta: f64,
    pub tau: f64,
    pub p_max: usize,
    pub outer_iterations: usize,
    pub trajectory_len: usize,
    pub seed: u64,
    pub eval_episodes: usize,
    /// Episodes for the last row only; `None` keeps `eval_episodes`.
    pub final_eval_episodes: Option<usize>,
    /// `None` uses [`default_horizon`].
    pub eval_horizon: Option<usize>,
    /// Compute exact objective and optimality gap when under `exact_cap`.
    pub oracle: bool,
    pub exact_cap: usize,
    pub tol: f64,
}

impl LpiConfig {
    pub fn validate(&self, gamma: f64) -> Result<Vec<String>> {
        if !(self.eta > 0.0) {
            return Err(Error::InvalidParameter("eta must be positive".into()));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParameter("tau must be positive".into()));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParameter("gamma must lie in (0, 1)".into()));
        }
        if self.eta * self.tau > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter("eta * tau must not exceed 1".into()));
        }
        if self.trajectory_len == 0 && self.outer_iterations > 0 {
            return Err(Error::InvalidParameter("trajectory length must be at least 1".into()));
        }
        let mut warnings = Vec::new();
        if self.kappa > self.beta {
            warnings.push(format!(
                "kappa = {} exceeds beta = {}; aggregated tables fill the gap with defaults",
                self.kappa, self.beta
            ));
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationMetrics {
    pub iteration: usize,
    pub regularized_return: f64,
    pub sigma: f64,
    pub exact_objective: Option<f64>,
    pub optimality_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub rows: Vec<IterationMetrics>,
    /// Seconds spent per outer iteration; kept apart from the metric rows so
    /// those stay reproducible.
    pub wall_clock: Vec<f64>,
    pub warnings: Vec<String>,
    pub evaluator: &'static str,
}

#[derive(Debug, Clone)]
pub struct LpiOutcome {
    pub policy: JointPolicy,
    pub tables: Vec<TruncatedQ>,
    pub metrics: RunMetrics,
}

struct Oracle<'a> {
    model: ExactModel<'a>,
    optimal: Vec<f64>,
}

/// Runs `outer_iterations` rounds of collect, evaluate, improve.
pub fn lpi_run(m: &FactoredMdp, cfg: &LpiConfig, evaluator: &dyn PolicyEvaluator) -> Result<LpiOutcome> {
    let mut warnings = cfg.validate(m.gamma())?;
    let m = &m.with_discount_and_tau(m.gamma(), cfg.tau)?;
    let layouts = improvement_layouts(m, cfg.kappa, DEFAULT_NEIGHBOR_ACTION_CAP)?;
    let horizon = cfg.eval_horizon.unwrap_or_else(|| default_horizon(m.gamma()));
    let oracle = if cfg.oracle {
        match ExactModel::new(m, cfg.exact_cap) {
            Ok(model) => {
                let optimal = optimal_value(&model, cfg.tol)?.values;
                Some(Oracle { model, optimal })
            }
            Err(Error::CapExceeded { what, size, cap }) => {
                warnings.push(format!("exact oracle skipped: {what} = {size} exceeds cap {cap}"));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let mut train_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let measure = |policy: &JointPolicy, iteration: usize| -> Result<IterationMetrics> {
        let mut eval_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        eval_rng.set_stream(1000 + iteration as u64);
        let episodes = match cfg.final_eval_episodes {
            Some(e) if iteration == cfg.outer_iterations => e,
            _ => cfg.eval_episodes,
        };
        let regularized_return = regularized_return_estimate(m, policy, episodes, horizon, &mut eval_rng);
        let sigma = sigma_regularity(policy).unwrap_or(f64::INFINITY);
        let (exact_objective, optimality_gap) = match &oracle {
            Some(o) => {
                let v = policy_value(&o.model, policy, cfg.tol)?;
                (Some(objective_from_values(&o.model, &v)), Some(sup_diff(&v, &o.optimal)))
            }
            None => (None, None),
        };
        Ok(IterationMetrics {
            iteration,
            regularized_return,
            sigma,
            exact_objective,
            optimality_gap,
        })
    };
    let mut policy = uniform_policy(m, cfg.kappa)?;
    let mut tables = Vec::new();
    let mut rows = vec![measure(&policy, 0)?];
    let mut wall_clock = vec![0.0];
    for it in 1..=cfg.outer_iterations {
        let start = Instant::now();
        let traj = collect_trajectory(m, &policy, cfg.trajectory_len, cfg.beta, &mut train_rng)?;
        tables = evaluator.evaluate(m, &policy, cfg.beta, &traj)?;
        policy = improve_with_layouts(m, &layouts, &tables, cfg.eta, cfg.tau, cfg.p_max)?;
        wall_clock.push(start.elapsed().as_secs_f64());
        rows.push(measure(&policy, it)?);
    }
    Ok(LpiOutcome {
        policy,
        tables,
        metrics: RunMetrics {
            rows,
            wall_clock,
            warnings,
            evaluator: evaluator.name(),
        },
    })
}

impl Default for LpiConfig {
    fn default() -> Self {
        Self {
            kappa: 1,
            beta: 1,
            eta: 0.05,
            tau: 0.05,
            p_max: 10,
            outer_iterations: 50,
            trajectory_len: 10_000,
            seed: 0,
            eval_episodes: 32,
            final_eval_episodes: None,
            eval_horizon: None,
            oracle: true,
            exact_cap: crate::exact::DEFAULT_EXACT_CAP,
            tol: DEFAULT_TOL,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NetworkGraph;
    use crate::mdp::{AgentSpace, InitialDistribution, MdpParts};

    fn line3() -> FactoredMdp {
        let graph = NetworkGraph::line(3).unwrap();
        let spaces = vec![AgentSpace { states: 2, actions: 2 }; 3];
        let kernels = (0..3)
            .map(|i| {
                let rows = 2usize.pow(graph.neighborhood(i, 1).len() as u32) * 2;
                (0..rows).flat_map(|r| if r % 3 == 0 { [0.7, 0.3] } else { [0.2, 0.8] }).collect()
            })
            .collect();
        FactoredMdp::new(MdpParts {
            rho: InitialDistribution::uniform(&spaces),
            graph,
            spaces,
            kernels,
            rewards: vec![vec![0.1, 0.4, 0.9, 0.3]; 3],
            reward_bound: 1.0,
            gamma: 0.5,
            tau: 0.2,
            default_state: vec![1, 0, 1],
            default_action: vec![0, 1, 1],
        })
        .unwrap()
    }

    #[test]
    fn views_share_one_trajectory() {
        let m = line3();
        let p = uniform_policy(&m, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let traj = collect_trajectory(&m, &p, 50, 1, &mut rng).unwrap();
        assert_eq!(traj.len(), 50);
        // agent 0 sees (s0, s1), agent 2 sees (s1, s2): both carry s1
        for t in 0..50 {
            let v0 = traj.view(0).state_index[t] as usize;
            let v2 = traj.view(2).state_index[t] as usize;
            assert_eq!(v0 >> 1, v2 & 1);
            assert_eq!(v0 >> 1, traj.state(t)[1]);
        }
        let one = collect_trajectory(&m, &p, 1, 1, &mut rng).unwrap();
        assert!((0..3).all(|i| one.view(i).reward.len() == 1));
    }

    #[test]
    fn aggregate_matches_hand_expansion() {
        let m = line3();
        let tables: Vec<TruncatedQ> = (0..3)
            .map(|j| {
                let mut q = TruncatedQ::zeros(&m, j, 1).unwrap();
                q.table_mut().iter_mut().enumerate().for_each(|(k, x)| *x = (k * (j + 2)) as f64 * 0.01);
                q
            })
            .collect();
        // agent 1, kappa = 1: all three tables, no defaults needed
        let s = [1, 0, 1];
        let a = [0, 1, 1];
        let want = (tables[0].at_global(&s, &a) + tables[1].at_global(&s, &a) + tables[2].at_global(&s, &a)) / 3.0;
        assert!((aggregate_q(&m, 1, 1, &tables, &s, &a) - want).abs() < 1e-15);
        // agent 0, kappa = 0: only table 0, with s1, a1 taken from the defaults
        let want0 = tables[0].at_global(&[0, 0, 1], &[1, 1, 1]) / 3.0;
        assert!((aggregate_q(&m, 0, 0, &tables, &[0], &[1]) - want0).abs() < 1e-15);
        let zeros: Vec<TruncatedQ> = (0..3).map(|j| TruncatedQ::zeros(&m, j, 1).unwrap()).collect();
        assert_eq!(aggregate_q(&m, 2, 1, &zeros, &[0, 0], &[0, 0]), 0.0);
    }

    #[test]
    fn flat_q_keeps_uniform() {
        let m = line3();
        let tables: Vec<TruncatedQ> = (0..3)
            .map(|j| {
                let mut q = TruncatedQ::zeros(&m, j, 1).unwrap();
                q.table_mut().iter_mut().for_each(|x| *x = 4.0);
                q
            })
            .collect();
        let p = soft_policy_improvement(&m, &tables, 1, 1.0, 0.5, 7).unwrap();
        assert!(p.parts().iter().all(|k| k.table().iter().all(|&x| (x - 0.5).abs() < 1e-15)));
        assert!(soft_policy_improvement(&m, &tables, 1, 3.0, 0.5, 1).is_err());
    }

    #[test]
    fn single_agent_improvement_is_softmax() {
        let spaces = vec![AgentSpace { states: 2, actions: 3 }];
        let m = FactoredMdp::new(MdpParts {
            rho: InitialDistribution::uniform(&spaces),
            graph: NetworkGraph::line(1).unwrap(),
            spaces,
            kernels: vec![vec![0.5; 12]],
            rewards: vec![vec![0.0; 6]],
            reward_bound: 1.0,
            gamma: 0.5,
            tau: 0.3,
            default_state: vec![0],
            default_action: vec![0],
        })
        .unwrap();
        let mut q = TruncatedQ::zeros(&m, 0, 0).unwrap();
        q.table_mut().copy_from_slice(&[0.1, 0.5, -0.2, 1.0, 0.0, 0.3]);
        let tau = 0.3;
        let one = soft_policy_improvement(&m, &[q.clone()], 0, 1.0 / tau, tau, 1).unwrap();
        let many = soft_policy_improvement(&m, &[q.clone()], 0, 0.5 / tau, tau, 200).unwrap();
        for x in 0..2 {
            let row = &q.table()[x * 3..x * 3 + 3];
            let z: f64 = row.iter().map(|v| (v / tau).exp()).sum();
            for (a, &v) in row.iter().enumerate() {
                let want = (v / tau).exp() / z;
                assert!((one.part(0).row(x)[a] - want).abs() < 1e-12);
                assert!((many.part(0).row(x)[a] - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_iterations_return_uniform() {
        let m = line3();
        let cfg = LpiConfig {
            outer_iterations: 0,
            ..Default::default()
        };
        let eval = TdEvaluator {
            schedule: StepSchedule::constant(0.1),
        };
        let out = lpi_run(&m, &cfg, &eval).unwrap();
        assert_eq!(out.policy, uniform_policy(&m, 1).unwrap());
        assert_eq!(out.metrics.rows.len(), 1);
    }

    #[test]
    fn runs_are_deterministic() {
        let m = line3();
        let cfg = LpiConfig {
            outer_iterations: 3,
            trajectory_len: 500,
            eta: 1.0,
            tau: 0.2,
            ..Default::default()
        };
        let eval = TdEvaluator {
            schedule: StepSchedule::constant(0.1),
        };
        let a = lpi_run(&m, &cfg, &eval).unwrap();
        let b = lpi_run(&m, &cfg, &eval).unwrap();
        assert_eq!(a.metrics.rows, b.metrics.rows);
        assert_eq!(a.policy, b.policy);
        assert_eq!(a.metrics.rows.len(), 4);
        assert!(a.metrics.rows.iter().all(|r| r.exact_objective.is_some()));
    }
}
