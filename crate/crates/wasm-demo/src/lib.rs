//! Three small views onto the library for a static browser page: a rollout
//! of the spreading process, the exact κ-gap table of a small random
//! network, and the convergence trace of multiplicative weights.
//!
//! Every export returns a JSON string so the page needs no glue beyond the
//! generated bindings. Errors come back as `{"error": "..."}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use netlpi::decay::{c_matrix, min_tau_for_decay, optimal_policy_exponent, DEFAULT_DIAGNOSTIC_CAP};
use netlpi::envs::{random_factored_mdp, spreading_env, spreading_flags, RandomMdpParams, SpreadingParams};
use netlpi::exact::{objective_from_values, optimal_value, ExactModel};
use netlpi::graph::GraphSpec;
use netlpi::harness::kappa_gap_table;
use netlpi::mw::mw_maximize;
use netlpi::policy::{JointPolicy, KHopPolicy};

const EXACT_CAP: usize = 1 << 14;

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}")),
        Err(e) => serde_json::json!({ "error": e }).to_string(),
    }
}

#[derive(Serialize)]
pub struct RolloutStep {
    pub spreading: usize,
    pub protected: usize,
    pub reward: f64,
}

fn rollout(n: usize, protect: f64, steps: usize, seed: u64) -> Result<Vec<RolloutStep>, String> {
    if !(0.0..=1.0).contains(&protect) {
        return Err("protect probability must lie in [0, 1]".into());
    }
    let m = spreading_env(&SpreadingParams::new(n), 0.95, 0.05, None).map_err(|e| e.to_string())?;
    let parts = (0..n)
        .map(|i| {
            KHopPolicy::from_fn(&m, i, 0, |_, row| {
                row[0] = 1.0 - protect;
                row[1] = protect;
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let policy = JointPolicy::new(parts).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = m.sample_initial(&mut rng);
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let a = policy.sample_action(&s, &mut rng);
        let flags: Vec<(usize, usize)> = s.iter().map(|&x| spreading_flags(x)).collect();
        out.push(RolloutStep {
            spreading: flags.iter().filter(|f| f.0 == 1).count(),
            protected: flags.iter().filter(|f| f.1 == 1).count(),
            reward: m.global_reward(&s, &a),
        });
        s = m.sample_step(&s, &a, &mut rng);
    }
    Ok(out)
}

/// Spreading process on a line of `n` agents where every agent protects
/// with probability `protect`. One entry per step.
#[wasm_bindgen]
pub fn spreading_rollout(n: usize, protect: f64, steps: usize, seed: u64) -> String {
    to_json(rollout(n, protect, steps, seed))
}

#[derive(Serialize)]
pub struct GapPoint {
    pub kappa: usize,
    pub gap: f64,
    pub bound: f64,
}

#[derive(Serialize)]
pub struct GapTable {
    pub optimum: f64,
    pub mu: f64,
    pub tau: f64,
    pub rows: Vec<GapPoint>,
}

fn gaps(n: usize, budget: f64, seed: u64) -> Result<GapTable, String> {
    let gamma = 0.5;
    let tau = 1.1 * min_tau_for_decay(gamma, 1.0, 2);
    let m = random_factored_mdp(&RandomMdpParams {
        graph: GraphSpec::Line { n },
        states: 2,
        actions: 2,
        interaction_budget: budget,
        reward_bound: 1.0,
        gamma,
        tau,
        seed,
    })
    .map_err(|e| e.to_string())?;
    let model = ExactModel::new(&m, EXACT_CAP).map_err(|e| e.to_string())?;
    let c = c_matrix(&m, DEFAULT_DIAGNOSTIC_CAP).map_err(|e| e.to_string())?;
    let mu = optimal_policy_exponent(&m, &c).map_err(|e| e.to_string())?;
    let tol = 1e-9;
    let sol = optimal_value(&model, tol).map_err(|e| e.to_string())?;
    let optimum = objective_from_values(&model, &sol.values);
    let rows = kappa_gap_table(&model, &sol.policy, optimum, Some(mu), tol).map_err(|e| e.to_string())?;
    Ok(GapTable {
        optimum,
        mu,
        tau,
        rows: rows
            .into_iter()
            .map(|r| GapPoint {
                kappa: r.kappa,
                gap: r.gap,
                bound: r.bound.unwrap_or(f64::NAN),
            })
            .collect(),
    })
}

/// Exact gap of the best κ-hop truncation of the optimal policy on a random
/// line of `n` agents, next to the theoretical bound.
#[wasm_bindgen]
pub fn kappa_gap(n: usize, budget: f64, seed: u64) -> String {
    to_json(gaps(n, budget, seed))
}

#[derive(Serialize)]
pub struct MwTrace {
    pub changes: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub value: f64,
    pub converged: bool,
}

fn mw(agents: usize, actions: usize, tau: f64, eta_tau: f64, seed: u64) -> Result<MwTrace, String> {
    if agents == 0 || actions == 0 || agents > 6 || actions > 4 {
        return Err("use 1 to 6 agents with 1 to 4 actions".into());
    }
    if !(tau > 0.0 && eta_tau > 0.0 && eta_tau <= 1.0) {
        return Err("need tau > 0 and eta * tau in (0, 1]".into());
    }
    let radices = vec![actions; agents];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q: Vec<f64> = (0..actions.pow(agents as u32)).map(|_| rng.gen::<f64>()).collect();
    let out = mw_maximize(&q, &radices, tau, eta_tau / tau, 500, 1e-12, true);
    Ok(MwTrace {
        changes: out.trace,
        rows: out.rows,
        value: out.value,
        converged: out.converged,
    })
}

/// Multiplicative weights on a random joint payoff: largest per-agent change
/// at every iteration, final rows and objective.
#[wasm_bindgen]
pub fn mw_convergence(agents: usize, actions: usize, tau: f64, eta_tau: f64, seed: u64) -> String {
    to_json(mw(agents, actions, tau, eta_tau, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rollout_counts_stay_in_range() {
        let steps = rollout(5, 0.3, 40, 1).unwrap();
        assert_eq!(steps.len(), 40);
        assert!(steps.iter().all(|s| s.spreading <= 5 && s.protected <= 5));
        assert_eq!(steps[0].spreading, 1);
    }

    #[test]
    fn gap_table_is_within_bound() {
        let t = gaps(3, 0.2, 0).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows.iter().all(|r| r.gap <= r.bound));
    }

    #[test]
    fn mw_converges_for_a_single_agent() {
        let t = mw(1, 3, 0.5, 1.0, 2).unwrap();
        assert!(t.converged);
        assert!(t.changes.len() <= 3);
    }

    #[test]
    fn errors_are_json() {
        assert!(spreading_rollout(3, 2.0, 5, 0).contains("error"));
        assert!(mw_convergence(9, 2, 1.0, 1.0, 0).contains("error"));
    }
}
