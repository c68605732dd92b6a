use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use netlpi::decay::{c_matrix, policy_interaction, DEFAULT_DIAGNOSTIC_CAP};
use netlpi::envs::{random_factored_mdp, spreading_env, RandomMdpParams, SpreadingParams};
use netlpi::exact::{all_local_q, global_q, local_policy_value, policy_value, ExactModel};
use netlpi::graph::GraphSpec;
use netlpi::lpi::aggregate_q;
use netlpi::mdp::FactoredMdp;
use netlpi::policy::{uniform_policy, JointPolicy, KHopPolicy};
use netlpi::truncated::point_mass_truncation;
use rand::Rng;

fn instance(kind: u8, n: usize, seed: u64) -> FactoredMdp {
    let graph = match kind {
        0 => GraphSpec::Line { n },
        1 => GraphSpec::Cycle { n: n.max(3) },
        _ => GraphSpec::Star { n },
    };
    random_factored_mdp(&RandomMdpParams {
        graph,
        states: 2,
        actions: 2,
        interaction_budget: 0.6,
        reward_bound: 1.0,
        gamma: 0.8,
        tau: 0.3,
        seed,
    })
    .unwrap()
}

fn random_policy(m: &FactoredMdp, radius: usize, seed: u64) -> JointPolicy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    JointPolicy::new(
        (0..m.n())
            .map(|i| {
                KHopPolicy::from_fn(m, i, radius, |_, row| {
                    row.iter_mut().for_each(|p| *p = 0.05 + rng.gen::<f64>())
                })
                .unwrap()
            })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn local_values_average_to_global(kind in 0u8..3, n in 2usize..4, seed in 0u64..1000, radius in 0usize..3) {
        let m = instance(kind, n, seed);
        let model = ExactModel::new(&m, 1 << 12).unwrap();
        let policy = random_policy(&m, radius, seed);
        let global = policy_value(&model, &policy, 1e-12).unwrap();
        let locals: Vec<Vec<f64>> = (0..m.n())
            .map(|i| local_policy_value(&model, &policy, i, 1e-12).unwrap())
            .collect();
        for (s, g) in global.iter().enumerate() {
            let mean = locals.iter().map(|v| v[s]).sum::<f64>() / m.n() as f64;
            prop_assert!((mean - g).abs() < 1e-8);
        }
    }

    #[test]
    fn full_radius_aggregate_is_global_q(kind in 0u8..3, n in 2usize..4, seed in 0u64..1000) {
        let m = instance(kind, n, seed);
        let model = ExactModel::new(&m, 1 << 12).unwrap();
        let policy = random_policy(&m, 1, seed + 1);
        let d = m.graph().diameter();
        let tables: Vec<_> = all_local_q(&model, &policy, 1e-12)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(i, q)| point_mass_truncation(&model, q, i, d).unwrap())
            .collect();
        let q = global_q(&model, &policy, 1e-12).unwrap();
        let na = model.num_actions();
        for si in 0..model.num_states() {
            let s = model.state_codec().decode(si);
            for ai in 0..na {
                let a = model.action_codec().decode(ai);
                for agent in 0..m.n() {
                    let agg = aggregate_q(&m, agent, d, &tables, &s, &a);
                    prop_assert!((agg - q[si * na + ai]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn kernel_sensitivity_stays_one_hop(kind in 0u8..3, n in 2usize..6, seed in 0u64..1000) {
        let m = instance(kind, n, seed);
        let c = c_matrix(&m, DEFAULT_DIAGNOSTIC_CAP).unwrap();
        for i in 0..m.n() {
            for j in 0..m.n() {
                prop_assert!(c.get(i, j) >= 0.0 && c.get(i, j) <= 1.0 + 1e-12);
                if m.graph().dist(i, j) > 1 {
                    prop_assert_eq!(c.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn policy_interaction_respects_radius(kind in 0u8..3, n in 3usize..6, seed in 0u64..1000, radius in 0usize..2) {
        let m = instance(kind, n, seed);
        let policy = random_policy(&m, radius, seed);
        let z = policy_interaction(&m, &policy, DEFAULT_DIAGNOSTIC_CAP).unwrap();
        for i in 0..m.n() {
            for j in 0..m.n() {
                if m.graph().dist(i, j) > radius {
                    prop_assert_eq!(z.get(i, j), 0.0);
                }
            }
        }
    }
}

#[test]
fn uniform_policy_has_no_interaction() {
    let m = instance(1, 5, 3);
    let z = policy_interaction(&m, &uniform_policy(&m, 2).unwrap(), DEFAULT_DIAGNOSTIC_CAP).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(z.get(i, j), 0.0);
        }
    }
}

#[test]
fn spreading_sensitivity_is_sparse() {
    let m = spreading_env(&SpreadingParams::new(6), 0.95, 0.05, None).unwrap();
    let c = c_matrix(&m, DEFAULT_DIAGNOSTIC_CAP).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let d = m.graph().dist(i, j);
            if d > 1 {
                assert_eq!(c.get(i, j), 0.0);
            } else {
                assert!(c.get(i, j) > 0.0, "({i}, {j})");
            }
        }
    }
}
