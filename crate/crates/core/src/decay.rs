//! Interaction matrices and polynomial-decay certificates.
//!
//! Every entry is an exact supremum obtained by enumeration; a per-entry cap
//! bounds the number of enumerated perturbations.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::exact::{all_local_q, policy_value, sup_diff, ExactModel};
use crate::graph::NetworkGraph;
use crate::mdp::FactoredMdp;
use crate::policy::{max_row_tv, sigma_regularity, tv_distance, JointPolicy};
use crate::truncated::TruncatedQ;

/// Default cap on enumerated perturbations per matrix entry.
pub const DEFAULT_DIAGNOSTIC_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Transition,
    Policy,
    Q,
    SecondOrder,
    Other,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::Transition => "c",
            MatrixKind::Policy => "policy",
            MatrixKind::Q => "q",
            MatrixKind::SecondOrder => "second-order",
            MatrixKind::Other => "other",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    pub kind: MatrixKind,
    n: usize,
    entries: Vec<f64>,
}

impl InteractionMatrix {
    pub fn zeros(kind: MatrixKind, n: usize) -> Self {
        Self {
            kind,
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn from_rows(kind: MatrixKind, rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("interaction matrix must be square".into()));
        }
        if rows.iter().flatten().any(|x| !(*x >= 0.0)) {
            return Err(Error::InvalidParameter("interaction matrix entries must be non-negative".into()));
        }
        Ok(Self {
            kind,
            n,
            entries: rows.concat(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(MatrixKind::Other, n);
        (0..n).for_each(|i| m.set(i, i, 1.0));
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.entries[i * self.n..(i + 1) * self.n].iter().sum()
    }

    /// `c * self + d * other`.
    pub fn combine(&self, c: f64, other: &Self, d: f64) -> Self {
        Self {
            kind: MatrixKind::Other,
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(x, y)| c * x + d * y).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(MatrixKind::Other, n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCertificate {
    pub mu: f64,
    pub nu: f64,
    pub axis: Axis,
    pub index: usize,
}

/// Largest distance-weighted row or column sum with weight `(dist + 1)^mu`.
pub fn decay_check(graph: &NetworkGraph, a: &InteractionMatrix, mu: f64) -> Result<DecayCertificate> {
    if !(mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("decay exponent {mu} must be non-negative")));
    }
    let n = a.n();
    let w = |i: usize, j: usize| ((graph.dist(i, j) + 1) as f64).powf(mu);
    let mut best = DecayCertificate {
        mu,
        nu: 0.0,
        axis: Axis::Row,
        index: 0,
    };
    for i in 0..n {
        let row: f64 = (0..n).map(|j| a.get(i, j) * w(i, j)).sum();
        if row > best.nu {
            best = DecayCertificate { mu, nu: row, axis: Axis::Row, index: i };
        }
    }
    for j in 0..n {
        let col: f64 = (0..n).map(|i| a.get(i, j) * w(i, j)).sum();
        if col > best.nu {
            best = DecayCertificate { mu, nu: col, axis: Axis::Column, index: j };
        }
    }
    Ok(best)
}

/// Recomputes the weighted sum named by a certificate's witness.
pub fn witness_sum(graph: &NetworkGraph, a: &InteractionMatrix, cert: &DecayCertificate) -> f64 {
    let w = |i: usize, j: usize| ((graph.dist(i, j) + 1) as f64).powf(cert.mu);
    let k = cert.index;
    (0..a.n())
        .map(|x| match cert.axis {
            Axis::Row => a.get(k, x) * w(k, x),
            Axis::Column => a.get(x, k) * w(x, k),
        })
        .sum()
}

/// Largest excess of a tail sum over `nu / (kappa + 1)^mu`, across all rows
/// and radii up to the diameter. Non-positive means the tail bound holds.
pub fn tail_violation(graph: &NetworkGraph, a: &InteractionMatrix, cert: &DecayCertificate) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..a.n() {
        for kappa in 0..=graph.diameter() {
            let tail: f64 = (0..a.n()).filter(|&j| graph.dist(i, j) > kappa).map(|j| a.get(i, j)).sum();
            worst = worst.max(tail - cert.nu / ((kappa + 1) as f64).powf(cert.mu));
        }
    }
    worst
}

/// Smallest regularization weight for which the decay exponent below is
/// positive: `6 rbar (4 - 3 gamma) / (4 - 5 gamma) * A^2 * e`.
pub fn min_tau_for_decay(gamma: f64, reward_bound: f64, max_actions: usize) -> f64 {
    6.0 * reward_bound * (4.0 - 3.0 * gamma) / (4.0 - 5.0 * gamma) * (max_actions * max_actions) as f64 * std::f64::consts::E
}

/// Decay exponent guaranteed for the optimal policy:
/// `min(log2(tau / min_tau), log2(1 / (2 max_i sum_j C_ij)))` with `min_tau`
/// from [`min_tau_for_decay`].
/// Needs `gamma < 0.8`.
pub fn optimal_policy_exponent(m: &FactoredMdp, c: &InteractionMatrix) -> Result<f64> {
    let gamma = m.gamma();
    if !(gamma < 0.8) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be below 0.8")));
    }
    let from_tau = (m.tau() / min_tau_for_decay(gamma, m.reward_bound(), m.max_actions())).log2();
    let worst_row = (0..c.n()).map(|i| c.row_sum(i)).fold(0.0, f64::max);
    let from_c = if worst_row == 0.0 { f64::INFINITY } else { (1.0 / (2.0 * worst_row)).log2() };
    Ok(from_tau.min(from_c))
}

/// Upper bound on the optimality gap of the best κ-hop policy.
pub fn kappa_gap_bound(gamma: f64, reward_bound: f64, kappa: usize, mu: f64) -> f64 {
    reward_bound * (4.0 - 3.0 * gamma) / ((1.0 - gamma) * (4.0 - 5.0 * gamma)) * ((kappa + 1) as f64).powf(-mu)
}

/// Constants of the policy class preserved by exact policy iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureConstants {
    /// Decay constant of the policy interaction matrix.
    pub nu: f64,
    /// Regularity of every iterate.
    pub sigma: f64,
    /// Decay constant of the local Q interaction matrix.
    pub nu_prime: f64,
}

pub fn closure_constants(m: &FactoredMdp) -> ClosureConstants {
    let gamma = m.gamma();
    let rbar = m.reward_bound();
    let n = m.n() as f64;
    let sigma = rbar * (4.0 - 3.0 * gamma) / ((4.0 - 5.0 * gamma) * n * m.tau());
    ClosureConstants {
        nu: 0.5,
        sigma,
        nu_prime: rbar + gamma * (rbar + n * m.tau() * sigma) / (4.0 * (1.0 - gamma)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraReport {
    pub nu_a: f64,
    pub nu_b: f64,
    pub nu_sum: f64,
    pub nu_product: f64,
    pub sum_holds: bool,
    pub product_holds: bool,
}

/// Checks that `c A + d B` is `(c nu_A + d nu_B)`-decay and that `A B` is
/// `(nu_A nu_B)`-decay for the given exponent.
pub fn decay_algebra_checks(
    graph: &NetworkGraph,
    a: &InteractionMatrix,
    b: &InteractionMatrix,
    c: f64,
    d: f64,
    mu: f64,
) -> Result<AlgebraReport> {
    if !(c >= 0.0 && d >= 0.0) {
        return Err(Error::InvalidParameter("combination weights must be non-negative".into()));
    }
    let nu_a = decay_check(graph, a, mu)?.nu;
    let nu_b = decay_check(graph, b, mu)?.nu;
    let nu_sum = decay_check(graph, &a.combine(c, b, d), mu)?.nu;
    let nu_product = decay_check(graph, &a.matmul(b), mu)?.nu;
    let slack = |x: f64| 1e-12 * (1.0 + x.abs());
    let sum_bound = c * nu_a + d * nu_b;
    let product_bound = nu_a * nu_b;
    Ok(AlgebraReport {
        nu_a,
        nu_b,
        nu_sum,
        nu_product,
        sum_holds: nu_sum <= sum_bound + slack(sum_bound),
        product_holds: nu_product <= product_bound + slack(product_bound),
    })
}

fn check_count(count: u128, cap: usize) -> Result<()> {
    if count > cap as u128 {
        return Err(Error::CapExceeded {
            what: "perturbations per matrix entry",
            size: count,
            cap: cap as u128,
        });
    }
    Ok(())
}

/// Kernel sensitivity matrix: how far agent `i`'s next-state law can move when
/// neighbor `j`'s state changes (or, on the diagonal, its own state and action).
pub fn c_matrix(m: &FactoredMdp, cap: usize) -> Result<InteractionMatrix> {
    let n = m.n();
    let mut out = InteractionMatrix::zeros(MatrixKind::Transition, n);
    for i in 0..n {
        let kernel = m.kernel(i);
        let codec = kernel.codec();
        let actions = m.spaces()[i].actions;
        for (pos, &j) in codec.members().iter().enumerate() {
            let radix = codec.radix(pos);
            let stride = codec.stride(pos);
            let own = i == j;
            let action_pairs = if own { actions * actions } else { actions };
            check_count(codec.size() as u128 * radix as u128 * action_pairs as u128, cap)?;
            let mut best: f64 = 0.0;
            for x in 0..codec.size() {
                let base = x - codec.digit(x, pos) * stride;
                for alt in 0..radix {
                    let y = base + alt * stride;
                    if y <= x && !own {
                        continue;
                    }
                    for a in 0..actions {
                        if own {
                            for b in 0..actions {
                                best = best.max(tv_distance(kernel.row(x, a), kernel.row(y, b)));
                            }
                        } else {
                            best = best.max(tv_distance(kernel.row(x, a), kernel.row(y, a)));
                        }
                    }
                }
            }
            out.set(i, j, best);
        }
    }
    Ok(out)
}

/// Policy sensitivity matrix: largest TV change of agent `i`'s action law when
/// only agent `j`'s state changes.
pub fn policy_interaction(m: &FactoredMdp, policy: &JointPolicy, cap: usize) -> Result<InteractionMatrix> {
    let n = m.n();
    let mut out = InteractionMatrix::zeros(MatrixKind::Policy, n);
    for part in policy.parts() {
        let i = part.agent();
        let codec = part.codec();
        for (pos, &j) in codec.members().iter().enumerate() {
            let radix = codec.radix(pos);
            let stride = codec.stride(pos);
            check_count(codec.size() as u128 * radix as u128, cap)?;
            let mut best: f64 = 0.0;
            for x in 0..codec.size() {
                let base = x - codec.digit(x, pos) * stride;
                for alt in 0..radix {
                    let y = base + alt * stride;
                    if y > x {
                        best = best.max(tv_distance(part.row(x), part.row(y)));
                    }
                }
            }
            out.set(i, j, best);
        }
    }
    Ok(out)
}

/// Walks every group of `S x A` cells that differ only in the local
/// state-action of the agents in `agents`, handing the group's values to `f`.
fn for_each_group<F>(model: &ExactModel, q: &[f64], agents: &[usize], mut f: F)
where
    F: FnMut(&[f64]),
{
    let sc = model.state_codec();
    let ac = model.action_codec();
    let na = model.num_actions();
    let dims: Vec<(usize, usize, usize, usize)> = agents
        .iter()
        .map(|&j| (sc.stride(j), sc.radix(j), ac.stride(j), ac.radix(j)))
        .collect();
    let group: usize = dims.iter().map(|d| d.1 * d.3).product();
    let mut buf = vec![0.0; group];
    for s in 0..model.num_states() {
        if dims.iter().any(|d| (s / d.0) % d.1 != 0) {
            continue;
        }
        for a in 0..na {
            if dims.iter().any(|d| (a / d.2) % d.3 != 0) {
                continue;
            }
            for (g, slot) in buf.iter_mut().enumerate() {
                let (mut ds, mut da, mut rest) = (0, 0, g);
                for d in &dims {
                    let zs = rest % d.1;
                    rest /= d.1;
                    let za = rest % d.3;
                    rest /= d.3;
                    ds += zs * d.0;
                    da += za * d.2;
                }
                *slot = q[(s + ds) * na + a + da];
            }
            f(&buf);
        }
    }
}

/// Q sensitivity matrix: largest change of `Q_i` when only agent `j`'s
/// state-action changes. `tables[i]` is a dense `S x A` table.
pub fn q_interaction(model: &ExactModel, tables: &[Vec<f64>], cap: usize) -> Result<InteractionMatrix> {
    let n = model.mdp().n();
    if tables.len() != n {
        return Err(Error::InvalidParameter("one Q table per agent required".into()));
    }
    check_count((model.num_states() * model.num_actions()) as u128, cap)?;
    let mut out = InteractionMatrix::zeros(MatrixKind::Q, n);
    for (i, q) in tables.iter().enumerate() {
        for j in 0..n {
            let mut best: f64 = 0.0;
            for_each_group(model, q, &[j], |g| {
                let hi = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lo = g.iter().cloned().fold(f64::INFINITY, f64::min);
                best = best.max(hi - lo);
            });
            out.set(i, j, best);
        }
    }
    Ok(out)
}

/// Mixed second differences of a global Q table; zero diagonal.
pub fn second_order_interaction(model: &ExactModel, q: &[f64], cap: usize) -> Result<InteractionMatrix> {
    let n = model.mdp().n();
    let sp = model.mdp().spaces();
    let mut out = InteractionMatrix::zeros(MatrixKind::SecondOrder, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (zi, zj) = (sp[i].states * sp[i].actions, sp[j].states * sp[j].actions);
            check_count((model.num_states() * model.num_actions() * zi * zj) as u128, cap)?;
            let mut best: f64 = 0.0;
            // group layout: index = zi_digit + zi_size * zj_digit (state digit before action digit)
            for_each_group(model, q, &[i, j], |g| {
                for x in 0..zi {
                    for x2 in 0..zi {
                        for y in 0..zj {
                            for y2 in 0..zj {
                                let v = (g[x + zi * y] - g[x2 + zi * y]) - (g[x + zi * y2] - g[x2 + zi * y2]);
                                best = best.max(v.abs());
                            }
                        }
                    }
                }
            });
            out.set(i, j, best);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    /// `sup_{s,a} |Q_i(s,a) - Qhat_i(...)|` per agent.
    pub per_agent: Vec<f64>,
    pub empirical: f64,
    pub nu: f64,
    pub bound: f64,
}

impl TruncationReport {
    pub fn holds(&self) -> bool {
        self.empirical <= self.bound * (1.0 + 1e-9) + 1e-12
    }
}

/// Compares full local Q tables with their truncations.
pub fn truncation_error(
    model: &ExactModel,
    full: &[Vec<f64>],
    truncated: &[TruncatedQ],
    beta: usize,
    mu: f64,
    cap: usize,
) -> Result<TruncationReport> {
    let m = model.mdp();
    let na = model.num_actions();
    let mut s = vec![0; m.n()];
    let mut a = vec![0; m.n()];
    let mut per_agent = Vec::with_capacity(m.n());
    for (q, t) in full.iter().zip(truncated) {
        if t.radius() != beta {
            return Err(Error::InvalidParameter("truncated table radius does not match beta".into()));
        }
        let mut worst: f64 = 0.0;
        for si in 0..model.num_states() {
            model.state_codec().scatter(si, &mut s);
            for ai in 0..na {
                model.action_codec().scatter(ai, &mut a);
                worst = worst.max((q[si * na + ai] - t.at_global(&s, &a)).abs());
            }
        }
        per_agent.push(worst);
    }
    let zq = q_interaction(model, full, cap)?;
    let nu = decay_check(m.graph(), &zq, mu)?.nu;
    Ok(TruncationReport {
        empirical: per_agent.iter().cloned().fold(0.0, f64::max),
        per_agent,
        nu,
        bound: nu / ((beta + 1) as f64).powf(mu),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceReport {
    pub lhs: f64,
    pub rhs: f64,
    pub certified_nu: f64,
}

impl PerformanceReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Compares `sup |V^zeta - V^zeta_tilde|` with the TV-weighted bound. Both
/// policies must be `sigma`-regular and the local Q tables of `zeta_tilde`
/// must certify `(nu_prime, mu)`-decay.
#[allow(clippy::too_many_arguments)]
pub fn performance_difference(
    model: &ExactModel,
    zeta: &JointPolicy,
    zeta_tilde: &JointPolicy,
    sigma: f64,
    nu_prime: f64,
    mu: f64,
    tol: f64,
    cap: usize,
) -> Result<PerformanceReport> {
    let m = model.mdp();
    for (name, p) in [("zeta", zeta), ("zeta_tilde", zeta_tilde)] {
        let s = sigma_regularity(p)?;
        if s > sigma * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "{name} is {s}-regular, not {sigma}-regular"
            )));
        }
    }
    let qs = all_local_q(model, zeta_tilde, tol)?;
    let certified_nu = decay_check(m.graph(), &q_interaction(model, &qs, cap)?, mu)?.nu;
    if certified_nu > nu_prime * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "local Q tables certify nu = {certified_nu}, above the supplied {nu_prime}"
        )));
    }
    let v = policy_value(model, zeta, tol)?;
    let vt = policy_value(model, zeta_tilde, tol)?;
    let tv_sum: f64 = max_row_tv(m, zeta_tilde, zeta, model.num_states())?.iter().sum();
    let n = m.n() as f64;
    Ok(PerformanceReport {
        lhs: sup_diff(&v, &vt),
        rhs: (m.tau() * sigma + nu_prime / n) * tv_sum / (1.0 - m.gamma()) + 4.0 * tol,
        certified_nu,
    })
}

/// Matrix CSV with a header naming kind, exponent, certified constant and
/// witness.
pub fn matrix_csv(a: &InteractionMatrix, cert: Option<&DecayCertificate>) -> String {
    let mut out = String::from("# schema: netlpi-matrix/v1\n");
    match cert {
        Some(c) => {
            let axis = match c.axis {
                Axis::Row => "row",
                Axis::Column => "column",
            };
            let _ = writeln!(out, "# kind={} mu={} nu={:.17e} witness={}:{}", a.kind, c.mu, c.nu, axis, c.index);
        }
        None => {
            let _ = writeln!(out, "# kind={}", a.kind);
        }
    }
    out.push_str("i,j,value\n");
    for i in 0..a.n() {
        for j in 0..a.n() {
            let _ = writeln!(out, "{i},{j},{:.17e}", a.get(i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{AgentSpace, InitialDistribution, MdpParts};
    use crate::policy::{uniform_policy, KHopPolicy};
    use crate::truncated::point_mass_truncation;
    use proptest::prelude::*;

    fn two_agents(kernels: Vec<Vec<f64>>, actions: usize) -> FactoredMdp {
        let spaces = vec![AgentSpace { states: 2, actions }; 2];
        FactoredMdp::new(MdpParts {
            rho: InitialDistribution::uniform(&spaces),
            graph: NetworkGraph::line(2).unwrap(),
            spaces,
            kernels,
            rewards: vec![vec![0.0; 2 * actions]; 2],
            reward_bound: 1.0,
            gamma: 0.5,
            tau: 0.1,
            default_state: vec![0, 0],
            default_action: vec![0, 0],
        })
        .unwrap()
    }

    #[test]
    fn c_matrix_cases() {
        // neighbor-blind and action-blind
        let flat = two_agents(vec![vec![0.5; 16], vec![0.5; 16]], 2);
        let c = c_matrix(&flat, DEFAULT_DIAGNOSTIC_CAP).unwrap();
        assert!((0..2).all(|i| (0..2).all(|j| c.get(i, j) == 0.0)));

        // agent 0 reacts to s1: rows (0.8, 0.2) vs (0.5, 0.5); agent 1 reacts to its own action
        let mut k0 = Vec::new();
        for idx in 0..4 {
            let s1 = idx >> 1;
            for _a in 0..2 {
                k0.extend(if s1 == 0 { [0.8, 0.2] } else { [0.5, 0.5] });
            }
        }
        let mut k1 = Vec::new();
        for _idx in 0..4 {
            for a in 0..2 {
                k1.extend(if a == 0 { [0.9, 0.1] } else { [0.3, 0.7] });
            }
        }
        let c = c_matrix(&two_agents(vec![k0, k1], 2), DEFAULT_DIAGNOSTIC_CAP).unwrap();
        assert!((c.get(0, 1) - 0.3).abs() < 1e-15);
        assert_eq!(c.get(1, 0), 0.0);
        assert!((c.get(1, 1) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn policy_interaction_cases() {
        let m = two_agents(vec![vec![0.5; 16], vec![0.5; 16]], 2);
        let u = uniform_policy(&m, 1).unwrap();
        let z = policy_interaction(&m, &u, DEFAULT_DIAGNOSTIC_CAP).unwrap();
        assert!((0..2).all(|i| (0..2).all(|j| z.get(i, j) == 0.0)));
        let copy = JointPolicy::new(vec![
            KHopPolicy::from_fn(&m, 0, 1, |idx, row| {
                let s1 = idx >> 1;
                row.copy_from_slice(if s1 == 1 { &[0.0, 1.0] } else { &[1.0, 0.0] });
            })
            .unwrap(),
            KHopPolicy::uniform(&m, 1, 0).unwrap(),
        ])
        .unwrap();
        let z = policy_interaction(&m, &copy, DEFAULT_DIAGNOSTIC_CAP).unwrap();
        assert_eq!(z.get(0, 1), 1.0);
        assert_eq!(z.get(0, 0), 0.0);
        assert_eq!(z.get(1, 0), 0.0);
    }

    #[test]
    fn second_order_of_product() {
        let m = two_agents(vec![vec![0.5; 8], vec![0.5; 8]], 1);
        let model = ExactModel::new(&m, 1 << 20).unwrap();
        // Q(z0, z1) = z0 * z1 with a single action per agent
        let q: Vec<f64> = (0..4).map(|s| ((s & 1) * (s >> 1)) as f64).collect();
        let h = second_order_interaction(&model, &q, DEFAULT_DIAGNOSTIC_CAP).unwrap();
        assert_eq!(h.get(0, 1), 1.0);
        assert_eq!(h.get(1, 0), 1.0);
        assert_eq!(h.get(0, 0), 0.0);
        let sep: Vec<f64> = (0..4).map(|s| (s & 1) as f64 * 2.0 + (s >> 1) as f64).collect();
        let h = second_order_interaction(&model, &sep, DEFAULT_DIAGNOSTIC_CAP).unwrap();
        assert_eq!(h.get(0, 1), 0.0);
        let zq = q_interaction(&model, &[sep.clone(), vec![3.0; 4]], DEFAULT_DIAGNOSTIC_CAP).unwrap();
        assert_eq!(zq.get(0, 0), 2.0);
        assert_eq!(zq.get(0, 1), 1.0);
        assert_eq!(zq.get(1, 0), 0.0);
    }

    #[test]
    fn identity_and_zero_certificates() {
        let g = NetworkGraph::line(4).unwrap();
        for mu in [0.0, 0.5, 3.0] {
            assert!((decay_check(&g, &InteractionMatrix::identity(4), mu).unwrap().nu - 1.0).abs() < 1e-15);
            assert_eq!(decay_check(&g, &InteractionMatrix::zeros(MatrixKind::Other, 4), mu).unwrap().nu, 0.0);
        }
        let r = decay_algebra_checks(&g, &InteractionMatrix::identity(4), &InteractionMatrix::identity(4), 1.0, 1.0, 1.0).unwrap();
        assert!(r.product_holds && r.nu_product <= 1.0);
    }

    #[test]
    fn full_radius_truncation_is_exact() {
        let m = two_agents(vec![vec![0.5; 16], vec![0.5; 16]], 2);
        let model = ExactModel::new(&m, 1 << 20).unwrap();
        let qs: Vec<Vec<f64>> = (0..2)
            .map(|i| (0..16).map(|k| ((k * 7 + i) % 5) as f64).collect())
            .collect();
        let t: Vec<TruncatedQ> = (0..2).map(|i| point_mass_truncation(&model, &qs[i], i, 1).unwrap()).collect();
        let r = truncation_error(&model, &qs, &t, 1, 1.0, DEFAULT_DIAGNOSTIC_CAP).unwrap();
        assert_eq!(r.empirical, 0.0);
    }

    fn matrix(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(0.0f64..1.0, n), n)
    }

    proptest! {
        #[test]
        fn tail_bound_holds(rows in matrix(6), mu in 0.0f64..3.0) {
            let g = NetworkGraph::line(6).unwrap();
            let a = InteractionMatrix::from_rows(MatrixKind::Other, &rows).unwrap();
            let cert = decay_check(&g, &a, mu).unwrap();
            prop_assert!(tail_violation(&g, &a, &cert) <= 1e-12);
            prop_assert!((witness_sum(&g, &a, &cert) - cert.nu).abs() <= 1e-12);
        }
    }
}
