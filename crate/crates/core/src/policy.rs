//! Localized policy tables.
//!
//! A [`KHopPolicy`] maps the joint state of an agent's κ-hop neighborhood to a
//! distribution over that agent's actions. A [`JointPolicy`] is a product of
//! one such table per agent.

use std::fmt::Write as _;

use rand::Rng;

use crate::codec::SubsetCodec;
use crate::error::{Error, Result};
use crate::mdp::{sample_categorical, FactoredMdp, DEFAULT_SPACE_CAP, PROB_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct KHopPolicy {
    agent: usize,
    radius: usize,
    codec: SubsetCodec,
    actions: usize,
    table: Vec<f64>,
}

impl KHopPolicy {
    /// Builds a table for `agent` over its `radius`-hop neighborhood.
    /// Rows are laid out contiguously, one per neighborhood-state index.
    pub fn new(m: &FactoredMdp, agent: usize, radius: usize, table: Vec<f64>) -> Result<Self> {
        let codec = neighborhood_codec(m, agent, radius)?;
        let actions = m.spaces()[agent].actions;
        if table.len() != codec.size() * actions {
            return Err(Error::InvalidPolicy(format!(
                "agent {agent}: table has {} entries, expected {}",
                table.len(),
                codec.size() * actions
            )));
        }
        let mut p = Self {
            agent,
            radius,
            codec,
            actions,
            table,
        };
        p.normalize_rows()?;
        Ok(p)
    }

    pub fn uniform(m: &FactoredMdp, agent: usize, radius: usize) -> Result<Self> {
        let codec = neighborhood_codec(m, agent, radius)?;
        let actions = m.spaces()[agent].actions;
        Ok(Self {
            agent,
            radius,
            table: vec![1.0 / actions as f64; codec.size() * actions],
            codec,
            actions,
        })
    }

    /// Fills a table by evaluating `row_fn` at each neighborhood-state index.
    pub fn from_fn<F>(m: &FactoredMdp, agent: usize, radius: usize, mut row_fn: F) -> Result<Self>
    where
        F: FnMut(usize, &mut [f64]),
    {
        let mut p = Self::uniform(m, agent, radius)?;
        let actions = p.actions;
        for (idx, row) in p.table.chunks_mut(actions).enumerate() {
            row_fn(idx, row);
        }
        p.normalize_rows()?;
        Ok(p)
    }

    fn normalize_rows(&mut self) -> Result<()> {
        let agent = self.agent;
        for (r, row) in self.table.chunks_mut(self.actions).enumerate() {
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(Error::InvalidPolicy(format!(
                    "agent {agent}, row {r}: negative or non-finite probability"
                )));
            }
            let sum: f64 = row.iter().sum();
            if !(sum > 0.0) {
                return Err(Error::InvalidPolicy(format!("agent {agent}, row {r}: zero row")));
            }
            if (sum - 1.0).abs() > PROB_TOL {
                row.iter_mut().for_each(|p| *p /= sum);
            }
        }
        Ok(())
    }

    pub fn agent(&self) -> usize {
        self.agent
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn codec(&self) -> &SubsetCodec {
        &self.codec
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn rows(&self) -> usize {
        self.codec.size()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.table[index * self.actions..(index + 1) * self.actions]
    }

    pub fn row_for(&self, global_state: &[usize]) -> &[f64] {
        self.row(self.codec.encode_global(global_state))
    }
}

fn neighborhood_codec(m: &FactoredMdp, agent: usize, radius: usize) -> Result<SubsetCodec> {
    if agent >= m.n() {
        return Err(Error::AgentOutOfRange { agent, n: m.n() });
    }
    let members = m.graph().neighborhood(agent, radius).members;
    SubsetCodec::new(&members, &m.state_sizes(), DEFAULT_SPACE_CAP)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointPolicy {
    parts: Vec<KHopPolicy>,
}

impl JointPolicy {
    pub fn new(parts: Vec<KHopPolicy>) -> Result<Self> {
        for (i, p) in parts.iter().enumerate() {
            if p.agent != i {
                return Err(Error::InvalidPolicy(format!("part {i} belongs to agent {}", p.agent)));
            }
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[KHopPolicy] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &KHopPolicy {
        &self.parts[i]
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    /// `prod_i zeta_i(a_i | s)`.
    pub fn prob(&self, s: &[usize], a: &[usize]) -> f64 {
        self.parts.iter().map(|p| p.row_for(s)[a[p.agent]]).product()
    }

    /// Sum of the per-agent log-probabilities; `-inf` on a zero entry.
    pub fn log_prob(&self, s: &[usize], a: &[usize]) -> f64 {
        self.parts.iter().map(|p| p.row_for(s)[a[p.agent]].ln()).sum()
    }

    /// Sum of the per-agent row entropies at `s`.
    pub fn entropy(&self, s: &[usize]) -> f64 {
        self.parts.iter().map(|p| policy_entropy(p.row_for(s))).sum()
    }

    /// Draws one action per agent, agents in ascending order.
    pub fn sample_action<R: Rng + ?Sized>(&self, s: &[usize], rng: &mut R) -> Vec<usize> {
        self.parts
            .iter()
            .map(|p| sample_categorical(p.row_for(s), rng))
            .collect()
    }
}

/// Every agent uniform over its actions, conditioned on its κ-hop neighborhood.
pub fn uniform_policy(m: &FactoredMdp, kappa: usize) -> Result<JointPolicy> {
    JointPolicy::new(
        (0..m.n())
            .map(|i| KHopPolicy::uniform(m, i, kappa))
            .collect::<Result<_>>()?,
    )
}

/// Restricts each agent's rows to its κ-hop neighborhood by filling every
/// state outside with the default state.
pub fn truncate_policy(policy: &JointPolicy, kappa: usize, m: &FactoredMdp) -> Result<JointPolicy> {
    let n = m.n();
    let mut parts = Vec::with_capacity(n);
    for src in policy.parts() {
        let i = src.agent;
        let codec = neighborhood_codec(m, i, kappa)?;
        let mut global = m.default_state().to_vec();
        parts.push(KHopPolicy::from_fn(m, i, kappa, |idx, row| {
            codec.scatter(idx, &mut global);
            row.copy_from_slice(src.row_for(&global));
        })?);
    }
    JointPolicy::new(parts)
}

/// Largest log-ratio between two action probabilities in any row.
pub fn sigma_regularity(policy: &JointPolicy) -> Result<f64> {
    let mut sigma: f64 = 0.0;
    for p in policy.parts() {
        for r in 0..p.rows() {
            let row = p.row(r);
            let (lo, hi) = row
                .iter()
                .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
            if lo <= 0.0 {
                return Err(Error::InvalidPolicy(format!(
                    "agent {} row {r} has a zero entry; not sigma-regular for any finite sigma",
                    p.agent
                )));
            }
            sigma = sigma.max((hi / lo).ln());
        }
    }
    Ok(sigma)
}

/// Shannon entropy with `0 log 0 = 0`.
pub fn policy_entropy(row: &[f64]) -> f64 {
    -row.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Largest row-wise TV distance between two policies of matching shapes,
/// per agent, taken over all global states.
pub fn max_row_tv(m: &FactoredMdp, a: &JointPolicy, b: &JointPolicy, cap: usize) -> Result<Vec<f64>> {
    let codec = m.global_state_codec(cap)?;
    let mut out = vec![0.0_f64; m.n()];
    let mut s = vec![0; m.n()];
    for idx in 0..codec.size() {
        codec.scatter(idx, &mut s);
        for (i, o) in out.iter_mut().enumerate() {
            *o = o.max(tv_distance(a.part(i).row_for(&s), b.part(i).row_for(&s)));
        }
    }
    Ok(out)
}

/// Checkpoint text format.
///
/// ```text
/// # netlpi-policy v1
/// agent <i> radius <k> members <j0,j1,...> actions <m> rows <r>
/// <i> <row> <p0> <p1> ...
/// ```
pub fn write_policy(policy: &JointPolicy) -> String {
    let mut out = String::from("# netlpi-policy v1\n");
    for p in policy.parts() {
        let members: Vec<String> = p.codec.members().iter().map(|j| j.to_string()).collect();
        let _ = writeln!(
            out,
            "agent {} radius {} members {} actions {} rows {}",
            p.agent,
            p.radius,
            members.join(","),
            p.actions,
            p.rows()
        );
        for r in 0..p.rows() {
            let _ = write!(out, "{} {}", p.agent, r);
            for x in p.row(r) {
                let _ = write!(out, " {x:e}");
            }
            out.push('\n');
        }
    }
    out
}

pub fn read_policy(m: &FactoredMdp, text: &str) -> Result<JointPolicy> {
    let bad = |line: usize, what: &str| Error::Parse(format!("policy line {}: {what}", line + 1));
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let mut parts = Vec::new();
    while let Some((ln, header)) = lines.next() {
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 10 || f[0] != "agent" || f[2] != "radius" || f[6] != "actions" || f[8] != "rows" {
            return Err(bad(ln, "expected an agent header"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad(ln, "bad integer"));
        let agent = num(f[1])?;
        let radius = num(f[3])?;
        let rows = num(f[9])?;
        let mut table = Vec::new();
        for r in 0..rows {
            let (ln, line) = lines.next().ok_or_else(|| bad(ln, "truncated table"))?;
            let mut it = line.split_whitespace();
            let a = it.next().and_then(|x| x.parse::<usize>().ok());
            let rr = it.next().and_then(|x| x.parse::<usize>().ok());
            if a != Some(agent) || rr != Some(r) {
                return Err(bad(ln, "row out of order"));
            }
            for x in it {
                table.push(x.parse::<f64>().map_err(|_| bad(ln, "bad probability"))?);
            }
        }
        let p = KHopPolicy::new(m, agent, radius, table)?;
        let members: Vec<String> = p.codec.members().iter().map(|j| j.to_string()).collect();
        if members.join(",") != f[5] {
            return Err(bad(ln, "member list does not match the graph"));
        }
        parts.push(p);
    }
    JointPolicy::new(parts)
}
