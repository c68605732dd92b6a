//! Truncated local Q tables indexed by β-hop neighborhood state-actions.

use std::fmt::Write as _;

use crate::codec::SubsetCodec;
use crate::error::{Error, Result};
use crate::exact::ExactModel;
use crate::mdp::{FactoredMdp, DEFAULT_SPACE_CAP};

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedQ {
    agent: usize,
    radius: usize,
    states: SubsetCodec,
    actions: SubsetCodec,
    table: Vec<f64>,
}

impl TruncatedQ {
    pub fn zeros(m: &FactoredMdp, agent: usize, radius: usize) -> Result<Self> {
        Self::zeros_capped(m, agent, radius, DEFAULT_SPACE_CAP)
    }

    pub fn zeros_capped(m: &FactoredMdp, agent: usize, radius: usize, cap: usize) -> Result<Self> {
        if agent >= m.n() {
            return Err(Error::AgentOutOfRange { agent, n: m.n() });
        }
        let members = m.graph().neighborhood(agent, radius).members;
        let states = SubsetCodec::new(&members, &m.state_sizes(), cap)?;
        let actions = SubsetCodec::new(&members, &m.action_sizes(), cap)?;
        let cells = states.size() as u128 * actions.size() as u128;
        if cells > cap as u128 {
            return Err(Error::CapExceeded {
                what: "truncated Q cells",
                size: cells,
                cap: cap as u128,
            });
        }
        Ok(Self {
            agent,
            radius,
            table: vec![0.0; states.size() * actions.size()],
            states,
            actions,
        })
    }

    pub fn agent(&self) -> usize {
        self.agent
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn state_codec(&self) -> &SubsetCodec {
        &self.states
    }

    pub fn action_codec(&self) -> &SubsetCodec {
        &self.actions
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut [f64] {
        &mut self.table
    }

    pub fn cell(&self, state_index: usize, action_index: usize) -> usize {
        state_index * self.actions.size() + action_index
    }

    pub fn get(&self, state_index: usize, action_index: usize) -> f64 {
        self.table[self.cell(state_index, action_index)]
    }

    /// Value at the restriction of a global state-action pair.
    pub fn at_global(&self, s: &[usize], a: &[usize]) -> f64 {
        self.get(self.states.encode_global(s), self.actions.encode_global(a))
    }
}

/// Truncates a dense `S x A` local Q table by evaluating it at the default
/// state and action outside the β-hop neighborhood.
pub fn point_mass_truncation(model: &ExactModel, q: &[f64], agent: usize, beta: usize) -> Result<TruncatedQ> {
    let m = model.mdp();
    let mut out = TruncatedQ::zeros(m, agent, beta)?;
    let na = model.num_actions();
    let mut s = m.default_state().to_vec();
    let mut a = m.default_action().to_vec();
    let asize = out.actions.size();
    for x in 0..out.states.size() {
        out.states.scatter(x, &mut s);
        let gs = model.state_codec().encode(&s);
        for y in 0..asize {
            out.actions.scatter(y, &mut a);
            let ga = model.action_codec().encode(&a);
            out.table[x * asize + y] = q[gs * na + ga];
        }
    }
    Ok(out)
}

/// Checkpoint text format.
///
/// ```text
/// # netlpi-qtable v1
/// qtable <agent> radius <beta> states <S> actions <A>
/// <agent> <state-index> <q0> <q1> ...
/// ```
pub fn write_qtables(tables: &[TruncatedQ]) -> String {
    let mut out = String::from("# netlpi-qtable v1\n");
    for q in tables {
        let _ = writeln!(
            out,
            "qtable {} radius {} states {} actions {}",
            q.agent,
            q.radius,
            q.states.size(),
            q.actions.size()
        );
        for x in 0..q.states.size() {
            let _ = write!(out, "{} {}", q.agent, x);
            for y in 0..q.actions.size() {
                let _ = write!(out, " {:e}", q.get(x, y));
            }
            out.push('\n');
        }
    }
    out
}

pub fn read_qtables(m: &FactoredMdp, text: &str) -> Result<Vec<TruncatedQ>> {
    let bad = |line: usize, what: &str| Error::Parse(format!("qtable line {}: {what}", line + 1));
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let mut out = Vec::new();
    while let Some((ln, header)) = lines.next() {
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 8 || f[0] != "qtable" || f[2] != "radius" || f[4] != "states" || f[6] != "actions" {
            return Err(bad(ln, "expected a qtable header"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad(ln, "bad integer"));
        let mut q = TruncatedQ::zeros(m, num(f[1])?, num(f[3])?)?;
        if q.states.size() != num(f[5])? || q.actions.size() != num(f[7])? {
            return Err(bad(ln, "table shape does not match the graph"));
        }
        let width = q.actions.size();
        for x in 0..q.states.size() {
            let (ln, line) = lines.next().ok_or_else(|| bad(ln, "truncated table"))?;
            let vals: Vec<&str> = line.split_whitespace().collect();
            if vals.len() != width + 2 || vals[0].parse::<usize>().ok() != Some(q.agent) || vals[1].parse::<usize>().ok() != Some(x) {
                return Err(bad(ln, "malformed row"));
            }
            for (y, v) in vals[2..].iter().enumerate() {
                q.table[x * width + y] = v.parse().map_err(|_| bad(ln, "bad value"))?;
            }
        }
        out.push(q);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NetworkGraph;
    use crate::mdp::{AgentSpace, InitialDistribution, MdpParts};

    fn tiny() -> FactoredMdp {
        let graph = NetworkGraph::line(3).unwrap();
        let spaces = vec![AgentSpace { states: 2, actions: 2 }; 3];
        let kernels = (0..3)
            .map(|i| vec![0.5; 2usize.pow(graph.neighborhood(i, 1).len() as u32) * 2 * 2])
            .collect();
        FactoredMdp::new(MdpParts {
            rho: InitialDistribution::uniform(&spaces),
            graph,
            spaces,
            kernels,
            rewards: vec![vec![0.0; 4]; 3],
            reward_bound: 1.0,
            gamma: 0.5,
            tau: 0.1,
            default_state: vec![1, 0, 1],
            default_action: vec![0, 1, 0],
        })
        .unwrap()
    }

    #[test]
    fn shapes_follow_neighborhoods() {
        let m = tiny();
        let q = TruncatedQ::zeros(&m, 0, 1).unwrap();
        assert_eq!(q.state_codec().members(), &[0, 1]);
        assert_eq!(q.table().len(), 16);
    }

    #[test]
    fn point_mass_uses_defaults() {
        let m = tiny();
        let model = ExactModel::new(&m, 1 << 20).unwrap();
        let q: Vec<f64> = (0..model.num_states() * model.num_actions()).map(|k| k as f64).collect();
        let t = point_mass_truncation(&model, &q, 0, 0).unwrap();
        // s = (x, 0, 1), a = (y, 1, 0)
        for x in 0..2 {
            for y in 0..2 {
                let gs = x + 4;
                let ga = y + 2;
                assert_eq!(t.get(x, y), q[gs * 8 + ga]);
            }
        }
        let full = point_mass_truncation(&model, &q, 2, 2).unwrap();
        assert_eq!(full.table(), &q[..]);
    }

    #[test]
    fn checkpoint_round_trip() {
        let m = tiny();
        let mut q = TruncatedQ::zeros(&m, 1, 1).unwrap();
        q.table_mut().iter_mut().enumerate().for_each(|(k, x)| *x = k as f64 / 7.0);
        let back = read_qtables(&m, &write_qtables(&[q.clone()])).unwrap();
        assert_eq!(back, vec![q]);
    }
}
