//! Undirected interaction graphs with hop distances and κ-hop neighborhoods.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sentinel stored for unreachable pairs; never observed after construction
/// because disconnected graphs are rejected.
pub const UNREACHABLE: usize = usize::MAX;

/// An immutable undirected graph over agents `0..n` with all-pairs hop distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkGraph {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    dist: Vec<Vec<usize>>,
}

/// The agents within `radius` hops of `center`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    pub center: usize,
    pub radius: usize,
    pub members: Vec<usize>,
}

impl Neighborhood {
    pub fn contains(&self, agent: usize) -> bool {
        self.members.binary_search(&agent).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl NetworkGraph {
    /// Builds the graph and its distance table (one BFS per agent).
    ///
    /// Duplicate pairs (in either orientation) are merged. Self-loops,
    /// out-of-range endpoints, and disconnected graphs are rejected.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::AgentOutOfRange { agent: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let dist: Vec<Vec<usize>> = (0..n).map(|s| bfs(&adjacency, s)).collect();
        if let Some(j) = dist[0].iter().position(|&d| d == UNREACHABLE) {
            return Err(Error::Disconnected(j));
        }
        Ok(Self { n, adjacency, dist })
    }

    pub fn line(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::build(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Self::line(n);
        }
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((n - 1, 0));
        Self::build(n, &edges)
    }

    /// Star with agent 0 at the center.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::build(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, i: usize, j: usize) -> usize {
        self.dist[i][j]
    }

    /// Adjacent agents, excluding `i` itself.
    pub fn adjacent(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Normalized edge list `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    pub fn diameter(&self) -> usize {
        self.dist
            .iter()
            .flat_map(|row| row.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn neighborhood(&self, center: usize, radius: usize) -> Neighborhood {
        let members = (0..self.n)
            .filter(|&j| self.dist[center][j] <= radius)
            .collect();
        Neighborhood {
            center,
            radius,
            members,
        }
    }

    /// Size of the largest `radius`-hop neighborhood.
    pub fn f_kappa(&self, radius: usize) -> usize {
        (0..self.n)
            .map(|i| self.dist[i].iter().filter(|&&d| d <= radius).count())
            .max()
            .unwrap_or(0)
    }
}

/// Graph description as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    Line { n: usize },
    Cycle { n: usize },
    Star { n: usize },
    Edges { n: usize, edges: Vec<(usize, usize)> },
}

impl GraphSpec {
    pub fn n(&self) -> usize {
        match self {
            GraphSpec::Line { n }
            | GraphSpec::Cycle { n }
            | GraphSpec::Star { n }
            | GraphSpec::Edges { n, .. } => *n,
        }
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Ok(match self {
            GraphSpec::Line { .. } => GraphSpec::Line { n },
            GraphSpec::Cycle { .. } => GraphSpec::Cycle { n },
            GraphSpec::Star { .. } => GraphSpec::Star { n },
            GraphSpec::Edges { .. } => {
                return Err(Error::InvalidParameter(
                    "an explicit edge list cannot be resized by an n sweep".into(),
                ))
            }
        })
    }

    pub fn build(&self) -> Result<NetworkGraph> {
        match self {
            GraphSpec::Line { n } => NetworkGraph::line(*n),
            GraphSpec::Cycle { n } => NetworkGraph::cycle(*n),
            GraphSpec::Star { n } => NetworkGraph::star(*n),
            GraphSpec::Edges { n, edges } => NetworkGraph::build(*n, edges),
        }
    }
}

fn bfs(adjacency: &[Vec<usize>], source: usize) -> Vec<usize> {
    let mut dist = vec![UNREACHABLE; adjacency.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}
