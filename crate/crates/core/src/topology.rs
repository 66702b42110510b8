//! Hardware connectivity graphs.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{QaeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyKind {
    /// All-to-all connectivity.
    Complete,
    /// Two-layer crossbar lattice with maximum degree 4.
    GridLike,
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopologyKind::Complete => "complete",
            TopologyKind::GridLike => "grid-like",
        })
    }
}

impl FromStr for TopologyKind {
    type Err = QaeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(TopologyKind::Complete),
            "grid-like" | "grid" => Ok(TopologyKind::GridLike),
            other => Err(QaeError::Parameter(format!("unknown topology `{other}`"))),
        }
    }
}

/// Undirected simple graph over nodes `0..num_nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopologyGraph {
    kind: TopologyKind,
    adjacency: Vec<Vec<usize>>,
    edges: BTreeSet<(usize, usize)>,
}

impl TopologyGraph {
    pub fn from_edges(
        kind: TopologyKind,
        num_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(QaeError::Validation(format!("self-loop on node {a}")));
            }
            if a >= num_nodes || b >= num_nodes {
                return Err(QaeError::Validation(format!("edge ({a}, {b}) references a missing node")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut adjacency = vec![Vec::new(); num_nodes];
        for &(a, b) in &set {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = TopologyGraph {
            kind,
            adjacency,
            edges: set,
        };
        if !graph.is_connected() {
            return Err(QaeError::Validation("topology is not connected".into()));
        }
        Ok(graph)
    }

    /// Side length of a grid-like crossbar, `None` for other kinds.
    pub fn grid_side(&self) -> Option<usize> {
        if self.kind != TopologyKind::GridLike {
            return None;
        }
        let side = ((self.num_nodes() / 2) as f64).sqrt().round() as usize;
        (2 * side * side == self.num_nodes()).then_some(side)
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Whether `nodes` induce a connected subgraph (false when empty).
    pub fn induces_connected(&self, nodes: &BTreeSet<usize>) -> bool {
        let Some(&first) = nodes.iter().next() else {
            return false;
        };
        let mut seen = BTreeSet::from([first]);
        let mut queue = VecDeque::from([first]);
        while let Some(x) = queue.pop_front() {
            for &y in self.neighbors(x) {
                if nodes.contains(&y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen.len() == nodes.len()
    }

    pub fn is_connected(&self) -> bool {
        let all: BTreeSet<usize> = (0..self.num_nodes()).collect();
        self.induces_connected(&all)
    }
}

/// Builds a topology able to host a fully connected problem of `size` variables.
///
/// `Complete` gives the clique on `size` nodes. `GridLike` gives a `size × size` crossbar:
/// every site `(r, c)` holds a horizontal-layer node linked to its left/right
/// neighbours and a vertical-layer node linked up/down, and the two nodes of a site are
/// coupled to each other and to the vertical node of the next diagonal site, so no node
/// has more than 4 neighbours. Node `h(r, c) = r·size + c`, `v(r, c) = size² + r·size + c`.
pub fn build_topology(kind: TopologyKind, size: usize) -> Result<TopologyGraph> {
    if size == 0 {
        return Err(QaeError::Parameter("topology size must be at least 1".into()));
    }
    match kind {
        TopologyKind::Complete => {
            let edges = (0..size).flat_map(|a| ((a + 1)..size).map(move |b| (a, b)));
            TopologyGraph::from_edges(kind, size, edges)
        }
        TopologyKind::GridLike => {
            if size < 2 {
                return Err(QaeError::Parameter("grid-like topology needs size >= 2".into()));
            }
            let l = size;
            let h = |r: usize, c: usize| r * l + c;
            let v = |r: usize, c: usize| l * l + r * l + c;
            let mut edges = Vec::new();
            for r in 0..l {
                for c in 0..l {
                    if c + 1 < l {
                        edges.push((h(r, c), h(r, c + 1)));
                    }
                    if r + 1 < l {
                        edges.push((v(r, c), v(r + 1, c)));
                    }
                    edges.push((h(r, c), v(r, c)));
                    if r + 1 < l && c + 1 < l {
                        edges.push((h(r, c), v(r + 1, c + 1)));
                    }
                }
            }
            TopologyGraph::from_edges(kind, 2 * l * l, edges)
        }
    }
}
