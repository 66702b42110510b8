//! Minor embedding of logical QUBOs onto a [`TopologyGraph`] with chains of hardware
//! nodes, chain strength selection and chain-break resolution.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QaeError, Result};
use crate::qubo::QuboModel;
use crate::topology::{TopologyGraph, TopologyKind};

/// Chains of hardware nodes, one per logical variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    chains: Vec<BTreeSet<usize>>,
}

impl Embedding {
    pub fn new(chains: Vec<BTreeSet<usize>>) -> Self {
        Embedding { chains }
    }

    /// One node per variable, variable `i` on node `i`.
    pub fn identity(num_vars: usize) -> Self {
        Embedding {
            chains: (0..num_vars).map(|i| BTreeSet::from([i])).collect(),
        }
    }

    pub fn chains(&self) -> &[BTreeSet<usize>] {
        &self.chains
    }

    pub fn chain(&self, var: usize) -> &BTreeSet<usize> {
        &self.chains[var]
    }

    pub fn num_vars(&self) -> usize {
        self.chains.len()
    }

    pub fn num_hardware_nodes(&self) -> usize {
        self.chains.iter().map(BTreeSet::len).sum()
    }

    pub fn max_chain_length(&self) -> usize {
        self.chains.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Every hardware node used by some chain, ascending.
    pub fn used_nodes(&self) -> Vec<usize> {
        let all: BTreeSet<usize> = self.chains.iter().flatten().copied().collect();
        all.into_iter().collect()
    }

    /// Checks disjointness, chain connectivity and coverage of every nonzero coupling.
    pub fn validate(&self, model: &QuboModel, topo: &TopologyGraph) -> Result<()> {
        if self.chains.len() != model.num_vars() {
            return Err(QaeError::Embedding(format!(
                "{} chains for {} variables",
                self.chains.len(),
                model.num_vars()
            )));
        }
        let mut owner = vec![usize::MAX; topo.num_nodes()];
        for (var, chain) in self.chains.iter().enumerate() {
            if chain.is_empty() {
                return Err(QaeError::Embedding(format!("chain of variable {var} is empty")));
            }
            for &node in chain {
                if node >= topo.num_nodes() {
                    return Err(QaeError::Embedding(format!("node {node} is not in the topology")));
                }
                if owner[node] != usize::MAX {
                    return Err(QaeError::Embedding(format!(
                        "node {node} shared by variables {} and {var}",
                        owner[node]
                    )));
                }
                owner[node] = var;
            }
            if !topo.induces_connected(chain) {
                return Err(QaeError::Embedding(format!("chain of variable {var} is disconnected")));
            }
        }
        for (&(u, v), &w) in model.quadratic() {
            if w != 0.0 && connecting_edge(topo, &self.chains[u], &self.chains[v]).is_none() {
                return Err(QaeError::Embedding(format!(
                    "no topology edge joins the chains of {u} and {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Lowest topology edge `(a, b)` with `a` in `from` and `b` in `to`.
fn connecting_edge(
    topo: &TopologyGraph,
    from: &BTreeSet<usize>,
    to: &BTreeSet<usize>,
) -> Option<(usize, usize)> {
    from.iter()
        .find_map(|&a| topo.neighbors(a).iter().find(|b| to.contains(b)).map(|&b| (a, b)))
}

/// Interaction graph of the nonzero couplings.
fn logical_neighbors(model: &QuboModel) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); model.num_vars()];
    for (&(u, v), &w) in model.quadratic() {
        if w != 0.0 {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    adj
}

const MAX_TRIES: usize = 4;
const MAX_PASSES: usize = 64;

/// Finds an embedding of `model` into `topo`.
///
/// On a complete topology the identity embedding is returned. A crossbar with side at
/// least the variable count takes the clique template (pruned to the couplings actually
/// present), since the sub-problems of the workflow are dense. Otherwise variables are
/// placed in descending coupling degree; each is rooted at the node minimising the total
/// path cost to its already placed neighbours and its chain grows along those shortest
/// paths. Overlapping chains are allowed at a rising cost and are ripped up and rerouted
/// pass after pass until all chains are disjoint.
pub fn embed(model: &QuboModel, topo: &TopologyGraph, seed: u64) -> Result<Embedding> {
    let n = model.num_vars();
    if n == 0 {
        return Err(QaeError::Embedding("model has no variables".into()));
    }
    if n > topo.num_nodes() {
        return Err(QaeError::Embedding(format!(
            "{n} variables cannot fit on {} nodes",
            topo.num_nodes()
        )));
    }
    if topo.kind() == TopologyKind::Complete {
        let emb = Embedding::identity(n);
        emb.validate(model, topo)?;
        return Ok(emb);
    }

    let neighbors = logical_neighbors(model);
    if let Some(side) = topo.grid_side().filter(|&side| side >= n) {
        let mut emb = clique_template(n, side);
        prune_chains(&mut emb, topo, &neighbors);
        emb.validate(model, topo)?;
        return Ok(emb);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&u| (Reverse(neighbors[u].len()), u));

    for attempt in 0..MAX_TRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (attempt as u64).wrapping_mul(0x9E37_79B9));
        if attempt > 0 {
            // keep the degree ordering but shuffle within equal-degree groups
            let jitter: Vec<u32> = (0..n).map(|_| rng.gen()).collect();
            order.sort_by_key(|&u| (Reverse(neighbors[u].len()), jitter[u]));
        }
        let mut router = Router::new(topo, &neighbors, &mut rng);
        if let Some(chains) = router.run(&order) {
            let mut emb = Embedding { chains };
            prune_chains(&mut emb, topo, &neighbors);
            if emb.validate(model, topo).is_ok() {
                return Ok(emb);
            }
        }
    }
    Err(QaeError::Embedding(format!(
        "no embedding of {n} variables found after {MAX_TRIES} attempts"
    )))
}

/// Variable `i` takes row `i` of the horizontal layer up to column `i` and column `i`
/// of the vertical layer from row `i` down; chains `i < j` meet at site `(j, i)`.
fn clique_template(n: usize, side: usize) -> Embedding {
    let h = |r: usize, c: usize| r * side + c;
    let v = |r: usize, c: usize| side * side + r * side + c;
    let chains = (0..n)
        .map(|i| (0..=i).map(|c| h(i, c)).chain((i..n).map(|r| v(r, i))).collect())
        .collect();
    Embedding { chains }
}

struct Router<'a> {
    topo: &'a TopologyGraph,
    neighbors: &'a [Vec<usize>],
    chains: Vec<BTreeSet<usize>>,
    occupancy: Vec<u32>,
    history: Vec<f64>,
    jitter: Vec<f64>,
}

impl<'a> Router<'a> {
    fn new(topo: &'a TopologyGraph, neighbors: &'a [Vec<usize>], rng: &mut ChaCha8Rng) -> Self {
        let jitter = (0..topo.num_nodes()).map(|_| 1e-3 * rng.gen::<f64>()).collect();
        Router {
            topo,
            neighbors,
            chains: vec![BTreeSet::new(); neighbors.len()],
            occupancy: vec![0; topo.num_nodes()],
            history: vec![0.0; topo.num_nodes()],
            jitter,
        }
    }

    fn cost(&self, node: usize, pressure: f64) -> f64 {
        let occupied = self.occupancy[node] as f64;
        (1.0 + self.history[node] + self.jitter[node]) * (1.0 + pressure * occupied)
    }

    fn run(&mut self, order: &[usize]) -> Option<Vec<BTreeSet<usize>>> {
        for pass in 0..MAX_PASSES {
            let pressure = 2.0 + pass as f64;
            for &u in order {
                self.place(u, pressure);
            }
            let overused: Vec<usize> = (0..self.occupancy.len())
                .filter(|&x| self.occupancy[x] > 1)
                .collect();
            if overused.is_empty() {
                return Some(std::mem::take(&mut self.chains));
            }
            for x in overused {
                self.history[x] += 0.5 * (self.occupancy[x] - 1) as f64;
            }
        }
        None
    }

    fn place(&mut self, u: usize, pressure: f64) {
        for &x in &self.chains[u] {
            self.occupancy[x] -= 1;
        }
        self.chains[u].clear();

        let placed: Vec<usize> = self.neighbors[u]
            .iter()
            .copied()
            .filter(|&v| !self.chains[v].is_empty())
            .collect();
        let nodes = self.topo.num_nodes();
        let node_cost: Vec<f64> = (0..nodes).map(|x| self.cost(x, pressure)).collect();

        if placed.is_empty() {
            let root = (0..nodes)
                .min_by(|&a, &b| node_cost[a].total_cmp(&node_cost[b]))
                .expect("topology has nodes");
            self.chains[u].insert(root);
            self.occupancy[root] += 1;
            return;
        }

        let searches: Vec<(Vec<f64>, Vec<usize>)> = placed
            .iter()
            .map(|&v| self.shortest_paths(&self.chains[v], &node_cost))
            .collect();
        let root = (0..nodes)
            .filter(|x| searches.iter().all(|(d, _)| d[*x].is_finite()))
            .min_by(|&a, &b| {
                let total = |x: usize| {
                    searches.iter().map(|(d, _)| d[x]).sum::<f64>()
                        - (searches.len() - 1) as f64 * node_cost[x]
                };
                total(a).total_cmp(&total(b))
            });
        let Some(root) = root else {
            // no node reaches every neighbour; fall back to a lone cheapest node
            let root = (0..nodes)
                .min_by(|&a, &b| node_cost[a].total_cmp(&node_cost[b]))
                .expect("topology has nodes");
            self.chains[u].insert(root);
            self.occupancy[root] += 1;
            return;
        };

        let mut chain = BTreeSet::from([root]);
        for (_, prev) in &searches {
            let mut x = root;
            while prev[x] != usize::MAX {
                x = prev[x];
                chain.insert(x);
            }
        }
        for &x in &chain {
            self.occupancy[x] += 1;
        }
        self.chains[u] = chain;
    }

    /// Dijkstra from the neighbourhood of `source` (excluding `source` itself). `prev`
    /// walks back towards the source and ends with `usize::MAX` on the first node.
    fn shortest_paths(&self, source: &BTreeSet<usize>, node_cost: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let nodes = self.topo.num_nodes();
        let mut dist = vec![f64::INFINITY; nodes];
        let mut prev = vec![usize::MAX; nodes];
        let mut heap = BinaryHeap::new();
        for &s in source {
            for &x in self.topo.neighbors(s) {
                if !source.contains(&x) && node_cost[x] < dist[x] {
                    dist[x] = node_cost[x];
                    heap.push((Reverse(OrdF64(dist[x])), x));
                }
            }
        }
        while let Some((Reverse(OrdF64(d)), x)) = heap.pop() {
            if d > dist[x] {
                continue;
            }
            for &y in self.topo.neighbors(x) {
                if source.contains(&y) {
                    continue;
                }
                let nd = d + node_cost[y];
                if nd < dist[y] {
                    dist[y] = nd;
                    prev[y] = x;
                    heap.push((Reverse(OrdF64(nd)), y));
                }
            }
        }
        (dist, prev)
    }
}

#[derive(PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Removes chain nodes that are not needed for connectivity or coupling coverage.
fn prune_chains(emb: &mut Embedding, topo: &TopologyGraph, neighbors: &[Vec<usize>]) {
    for (u, links) in neighbors.iter().enumerate() {
        let mut changed = true;
        while changed {
            changed = false;
            let candidates: Vec<usize> = emb.chains[u].iter().copied().collect();
            for x in candidates {
                if emb.chains[u].len() == 1 {
                    break;
                }
                let mut trial = emb.chains[u].clone();
                trial.remove(&x);
                let keeps_links = links
                    .iter()
                    .all(|&v| connecting_edge(topo, &trial, &emb.chains[v]).is_some());
                if keeps_links && topo.induces_connected(&trial) {
                    emb.chains[u] = trial;
                    changed = true;
                }
            }
        }
    }
}

/// Chain coupling magnitude: `factor × RMS` of the quadratic biases. Models without
/// couplings fall back to `factor × max |linear|` (or `factor` when that is zero).
pub fn chain_strength(model: &QuboModel, factor: f64) -> Result<f64> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(QaeError::Parameter(format!("chain strength factor {factor} must be positive")));
    }
    let quad = model.quadratic();
    let base = if quad.is_empty() {
        model.linear().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        (quad.values().map(|w| w * w).sum::<f64>() / quad.len() as f64).sqrt()
    };
    Ok(if base > 0.0 { factor * base } else { factor })
}

/// Hardware QUBO over the topology nodes.
///
/// Each logical linear bias is split evenly across its chain, each logical coupling is
/// placed on the lowest connecting topology edge, and every edge inside a chain gets
/// `−2·strength` with `+strength` on both endpoints, so aligned chains cost nothing and
/// a broken edge costs `strength`.
pub fn embed_apply(
    model: &QuboModel,
    emb: &Embedding,
    topo: &TopologyGraph,
    strength: f64,
) -> Result<QuboModel> {
    if emb.num_vars() != model.num_vars() {
        return Err(QaeError::Embedding(format!(
            "embedding covers {} variables, model has {}",
            emb.num_vars(),
            model.num_vars()
        )));
    }
    let mut hw = QuboModel::new(topo.num_nodes());
    hw.add_offset(model.offset());
    for (u, chain) in emb.chains().iter().enumerate() {
        let share = model.linear()[u] / chain.len() as f64;
        for &x in chain {
            hw.add_linear(x, share);
        }
        for &x in chain {
            for &y in topo.neighbors(x) {
                if x < y && chain.contains(&y) {
                    hw.add_quadratic(x, y, -2.0 * strength);
                    hw.add_linear(x, strength);
                    hw.add_linear(y, strength);
                }
            }
        }
    }
    for (&(u, v), &w) in model.quadratic() {
        if w == 0.0 {
            continue;
        }
        let (a, b) = connecting_edge(topo, emb.chain(u), emb.chain(v)).ok_or_else(|| {
            QaeError::Embedding(format!("no topology edge joins the chains of {u} and {v}"))
        })?;
        hw.add_quadratic(a, b, w);
    }
    Ok(hw)
}

/// Majority vote inside each chain (ties resolve to 1). Returns the logical assignment
/// and the fraction of chains whose nodes disagree.
pub fn unembed(sample: &[u8], emb: &Embedding) -> Result<(Vec<u8>, f64)> {
    let mut broken = 0usize;
    let mut logical = Vec::with_capacity(emb.num_vars());
    for chain in emb.chains() {
        let mut ones = 0usize;
        for &x in chain {
            let bit = *sample.get(x).ok_or_else(|| {
                QaeError::Parameter(format!("sample does not cover hardware node {x}"))
            })?;
            ones += (bit != 0) as usize;
        }
        if ones != 0 && ones != chain.len() {
            broken += 1;
        }
        logical.push((2 * ones >= chain.len()) as u8);
    }
    let fraction = if emb.num_vars() == 0 {
        0.0
    } else {
        broken as f64 / emb.num_vars() as f64
    };
    Ok((logical, fraction))
}
