//! Simulated deployments, the one-hop connectivity graph and multi-hop
//! ranging over it.
//!
//! Localization algorithms never look at ground-truth positions of unknown
//! nodes. Everything they know comes from a [`NetworkGraph`], whose edges
//! carry RSSI-estimated distances between nodes within communication range.
//! Multi-hop distances are sums of those per-hop estimates along the
//! shortest path, which is why they overestimate the straight-line distance
//! whenever the relays do not sit exactly on the chord.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;
use crate::radio::PathLossModel;
use crate::rng::{self, Stream};

pub type NodeId = usize;

/// Default lower bound on the area of every anchor triangle, m².
pub const DEFAULT_MIN_ANCHOR_AREA: f64 = 25.0;
pub const DEFAULT_MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("no valid deployment found after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("node {target} is unreachable from node {from}")]
    Unreachable { from: NodeId, target: NodeId },
    #[error("node {0} does not exist")]
    UnknownNode(NodeId),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid edge {u}-{v}: {reason}")]
    InvalidEdge {
        u: NodeId,
        v: NodeId,
        reason: &'static str,
    },
    #[error("deployment json: {0}")]
    Json(String),
}

/// Parameters for random deployment generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentConfig {
    pub width: f64,
    pub height: f64,
    pub n_unknown: usize,
    pub n_anchors: usize,
    pub comm_range: f64,
    #[serde(default = "default_min_anchor_area")]
    pub min_anchor_area: f64,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: usize,
}

fn default_min_anchor_area() -> f64 {
    DEFAULT_MIN_ANCHOR_AREA
}

fn default_max_attempts() -> usize {
    DEFAULT_MAX_ATTEMPTS
}

impl DeploymentConfig {
    pub fn new(
        width: f64,
        height: f64,
        n_unknown: usize,
        n_anchors: usize,
        comm_range: f64,
    ) -> Self {
        Self {
            width,
            height,
            n_unknown,
            n_anchors,
            comm_range,
            min_anchor_area: DEFAULT_MIN_ANCHOR_AREA,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }

    fn validate(&self) -> Result<(), NetworkError> {
        let bad = |msg: &str| Err(NetworkError::InvalidConfig(msg.to_string()));
        if self.n_anchors < 3 {
            return bad("at least three anchors are required");
        }
        if !(self.width > 0.0
            && self.height > 0.0
            && self.width.is_finite()
            && self.height.is_finite())
        {
            return bad("area must be positive");
        }
        if !(self.comm_range > 0.0 && self.comm_range.is_finite()) {
            return bad("communication range must be positive");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1");
        }
        Ok(())
    }
}

/// Ground truth of one simulated world.
///
/// Anchors are ordinary nodes whose ids appear in `anchor_ids`; their
/// coordinates are known to the algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub width: f64,
    pub height: f64,
    pub nodes: Vec<Point>,
    pub anchor_ids: Vec<NodeId>,
    pub comm_range: f64,
}

impl Deployment {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_anchor(&self, id: NodeId) -> bool {
        self.anchor_ids.contains(&id)
    }

    pub fn anchor_positions(&self) -> Vec<Point> {
        self.anchor_ids.iter().map(|&a| self.nodes[a]).collect()
    }

    /// Ids of all non-anchor nodes, ascending.
    pub fn unknown_ids(&self) -> Vec<NodeId> {
        (0..self.nodes.len())
            .filter(|id| !self.is_anchor(*id))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("deployment serializes")
    }

    /// Parses a deployment from JSON. Extra top-level fields are ignored,
    /// so documents that embed a deployment (such as demo scenes) load too.
    pub fn from_json(s: &str) -> Result<Self, NetworkError> {
        let dep: Deployment =
            serde_json::from_str(s).map_err(|e| NetworkError::Json(e.to_string()))?;
        if let Some(&bad) = dep.anchor_ids.iter().find(|&&a| a >= dep.nodes.len()) {
            return Err(NetworkError::UnknownNode(bad));
        }
        Ok(dep)
    }
}

fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)).abs() / 2.0
}

fn anchors_acceptable(anchors: &[Point], cfg: &DeploymentConfig) -> bool {
    let n = anchors.len();
    for i in 0..n {
        for j in i + 1..n {
            if anchors[i].distance(&anchors[j]) <= cfg.comm_range {
                return false;
            }
            for k in j + 1..n {
                if triangle_area(anchors[i], anchors[j], anchors[k]) <= cfg.min_anchor_area {
                    return false;
                }
            }
        }
    }
    true
}

fn unit_disk_connected(nodes: &[Point], range: f64) -> bool {
    if nodes.is_empty() {
        return true;
    }
    let mut seen = vec![false; nodes.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for v in 0..nodes.len() {
            if !seen[v] && nodes[u].distance(&nodes[v]) <= range {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == nodes.len()
}

/// Samples a deployment from the seed's deployment stream.
pub fn generate_deployment(cfg: &DeploymentConfig, seed: u64) -> Result<Deployment, NetworkError> {
    generate_deployment_with(cfg, &mut rng::stream(seed, Stream::Deployment))
}

/// Samples nodes uniformly over the area, anchors first, and resamples the
/// whole deployment until the anchors are pairwise out of range, every
/// anchor triangle is large enough and the unit-disk graph is connected.
pub fn generate_deployment_with<R: Rng + ?Sized>(
    cfg: &DeploymentConfig,
    rng: &mut R,
) -> Result<Deployment, NetworkError> {
    cfg.validate()?;
    let total = cfg.n_anchors + cfg.n_unknown;
    for _ in 0..cfg.max_attempts {
        let nodes: Vec<Point> = (0..total)
            .map(|_| {
                Point::new(
                    rng.random::<f64>() * cfg.width,
                    rng.random::<f64>() * cfg.height,
                )
            })
            .collect();
        if !anchors_acceptable(&nodes[..cfg.n_anchors], cfg) {
            continue;
        }
        if !unit_disk_connected(&nodes, cfg.comm_range) {
            continue;
        }
        return Ok(Deployment {
            width: cfg.width,
            height: cfg.height,
            nodes,
            anchor_ids: (0..cfg.n_anchors).collect(),
            comm_range: cfg.comm_range,
        });
    }
    Err(NetworkError::GenerationFailed {
        attempts: cfg.max_attempts,
    })
}

/// Symmetric one-hop adjacency with estimated edge lengths.
///
/// Neighbor lists are kept sorted by node id.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    adjacency: Vec<Vec<(NodeId, f64)>>,
}

impl NetworkGraph {
    pub fn empty(node_count: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); node_count],
        }
    }

    /// Builds a graph from undirected weighted edges.
    pub fn from_edges(
        node_count: usize,
        edges: &[(NodeId, NodeId, f64)],
    ) -> Result<Self, NetworkError> {
        let mut g = Self::empty(node_count);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, w: f64) -> Result<(), NetworkError> {
        let n = self.adjacency.len();
        if u >= n {
            return Err(NetworkError::UnknownNode(u));
        }
        if v >= n {
            return Err(NetworkError::UnknownNode(v));
        }
        if u == v {
            return Err(NetworkError::InvalidEdge {
                u,
                v,
                reason: "self loop",
            });
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(NetworkError::InvalidEdge {
                u,
                v,
                reason: "weight must be positive and finite",
            });
        }
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adjacency[a];
            match list.binary_search_by_key(&b, |e| e.0) {
                Ok(i) => list[i].1 = w,
                Err(i) => list.insert(i, (b, w)),
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[u]
    }

    /// Estimated length of edge `u`-`v`, if the nodes are adjacent.
    pub fn edge(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let list = self.adjacency.get(u)?;
        list.binary_search_by_key(&v, |e| e.0)
            .ok()
            .map(|i| list[i].1)
    }

    fn check_node(&self, u: NodeId) -> Result<(), NetworkError> {
        if u < self.adjacency.len() {
            Ok(())
        } else {
            Err(NetworkError::UnknownNode(u))
        }
    }
}

/// Connects every pair within communication range. Each edge is measured
/// once: the true length goes through the path-loss model with one noise
/// draw and is inverted back into a distance estimate.
pub fn build_graph<R: Rng + ?Sized>(
    dep: &Deployment,
    model: &PathLossModel,
    rng: &mut R,
) -> NetworkGraph {
    let noise =
        (model.sigma > 0.0).then(|| Normal::new(0.0, model.sigma).expect("sigma validated"));
    let n = dep.nodes.len();
    let mut adjacency = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            let d = dep.nodes[u].distance(&dep.nodes[v]);
            if d > dep.comm_range {
                continue;
            }
            let draw = noise.as_ref().map_or(0.0, |dist| dist.sample(rng));
            // Coincident nodes get a tiny positive length.
            let rssi = model
                .rssi_at(d.max(1e-12), draw)
                .expect("positive distance");
            let est = model.estimate_distance(rssi);
            adjacency[u].push((v, est));
            adjacency[v].push((u, est));
        }
    }
    // Pushed in increasing id order, so every list is already sorted.
    NetworkGraph { adjacency }
}

/// Multi-hop ranging outcome between a source and a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangingResult {
    pub anchor_id: NodeId,
    pub target_id: NodeId,
    pub shortest_distance: f64,
    pub hop_count: usize,
    /// Node ids from `anchor_id` to `target_id` inclusive.
    pub path: Vec<NodeId>,
}

impl RangingResult {
    /// Estimated distance along the path from its start to `path[k]`.
    pub fn distance_to_hop(&self, g: &NetworkGraph, k: usize) -> f64 {
        self.path[..=k]
            .windows(2)
            .map(|w| g.edge(w[0], w[1]).expect("path follows edges"))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: NodeId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest paths under estimated edge lengths.
///
/// Among equally short paths the predecessor with the lower id wins, so path
/// recovery is deterministic.
#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    source: NodeId,
    dist: Vec<f64>,
    pred: Vec<Option<NodeId>>,
}

impl ShortestPathTree {
    pub fn new(g: &NetworkGraph, source: NodeId) -> Result<Self, NetworkError> {
        Self::search(g, source, None)
    }

    fn search(
        g: &NetworkGraph,
        source: NodeId,
        stop_at: Option<NodeId>,
    ) -> Result<Self, NetworkError> {
        g.check_node(source)?;
        let n = g.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred: Vec<Option<NodeId>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(HeapEntry {
            dist: 0.0,
            node: source,
        });
        while let Some(HeapEntry { dist: du, node: u }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if stop_at == Some(u) {
                break;
            }
            for &(v, w) in g.neighbors(u) {
                if done[v] {
                    continue;
                }
                let nd = du + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = Some(u);
                    heap.push(HeapEntry { dist: nd, node: v });
                } else if nd == dist[v] && pred[v].is_some_and(|p| u < p) {
                    pred[v] = Some(u);
                }
            }
        }
        Ok(Self { source, dist, pred })
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn distance(&self, target: NodeId) -> Option<f64> {
        self.dist.get(target).copied().filter(|d| d.is_finite())
    }

    pub fn ranging(&self, target: NodeId) -> Result<RangingResult, NetworkError> {
        if target >= self.dist.len() {
            return Err(NetworkError::UnknownNode(target));
        }
        let shortest_distance = self.distance(target).ok_or(NetworkError::Unreachable {
            from: self.source,
            target,
        })?;
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.pred[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Ok(RangingResult {
            anchor_id: self.source,
            target_id: target,
            shortest_distance,
            hop_count: path.len() - 1,
            path,
        })
    }
}

/// Shortest estimated distance, hop count and path from `source` to each
/// target.
pub fn shortest_ranging(
    g: &NetworkGraph,
    source: NodeId,
    targets: &[NodeId],
) -> Result<Vec<RangingResult>, NetworkError> {
    let tree = ShortestPathTree::new(g, source)?;
    targets.iter().map(|&t| tree.ranging(t)).collect()
}

/// Point-to-point variant of [`shortest_ranging`] that stops as soon as the
/// target is settled.
pub fn shortest_between(
    g: &NetworkGraph,
    source: NodeId,
    target: NodeId,
) -> Result<RangingResult, NetworkError> {
    g.check_node(target)?;
    ShortestPathTree::search(g, source, Some(target))?.ranging(target)
}

/// Shortest-path trees rooted at every anchor of a deployment.
#[derive(Debug, Clone)]
pub struct AnchorRanging {
    trees: Vec<ShortestPathTree>,
}

impl AnchorRanging {
    pub fn new(g: &NetworkGraph, anchor_ids: &[NodeId]) -> Result<Self, NetworkError> {
        let trees = anchor_ids
            .iter()
            .map(|&a| ShortestPathTree::new(g, a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { trees })
    }

    pub fn anchor_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.trees.iter().map(ShortestPathTree::source)
    }

    pub fn tree(&self, anchor: NodeId) -> Option<&ShortestPathTree> {
        self.trees.iter().find(|t| t.source() == anchor)
    }

    pub fn ranging(&self, anchor: NodeId, target: NodeId) -> Result<RangingResult, NetworkError> {
        self.tree(anchor)
            .ok_or(NetworkError::UnknownNode(anchor))?
            .ranging(target)
    }

    /// The `k` anchors with the smallest estimated distance to `target`,
    /// ties broken by anchor id, returned in ascending id order.
    pub fn nearest(&self, target: NodeId, k: usize) -> Result<Vec<NodeId>, NetworkError> {
        let mut by_dist = self
            .trees
            .iter()
            .map(|t| {
                t.distance(target)
                    .map(|d| (d, t.source()))
                    .ok_or(NetworkError::Unreachable {
                        from: t.source(),
                        target,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        by_dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut chosen: Vec<NodeId> = by_dist.into_iter().take(k).map(|(_, id)| id).collect();
        chosen.sort_unstable();
        Ok(chosen)
    }
}

/// Breadth-first hop counts from `source`; `None` for unreachable nodes.
pub fn hop_counts(g: &NetworkGraph, source: NodeId) -> Result<Vec<Option<usize>>, NetworkError> {
    g.check_node(source)?;
    let mut hops = vec![None; g.node_count()];
    hops[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let next = hops[u].map(|h| h + 1);
        for &(v, _) in g.neighbors(u) {
            if hops[v].is_none() {
                hops[v] = next;
                queue.push_back(v);
            }
        }
    }
    Ok(hops)
}

/// Minimum hop count from `source` to every node, ignoring edge lengths.
pub fn min_hops(g: &NetworkGraph, source: NodeId) -> Result<Vec<usize>, NetworkError> {
    hop_counts(g, source)?
        .into_iter()
        .enumerate()
        .map(|(target, h)| {
            h.ok_or(NetworkError::Unreachable {
                from: source,
                target,
            })
        })
        .collect()
}
