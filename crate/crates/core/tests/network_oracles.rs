//! Shortest-path and hop-count routines against brute-force references.

use rail_core::network::{min_hops, shortest_ranging, NetworkGraph, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(
    rng: &mut ChaCha8Rng,
    integer_weights: bool,
) -> (usize, Vec<(NodeId, NodeId, f64)>) {
    let n = rng.random_range(2..=10);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.35) {
                let w = if integer_weights {
                    rng.random_range(1..=3) as f64
                } else {
                    rng.random_range(0.5..10.0)
                };
                edges.push((u, v, w));
            }
        }
    }
    (n, edges)
}

/// Minimum over all simple paths from `source`, by exhaustive DFS.
fn enumerate_distances(g: &NetworkGraph, source: NodeId) -> Vec<Option<f64>> {
    fn dfs(
        g: &NetworkGraph,
        u: NodeId,
        acc: f64,
        seen: &mut Vec<bool>,
        best: &mut Vec<Option<f64>>,
    ) {
        if best[u].is_none_or(|b| acc < b) {
            best[u] = Some(acc);
        }
        for &(v, w) in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                dfs(g, v, acc + w, seen, best);
                seen[v] = false;
            }
        }
    }
    let mut best = vec![None; g.node_count()];
    let mut seen = vec![false; g.node_count()];
    seen[source] = true;
    dfs(g, source, 0.0, &mut seen, &mut best);
    best
}

/// Hop count of the path obtained by always stepping back to the lowest-id
/// neighbour that lies on some shortest path.
fn tie_broken_hops(
    g: &NetworkGraph,
    dist: &[Option<f64>],
    source: NodeId,
    target: NodeId,
) -> usize {
    let mut hops = 0;
    let mut cur = target;
    while cur != source {
        let d = dist[cur].unwrap();
        cur = g
            .neighbors(cur)
            .iter()
            .filter(|&&(u, w)| dist[u].is_some_and(|du| du + w == d))
            .map(|&(u, _)| u)
            .min()
            .unwrap();
        hops += 1;
    }
    hops
}

fn check_against_enumeration(integer_weights: bool, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let (n, edges) = random_graph(&mut rng, integer_weights);
        let g = NetworkGraph::from_edges(n, &edges).unwrap();
        let source = rng.random_range(0..n);
        let oracle = enumerate_distances(&g, source);
        let tree = shortest_ranging(&g, source, &[]).unwrap();
        assert!(tree.is_empty());
        for t in 0..n {
            let got = shortest_ranging(&g, source, &[t]).map(|mut v| v.remove(0));
            match oracle[t] {
                None => assert!(got.is_err(), "{t} should be unreachable"),
                Some(d) => {
                    let r = got.unwrap();
                    assert!((r.shortest_distance - d).abs() <= 1e-9);
                    assert_eq!(r.hop_count, tie_broken_hops(&g, &oracle, source, t));
                    assert_eq!(r.path.first(), Some(&source));
                    assert_eq!(r.path.last(), Some(&t));
                    let along: f64 = r.path.windows(2).map(|w| g.edge(w[0], w[1]).unwrap()).sum();
                    assert!((along - r.shortest_distance).abs() <= 1e-9);
                }
            }
        }
    }
}

#[test]
fn dijkstra_matches_path_enumeration_with_ties() {
    check_against_enumeration(true, 11);
}

#[test]
fn dijkstra_matches_path_enumeration_real_weights() {
    check_against_enumeration(false, 12);
}

#[test]
fn dijkstra_matches_bellman_ford() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let n = rng.random_range(2..=40);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(0.15) {
                    edges.push((u, v, rng.random_range(0.1..12.0)));
                }
            }
        }
        let g = NetworkGraph::from_edges(n, &edges).unwrap();
        let mut dist = vec![f64::INFINITY; n];
        dist[0] = 0.0;
        for _ in 0..n {
            for &(u, v, w) in &edges {
                dist[v] = dist[v].min(dist[u] + w);
                dist[u] = dist[u].min(dist[v] + w);
            }
        }
        let all: Vec<NodeId> = (0..n).collect();
        let tree = rail_core::network::ShortestPathTree::new(&g, 0).unwrap();
        for t in all {
            match tree.distance(t) {
                Some(d) => assert!((d - dist[t]).abs() <= 1e-9),
                None => assert!(dist[t].is_infinite()),
            }
        }
    }
}

#[test]
fn min_hops_matches_level_sets() {
    // Frontier expansion over an adjacency matrix, independent of the
    // adjacency-list BFS.
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let n = rng.random_range(1..=30);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(0.2) {
                    edges.push((u, v, 1.0));
                }
            }
        }
        let mut adj = vec![vec![false; n]; n];
        for &(u, v, _) in &edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        let g = NetworkGraph::from_edges(n, &edges).unwrap();
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        for k in 0..n {
            for u in 0..n {
                if level[u] == k {
                    for v in 0..n {
                        if adj[u][v] && level[v] == usize::MAX {
                            level[v] = k + 1;
                        }
                    }
                }
            }
        }
        let got = min_hops(&g, 0);
        if level.contains(&usize::MAX) {
            assert!(got.is_err());
        } else {
            assert_eq!(got.unwrap(), level);
        }
    }
}
