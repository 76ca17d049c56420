use std::collections::VecDeque;

use super::FactorGraph;

/// Girth of `T_n`; `None` when the graph has no cycle.
pub fn girth(g: &FactorGraph) -> Option<usize> {
    shortest_cycle(&g.to_adjacency(), usize::MAX)
}

/// Length of the shortest cycle of an undirected simple graph given as
/// adjacency lists, if one of length `≤ limit` exists.
///
/// Runs a breadth-first search from every node. A non-tree edge `(u, w)`
/// seen from root `r` closes a closed walk of length `d(u) + d(w) + 1`
/// through `r`; the minimum over all roots is the girth. Each search stops
/// once no shorter cycle can be found from it.
pub fn shortest_cycle(adj: &[Vec<usize>], limit: usize) -> Option<usize> {
    let nodes = adj.len();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; nodes];
    let mut parent = vec![usize::MAX; nodes];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();

    for root in 0..nodes {
        dist[root] = 0;
        touched.push(root);
        queue.push_back(root);
        'bfs: while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if 2 * du + 1 >= best || 2 * du + 1 > limit {
                break;
            }
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = du + 1;
                    parent[w] = u;
                    touched.push(w);
                    queue.push_back(w);
                } else if w != parent[u] {
                    best = best.min(du + dist[w] + 1);
                    if best <= 2 * du + 1 {
                        break 'bfs;
                    }
                }
            }
        }
        for &t in &touched {
            dist[t] = usize::MAX;
            parent[t] = usize::MAX;
        }
        touched.clear();
        queue.clear();
    }
    (best != usize::MAX && best <= limit).then_some(best)
}
