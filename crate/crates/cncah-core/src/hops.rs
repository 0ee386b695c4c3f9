use crate::graph::{GraphError, NodeId, Topology};

/// All-pairs hop-count matrix for a connected topology, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HopMatrix {
    n: usize,
    hops: Vec<u32>,
}

impl HopMatrix {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: NodeId, j: NodeId) -> u32 {
        self.hops[i * self.n + j]
    }

    /// Largest hop count in the matrix (0 for graphs with a single node).
    pub fn diameter(&self) -> u32 {
        self.hops.iter().copied().max().unwrap_or(0)
    }
}

/// Computes shortest-path hop counts between every pair of nodes via one
/// breadth-first search per source. Fails on disconnected input because a
/// missing path has no finite hop count.
pub fn hop_matrix(topology: &Topology) -> Result<HopMatrix, GraphError> {
    if let Some(v) = topology.first_unreachable() {
        return Err(GraphError::Disconnected(v));
    }
    let n = topology.node_count();
    let mut hops = vec![0u32; n * n];
    let mut queue = std::collections::VecDeque::new();
    for src in 0..n {
        let row = &mut hops[src * n..(src + 1) * n];
        let mut seen = vec![false; n];
        seen[src] = true;
        queue.clear();
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            for &w in topology.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    row[w] = row[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    Ok(HopMatrix { n, hops })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent all-pairs oracle: Floyd-Warshall over the same edges.
    fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<u32>> {
        const INF: u32 = u32::MAX / 4;
        let mut d = vec![vec![INF; n]; n];
        for i in 0..n {
            d[i][i] = 0;
        }
        for &(u, v) in edges {
            d[u][v] = 1;
            d[v][u] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k].saturating_add(d[k][j]);
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d
    }

    #[test]
    fn path_graph_distances() {
        let t = Topology::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let h = hop_matrix(&t).unwrap();
        assert_eq!(h.get(0, 3), 3);
        assert_eq!(h.get(1, 3), 2);
        assert_eq!(h.get(2, 2), 0);
        assert_eq!(h.diameter(), 3);
    }

    #[test]
    fn disconnected_graph_is_an_error() {
        let t = Topology::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert_eq!(hop_matrix(&t).unwrap_err(), GraphError::Disconnected(2));
    }

    #[test]
    fn matches_floyd_warshall_on_fixed_graph() {
        // Wheel-ish graph with a chord: rich enough to exercise tie-breaking.
        let edges = vec![
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 0),
            (0, 2),
            (2, 5),
            (5, 6),
        ];
        let t = Topology::new(7, edges.clone()).unwrap();
        let h = hop_matrix(&t).unwrap();
        let fw = floyd_warshall(7, &edges);
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(h.get(i, j), fw[i][j], "pair ({i},{j})");
            }
        }
    }

    #[test]
    fn matches_floyd_warshall_on_seeded_random_graphs() {
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(0x5eed_cafe);
        for _ in 0..120 {
            let n = 3 + (rng.next_u64() % 10) as usize;
            // Random spanning tree first so the graph is connected.
            let mut edges: Vec<(usize, usize)> = (1..n)
                .map(|v| {
                    let u = (rng.next_u64() % v as u64) as usize;
                    (u, v)
                })
                .collect();
            // Sprinkle extra edges, skipping duplicates.
            for _ in 0..n {
                let a = (rng.next_u64() % n as u64) as usize;
                let b = (rng.next_u64() % n as u64) as usize;
                let (u, v) = if a < b { (a, b) } else { (b, a) };
                if u != v && !edges.iter().any(|&(x, y)| (x, y) == (u, v)) {
                    edges.push((u, v));
                }
            }
            let t = Topology::new(n, edges.clone()).unwrap();
            let h = hop_matrix(&t).unwrap();
            let fw = floyd_warshall(n, &edges);
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(h.get(i, j), fw[i][j]);
                }
            }
        }
    }
}
