use thiserror::Error;

/// Dense node identifier. Nodes are always numbered `0..n` after parsing;
/// external ids from graph files are remapped in file order.
pub type NodeId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("node {0} out of range (graph has {1} nodes)")]
    UnknownNode(NodeId, usize),
    #[error("graph is disconnected: node {0} is unreachable from node 0")]
    Disconnected(NodeId),
    #[error("graph needs at least {0} nodes")]
    DegenerateGraph(usize),
    #[error("non-finite coordinate for node {0}")]
    NonFiniteCoordinate(NodeId),
    #[error("drawing has {got} positions but topology has {want} nodes")]
    PositionCountMismatch { got: usize, want: usize },
}

/// A 2-D point in the unit windowed coordinate frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Pure connectivity view of a network: nodes, undirected edges and the
/// optional per-edge signal strength readings a deployment would report.
///
/// Edges are stored endpoint-normalized (`u < v`) in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<NodeId>>,
    rssi: Vec<Option<f64>>,
    freq_mhz: Option<f64>,
}

impl Topology {
    /// Builds a topology over nodes `0..n`. Rejects self-loops, duplicate
    /// edges and endpoints outside `0..n`.
    pub fn new(n: usize, edges: Vec<(NodeId, NodeId)>) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); n];
        let mut normalized = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= n {
                return Err(GraphError::UnknownNode(a, n));
            }
            if b >= n {
                return Err(GraphError::UnknownNode(b, n));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if adjacency[u].contains(&v) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            normalized.push((u, v));
        }
        let rssi = vec![None; normalized.len()];
        Ok(Topology {
            n,
            edges: normalized,
            adjacency,
            rssi,
            freq_mhz: None,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    /// 2|E| / |V|.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n as f64
        }
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        a != b && a < self.n && self.adjacency[a].contains(&b)
    }

    pub fn rssi(&self) -> &[Option<f64>] {
        &self.rssi
    }

    /// Signal strengths for every edge, or `None` if any edge lacks one.
    pub fn complete_rssi(&self) -> Option<Vec<f64>> {
        self.rssi.iter().copied().collect()
    }

    pub fn set_rssi(&mut self, rssi: Vec<Option<f64>>) -> Result<(), GraphError> {
        if rssi.len() != self.edges.len() {
            return Err(GraphError::PositionCountMismatch {
                got: rssi.len(),
                want: self.edges.len(),
            });
        }
        self.rssi = rssi;
        Ok(())
    }

    pub fn freq_mhz(&self) -> Option<f64> {
        self.freq_mhz
    }

    pub fn set_freq_mhz(&mut self, freq: Option<f64>) {
        self.freq_mhz = freq;
    }

    pub fn is_connected(&self) -> bool {
        self.first_unreachable().is_none()
    }

    /// Lowest node unreachable from node 0, if any. Empty and single-node
    /// graphs count as connected.
    pub fn first_unreachable(&self) -> Option<NodeId> {
        if self.n <= 1 {
            return None;
        }
        let mut seen = vec![false; self.n];
        let mut queue = std::collections::VecDeque::new();
        seen[0] = true;
        queue.push_back(0);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.iter().position(|&s| !s)
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Per-node 2-D positions in the unit windowed coordinate frame.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualDrawing {
    positions: Vec<Point>,
}

impl VisualDrawing {
    pub fn new(positions: Vec<Point>) -> Result<Self, GraphError> {
        for (i, p) in positions.iter().enumerate() {
            if !p.is_finite() {
                return Err(GraphError::NonFiniteCoordinate(i));
            }
        }
        Ok(VisualDrawing { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, v: NodeId) -> Point {
        self.positions[v]
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn set_position(&mut self, v: NodeId, p: Point) {
        debug_assert!(p.is_finite());
        self.positions[v] = p;
    }

    pub fn edge_length(&self, u: NodeId, v: NodeId) -> f64 {
        self.positions[u].dist(self.positions[v])
    }

    /// Drawn length of every topology edge, in edge order.
    pub fn edge_lengths(&self, topology: &Topology) -> Vec<f64> {
        topology
            .edges()
            .iter()
            .map(|&(u, v)| self.edge_length(u, v))
            .collect()
    }
}
