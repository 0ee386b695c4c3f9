use cncah_core::{GraphError, NodeId, Topology, VisualDrawing};

use crate::split::{split_crossings, PlanarSubdivision};
use crate::BoundaryError;

/// One face of a planar subdivision: the node cycle in walk order (nodes
/// may repeat where the walk passes both sides of a bridge) and its signed
/// shoelace area. Interior faces come out counterclockwise (positive), the
/// outer face clockwise (negative).
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub cycle: Vec<usize>,
    pub area: f64,
}

impl Face {
    /// Distinct nodes on the face, ascending.
    pub fn node_set(&self) -> Vec<usize> {
        let mut nodes = self.cycle.clone();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }
}

/// Walks every face of the subdivision: arriving at a node via some edge,
/// the walk leaves along the next edge in clockwise order, so each directed
/// half-edge is consumed exactly once and each face appears exactly once.
pub fn traverse_faces(sub: &PlanarSubdivision) -> Vec<Face> {
    let n = sub.node_count();
    let mut used: Vec<Vec<bool>> = (0..n).map(|v| vec![false; sub.degree(v)]).collect();
    let mut faces = Vec::new();
    for v0 in 0..n {
        for k0 in 0..sub.degree(v0) {
            if used[v0][k0] {
                continue;
            }
            let mut cycle = Vec::new();
            let (mut v, mut k) = (v0, k0);
            loop {
                used[v][k] = true;
                cycle.push(v);
                let next = sub.neighbors(v)[k];
                let arrived = sub
                    .neighbors(next)
                    .iter()
                    .position(|&x| x == v)
                    .expect("adjacency is symmetric");
                let deg = sub.degree(next);
                // The neighbor immediately after the arrival edge in
                // clockwise order is the predecessor in the
                // counterclockwise-sorted list.
                let leave = (arrived + deg - 1) % deg;
                v = next;
                k = leave;
                if v == v0 && k == k0 {
                    break;
                }
            }
            let area = shoelace(sub, &cycle);
            faces.push(Face { cycle, area });
        }
    }
    faces
}

fn shoelace(sub: &PlanarSubdivision, cycle: &[usize]) -> f64 {
    let mut twice = 0.0;
    for (i, &v) in cycle.iter().enumerate() {
        let w = cycle[(i + 1) % cycle.len()];
        let (p, q) = (sub.position(v), sub.position(w));
        twice += p.x * q.y - q.x * p.y;
    }
    twice / 2.0
}

/// Identifies the true boundary nodes of a drawn network: resolves all edge
/// crossings, walks the faces, picks the largest face by absolute area
/// (ties prefer the clockwise outer cycle, then more distinct nodes, then
/// the lexicographically smallest node set) and returns its non-dummy
/// nodes, ascending.
pub fn boundary_nodes(
    drawing: &VisualDrawing,
    topology: &Topology,
) -> Result<Vec<NodeId>, BoundaryError> {
    let n = topology.node_count();
    if n <= 1 {
        return Ok((0..n).collect());
    }
    if let Some(v) = topology.first_unreachable() {
        return Err(BoundaryError::Graph(GraphError::Disconnected(v)));
    }
    let sub = split_crossings(drawing, topology)?;
    let faces = traverse_faces(&sub);
    let best = faces
        .iter()
        .max_by(|a, b| {
            let sets = (a.node_set(), b.node_set());
            a.area
                .abs()
                .total_cmp(&b.area.abs())
                .then_with(|| (a.area <= 0.0).cmp(&(b.area <= 0.0)))
                .then_with(|| sets.0.len().cmp(&sets.1.len()))
                .then_with(|| sets.1.cmp(&sets.0))
        })
        .expect("a connected drawing with an edge has at least one face");
    let mut out: Vec<NodeId> = best
        .node_set()
        .into_iter()
        .filter(|&v| !sub.is_dummy(v))
        .collect();
    out.sort_unstable();
    Ok(out)
}
