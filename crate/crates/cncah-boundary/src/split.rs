use std::collections::HashMap;

use cncah_core::{GraphError, NodeId, Point, Topology, VisualDrawing};

use crate::BoundaryError;

/// A drawing with all edge crossings resolved: every interior intersection
/// became a dummy node and the edges around each node are sorted
/// counterclockwise by angle.
#[derive(Debug, Clone)]
pub struct PlanarSubdivision {
    positions: Vec<Point>,
    original_count: usize,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl PlanarSubdivision {
    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn original_count(&self) -> usize {
        self.original_count
    }

    /// Nodes introduced at crossings, as opposed to nodes of the input.
    pub fn is_dummy(&self, v: usize) -> bool {
        v >= self.original_count
    }

    pub fn position(&self, v: usize) -> Point {
        self.positions[v]
    }

    /// Neighbors of `v` in counterclockwise angular order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }
}

fn cross(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    ax * by - ay * bx
}

/// Splits every pairwise edge crossing of the drawing by inserting dummy
/// nodes. A generic interior crossing becomes a degree-4 dummy; when an
/// endpoint of one edge lies in the interior of another, that node itself
/// splits the touched edge (no coincident duplicate is created). Edges that
/// merely share an endpoint do not cross. Crossings at identical
/// coordinates share one dummy node.
pub fn split_crossings(
    drawing: &VisualDrawing,
    topology: &Topology,
) -> Result<PlanarSubdivision, BoundaryError> {
    let n = topology.node_count();
    if drawing.len() != n {
        return Err(BoundaryError::Graph(GraphError::PositionCountMismatch {
            got: drawing.len(),
            want: n,
        }));
    }
    let edges = topology.edges();
    let m = edges.len();
    let mut positions: Vec<Point> = (0..n).map(|v| drawing.position(v)).collect();
    // Splits per edge: (parameter along the edge, node at that point).
    let mut splits: Vec<Vec<(f64, usize)>> = vec![Vec::new(); m];
    let mut dummy_at: HashMap<(u64, u64), usize> = HashMap::new();

    let bbox = |(u, v): (NodeId, NodeId)| {
        let (p, q) = (drawing.position(u), drawing.position(v));
        (
            p.x.min(q.x),
            p.x.max(q.x),
            p.y.min(q.y),
            p.y.max(q.y),
        )
    };
    let boxes: Vec<_> = edges.iter().map(|&e| bbox(e)).collect();

    for i in 0..m {
        let (a, b) = edges[i];
        let (pa, pb) = (positions[a], positions[b]);
        let (rx, ry) = (pb.x - pa.x, pb.y - pa.y);
        for j in (i + 1)..m {
            let (bi, bj) = (&boxes[i], &boxes[j]);
            if bi.1 < bj.0 || bj.1 < bi.0 || bi.3 < bj.2 || bj.3 < bi.2 {
                continue;
            }
            let (c, d) = edges[j];
            let (pc, pd) = (positions[c], positions[d]);
            let (sx, sy) = (pd.x - pc.x, pd.y - pc.y);
            let denom = cross(rx, ry, sx, sy);
            let (qpx, qpy) = (pc.x - pa.x, pc.y - pa.y);
            if denom == 0.0 {
                // Parallel. Collinear segments that overlap in more than a
                // point are not a drawing this oracle can interpret.
                if cross(qpx, qpy, rx, ry) == 0.0 && collinear_overlap(pa, pb, pc, pd) {
                    return Err(BoundaryError::DegenerateGeometry(i, j));
                }
                continue;
            }
            if a == c || a == d || b == c || b == d {
                // Edges meeting at a node never cross in the interior; the
                // intersection parameters would only reproduce that node up
                // to rounding.
                continue;
            }
            let t = cross(qpx, qpy, sx, sy) / denom;
            let u = cross(qpx, qpy, rx, ry) / denom;
            if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&u) {
                continue;
            }
            let t_interior = t > 0.0 && t < 1.0;
            let u_interior = u > 0.0 && u < 1.0;
            match (t_interior, u_interior) {
                (true, true) => {
                    let px = pa.x + t * rx;
                    let py = pa.y + t * ry;
                    let key = (px.to_bits(), py.to_bits());
                    let node = *dummy_at.entry(key).or_insert_with(|| {
                        positions.push(Point::new(px, py));
                        positions.len() - 1
                    });
                    splits[i].push((t, node));
                    splits[j].push((u, node));
                }
                (true, false) => {
                    // An endpoint of edge j sits inside edge i.
                    let node = if u == 0.0 { c } else { d };
                    splits[i].push((t, node));
                }
                (false, true) => {
                    let node = if t == 0.0 { a } else { b };
                    splits[j].push((u, node));
                }
                (false, false) => {
                    // Endpoint-to-endpoint contact: a shared endpoint (or
                    // two coincident nodes), never a crossing.
                }
            }
        }
    }

    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); positions.len()];
    let mut edge_count = 0;
    for (idx, &(a, b)) in edges.iter().enumerate() {
        let mut stops = std::mem::take(&mut splits[idx]);
        stops.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        stops.dedup_by_key(|s| s.1);
        let mut prev = a;
        for &(_, node) in &stops {
            if node != prev {
                adjacency[prev].push(node);
                adjacency[node].push(prev);
                edge_count += 1;
                prev = node;
            }
        }
        if prev != b {
            adjacency[prev].push(b);
            adjacency[b].push(prev);
            edge_count += 1;
        }
    }

    for (v, nbrs) in adjacency.iter_mut().enumerate() {
        let origin = positions[v];
        nbrs.sort_by(|&x, &y| {
            let ax = (positions[x].y - origin.y).atan2(positions[x].x - origin.x);
            let ay = (positions[y].y - origin.y).atan2(positions[y].x - origin.x);
            ax.total_cmp(&ay).then(x.cmp(&y))
        });
        nbrs.dedup();
    }

    Ok(PlanarSubdivision {
        positions,
        original_count: n,
        adjacency,
        edge_count,
    })
}

/// True when two collinear segments share more than a single point.
fn collinear_overlap(pa: Point, pb: Point, pc: Point, pd: Point) -> bool {
    // Project onto the dominant axis of the first segment.
    let horizontal = (pb.x - pa.x).abs() >= (pb.y - pa.y).abs();
    let val = |p: Point| if horizontal { p.x } else { p.y };
    let (a0, a1) = (val(pa).min(val(pb)), val(pa).max(val(pb)));
    let (b0, b1) = (val(pc).min(val(pd)), val(pc).max(val(pd)));
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    hi > lo
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drawing(pts: &[(f64, f64)]) -> VisualDrawing {
        VisualDrawing::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn generic_crossing_gets_a_degree_four_dummy() {
        let t = Topology::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let d = drawing(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]);
        let s = split_crossings(&d, &t).unwrap();
        assert_eq!(s.node_count(), 5);
        assert!(s.is_dummy(4));
        assert_eq!(s.position(4), Point::new(0.5, 0.5));
        assert_eq!(s.degree(4), 4);
        assert_eq!(s.edge_count(), 4);
    }

    #[test]
    fn disjoint_segments_are_unchanged() {
        let t = Topology::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let d = drawing(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        let s = split_crossings(&d, &t).unwrap();
        assert_eq!(s.node_count(), 4);
        assert_eq!(s.edge_count(), 2);
    }

    #[test]
    fn shared_endpoint_is_not_a_crossing() {
        let t = Topology::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let d = drawing(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
        let s = split_crossings(&d, &t).unwrap();
        assert_eq!(s.node_count(), 3);
        assert_eq!(s.edge_count(), 2);
    }

    #[test]
    fn endpoint_in_an_interior_splits_the_touched_edge() {
        // Node 2 sits in the middle of edge 0-1 and owns the edge 2-3.
        let t = Topology::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let d = drawing(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
        let s = split_crossings(&d, &t).unwrap();
        assert_eq!(s.node_count(), 4, "no dummy is created");
        assert_eq!(s.degree(2), 3);
        assert_eq!(s.edge_count(), 3);
        assert!(s.neighbors(2).contains(&0));
        assert!(s.neighbors(2).contains(&1));
        assert!(s.neighbors(2).contains(&3));
    }

    #[test]
    fn collinear_overlap_is_degenerate() {
        let t = Topology::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let d = drawing(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (3.0, 0.0)]);
        assert!(matches!(
            split_crossings(&d, &t),
            Err(BoundaryError::DegenerateGeometry(0, 1))
        ));
    }

    #[test]
    fn collinear_but_disjoint_segments_are_fine() {
        let t = Topology::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let d = drawing(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]);
        let s = split_crossings(&d, &t).unwrap();
        assert_eq!(s.edge_count(), 2);
    }

    #[test]
    fn neighbor_lists_are_sorted_counterclockwise() {
        // A plus sign: center node 0 with four arms.
        let t = Topology::new(5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let d = drawing(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]);
        let s = split_crossings(&d, &t).unwrap();
        // Angles: 4 at −π/2, 1 at 0, 2 at π/2, 3 at π.
        assert_eq!(s.neighbors(0), &[4, 1, 2, 3]);
    }

    #[test]
    fn an_edge_crossed_twice_splits_into_three_parts() {
        // Horizontal edge 0-1 crossed by two verticals.
        let t = Topology::new(6, vec![(0, 1), (2, 3), (4, 5)]).unwrap();
        let d = drawing(&[
            (0.0, 0.0),
            (3.0, 0.0),
            (1.0, -1.0),
            (1.0, 1.0),
            (2.0, -1.0),
            (2.0, 1.0),
        ]);
        let s = split_crossings(&d, &t).unwrap();
        assert_eq!(s.node_count(), 8);
        assert_eq!(s.edge_count(), 3 + 2 + 2);
        // The horizontal edge's pieces appear in order along it.
        assert!(s.neighbors(0).contains(&6));
        assert!(s.neighbors(1).contains(&7));
    }

    #[test]
    fn coincident_crossings_share_one_dummy() {
        // Three segments through the origin.
        let t = Topology::new(6, vec![(0, 1), (2, 3), (4, 5)]).unwrap();
        let d = drawing(&[
            (-1.0, 0.0),
            (1.0, 0.0),
            (0.0, -1.0),
            (0.0, 1.0),
            (-1.0, -1.0),
            (1.0, 1.0),
        ]);
        let s = split_crossings(&d, &t).unwrap();
        assert_eq!(s.node_count(), 7);
        assert_eq!(s.degree(6), 6);
    }
}
