use cncah_core::NodeId;

use crate::LayoutError;

/// One folded region: a connected set of edges whose drawn lengths deviate
/// anomalously from their estimated lengths, plus the union of their
/// endpoints. Node and edge lists are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub nodes: Vec<NodeId>,
    /// Indices into the topology's edge list.
    pub edges: Vec<usize>,
}

/// Per-edge deviation statistics and the regions they induce.
#[derive(Debug, Clone)]
pub struct FoldedRegionReport {
    /// Normalized length difference per edge.
    pub diff: Vec<f64>,
    /// Population standard deviation of `diff`.
    pub stdev: f64,
    /// Standardized deviation per edge; all zero when `stdev` vanishes.
    pub r: Vec<f64>,
    pub regions: Vec<Region>,
}

/// Normalized per-edge deviation between two length assignments:
/// `diff[e] = e_init[e]/avg(e_init) − e_updated[e]/avg(e_updated)`,
/// its population standard deviation, and the standardized scores
/// `r[e] = (diff[e] − avg(diff)) / stdev` (all zero when stdev vanishes).
pub fn approx_error(
    e_init: &[f64],
    e_updated: &[f64],
) -> Result<(Vec<f64>, f64, Vec<f64>), LayoutError> {
    if e_init.is_empty() || e_updated.is_empty() {
        return Err(LayoutError::EmptyEdgeSet);
    }
    if e_init.len() != e_updated.len() {
        return Err(LayoutError::InvalidParams(format!(
            "edge length arrays differ: {} vs {}",
            e_init.len(),
            e_updated.len()
        )));
    }
    let m = e_init.len() as f64;
    let avg_init = e_init.iter().sum::<f64>() / m;
    let avg_updated = e_updated.iter().sum::<f64>() / m;
    if !(avg_init > 0.0) || !(avg_updated > 0.0) {
        return Err(LayoutError::InvalidParams(
            "average edge length must be positive".into(),
        ));
    }
    let diff: Vec<f64> = e_init
        .iter()
        .zip(e_updated)
        .map(|(a, b)| a / avg_init - b / avg_updated)
        .collect();
    let (stdev, r) = standardize(&diff);
    Ok((diff, stdev, r))
}

/// Centers and scales by the population standard deviation; a vanishing
/// deviation maps everything to zero rather than dividing by it.
fn standardize(diff: &[f64]) -> (f64, Vec<f64>) {
    let m = diff.len() as f64;
    let mean = diff.iter().sum::<f64>() / m;
    let var = diff.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / m;
    let stdev = var.sqrt();
    let r = if stdev < 1e-12 {
        vec![0.0; diff.len()]
    } else {
        diff.iter().map(|d| (d - mean) / stdev).collect()
    };
    (stdev, r)
}

/// Finds folded regions: every edge whose score reaches `theta` seeds a
/// region grown over score-qualifying edges that share an endpoint; grown
/// sets smaller than `min_region_edges` are discarded. Regions are
/// edge-disjoint and reported in first-seed order.
pub fn est_region(
    edges: &[(NodeId, NodeId)],
    e_init: &[f64],
    e_updated: &[f64],
    theta: f64,
    min_region_edges: usize,
) -> Result<FoldedRegionReport, LayoutError> {
    if edges.len() != e_init.len() {
        return Err(LayoutError::InvalidParams(format!(
            "edge list and length array differ: {} vs {}",
            edges.len(),
            e_init.len()
        )));
    }
    let (diff, stdev, r) = approx_error(e_init, e_updated)?;

    let n_nodes = edges
        .iter()
        .map(|&(u, v)| u.max(v) + 1)
        .max()
        .unwrap_or(0);
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
    for (idx, &(u, v)) in edges.iter().enumerate() {
        incident[u].push(idx);
        incident[v].push(idx);
    }

    let mut visited = vec![false; edges.len()];
    let mut regions = Vec::new();
    for seed in 0..edges.len() {
        if visited[seed] || r[seed] < theta {
            continue;
        }
        let mut member_edges = Vec::new();
        let mut queue = std::collections::VecDeque::from([seed]);
        visited[seed] = true;
        while let Some(e) = queue.pop_front() {
            member_edges.push(e);
            let (u, v) = edges[e];
            for &adj in incident[u].iter().chain(&incident[v]) {
                if !visited[adj] && r[adj] >= theta {
                    visited[adj] = true;
                    queue.push_back(adj);
                }
            }
        }
        if member_edges.len() < min_region_edges {
            continue;
        }
        member_edges.sort_unstable();
        let mut nodes: Vec<NodeId> = member_edges
            .iter()
            .flat_map(|&e| [edges[e].0, edges[e].1])
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        regions.push(Region {
            nodes,
            edges: member_edges,
        });
    }

    Ok(FoldedRegionReport {
        diff,
        stdev,
        r,
        regions,
    })
}
