use cncah_core::{
    hop_matrix, mix_seed, GraphError, NodeId, Point, SplitMix64, Topology, VisualDrawing,
};

use crate::fspl::fspl_distance;
use crate::region::est_region;
use crate::spring::{self, SpringModel};
use crate::{Control, LayoutError, LayoutState, UnitReport};

#[derive(Debug, Clone)]
pub struct WkkmsParams {
    /// Fraction of nodes selected per batch update, in (0, 1].
    pub p: f64,
    /// Weight scaling factors: starting node, 1-hop, 2-hop, everyone,
    /// anchors — each in [0, 1].
    pub deltas: [f64; 5],
    /// Folded-region score threshold.
    pub theta: f64,
    /// Insufficient-decrease threshold for adding synthetic edges while
    /// unfolding: a pass that lowers region energy by no more than this
    /// triggers edge strengthening. Zero means "failed to strictly decrease".
    pub epsilon: f64,
    /// Nodes with known positions; their weight tier is the fifth factor.
    pub anchors: Vec<NodeId>,
    /// Regions smaller than this many edges are ignored.
    pub min_region_edges: usize,
    /// Frame side length for the spring model.
    pub l0: f64,
    /// Stiffness scaling constant.
    pub k_const: f64,
    pub max_units: Option<u64>,
    pub seed: u64,
}

impl Default for WkkmsParams {
    fn default() -> Self {
        WkkmsParams {
            p: 0.1,
            deltas: [1.0, 0.95, 0.7, 0.05, 0.0],
            theta: 4.0,
            epsilon: 0.0,
            anchors: Vec::new(),
            min_region_edges: 10,
            l0: 1.0,
            k_const: 1.0,
            max_units: None,
            seed: 0,
        }
    }
}

impl WkkmsParams {
    pub fn validate(&self, n: usize) -> Result<(), LayoutError> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(LayoutError::InvalidParams(format!(
                "selection fraction must be in (0, 1], got {}",
                self.p
            )));
        }
        if self.deltas.iter().any(|d| !(0.0..=1.0).contains(d)) {
            return Err(LayoutError::InvalidParams(
                "every scaling factor must be in [0, 1]".into(),
            ));
        }
        if !(self.theta > 0.0) {
            return Err(LayoutError::InvalidParams(
                "region threshold must be positive".into(),
            ));
        }
        if self.min_region_edges < 1 {
            return Err(LayoutError::InvalidParams(
                "minimum region size must be at least 1 edge".into(),
            ));
        }
        if let Some(&a) = self.anchors.iter().find(|&&a| a >= n) {
            return Err(LayoutError::Graph(GraphError::UnknownNode(a, n)));
        }
        Ok(())
    }
}

/// Per-node weights in [0, 1] steering batch node selection.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap {
    w: Vec<f64>,
}

impl WeightMap {
    /// All weights start at 1.
    pub fn uniform(n: usize) -> Self {
        WeightMap { w: vec![1.0; n] }
    }

    pub fn get(&self, i: NodeId) -> f64 {
        self.w[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

/// Number of nodes treated as the high-change pool a starting node is drawn
/// from, as a fraction of the node count.
const STARTING_POOL_FRACTION: f64 = 0.10;

/// Computes batch-update weights by expansion waves. Weights start at 1; a
/// starting node is drawn uniformly from the highest-change decile, and each
/// expansion scales everyone by the fourth factor, the 2-hop ring by the
/// third, the 1-hop ring by the second, the wave itself by the first and
/// anchors by the fifth, then the wave advances to whichever ring is larger.
/// Expansion repeats until an accumulator driven by the rings' sizes
/// overtakes `counter`, so early iterations reweight broadly and later ones
/// narrowly.
pub fn calweight(
    topology: &Topology,
    model: &SpringModel,
    drawing: &VisualDrawing,
    params: &WkkmsParams,
    counter: u64,
    rng: &mut SplitMix64,
) -> WeightMap {
    let n = topology.node_count();
    let [d1, d2, d3, d4, d5] = params.deltas;
    let mut w = vec![1.0; n];
    let pool = ((n as f64 * STARTING_POOL_FRACTION).ceil() as usize).clamp(1, n);
    let max_trips = (n / 2).max(1);

    let mut expcount: u64 = 1;
    while expcount <= counter {
        // Starting node: uniform among the top decile by current change.
        let change: Vec<f64> = (0..n)
            .map(|i| spring::delta(model, drawing, Some(&w), i))
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| change[b].total_cmp(&change[a]).then(a.cmp(&b)));
        let sn_id = order[rng.range(pool as u64) as usize];

        let mut sn = vec![false; n];
        sn[sn_id] = true;
        let trips = (expcount as usize).clamp(1, max_trips);
        let mut last_ring_sizes = 0usize;
        for _ in 0..trips {
            let (v1, v2) = rings(topology, &sn);
            let n1 = v1.iter().filter(|&&b| b).count();
            let n2 = v2.iter().filter(|&&b| b).count();
            for weight in w.iter_mut() {
                *weight *= d4;
            }
            for i in 0..n {
                if v2[i] {
                    w[i] *= d3;
                }
            }
            for i in 0..n {
                if v1[i] {
                    w[i] *= d2;
                }
            }
            for i in 0..n {
                if sn[i] {
                    w[i] *= d1;
                }
            }
            for &a in &params.anchors {
                w[a] *= d5;
            }
            sn = if n1 > n2 { v1 } else { v2 };
            last_ring_sizes = n1 + n2;
        }
        let grow = (n as u64 / 2).max((params.p * last_ring_sizes as f64).floor() as u64);
        expcount += grow.max(1);
    }
    WeightMap { w }
}

/// 1-hop and 2-hop rings around a node set: nodes adjacent to the set but
/// outside it, and nodes adjacent to that ring outside both.
fn rings(topology: &Topology, sn: &[bool]) -> (Vec<bool>, Vec<bool>) {
    let n = topology.node_count();
    let mut v1 = vec![false; n];
    for i in 0..n {
        if sn[i] {
            for &j in topology.neighbors(i) {
                if !sn[j] {
                    v1[j] = true;
                }
            }
        }
    }
    let mut v2 = vec![false; n];
    for i in 0..n {
        if v1[i] {
            for &j in topology.neighbors(i) {
                if !sn[j] && !v1[j] {
                    v2[j] = true;
                }
            }
        }
    }
    (v1, v2)
}

/// Batch position update: ranks nodes by weighted change, takes the top
/// `ceil(p·n)` with positive change, and sweeps Newton steps over them for
/// `ceil(n/k)` passes. Total energy never increases.
pub fn bwu(
    model: &SpringModel,
    drawing: &mut VisualDrawing,
    weights: &WeightMap,
    p: f64,
) -> Result<(), LayoutError> {
    let n = model.node_count();
    if !(p > 0.0 && p <= 1.0) {
        return Err(LayoutError::InvalidParams(format!(
            "selection fraction must be in (0, 1], got {p}"
        )));
    }
    if weights.len() != n {
        return Err(LayoutError::InvalidParams(format!(
            "weight map covers {} nodes but the model has {n}",
            weights.len()
        )));
    }
    let change: Vec<f64> = (0..n)
        .map(|i| spring::delta(model, drawing, Some(weights.as_slice()), i))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| change[b].total_cmp(&change[a]).then(a.cmp(&b)));
    let k = (p * n as f64).ceil() as usize;
    let selected: Vec<usize> = order.into_iter().take(k).filter(|&i| change[i] > 0.0).collect();
    let passes = n.div_ceil(k);
    for _ in 0..passes {
        for &v in &selected {
            let (sx, sy) = spring::newton_step(model, drawing, Some(weights.as_slice()), v);
            if sx != 0.0 || sy != 0.0 {
                let at = drawing.position(v);
                drawing.set_position(v, Point::new(at.x + sx, at.y + sy));
            }
        }
    }
    Ok(())
}

/// The full weighted multi-stage pipeline.
///
/// Stage 1 records reference edge lengths, then alternates weight
/// computation and batch updates for `⌈2·p·n⌉` iterations. Stage 2 scores
/// the drawn edge lengths against the reference and extracts folded regions.
/// Stage 3 clones each region and re-lays it out locally, strengthening
/// connectivity with synthetic edges whenever a pass fails to make
/// sufficient progress. Stage 4 copies back region positions that pass a
/// re-scoring check (and do not raise the global energy), then runs one
/// final refinement pass.
///
/// Reference lengths come from per-edge signal strengths when the topology
/// carries a complete set plus a frequency; otherwise the initial drawing's
/// edge lengths serve as the reference.
///
/// One work unit is one stage-1 iteration, one region pass, or the final
/// refinement — each applies on the order of one update per node.
pub fn wkkms_layout(
    topology: &Topology,
    init: &VisualDrawing,
    params: &WkkmsParams,
    mut on_unit: impl FnMut(&UnitReport<'_>) -> Control,
) -> Result<LayoutState, LayoutError> {
    let n = topology.node_count();
    params.validate(n)?;
    if init.len() != n {
        return Err(LayoutError::Graph(GraphError::PositionCountMismatch {
            got: init.len(),
            want: n,
        }));
    }
    let model = spring::build_spring_model(&hop_matrix(topology)?, params.l0, params.k_const)?;
    let mut rng = SplitMix64::new(mix_seed(params.seed, 1));
    let mut drawing = init.clone();
    let mut units = 0u64;
    let mut stopped = params.max_units == Some(0);

    let finalize = |drawing: VisualDrawing, units: u64| {
        let energy = spring::energy(&model, &drawing, None);
        Ok(LayoutState {
            drawing,
            energy,
            units,
            rng_seed: params.seed,
        })
    };
    if stopped {
        return finalize(drawing, units);
    }

    // Reference edge lengths: radio-estimated when available, else drawn.
    let e_init: Vec<f64> = match (topology.complete_rssi(), topology.freq_mhz()) {
        (Some(rssi), Some(freq)) => rssi
            .iter()
            .map(|&s| {
                fspl_distance(s, freq)
                    .map_err(|e| LayoutError::InvalidParams(e.to_string()))
            })
            .collect::<Result<_, _>>()?,
        _ => drawing.edge_lengths(topology),
    };

    // Stage 1: weighted batch updating.
    let stage1_iters = (2.0 * params.p * n as f64).ceil() as u64;
    for counter in 1..=stage1_iters {
        let w = calweight(topology, &model, &drawing, params, counter, &mut rng);
        bwu(&model, &mut drawing, &w, params.p)?;
        units += 1;
        let energy = spring::energy(&model, &drawing, None);
        if on_unit(&UnitReport {
            unit: units,
            drawing: &drawing,
            energy,
        }) == Control::Stop
            || params.max_units.is_some_and(|m| units >= m)
        {
            stopped = true;
            break;
        }
    }
    if stopped {
        return finalize(drawing, units);
    }

    // Stage 2: folded-region discovery.
    let e_updated = drawing.edge_lengths(topology);
    let report = est_region(
        topology.edges(),
        &e_init,
        &e_updated,
        params.theta,
        params.min_region_edges,
    )?;

    // Stages 3 and 4, region by region.
    'regions: for region in &report.regions {
        let mut clone = RegionClone::build(topology, &model, &drawing, &region.nodes, &region.edges, params)?;
        let iters = (2.0 * params.p * clone.node_count() as f64).ceil() as u64;
        for counter in 1..=iters {
            let w = calweight(
                &clone.topo,
                &clone.model,
                &clone.drawing,
                &clone.params,
                counter,
                &mut rng,
            );
            let e1 = spring::energy(&clone.model, &clone.drawing, None);
            bwu(&clone.model, &mut clone.drawing, &w, params.p)?;
            let e2 = spring::energy(&clone.model, &clone.drawing, None);
            if e1 - e2 <= params.epsilon {
                clone.strengthen_connectivity()?;
            }
            units += 1;
            let energy = spring::energy(&model, &drawing, None);
            if on_unit(&UnitReport {
                unit: units,
                drawing: &drawing,
                energy,
            }) == Control::Stop
                || params.max_units.is_some_and(|m| units >= m)
            {
                stopped = true;
                break 'regions;
            }
        }

        // Stage 4 for this region: re-score its real edges; discard regions
        // that still deviate, substitute the rest when that does not raise
        // the global energy.
        let e1r: Vec<f64> = region.edges.iter().map(|&e| e_init[e]).collect();
        let e2r: Vec<f64> = region
            .edges
            .iter()
            .map(|&e| {
                let (u, v) = topology.edges()[e];
                clone.local_position(u).dist(clone.local_position(v))
            })
            .collect();
        let (_, _, r) = crate::region::approx_error(&e1r, &e2r)?;
        if r.iter().any(|&x| x > params.theta) {
            continue;
        }
        let before = spring::energy(&model, &drawing, None);
        let mut candidate = drawing.clone();
        for (local, &global) in clone.global_nodes.iter().enumerate() {
            candidate.set_position(global, clone.drawing.position(local));
        }
        if spring::energy(&model, &candidate, None) <= before {
            drawing = candidate;
        }
    }
    if stopped {
        return finalize(drawing, units);
    }

    // Final refinement pass.
    let w = calweight(topology, &model, &drawing, params, 1, &mut rng);
    bwu(&model, &mut drawing, &w, params.p)?;
    units += 1;
    let energy = spring::energy(&model, &drawing, None);
    on_unit(&UnitReport {
        unit: units,
        drawing: &drawing,
        energy,
    });
    finalize(drawing, units)
}

/// A folded region cloned out of the main drawing: local topology (real
/// region edges plus any synthetic reinforcements), local positions and a
/// local spring model scaled to the span the global model assigns the
/// region.
struct RegionClone {
    global_nodes: Vec<NodeId>,
    local_index: std::collections::HashMap<NodeId, usize>,
    topo: Topology,
    edges: Vec<(usize, usize)>,
    drawing: VisualDrawing,
    model: SpringModel,
    params: WkkmsParams,
    l0: f64,
}

impl RegionClone {
    fn build(
        topology: &Topology,
        global_model: &SpringModel,
        drawing: &VisualDrawing,
        nodes: &[NodeId],
        edge_indices: &[usize],
        params: &WkkmsParams,
    ) -> Result<Self, LayoutError> {
        let local_index: std::collections::HashMap<NodeId, usize> = nodes
            .iter()
            .enumerate()
            .map(|(local, &global)| (global, local))
            .collect();
        let edges: Vec<(usize, usize)> = edge_indices
            .iter()
            .map(|&e| {
                let (u, v) = topology.edges()[e];
                (local_index[&u], local_index[&v])
            })
            .collect();
        let topo = Topology::new(nodes.len(), edges.clone())?;
        let positions: Vec<Point> = nodes.iter().map(|&g| drawing.position(g)).collect();
        let local_drawing = VisualDrawing::new(positions)?;

        // The local frame is the widest ideal separation the global model
        // wants inside the region, so unfolding targets the span the
        // surrounding layout expects.
        let mut l0 = 0.0f64;
        for (a, &ga) in nodes.iter().enumerate() {
            for &gb in nodes.iter().skip(a + 1) {
                l0 = l0.max(global_model.ideal_len(ga, gb));
            }
        }
        let l0 = if l0 > 0.0 { l0 } else { params.l0 };

        let local_params = WkkmsParams {
            anchors: params
                .anchors
                .iter()
                .filter_map(|a| local_index.get(a).copied())
                .collect(),
            l0,
            max_units: None,
            ..params.clone()
        };
        let model = spring::build_spring_model(&hop_matrix(&topo)?, l0, params.k_const)?;
        Ok(RegionClone {
            global_nodes: nodes.to_vec(),
            local_index,
            topo,
            edges,
            drawing: local_drawing,
            model,
            params: local_params,
            l0,
        })
    }

    fn node_count(&self) -> usize {
        self.global_nodes.len()
    }

    fn local_position(&self, global: NodeId) -> Point {
        self.drawing.position(self.local_index[&global])
    }

    /// Adds a synthetic edge between every node pair whose hop distance
    /// exceeds the mean of their degrees, then rebuilds the local spring
    /// model. Synthetic edges live only in this clone.
    fn strengthen_connectivity(&mut self) -> Result<(), LayoutError> {
        let n = self.topo.node_count();
        let hops = hop_matrix(&self.topo)?;
        let mut added = false;
        for u in 0..n {
            for v in (u + 1)..n {
                if self.topo.has_edge(u, v) {
                    continue;
                }
                let avg_deg = (self.topo.degree(u) + self.topo.degree(v)) as f64 / 2.0;
                if hops.get(u, v) as f64 > avg_deg {
                    self.edges.push((u, v));
                    added = true;
                }
            }
        }
        if added {
            self.topo = Topology::new(n, self.edges.clone())?;
            self.model = spring::build_spring_model(&hop_matrix(&self.topo)?, self.l0, self.params.k_const)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run_to_budget;

    fn equilibrium_path(n: usize) -> (Topology, VisualDrawing) {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let t = Topology::new(n, edges).unwrap();
        let step = 1.0 / (n - 1) as f64;
        let d = VisualDrawing::new(
            (0..n)
                .map(|i| Point::new(i as f64 * step, 0.0))
                .collect(),
        )
        .unwrap();
        (t, d)
    }

    fn random_connected(seed: u64, n: usize, extra: usize) -> (Topology, VisualDrawing) {
        let mut rng = SplitMix64::new(seed);
        let mut edges: Vec<(usize, usize)> = (1..n)
            .map(|v| (rng.range(v as u64) as usize, v))
            .collect();
        for _ in 0..extra {
            let a = rng.range(n as u64) as usize;
            let b = rng.range(n as u64) as usize;
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if u != v && !edges.contains(&(u, v)) {
                edges.push((u, v));
            }
        }
        let t = Topology::new(n, edges).unwrap();
        let d = VisualDrawing::new(
            (0..n)
                .map(|_| Point::new(rng.next_f64(), rng.next_f64()))
                .collect(),
        )
        .unwrap();
        (t, d)
    }

    fn model_of(t: &Topology) -> SpringModel {
        spring::build_spring_model(&hop_matrix(t).unwrap(), 1.0, 1.0).unwrap()
    }

    #[test]
    fn calweight_hand_trace_on_a_path() {
        // Path a-b-c at equilibrium: ties select the lowest id, so the wave
        // starts at a. One expansion: everyone ×0.05, then c (2-hop) ×0.7,
        // b (1-hop) ×0.95, a (wave) ×1.0.
        let (t, d) = equilibrium_path(3);
        let m = model_of(&t);
        let params = WkkmsParams::default();
        let mut rng = SplitMix64::new(9);
        let w = calweight(&t, &m, &d, &params, 1, &mut rng);
        assert!((w.get(0) - 0.05).abs() < 1e-12);
        assert!((w.get(1) - 0.0475).abs() < 1e-12);
        assert!((w.get(2) - 0.035).abs() < 1e-12);
    }

    #[test]
    fn calweight_identity_factors_leave_weights_at_one() {
        let (t, d) = random_connected(3, 12, 6);
        let m = model_of(&t);
        let params = WkkmsParams {
            deltas: [1.0; 5],
            ..WkkmsParams::default()
        };
        let mut rng = SplitMix64::new(4);
        let w = calweight(&t, &m, &d, &params, 5, &mut rng);
        assert!(w.as_slice().iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn calweight_zeroes_anchors() {
        let (t, d) = random_connected(8, 10, 5);
        let m = model_of(&t);
        let params = WkkmsParams {
            anchors: vec![4],
            ..WkkmsParams::default()
        };
        let mut rng = SplitMix64::new(1);
        let w = calweight(&t, &m, &d, &params, 1, &mut rng);
        assert_eq!(w.get(4), 0.0);
    }

    #[test]
    fn calweight_keeps_weights_in_unit_interval() {
        let (t, d) = random_connected(5, 20, 15);
        let m = model_of(&t);
        let params = WkkmsParams::default();
        let mut rng = SplitMix64::new(2);
        for counter in [1, 3, 10, 40] {
            let w = calweight(&t, &m, &d, &params, counter, &mut rng);
            assert!(w.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn bwu_ignores_zero_weight_nodes() {
        let (t, d) = random_connected(7, 8, 4);
        let m = model_of(&t);
        let mut weights = WeightMap::uniform(8);
        weights.w[3] = 0.0;
        let mut out = d.clone();
        bwu(&m, &mut out, &weights, 0.5).unwrap();
        assert_eq!(out.position(3), d.position(3));
    }

    #[test]
    fn bwu_converges_a_stretched_pair() {
        let t = Topology::new(2, vec![(0, 1)]).unwrap();
        let m = spring::build_spring_model(&hop_matrix(&t).unwrap(), 0.5, 1.0).unwrap();
        let mut d = VisualDrawing::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).unwrap();
        bwu(&m, &mut d, &WeightMap::uniform(2), 1.0).unwrap();
        let sep = d.position(0).dist(d.position(1));
        assert!((sep - 0.5).abs() < 1e-6, "separation {sep}");
    }

    #[test]
    fn bwu_with_one_node_selection_matches_argmax() {
        let (t, d) = random_connected(11, 9, 5);
        let m = model_of(&t);
        let w = WeightMap::uniform(9);
        let argmax = (0..9)
            .max_by(|&a, &b| {
                spring::delta(&m, &d, None, a)
                    .total_cmp(&spring::delta(&m, &d, None, b))
                    .then(b.cmp(&a))
            })
            .unwrap();
        let mut out = d.clone();
        bwu(&m, &mut out, &w, 1.0 / 9.0).unwrap();
        let moved: Vec<usize> = (0..9).filter(|&i| out.position(i) != d.position(i)).collect();
        assert_eq!(moved, vec![argmax]);
    }

    #[test]
    fn bwu_never_increases_energy() {
        for seed in 0..10u64 {
            let (t, d) = random_connected(seed + 60, 15, 10);
            let m = model_of(&t);
            let mut rng = SplitMix64::new(seed);
            let params = WkkmsParams::default();
            let mut cur = d;
            for counter in 1..=6 {
                let w = calweight(&t, &m, &cur, &params, counter, &mut rng);
                let before = spring::energy(&m, &cur, None);
                bwu(&m, &mut cur, &w, params.p).unwrap();
                let after = spring::energy(&m, &cur, None);
                assert!(after <= before + 1e-12, "seed {seed}: {before} -> {after}");
            }
        }
    }

    #[test]
    fn invalid_selection_fraction_is_rejected() {
        let (t, d) = equilibrium_path(4);
        let params = WkkmsParams {
            p: 0.0,
            ..WkkmsParams::default()
        };
        assert!(matches!(
            wkkms_layout(&t, &d, &params, run_to_budget),
            Err(LayoutError::InvalidParams(_))
        ));
    }

    #[test]
    fn equilibrium_init_finds_no_regions_and_keeps_energy() {
        // At exact equilibrium every change measure is zero: batch updates
        // move nothing, the drawn lengths equal the reference, and the run
        // ends where it started.
        let (t, d) = equilibrium_path(30);
        let out = wkkms_layout(&t, &d, &WkkmsParams::default(), run_to_budget).unwrap();
        assert!(out.energy < 1e-12);
        for i in 0..30 {
            assert_eq!(out.drawing.position(i), d.position(i));
        }
    }

    #[test]
    fn ground_truth_grid_init_finds_no_regions() {
        // A grid drawn at its true positions: stage 1 polishes it without
        // folding anything, so stage 2 must stay empty. Detect indirectly:
        // the returned unit count is exactly stage 1 plus refinement.
        let k = 6;
        let mut edges = Vec::new();
        for r in 0..k {
            for c in 0..k {
                let v = r * k + c;
                if c + 1 < k {
                    edges.push((v, v + 1));
                }
                if r + 1 < k {
                    edges.push((v, v + k));
                }
            }
        }
        let t = Topology::new(k * k, edges).unwrap();
        let d = VisualDrawing::new(
            (0..k * k)
                .map(|v| Point::new((v % k) as f64 / (k - 1) as f64, (v / k) as f64 / (k - 1) as f64))
                .collect(),
        )
        .unwrap();
        let out = wkkms_layout(&t, &d, &WkkmsParams::default(), run_to_budget).unwrap();
        let stage1 = (2.0 * 0.1 * (k * k) as f64).ceil() as u64;
        assert_eq!(out.units, stage1 + 1, "no region passes expected");
        let init_energy = {
            let m = model_of(&t);
            spring::energy(&m, &d, None)
        };
        assert!(out.energy <= init_energy + 1e-9);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let (t, d) = random_connected(31, 40, 40);
        let params = WkkmsParams {
            seed: 5,
            ..WkkmsParams::default()
        };
        let a = wkkms_layout(&t, &d, &params, run_to_budget).unwrap();
        let b = wkkms_layout(&t, &d, &params, run_to_budget).unwrap();
        assert_eq!(a.drawing, b.drawing);
        assert_eq!(a.units, b.units);
    }

    #[test]
    fn logged_energy_is_monotone() {
        let (t, d) = random_connected(17, 35, 30);
        let mut last = f64::INFINITY;
        wkkms_layout(&t, &d, &WkkmsParams::default(), |r| {
            assert!(r.energy <= last + 1e-9, "unit {}: {last} -> {}", r.unit, r.energy);
            last = r.energy;
            Control::Continue
        })
        .unwrap();
    }

    #[test]
    fn budget_stops_the_run() {
        let (t, d) = random_connected(13, 25, 20);
        let params = WkkmsParams {
            max_units: Some(3),
            ..WkkmsParams::default()
        };
        let out = wkkms_layout(&t, &d, &params, run_to_budget).unwrap();
        assert_eq!(out.units, 3);
    }

    #[test]
    fn final_energy_never_exceeds_stage_one_result() {
        for seed in [2u64, 9, 23] {
            let (t, d) = random_connected(seed, 50, 60);
            let params = WkkmsParams {
                seed,
                ..WkkmsParams::default()
            };
            let stage1 = (2.0 * params.p * 50.0).ceil() as u64;
            let mut stage1_energy = f64::INFINITY;
            let out = wkkms_layout(&t, &d, &params, |r| {
                if r.unit == stage1 {
                    stage1_energy = r.energy;
                }
                Control::Continue
            })
            .unwrap();
            assert!(out.energy <= stage1_energy + 1e-9);
        }
    }
}
