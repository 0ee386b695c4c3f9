use std::collections::HashSet;

use cncah_core::{mix_seed, GraphError, Point, SplitMix64, Topology, VisualDrawing};
use cncah_layout::fspl_rssi;
use thiserror::Error;

use crate::shape::{region_contains, RegionMask};

#[derive(Debug, Error)]
pub enum TopogenError {
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parameters steering topology generation in the unit frame.
#[derive(Debug, Clone)]
pub struct GenParams {
    /// Node count.
    pub n: usize,
    /// Target average degree; edge sweeps continue until reached.
    pub delta: f64,
    /// Minimum distance between any two nodes.
    pub d: f64,
    /// Maximum edge length.
    pub gamma: f64,
    /// Probability that a candidate edge survives the random filter.
    pub gamma_b: f64,
    /// Minimum edge length.
    pub e: f64,
    pub seed: u64,
    /// Rejection cap per sampled item.
    pub max_attempts: usize,
}

impl GenParams {
    /// Defaults scaled to the node count: the minimum node distance and the
    /// edge-length window shrink as 1/√n so local densities stay comparable
    /// across sizes.
    pub fn for_size(n: usize, delta: f64, seed: u64) -> Self {
        let scale = (n.max(1) as f64).sqrt();
        GenParams {
            n,
            delta,
            d: 0.25 / scale,
            gamma: 3.0 / scale,
            gamma_b: 0.6,
            e: 0.25 / scale,
            seed,
            max_attempts: 10_000,
        }
    }

    fn validate(&self) -> Result<(), TopogenError> {
        if !(self.d >= 0.0) {
            return Err(TopogenError::InvalidParams(format!(
                "minimum node distance must be non-negative, got {}",
                self.d
            )));
        }
        if !(self.e >= 0.0 && self.e < self.gamma) {
            return Err(TopogenError::InvalidParams(format!(
                "edge length window requires 0 <= {} < {}",
                self.e, self.gamma
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma_b) {
            return Err(TopogenError::InvalidParams(format!(
                "edge survival probability must be in [0, 1], got {}",
                self.gamma_b
            )));
        }
        if self.max_attempts == 0 {
            return Err(TopogenError::InvalidParams(
                "rejection cap must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Number of evenly spaced interior points at which a candidate edge is
/// tested against the mask.
const SEGMENT_SAMPLES: usize = 16;

fn segment_in_mask(mask: &RegionMask, a: Point, b: Point) -> bool {
    (1..=SEGMENT_SAMPLES).all(|i| {
        let t = i as f64 / (SEGMENT_SAMPLES + 1) as f64;
        region_contains(mask, Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
    })
}

/// Generates a connected topology inside the mask, with the sampled
/// positions as its ground-truth drawing.
///
/// Nodes are rejection-sampled uniformly over the unit frame: a sample is
/// kept when it lies in the mask and is at least `d` from every accepted
/// node. Edges are generated in sweeps over the nodes in id order; each
/// node draws one random partner which survives with probability `gamma_b`
/// and is kept when the connecting segment has length in `[e, gamma]` and
/// stays in the mask. Sweeps repeat until the average degree reaches
/// `delta`. If the result is disconnected, the shortest admissible edge
/// between two components is added repeatedly.
pub fn generate_topology(
    params: &GenParams,
    mask: &RegionMask,
) -> Result<(Topology, VisualDrawing), TopogenError> {
    params.validate()?;
    let n = params.n;
    let mut rng = SplitMix64::new(mix_seed(params.seed, 4));

    // Node stage.
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    while pts.len() < n {
        let mut attempts = 0usize;
        loop {
            attempts += 1;
            if attempts > params.max_attempts {
                return Err(TopogenError::InfeasibleParams(format!(
                    "gave up placing node {} after {} attempts",
                    pts.len(),
                    params.max_attempts
                )));
            }
            let p = Point::new(rng.next_f64(), rng.next_f64());
            if !region_contains(mask, p) {
                continue;
            }
            if pts.iter().all(|q| q.dist(p) >= params.d) {
                pts.push(p);
                break;
            }
        }
    }

    // Edge stage: sweeps until the average degree reaches the target.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    if n >= 2 {
        let mut stalled = 0usize;
        while (2 * edges.len()) as f64 / (n as f64) < params.delta {
            let before = edges.len();
            for v in 0..n {
                let mut partner = rng.range(n as u64 - 1) as usize;
                if partner >= v {
                    partner += 1;
                }
                if rng.next_f64() <= 1.0 - params.gamma_b {
                    continue;
                }
                let len = pts[v].dist(pts[partner]);
                if len < params.e || len > params.gamma {
                    continue;
                }
                if !segment_in_mask(mask, pts[v], pts[partner]) {
                    continue;
                }
                let key = (v.min(partner), v.max(partner));
                if seen.insert(key) {
                    edges.push(key);
                }
            }
            if edges.len() == before {
                stalled += 1;
                if stalled > params.max_attempts {
                    return Err(TopogenError::InfeasibleParams(format!(
                        "average degree stuck at {:.3} (target {}) after {} empty sweeps",
                        (2 * edges.len()) as f64 / n as f64,
                        params.delta,
                        params.max_attempts
                    )));
                }
            } else {
                stalled = 0;
            }
        }
    } else if n == 1 && params.delta > 0.0 {
        return Err(TopogenError::InfeasibleParams(
            "a single node cannot reach a positive average degree".into(),
        ));
    }

    // Repair stage: connect components with the shortest admissible edge.
    let mut topology = Topology::new(n, edges.clone())?;
    loop {
        let components = topology.components();
        if components.len() <= 1 {
            break;
        }
        let mut comp_of = vec![0usize; n];
        for (c, comp) in components.iter().enumerate() {
            for &v in comp {
                comp_of[v] = c;
            }
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for u in 0..n {
            for v in (u + 1)..n {
                if comp_of[u] == comp_of[v] {
                    continue;
                }
                let len = pts[u].dist(pts[v]);
                if len < params.e || len > params.gamma {
                    continue;
                }
                if best.is_some_and(|(b, _, _)| len >= b) {
                    continue;
                }
                if !segment_in_mask(mask, pts[u], pts[v]) {
                    continue;
                }
                best = Some((len, u, v));
            }
        }
        match best {
            Some((_, u, v)) => {
                edges.push((u, v));
                topology = Topology::new(n, edges.clone())?;
            }
            None => {
                return Err(TopogenError::InfeasibleParams(format!(
                    "{} components remain and no admissible edge joins any two",
                    components.len()
                )));
            }
        }
    }

    let drawing = VisualDrawing::new(pts).map_err(TopogenError::Graph)?;
    Ok((topology, drawing))
}

/// Attaches a synthetic signal-strength reading to every edge: the
/// free-space value at `frame_scale` meters per frame unit plus Gaussian
/// noise of the given standard deviation (zero noise gives exact values).
/// The frequency is recorded on the returned topology.
pub fn synthesize_rssi(
    topology: &Topology,
    drawing: &VisualDrawing,
    freq_mhz: f64,
    frame_scale: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<Topology, TopogenError> {
    if !(frame_scale > 0.0) {
        return Err(TopogenError::InvalidParams(format!(
            "frame scale must be positive, got {frame_scale}"
        )));
    }
    if !(noise_sd >= 0.0) {
        return Err(TopogenError::InvalidParams(format!(
            "noise standard deviation must be non-negative, got {noise_sd}"
        )));
    }
    if drawing.len() != topology.node_count() {
        return Err(TopogenError::Graph(GraphError::PositionCountMismatch {
            got: drawing.len(),
            want: topology.node_count(),
        }));
    }
    let mut rng = SplitMix64::new(mix_seed(seed, 5));
    let mut rssi = Vec::with_capacity(topology.edge_count());
    for &(u, v) in topology.edges() {
        let meters = frame_scale * drawing.position(u).dist(drawing.position(v));
        let base = fspl_rssi(meters, freq_mhz)
            .map_err(|e| TopogenError::InvalidParams(e.to_string()))?;
        let noise = if noise_sd > 0.0 {
            noise_sd * rng.gaussian()
        } else {
            0.0
        };
        rssi.push(Some(base + noise));
    }
    let mut out = topology.clone();
    out.set_rssi(rssi)?;
    out.set_freq_mhz(Some(freq_mhz));
    Ok(out)
}
