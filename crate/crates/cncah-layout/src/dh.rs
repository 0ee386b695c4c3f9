use cncah_core::{hop_matrix, mix_seed, GraphError, Point, SplitMix64, Topology, VisualDrawing};

use crate::spring;
use crate::{Control, LayoutError, LayoutState, UnitReport};

#[derive(Debug, Clone)]
pub struct DhOptions {
    /// Frame side length; moves are confined to this box.
    pub l0: f64,
    /// Node-node repulsion weight (spread term).
    pub lambda_spread: f64,
    /// Squared-edge-length weight.
    pub lambda_edge: f64,
    /// Wall-proximity weight (border term).
    pub lambda_border: f64,
    /// Geometric cooling factor applied to temperature and move radius
    /// after every sweep.
    pub cooling: f64,
    pub max_units: Option<u64>,
    pub seed: u64,
}

impl Default for DhOptions {
    fn default() -> Self {
        DhOptions {
            l0: 1.0,
            lambda_spread: 1e-4,
            lambda_edge: 1.0,
            lambda_border: 1e-6,
            cooling: 0.95,
            max_units: None,
            seed: 0,
        }
    }
}

/// Margin keeping nodes off the frame walls so the border term stays finite,
/// as a fraction of the frame length.
const WALL_MARGIN: f64 = 1e-3;

/// Simulated-annealing layout over a cost with spread (pairwise 1/d²),
/// edge-length (d²) and border (inverse-square wall distance) terms.
/// Each sweep proposes one move per node inside a shrinking radius and
/// accepts by the Metropolis rule under a geometrically cooling temperature.
/// One work unit is one sweep. Stops on budget or hook only.
///
/// Reported energy is the shared hop-count spring energy so runs are
/// comparable with the other algorithms.
pub fn dh_layout(
    topology: &Topology,
    init: &VisualDrawing,
    opts: &DhOptions,
    mut on_unit: impl FnMut(&UnitReport<'_>) -> Control,
) -> Result<LayoutState, LayoutError> {
    let n = topology.node_count();
    if init.len() != n {
        return Err(LayoutError::Graph(GraphError::PositionCountMismatch {
            got: init.len(),
            want: n,
        }));
    }
    let model = spring::build_spring_model(&hop_matrix(topology)?, opts.l0, 1.0)?;
    let margin = WALL_MARGIN * opts.l0;
    let clamp = |v: f64| v.clamp(margin, opts.l0 - margin);

    // The cost needs every node strictly inside the frame; fold stray
    // initial positions onto the margin box.
    let mut drawing = VisualDrawing::new(
        init.positions()
            .iter()
            .map(|p| Point::new(clamp(p.x), clamp(p.y)))
            .collect(),
    )
    .expect("clamped positions are finite");

    let mut units = 0u64;
    if opts.max_units == Some(0) {
        return Ok(LayoutState {
            energy: spring::energy(&model, &drawing, None),
            drawing,
            units,
            rng_seed: opts.seed,
        });
    }

    let mut rng = SplitMix64::new(mix_seed(opts.seed, 3));

    // Calibrate the starting temperature from the typical proposal cost
    // change so the acceptance rate starts high regardless of term scales.
    let radius0 = opts.l0 / 2.0;
    let mut probe_sum = 0.0;
    for i in 0..n {
        let cand = propose(&mut rng, drawing.position(i), radius0, margin, opts.l0);
        probe_sum += (node_cost(topology, &drawing, opts, i, cand)
            - node_cost(topology, &drawing, opts, i, drawing.position(i)))
        .abs();
    }
    let mut temperature = (probe_sum / n as f64).max(1e-12);
    let mut radius = radius0;

    loop {
        for i in 0..n {
            let here = drawing.position(i);
            let cand = propose(&mut rng, here, radius, margin, opts.l0);
            let dc = node_cost(topology, &drawing, opts, i, cand)
                - node_cost(topology, &drawing, opts, i, here);
            let accept = dc <= 0.0 || rng.next_f64() < (-dc / temperature).exp();
            if accept {
                drawing.set_position(i, cand);
            }
        }
        temperature = (temperature * opts.cooling).max(1e-12);
        radius = (radius * opts.cooling).max(0.005 * opts.l0);

        units += 1;
        let energy = spring::energy(&model, &drawing, None);
        let report = UnitReport {
            unit: units,
            drawing: &drawing,
            energy,
        };
        if on_unit(&report) == Control::Stop {
            break;
        }
        if opts.max_units.is_some_and(|m| units >= m) {
            break;
        }
    }

    Ok(LayoutState {
        energy: spring::energy(&model, &drawing, None),
        drawing,
        units,
        rng_seed: opts.seed,
    })
}

fn propose(rng: &mut SplitMix64, from: Point, radius: f64, margin: f64, l0: f64) -> Point {
    let angle = std::f64::consts::TAU * rng.next_f64();
    let r = radius * rng.next_f64().sqrt();
    Point::new(
        (from.x + r * angle.cos()).clamp(margin, l0 - margin),
        (from.y + r * angle.sin()).clamp(margin, l0 - margin),
    )
}

/// Cost terms involving node `i` evaluated with `i` at `at`. Moving a single
/// node changes the total cost by exactly the change in this quantity.
fn node_cost(topology: &Topology, drawing: &VisualDrawing, opts: &DhOptions, i: usize, at: Point) -> f64 {
    let mut c = 0.0;
    for j in 0..topology.node_count() {
        if j == i {
            continue;
        }
        let d2 = square_dist(at, drawing.position(j)).max(1e-12);
        c += opts.lambda_spread / d2;
    }
    for &j in topology.neighbors(i) {
        c += opts.lambda_edge * square_dist(at, drawing.position(j));
    }
    let l0 = opts.l0;
    for wall in [at.x, l0 - at.x, at.y, l0 - at.y] {
        c += opts.lambda_border / wall.max(1e-6 * l0).powi(2);
    }
    c
}

fn square_dist(a: Point, b: Point) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    dx * dx + dy * dy
}
