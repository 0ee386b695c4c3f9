use cncah_core::{hop_matrix, GraphError, Point, SplitMix64, Topology, VisualDrawing};

use crate::spring;
use crate::{Control, LayoutError, LayoutState, UnitReport};

#[derive(Debug, Clone)]
pub struct FrOptions {
    /// Frame side length (the force constant scales with its area).
    pub l0: f64,
    /// Multiplier on the natural spacing `√(area/n)`.
    pub c: f64,
    /// Sweeps over which the temperature cools linearly to its floor.
    pub cooling_units: u64,
    pub max_units: Option<u64>,
    pub seed: u64,
}

impl Default for FrOptions {
    fn default() -> Self {
        FrOptions {
            l0: 1.0,
            c: 0.3,
            cooling_units: 100,
            max_units: None,
            seed: 0,
        }
    }
}

/// Grid-free spring embedder: every pair repels with `k_opt²/d`, every edge
/// attracts with `d²/k_opt`, and per-sweep displacement is capped by a
/// linearly cooling temperature. One work unit is one full sweep. The run
/// never self-terminates; it stops on the budget or the hook.
///
/// Reported energy is the shared hop-count spring energy so runs are
/// comparable with the other algorithms.
pub fn fr_layout(
    topology: &Topology,
    init: &VisualDrawing,
    opts: &FrOptions,
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
    let k_opt = opts.c * (opts.l0 * opts.l0 / n as f64).sqrt();
    let t0 = opts.l0 / 10.0;

    let mut drawing = init.clone();
    let mut units = 0u64;
    if opts.max_units == Some(0) {
        return Ok(LayoutState {
            energy: spring::energy(&model, &drawing, None),
            drawing,
            units,
            rng_seed: opts.seed,
        });
    }

    let mut disp = vec![(0.0f64, 0.0f64); n];
    loop {
        let cooled = 1.0 - units as f64 / opts.cooling_units as f64;
        let t = t0 * cooled.max(0.01);

        for d in disp.iter_mut() {
            *d = (0.0, 0.0);
        }
        for i in 0..n {
            let pi = drawing.position(i);
            for j in (i + 1)..n {
                let (dx, dy, dist) = separation(pi, drawing.position(j), i, j, opts.l0);
                let f = k_opt * k_opt / dist; // repulsive magnitude
                let (ux, uy) = (dx / dist, dy / dist);
                disp[i].0 += ux * f;
                disp[i].1 += uy * f;
                disp[j].0 -= ux * f;
                disp[j].1 -= uy * f;
            }
        }
        for &(u, v) in topology.edges() {
            let (dx, dy, dist) = separation(drawing.position(u), drawing.position(v), u, v, opts.l0);
            let f = dist * dist / k_opt; // attractive magnitude
            let (ux, uy) = (dx / dist, dy / dist);
            disp[u].0 -= ux * f;
            disp[u].1 -= uy * f;
            disp[v].0 += ux * f;
            disp[v].1 += uy * f;
        }
        for (i, &(dx, dy)) in disp.iter().enumerate() {
            let len = dx.hypot(dy);
            if len > 0.0 {
                let step = len.min(t);
                let p = drawing.position(i);
                drawing.set_position(i, Point::new(p.x + dx / len * step, p.y + dy / len * step));
            }
        }

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

/// `p_i − p_j` with coincident pairs pushed apart along a deterministic
/// pair-derived direction.
fn separation(pi: Point, pj: Point, i: usize, j: usize, l0: f64) -> (f64, f64, f64) {
    let dx = pi.x - pj.x;
    let dy = pi.y - pj.y;
    let dist = dx.hypot(dy);
    if dist < 1e-12 {
        let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let h = SplitMix64::new(0x6672_7365_7001u64 ^ ((a as u64) << 32) ^ b as u64).next_u64();
        let angle = std::f64::consts::TAU * ((h >> 11) as f64 * (1.0 / (1u64 << 53) as f64));
        let eps = 1e-9 * l0;
        (sign * angle.cos() * eps, sign * angle.sin() * eps, eps)
    } else {
        (dx, dy, dist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run_to_budget;

    fn random_drawing(seed: u64, n: usize) -> VisualDrawing {
        let mut rng = SplitMix64::new(seed);
        VisualDrawing::new(
            (0..n)
                .map(|_| Point::new(rng.next_f64(), rng.next_f64()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_connected_nodes_settle_near_natural_spacing() {
        let t = Topology::new(2, vec![(0, 1)]).unwrap();
        let init = random_drawing(4, 2);
        let opts = FrOptions {
            max_units: Some(200),
            ..FrOptions::default()
        };
        let out = fr_layout(&t, &init, &opts, run_to_budget).unwrap();
        let k_opt = 0.3 * (1.0f64 / 2.0).sqrt();
        let d = out.drawing.position(0).dist(out.drawing.position(1));
        assert!(
            d >= 0.5 * k_opt && d <= 2.0 * k_opt,
            "separation {d} vs k_opt {k_opt}"
        );
    }

    #[test]
    fn zero_budget_returns_init() {
        let t = Topology::new(2, vec![(0, 1)]).unwrap();
        let init = random_drawing(8, 2);
        let opts = FrOptions {
            max_units: Some(0),
            ..FrOptions::default()
        };
        let out = fr_layout(&t, &init, &opts, run_to_budget).unwrap();
        assert_eq!(out.drawing, init);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let t = Topology::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        let init = random_drawing(12, 5);
        let opts = FrOptions {
            max_units: Some(40),
            ..FrOptions::default()
        };
        let a = fr_layout(&t, &init, &opts, run_to_budget).unwrap();
        let b = fr_layout(&t, &init, &opts, run_to_budget).unwrap();
        assert_eq!(a.drawing, b.drawing);
    }

    #[test]
    fn coincident_nodes_separate() {
        let t = Topology::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let init =
            VisualDrawing::new(vec![Point::new(0.5, 0.5), Point::new(0.5, 0.5), Point::new(0.6, 0.5)])
                .unwrap();
        let opts = FrOptions {
            max_units: Some(50),
            ..FrOptions::default()
        };
        let out = fr_layout(&t, &init, &opts, run_to_budget).unwrap();
        assert!(out.drawing.position(0).dist(out.drawing.position(1)) > 1e-3);
    }
}
