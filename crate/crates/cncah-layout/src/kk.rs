use cncah_core::{hop_matrix, GraphError, Point, Topology, VisualDrawing};

use crate::spring::{self, SpringModel};
use crate::{Control, LayoutError, LayoutState, UnitReport};

#[derive(Debug, Clone)]
pub struct KkOptions {
    /// Frame side length the ideal lengths scale to.
    pub l0: f64,
    /// Stiffness scaling constant.
    pub k_const: f64,
    /// Convergence threshold on the largest gradient magnitude;
    /// `None` selects `1e-6 · l0`.
    pub tolerance: Option<f64>,
    /// Budget in work units (one unit = one position update per node).
    pub max_units: Option<u64>,
    pub seed: u64,
}

impl Default for KkOptions {
    fn default() -> Self {
        KkOptions {
            l0: 1.0,
            k_const: 1.0,
            tolerance: None,
            max_units: None,
            seed: 0,
        }
    }
}

/// Classical spring layout: repeatedly pick the node with the largest
/// gradient magnitude (ties to the lowest id) and apply one Newton step to
/// it, until the largest magnitude falls under the tolerance or the budget
/// or hook stops the run.
///
/// Gradients are maintained incrementally (a moved node only perturbs its
/// own row and one term of every other row) and recomputed from scratch at
/// every unit boundary to wash out floating-point drift.
pub fn kk_layout(
    topology: &Topology,
    init: &VisualDrawing,
    opts: &KkOptions,
    mut on_unit: impl FnMut(&UnitReport<'_>) -> Control,
) -> Result<LayoutState, LayoutError> {
    let n = topology.node_count();
    if init.len() != n {
        return Err(LayoutError::Graph(GraphError::PositionCountMismatch {
            got: init.len(),
            want: n,
        }));
    }
    let model = spring::build_spring_model(&hop_matrix(topology)?, opts.l0, opts.k_const)?;
    let tol = opts.tolerance.unwrap_or(1e-6 * opts.l0);

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

    let mut grads = full_gradients(&model, &drawing);
    'run: loop {
        for _ in 0..n {
            let (best, best_mag) = argmax_gradient(&grads);
            if best_mag < tol {
                break 'run;
            }
            apply_step(&model, &mut drawing, &mut grads, best);
        }
        units += 1;
        // Resync cached gradients before anything observes them again.
        grads = full_gradients(&model, &drawing);
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

fn full_gradients(model: &SpringModel, drawing: &VisualDrawing) -> Vec<(f64, f64)> {
    (0..model.node_count())
        .map(|i| spring::gradient(model, drawing, None, i))
        .collect()
}

fn argmax_gradient(grads: &[(f64, f64)]) -> (usize, f64) {
    let mut best = 0;
    let mut best_mag = f64::NEG_INFINITY;
    for (i, &(gx, gy)) in grads.iter().enumerate() {
        let mag = gx.hypot(gy);
        if mag > best_mag {
            best = i;
            best_mag = mag;
        }
    }
    (best, best_mag)
}

/// Newton-steps node `m` and patches the cached gradients: every other node
/// loses its old (j, m) term and gains the new one; `m`'s own row is
/// recomputed in full.
fn apply_step(
    model: &SpringModel,
    drawing: &mut VisualDrawing,
    grads: &mut [(f64, f64)],
    m: usize,
) {
    let (sx, sy) = spring::newton_step(model, drawing, None, m);
    if sx == 0.0 && sy == 0.0 {
        return;
    }
    let n = model.node_count();
    let mut removed = vec![(0.0, 0.0); n];
    for (j, slot) in removed.iter_mut().enumerate() {
        if j != m {
            *slot = spring::pair_gradient_term(model, drawing, j, m);
        }
    }
    let p = drawing.position(m);
    drawing.set_position(m, Point::new(p.x + sx, p.y + sy));
    for (j, grad) in grads.iter_mut().enumerate() {
        if j == m {
            continue;
        }
        let (nx, ny) = spring::pair_gradient_term(model, drawing, j, m);
        grad.0 += nx - removed[j].0;
        grad.1 += ny - removed[j].1;
    }
    grads[m] = spring::gradient(model, drawing, None, m);
}
