use cncah_core::{HopMatrix, NodeId, Point, SplitMix64, VisualDrawing};

use crate::LayoutError;

/// Pairwise spring system derived from hop counts: ideal lengths scale the
/// hop-count metric so the farthest pair spans the frame, and stiffness
/// falls off with the square of the hop count.
#[derive(Debug, Clone)]
pub struct SpringModel {
    n: usize,
    l0: f64,
    /// Ideal length table, row-major, diagonal zero.
    l: Vec<f64>,
    /// Stiffness table, row-major, diagonal zero.
    k: Vec<f64>,
}

/// Distance below which two nodes count as coincident and their interaction
/// is evaluated after a deterministic symbolic jitter.
const COINCIDENT_EPS: f64 = 1e-12;

/// Magnitude of the symbolic jitter, relative to the frame length.
const JITTER_SCALE: f64 = 1e-9;

impl SpringModel {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn frame_len(&self) -> f64 {
        self.l0
    }

    pub fn ideal_len(&self, i: NodeId, j: NodeId) -> f64 {
        self.l[i * self.n + j]
    }

    pub fn stiffness(&self, i: NodeId, j: NodeId) -> f64 {
        self.k[i * self.n + j]
    }
}

/// Builds the spring system for a connected graph: `l_ij = (L0 / max d) · d_ij`
/// and `k_ij = K / d_ij²`, where `d_ij` is the hop count.
pub fn build_spring_model(
    hops: &HopMatrix,
    l0: f64,
    k_const: f64,
) -> Result<SpringModel, LayoutError> {
    let n = hops.node_count();
    if n < 2 {
        return Err(LayoutError::DegenerateGraph);
    }
    if !(l0 > 0.0) || !(k_const > 0.0) {
        return Err(LayoutError::InvalidParams(
            "frame length and stiffness constant must be positive".into(),
        ));
    }
    let max_d = hops.diameter() as f64;
    debug_assert!(max_d >= 1.0, "connected graph with n >= 2 has diameter >= 1");
    let scale = l0 / max_d;
    let mut l = vec![0.0; n * n];
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = hops.get(i, j) as f64;
            l[i * n + j] = scale * d;
            k[i * n + j] = k_const / (d * d);
        }
    }
    Ok(SpringModel { n, l0, l, k })
}

fn weight_of(weights: Option<&[f64]>, i: NodeId) -> f64 {
    weights.map_or(1.0, |w| w[i])
}

/// Deterministic unit direction for a coincident pair, derived from the pair
/// ids alone so gradient evaluation stays a pure function of its inputs.
/// Antisymmetric: the direction for (j, i) is the negation of (i, j)'s.
fn jitter_direction(i: NodeId, j: NodeId) -> (f64, f64) {
    let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
    let salt = 0x6A69_7474_6572_0001u64;
    let h = SplitMix64::new(salt ^ ((a as u64) << 32) ^ b as u64).next_u64();
    let angle = std::f64::consts::TAU * ((h >> 11) as f64 * (1.0 / (1u64 << 53) as f64));
    (sign * angle.cos(), sign * angle.sin())
}

/// Displacement `p_i − p_j` and its length, with coincident pairs replaced by
/// a tiny deterministic offset so force directions stay defined.
fn pair_displacement(model: &SpringModel, drawing: &VisualDrawing, i: NodeId, j: NodeId) -> (f64, f64, f64) {
    let pi = drawing.position(i);
    let pj = drawing.position(j);
    let dx = pi.x - pj.x;
    let dy = pi.y - pj.y;
    let dist = dx.hypot(dy);
    if dist < COINCIDENT_EPS {
        let eps = JITTER_SCALE * model.l0;
        let (ux, uy) = jitter_direction(i, j);
        (ux * eps, uy * eps, eps)
    } else {
        (dx, dy, dist)
    }
}

/// Total spring energy `Σ_{i<j} ½ w_i k_ij (|p_i−p_j| − l_ij)²`. The pair
/// weight is the smaller-index node's weight; with no weights this is the
/// classical unweighted energy. Coincident pairs contribute `½ w k l²`.
pub fn energy(model: &SpringModel, drawing: &VisualDrawing, weights: Option<&[f64]>) -> f64 {
    let n = model.n;
    let mut e = 0.0;
    for i in 0..n {
        let wi = weight_of(weights, i);
        let pi = drawing.position(i);
        for j in (i + 1)..n {
            let d = pi.dist(drawing.position(j));
            let stretch = d - model.l[i * n + j];
            e += 0.5 * wi * model.k[i * n + j] * stretch * stretch;
        }
    }
    e
}

/// Energy of all pairs involving node `i` (unweighted). Moving only node `i`
/// changes the total energy by exactly the change in this quantity.
fn node_energy_at(model: &SpringModel, drawing: &VisualDrawing, i: NodeId, at: Point) -> f64 {
    let n = model.n;
    let mut e = 0.0;
    for j in 0..n {
        if j == i {
            continue;
        }
        let d = at.dist(drawing.position(j));
        let stretch = d - model.l[i * n + j];
        e += 0.5 * model.k[i * n + j] * stretch * stretch;
    }
    e
}

/// Gradient of the per-node change measure at node `i`:
/// `g = w_i · Σ_{j≠i} k_ij (1 − l_ij/p_ij) (p_i − p_j)`.
/// The node's own weight scales both components.
pub fn gradient(
    model: &SpringModel,
    drawing: &VisualDrawing,
    weights: Option<&[f64]>,
    i: NodeId,
) -> (f64, f64) {
    let n = model.n;
    let wi = weight_of(weights, i);
    let mut gx = 0.0;
    let mut gy = 0.0;
    for j in 0..n {
        if j == i {
            continue;
        }
        let (dx, dy, dist) = pair_displacement(model, drawing, i, j);
        let f = model.k[i * n + j] * (1.0 - model.l[i * n + j] / dist);
        gx += f * dx;
        gy += f * dy;
    }
    (wi * gx, wi * gy)
}

/// One directed pair's contribution to node `i`'s unweighted gradient from
/// neighbor `j`. Used by callers that maintain gradients incrementally.
pub(crate) fn pair_gradient_term(
    model: &SpringModel,
    drawing: &VisualDrawing,
    i: NodeId,
    j: NodeId,
) -> (f64, f64) {
    let (dx, dy, dist) = pair_displacement(model, drawing, i, j);
    let f = model.k[i * model.n + j] * (1.0 - model.l[i * model.n + j] / dist);
    (f * dx, f * dy)
}

/// Magnitude of the weighted gradient at node `i` — the "change" measure that
/// drives node selection.
pub fn delta(
    model: &SpringModel,
    drawing: &VisualDrawing,
    weights: Option<&[f64]>,
    i: NodeId,
) -> f64 {
    let (gx, gy) = gradient(model, drawing, weights, i);
    gx.hypot(gy)
}

/// One Newton-Raphson displacement for node `i` with every other node held
/// fixed. Solves the 2×2 system of analytic second partials; the node's
/// weight scales gradient and Hessian identically, so the solved direction
/// matches the unweighted system. If the system is singular or the step
/// would raise the energy, falls back to a damped descent along −g (halving
/// up to 20 times), and to a zero step if no decrease is found.
pub fn newton_step(
    model: &SpringModel,
    drawing: &VisualDrawing,
    weights: Option<&[f64]>,
    i: NodeId,
) -> (f64, f64) {
    let _ = weights; // direction is weight-independent; kept for symmetry with delta
    let n = model.n;
    let mut gx = 0.0;
    let mut gy = 0.0;
    let mut hxx = 0.0;
    let mut hxy = 0.0;
    let mut hyy = 0.0;
    for j in 0..n {
        if j == i {
            continue;
        }
        let (dx, dy, dist) = pair_displacement(model, drawing, i, j);
        let k = model.k[i * n + j];
        let l = model.l[i * n + j];
        let inv3 = 1.0 / (dist * dist * dist);
        gx += k * (1.0 - l / dist) * dx;
        gy += k * (1.0 - l / dist) * dy;
        hxx += k * (1.0 - l * dy * dy * inv3);
        hxy += k * l * dx * dy * inv3;
        hyy += k * (1.0 - l * dx * dx * inv3);
    }
    let gnorm = gx.hypot(gy);
    if gnorm == 0.0 {
        return (0.0, 0.0);
    }

    let here = drawing.position(i);
    let before = node_energy_at(model, drawing, i, here);
    let decreases = |sx: f64, sy: f64| {
        let cand = Point::new(here.x + sx, here.y + sy);
        cand.is_finite() && node_energy_at(model, drawing, i, cand) <= before
    };

    let det = hxx * hyy - hxy * hxy;
    if det.abs() > 1e-300 && det.is_finite() {
        let sx = (-gx * hyy + gy * hxy) / det;
        let sy = (-hxx * gy + hxy * gx) / det;
        if sx.is_finite() && sy.is_finite() && decreases(sx, sy) {
            return (sx, sy);
        }
    }

    // Singular or uphill Newton system: damped descent along −g, starting at
    // frame-length scale and halving until the energy stops increasing.
    let mut sx = -gx / gnorm * model.l0;
    let mut sy = -gy / gnorm * model.l0;
    for _ in 0..=20 {
        if decreases(sx, sy) {
            return (sx, sy);
        }
        sx *= 0.5;
        sy *= 0.5;
    }
    (0.0, 0.0)
}
