use std::time::Instant;

use cncah_boundary::boundary_nodes;
use cncah_core::{hop_matrix, mix_seed, NodeId, Point, SplitMix64, Topology, VisualDrawing};
use cncah_layout::{
    build_spring_model, dh_layout, energy, fr_layout, kk_layout, wkkms_layout, Control, DhOptions,
    FrOptions, KkOptions, LayoutState, UnitReport, WkkmsParams,
};

use crate::log::{IterationLog, IterationRow};
use crate::score::{confusion, metrics, Metrics};
use crate::HarnessError;

/// How a run converts work units into the `time_ms` log column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeModel {
    /// `time_ms = iter × quantum_ms`: reruns with the same seed are
    /// bit-identical.
    Deterministic { quantum_ms: u64 },
    /// Elapsed wall-clock milliseconds: comparable across algorithms whose
    /// per-unit cost differs, but not reproducible.
    WallClock,
}

impl Default for TimeModel {
    fn default() -> Self {
        TimeModel::Deterministic { quantum_ms: 100 }
    }
}

/// When to stop an experiment. At least one rule must be set. Target rates
/// stop the run once every set target is met simultaneously on the latest
/// row; `stall_iters` stops it once the three rates have stayed unchanged
/// for that many consecutive evaluated intervals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TerminationCriteria {
    pub max_iters: Option<u64>,
    pub target_sensitivity: Option<f64>,
    pub target_specificity: Option<f64>,
    pub target_accuracy: Option<f64>,
    pub time_limit_ms: Option<u64>,
    pub stall_iters: Option<u64>,
}

impl TerminationCriteria {
    pub fn max_iters(n: u64) -> Self {
        TerminationCriteria {
            max_iters: Some(n),
            ..TerminationCriteria::default()
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.max_iters.is_none()
            && self.target_sensitivity.is_none()
            && self.target_specificity.is_none()
            && self.target_accuracy.is_none()
            && self.time_limit_ms.is_none()
            && self.stall_iters.is_none()
        {
            return Err(HarnessError::InvalidCriteria(
                "at least one stopping rule must be set".to_owned(),
            ));
        }
        let targets = [
            ("sensitivity", self.target_sensitivity),
            ("specificity", self.target_specificity),
            ("accuracy", self.target_accuracy),
        ];
        for (name, target) in targets {
            if let Some(t) = target {
                if !(0.0..=1.0).contains(&t) {
                    return Err(HarnessError::InvalidCriteria(format!(
                        "target {name} must lie in [0, 1], got {t}"
                    )));
                }
            }
        }
        if self.stall_iters == Some(0) {
            return Err(HarnessError::InvalidCriteria(
                "stall window must be at least 1 interval".to_owned(),
            ));
        }
        Ok(())
    }
}

/// A layout algorithm plus its tuning, ready to run.
#[derive(Debug, Clone)]
pub enum AlgorithmSpec {
    Kk(KkOptions),
    Fr(FrOptions),
    Dh(DhOptions),
    Wkkms(WkkmsParams),
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::Kk(_) => "kk",
            AlgorithmSpec::Fr(_) => "fr",
            AlgorithmSpec::Dh(_) => "dh",
            AlgorithmSpec::Wkkms(_) => "wkkms",
        }
    }

    fn l0(&self) -> f64 {
        match self {
            AlgorithmSpec::Kk(o) => o.l0,
            AlgorithmSpec::Fr(o) => o.l0,
            AlgorithmSpec::Dh(o) => o.l0,
            AlgorithmSpec::Wkkms(p) => p.l0,
        }
    }

    fn k_const(&self) -> f64 {
        match self {
            AlgorithmSpec::Kk(o) => o.k_const,
            AlgorithmSpec::Wkkms(p) => p.k_const,
            // The other engines report energy under unit stiffness scaling.
            AlgorithmSpec::Fr(_) | AlgorithmSpec::Dh(_) => 1.0,
        }
    }
}

/// The seeded uniform-random starting drawing every experiment begins from:
/// layout algorithms never see the true positions.
pub fn seeded_random_drawing(n: usize, seed: u64) -> VisualDrawing {
    let mut rng = SplitMix64::new(mix_seed(seed, 6));
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.next_f64();
        let y = rng.next_f64();
        pts.push(Point::new(x, y));
    }
    VisualDrawing::new(pts).expect("uniform coordinates are finite")
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    /// Boundary nodes of the true drawing, computed once up front.
    pub truth: Vec<NodeId>,
    /// Boundary nodes of the final laid-out drawing.
    pub detected: Vec<NodeId>,
    pub state: LayoutState,
    pub log: IterationLog,
}

/// Runs one boundary-detection experiment. The truth drawing is used only
/// to fix the reference boundary set; the algorithm starts from seeded
/// random positions and sees the topology alone (plus any signal strengths
/// stored on it). After every work unit the current drawing is scored
/// against the truth and logged; the run ends when the algorithm finishes
/// or a termination rule fires. Identical inputs and seed reproduce the
/// run bit for bit.
pub fn run_experiment(
    topology: &Topology,
    truth_drawing: &VisualDrawing,
    algorithm: &AlgorithmSpec,
    criteria: &TerminationCriteria,
    time_model: TimeModel,
    seed: u64,
) -> Result<ExperimentResult, HarnessError> {
    criteria.validate()?;
    let n = topology.node_count();
    let truth = boundary_nodes(truth_drawing, topology)?;

    let init = seeded_random_drawing(n, seed);

    let model = build_spring_model(&hop_matrix(topology)?, algorithm.l0(), algorithm.k_const())?;
    let start = Instant::now();
    let mut log = IterationLog::new();
    evaluate(
        &mut log,
        0,
        &init,
        energy(&model, &init, None),
        topology,
        &truth,
        time_model,
        start,
    )?;

    if criteria.max_iters == Some(0) || stop_reached(&log, criteria) {
        let detected = boundary_nodes(&init, topology)?;
        let energy = log.last().expect("initial row").energy;
        return Ok(ExperimentResult {
            truth,
            detected,
            state: LayoutState {
                drawing: init,
                energy,
                units: 0,
                rng_seed: seed,
            },
            log,
        });
    }

    let mut hook_err: Option<HarnessError> = None;
    let mut on_unit = |report: &UnitReport<'_>| -> Control {
        match evaluate(
            &mut log,
            report.unit,
            report.drawing,
            report.energy,
            topology,
            &truth,
            time_model,
            start,
        ) {
            Err(e) => {
                hook_err = Some(e);
                Control::Stop
            }
            Ok(()) => {
                if stop_reached(&log, criteria) {
                    Control::Stop
                } else {
                    Control::Continue
                }
            }
        }
    };

    let budget = criteria.max_iters;
    let run = match algorithm {
        AlgorithmSpec::Kk(o) => {
            let mut o = o.clone();
            o.seed = seed;
            o.max_units = tighter(o.max_units, budget);
            kk_layout(topology, &init, &o, &mut on_unit)
        }
        AlgorithmSpec::Fr(o) => {
            let mut o = o.clone();
            o.seed = seed;
            o.max_units = tighter(o.max_units, budget);
            fr_layout(topology, &init, &o, &mut on_unit)
        }
        AlgorithmSpec::Dh(o) => {
            let mut o = o.clone();
            o.seed = seed;
            o.max_units = tighter(o.max_units, budget);
            dh_layout(topology, &init, &o, &mut on_unit)
        }
        AlgorithmSpec::Wkkms(p) => {
            let mut p = p.clone();
            p.seed = seed;
            p.max_units = tighter(p.max_units, budget);
            wkkms_layout(topology, &init, &p, &mut on_unit)
        }
    };
    if let Some(e) = hook_err {
        return Err(e);
    }
    let state = run?;
    let detected = boundary_nodes(&state.drawing, topology)?;
    Ok(ExperimentResult {
        truth,
        detected,
        state,
        log,
    })
}

fn tighter(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    log: &mut IterationLog,
    unit: u64,
    drawing: &VisualDrawing,
    energy: f64,
    topology: &Topology,
    truth: &[NodeId],
    time_model: TimeModel,
    start: Instant,
) -> Result<(), HarnessError> {
    let detected = boundary_nodes(drawing, topology)?;
    let counts = confusion(truth, &detected, topology.node_count())?;
    let time_ms = match time_model {
        TimeModel::Deterministic { quantum_ms } => unit * quantum_ms,
        TimeModel::WallClock => start.elapsed().as_millis() as u64,
    };
    log.push(IterationRow {
        iter: unit,
        time_ms,
        energy,
        metrics: metrics(&counts),
        counts,
    });
    Ok(())
}

fn stop_reached(log: &IterationLog, criteria: &TerminationCriteria) -> bool {
    let rows = log.rows();
    let last = match rows.last() {
        Some(r) => r,
        None => return false,
    };
    if let Some(limit) = criteria.time_limit_ms {
        if last.time_ms >= limit {
            return true;
        }
    }
    if targets_met(&last.metrics, criteria) {
        return true;
    }
    if let Some(window) = criteria.stall_iters {
        let w = window as usize;
        if rows.len() > w {
            let tail = &rows[rows.len() - 1 - w..];
            if tail.iter().all(|r| r.metrics == tail[0].metrics) {
                return true;
            }
        }
    }
    false
}

/// True when at least one target is set and every set target is met by a
/// defined rate.
fn targets_met(m: &Metrics, criteria: &TerminationCriteria) -> bool {
    let pairs = [
        (criteria.target_sensitivity, m.sensitivity),
        (criteria.target_specificity, m.specificity),
        (criteria.target_accuracy, m.accuracy),
    ];
    let mut any = false;
    for (target, got) in pairs {
        if let Some(t) = target {
            any = true;
            match got {
                Some(v) if v >= t => {}
                _ => return false,
            }
        }
    }
    any
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(k: usize) -> (Topology, VisualDrawing) {
        let n = k * k;
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
        let topo = Topology::new(n, edges).unwrap();
        let mut pts = vec![Point::new(0.0, 0.0); n];
        for r in 0..k {
            for c in 0..k {
                pts[r * k + c] =
                    Point::new(c as f64 / (k - 1) as f64, r as f64 / (k - 1) as f64);
            }
        }
        (topo, VisualDrawing::new(pts).unwrap())
    }

    fn kk_spec() -> AlgorithmSpec {
        AlgorithmSpec::Kk(KkOptions::default())
    }

    #[test]
    fn criteria_need_at_least_one_rule() {
        assert!(TerminationCriteria::default().validate().is_err());
        assert!(TerminationCriteria::max_iters(5).validate().is_ok());
        let bad = TerminationCriteria {
            target_sensitivity: Some(1.5),
            ..TerminationCriteria::default()
        };
        assert!(bad.validate().is_err());
        let bad = TerminationCriteria {
            stall_iters: Some(0),
            ..TerminationCriteria::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn log_starts_at_zero_and_respects_the_budget() {
        let (topo, truth) = grid(4);
        let result = run_experiment(
            &topo,
            &truth,
            &kk_spec(),
            &TerminationCriteria::max_iters(5),
            TimeModel::default(),
            11,
        )
        .unwrap();
        let rows = result.log.rows();
        assert_eq!(rows[0].iter, 0);
        assert_eq!(rows[0].time_ms, 0);
        let last = result.log.last().unwrap();
        assert!(last.iter <= 5);
        assert_eq!(last.time_ms, last.iter * 100);
        assert!(rows.len() >= 2, "the run should complete at least one unit");
        // The truth drawing of a 4×4 grid has the 12 perimeter nodes on its
        // boundary.
        assert_eq!(result.truth.len(), 12);
        assert_eq!(result.log.rows()[0].counts.total(), 16);
    }

    #[test]
    fn zero_budget_logs_only_the_initial_state() {
        let (topo, truth) = grid(3);
        let result = run_experiment(
            &topo,
            &truth,
            &kk_spec(),
            &TerminationCriteria::max_iters(0),
            TimeModel::default(),
            7,
        )
        .unwrap();
        assert_eq!(result.log.rows().len(), 1);
        assert_eq!(result.state.units, 0);
        assert_eq!(result.log.rows()[0].iter, 0);
    }

    #[test]
    fn a_target_met_at_the_start_stops_before_any_work() {
        let (topo, truth) = grid(3);
        // Accuracy is always defined and non-negative, so a zero target is
        // satisfied by the initial row.
        let criteria = TerminationCriteria {
            target_accuracy: Some(0.0),
            ..TerminationCriteria::default()
        };
        let result = run_experiment(
            &topo,
            &truth,
            &kk_spec(),
            &criteria,
            TimeModel::default(),
            3,
        )
        .unwrap();
        assert_eq!(result.log.rows().len(), 1);
        assert_eq!(result.state.units, 0);
    }

    #[test]
    fn deterministic_time_limit_cuts_the_run_at_the_quantum_boundary() {
        let (topo, truth) = grid(4);
        let criteria = TerminationCriteria {
            time_limit_ms: Some(250),
            max_iters: Some(50),
            ..TerminationCriteria::default()
        };
        let result = run_experiment(
            &topo,
            &truth,
            &kk_spec(),
            &criteria,
            TimeModel::Deterministic { quantum_ms: 100 },
            11,
        )
        .unwrap();
        // Unit 3 is the first whose normalized time (300 ms) crosses the
        // 250 ms limit.
        assert_eq!(result.log.last().unwrap().iter, 3);
    }

    #[test]
    fn constant_metrics_trip_the_stall_window() {
        // Both nodes of a 2-node graph are always boundary nodes, so every
        // row scores identically and a 3-interval stall window stops the run
        // at unit 3.
        let topo = Topology::new(2, vec![(0, 1)]).unwrap();
        let truth =
            VisualDrawing::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).unwrap();
        let criteria = TerminationCriteria {
            stall_iters: Some(3),
            ..TerminationCriteria::default()
        };
        let result = run_experiment(
            &topo,
            &truth,
            &AlgorithmSpec::Fr(FrOptions::default()),
            &criteria,
            TimeModel::default(),
            5,
        )
        .unwrap();
        assert_eq!(result.log.last().unwrap().iter, 3);
        assert_eq!(result.detected, vec![0, 1]);
    }

    #[test]
    fn same_seed_reruns_are_bit_identical() {
        let (topo, truth) = grid(4);
        let criteria = TerminationCriteria::max_iters(8);
        let run = |seed| {
            run_experiment(
                &topo,
                &truth,
                &kk_spec(),
                &criteria,
                TimeModel::default(),
                seed,
            )
            .unwrap()
        };
        let a = run(42);
        let b = run(42);
        assert_eq!(a.log.to_csv(), b.log.to_csv());
        assert_eq!(a.detected, b.detected);
        assert_eq!(a.state.drawing, b.state.drawing);
        let c = run(43);
        assert_ne!(a.state.drawing, c.state.drawing);
    }

    #[test]
    fn logged_energy_never_increases_for_the_spring_engines() {
        let (topo, truth) = grid(4);
        for (name, spec) in [
            ("kk", kk_spec()),
            ("wkkms", AlgorithmSpec::Wkkms(WkkmsParams::default())),
        ] {
            let result = run_experiment(
                &topo,
                &truth,
                &spec,
                &TerminationCriteria::max_iters(30),
                TimeModel::default(),
                9,
            )
            .unwrap();
            let rows = result.log.rows();
            for pair in rows.windows(2) {
                assert!(
                    pair[1].energy <= pair[0].energy + 1e-9,
                    "{name}: energy rose from {} to {} at iter {}",
                    pair[0].energy,
                    pair[1].energy,
                    pair[1].iter
                );
            }
        }
    }

    #[test]
    fn wall_clock_times_are_monotone() {
        let (topo, truth) = grid(3);
        let result = run_experiment(
            &topo,
            &truth,
            &kk_spec(),
            &TerminationCriteria::max_iters(5),
            TimeModel::WallClock,
            2,
        )
        .unwrap();
        let rows = result.log.rows();
        for pair in rows.windows(2) {
            assert!(pair[1].time_ms >= pair[0].time_ms);
        }
    }

    #[test]
    fn detected_set_matches_the_final_drawing() {
        let (topo, truth) = grid(4);
        let result = run_experiment(
            &topo,
            &truth,
            &kk_spec(),
            &TerminationCriteria::max_iters(40),
            TimeModel::default(),
            1,
        )
        .unwrap();
        let again = cncah_boundary::boundary_nodes(&result.state.drawing, &topo).unwrap();
        assert_eq!(result.detected, again);
    }
}
