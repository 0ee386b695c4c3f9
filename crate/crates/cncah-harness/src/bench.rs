use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cncah_layout::{DhOptions, FrOptions, KkOptions, WkkmsParams};
use cncah_topogen::{generate_topology, parse_shape_script, synthesize_rssi, GenParams};

use crate::experiment::{run_experiment, AlgorithmSpec, TerminationCriteria, TimeModel};
use crate::log::fmt_rate;
use crate::score::{ConfusionCounts, Metrics};
use crate::HarnessError;

/// Algorithm names a benchmark block may list.
const ALGORITHM_NAMES: [&str; 4] = ["kk", "fr", "dh", "wkkms"];

/// One `[run]` block of a benchmark config: a shape, the instance seeds to
/// generate from it, the algorithms to race on each instance, and shared
/// generation/layout/termination settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Shape-script path, relative to the config file's directory.
    pub shape: String,
    /// Row label; defaults to the shape file stem.
    pub name: String,
    pub seeds: Vec<u64>,
    /// Validated subset of `kk`, `fr`, `dh`, `wkkms`.
    pub algorithms: Vec<String>,
    pub nodes: usize,
    pub degree: f64,
    pub l0: f64,
    pub p: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub deltas: [f64; 5],
    /// Carrier frequency for signal-strength synthesis; `None` (config value
    /// `none`) runs without signal strengths.
    pub freq_mhz: Option<f64>,
    /// Metres represented by one drawing-frame unit.
    pub frame_scale: f64,
    pub rssi_noise_sd: f64,
    /// Normalized milliseconds one work unit counts for in the logs.
    pub quantum_ms: u64,
    pub criteria: TerminationCriteria,
}

impl Default for RunConfig {
    fn default() -> Self {
        let w = WkkmsParams::default();
        RunConfig {
            shape: String::new(),
            name: String::new(),
            seeds: Vec::new(),
            algorithms: Vec::new(),
            nodes: 300,
            degree: 8.0,
            l0: 1.0,
            p: w.p,
            theta: w.theta,
            epsilon: w.epsilon,
            deltas: w.deltas,
            freq_mhz: Some(2400.0),
            frame_scale: 100.0,
            rssi_noise_sd: 0.0,
            quantum_ms: 100,
            criteria: TerminationCriteria::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchConfig {
    pub runs: Vec<RunConfig>,
}

/// Parses a benchmark config: `key = value` lines grouped under `[run]`
/// headers, `#` starting a comment. Every block must name a shape, at least
/// one seed, at least one algorithm and at least one termination rule.
pub fn parse_bench_config(text: &str) -> Result<BenchConfig, HarnessError> {
    let fail = |line: usize, message: String| HarnessError::Config { line, message };
    let mut runs: Vec<RunConfig> = Vec::new();
    let mut current: Option<(usize, RunConfig)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line == "[run]" {
            if let Some((start, run)) = current.take() {
                finish_block(start, run, &mut runs)?;
            }
            current = Some((line_no, RunConfig::default()));
            continue;
        }
        if line.starts_with('[') {
            return Err(fail(line_no, format!("unknown section {line}, expected [run]")));
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| fail(line_no, format!("expected key = value, got {line}")))?;
        let key = key.trim();
        let value = value.trim();
        let (_, run) = current
            .as_mut()
            .ok_or_else(|| fail(line_no, format!("{key} appears before the first [run] block")))?;
        apply_key(run, key, value, line_no)?;
    }
    if let Some((start, run)) = current.take() {
        finish_block(start, run, &mut runs)?;
    }
    if runs.is_empty() {
        return Err(fail(0, "config contains no [run] block".to_owned()));
    }
    Ok(BenchConfig { runs })
}

fn apply_key(run: &mut RunConfig, key: &str, value: &str, line: usize) -> Result<(), HarnessError> {
    let fail = |message: String| HarnessError::Config { line, message };
    let f64_of = |v: &str| -> Result<f64, HarnessError> {
        v.parse()
            .map_err(|_| fail(format!("{key}: expected a number, got {v}")))
    };
    let u64_of = |v: &str| -> Result<u64, HarnessError> {
        v.parse()
            .map_err(|_| fail(format!("{key}: expected a non-negative integer, got {v}")))
    };
    match key {
        "shape" => run.shape = value.to_owned(),
        "name" => run.name = value.to_owned(),
        "seeds" => {
            run.seeds = split_list(value)
                .map(|v| u64_of(v))
                .collect::<Result<_, _>>()?;
        }
        "algorithms" => {
            let names: Vec<String> = split_list(value).map(str::to_owned).collect();
            for name in &names {
                if !ALGORITHM_NAMES.contains(&name.as_str()) {
                    return Err(fail(format!(
                        "unknown algorithm {name}; expected one of {}",
                        ALGORITHM_NAMES.join(", ")
                    )));
                }
            }
            run.algorithms = names;
        }
        "nodes" => {
            run.nodes = value
                .parse()
                .map_err(|_| fail(format!("nodes: expected a positive integer, got {value}")))?;
        }
        "degree" => run.degree = f64_of(value)?,
        "l0" => run.l0 = f64_of(value)?,
        "p" => run.p = f64_of(value)?,
        "theta" => run.theta = f64_of(value)?,
        "epsilon" => run.epsilon = f64_of(value)?,
        "deltas" => {
            let parts: Vec<f64> = split_list(value)
                .map(|v| f64_of(v))
                .collect::<Result<_, _>>()?;
            run.deltas = parts
                .try_into()
                .map_err(|_| fail("deltas: expected exactly 5 comma-separated factors".to_owned()))?;
        }
        "freq_mhz" => {
            run.freq_mhz = if value.eq_ignore_ascii_case("none") {
                None
            } else {
                Some(f64_of(value)?)
            };
        }
        "frame_scale" => run.frame_scale = f64_of(value)?,
        "rssi_noise_sd" => run.rssi_noise_sd = f64_of(value)?,
        "quantum_ms" => run.quantum_ms = u64_of(value)?,
        "max_iters" => run.criteria.max_iters = Some(u64_of(value)?),
        "target_sensitivity" => run.criteria.target_sensitivity = Some(f64_of(value)?),
        "target_specificity" => run.criteria.target_specificity = Some(f64_of(value)?),
        "target_accuracy" => run.criteria.target_accuracy = Some(f64_of(value)?),
        "time_limit_ms" => run.criteria.time_limit_ms = Some(u64_of(value)?),
        "stall_iters" => run.criteria.stall_iters = Some(u64_of(value)?),
        _ => return Err(fail(format!("unknown key {key}"))),
    }
    Ok(())
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|v| !v.is_empty())
}

fn finish_block(
    start_line: usize,
    mut run: RunConfig,
    runs: &mut Vec<RunConfig>,
) -> Result<(), HarnessError> {
    let fail = |message: String| HarnessError::Config {
        line: start_line,
        message,
    };
    if run.shape.is_empty() {
        return Err(fail("block sets no shape".to_owned()));
    }
    if run.seeds.is_empty() {
        return Err(fail("block lists no seeds".to_owned()));
    }
    if run.algorithms.is_empty() {
        return Err(fail("block lists no algorithms".to_owned()));
    }
    if run.nodes == 0 {
        return Err(fail("nodes must be positive".to_owned()));
    }
    run.criteria
        .validate()
        .map_err(|e| fail(format!("termination: {e}")))?;
    if run.name.is_empty() {
        run.name = Path::new(&run.shape)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| run.shape.clone());
    }
    runs.push(run);
    Ok(())
}

/// One (shape, algorithm, seed) outcome: the final log row of its experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub shape: String,
    pub algorithm: String,
    pub seed: u64,
    pub iters: u64,
    pub time_ms: u64,
    pub energy: f64,
    pub metrics: Metrics,
    pub counts: ConfusionCounts,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

pub const BENCH_CSV_HEADER: &str =
    "shape,algorithm,seed,iters,time_ms,energy,sensitivity,specificity,accuracy,tp,fn,fp,tn";

pub const SUMMARY_CSV_HEADER: &str =
    "shape,algorithm,stat,iters,time_ms,sensitivity,specificity,accuracy";

impl BenchReport {
    /// One CSV line per (shape, algorithm, seed) experiment, in config order.
    pub fn rows_csv(&self) -> String {
        let mut out = String::from(BENCH_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.shape,
                r.algorithm,
                r.seed,
                r.iters,
                r.time_ms,
                r.energy,
                fmt_rate(r.metrics.sensitivity),
                fmt_rate(r.metrics.specificity),
                fmt_rate(r.metrics.accuracy),
                r.counts.true_pos,
                r.counts.false_neg,
                r.counts.false_pos,
                r.counts.true_neg,
            );
        }
        out
    }

    /// Mean/min/max per (shape, algorithm) cell over that cell's seeds, in
    /// first-appearance order. Undefined rates are left out of a cell's
    /// aggregate; a rate undefined on every seed prints `NA`.
    pub fn summary_csv(&self) -> String {
        let mut cells: Vec<(String, String, Vec<&BenchRow>)> = Vec::new();
        for row in &self.rows {
            match cells
                .iter_mut()
                .find(|(s, a, _)| *s == row.shape && *a == row.algorithm)
            {
                Some((_, _, members)) => members.push(row),
                None => cells.push((row.shape.clone(), row.algorithm.clone(), vec![row])),
            }
        }
        let mut out = String::from(SUMMARY_CSV_HEADER);
        out.push('\n');
        for (shape, algorithm, members) in &cells {
            let iters: Vec<f64> = members.iter().map(|r| r.iters as f64).collect();
            let time: Vec<f64> = members.iter().map(|r| r.time_ms as f64).collect();
            let sens: Vec<f64> = members.iter().filter_map(|r| r.metrics.sensitivity).collect();
            let spec: Vec<f64> = members.iter().filter_map(|r| r.metrics.specificity).collect();
            let acc: Vec<f64> = members.iter().filter_map(|r| r.metrics.accuracy).collect();
            for (stat, pick) in [
                ("mean", mean as fn(&[f64]) -> Option<f64>),
                ("min", min),
                ("max", max),
            ] {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    shape,
                    algorithm,
                    stat,
                    fmt_rate(pick(&iters)),
                    fmt_rate(pick(&time)),
                    fmt_rate(pick(&sens)),
                    fmt_rate(pick(&spec)),
                    fmt_rate(pick(&acc)),
                );
            }
        }
        out
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn min(values: &[f64]) -> Option<f64> {
    values.iter().copied().reduce(f64::min)
}

fn max(values: &[f64]) -> Option<f64> {
    values.iter().copied().reduce(f64::max)
}

fn algorithm_spec(name: &str, run: &RunConfig) -> AlgorithmSpec {
    match name {
        "kk" => AlgorithmSpec::Kk(KkOptions {
            l0: run.l0,
            ..KkOptions::default()
        }),
        "fr" => AlgorithmSpec::Fr(FrOptions {
            l0: run.l0,
            ..FrOptions::default()
        }),
        "dh" => AlgorithmSpec::Dh(DhOptions {
            l0: run.l0,
            ..DhOptions::default()
        }),
        "wkkms" => AlgorithmSpec::Wkkms(WkkmsParams {
            p: run.p,
            deltas: run.deltas,
            theta: run.theta,
            epsilon: run.epsilon,
            l0: run.l0,
            ..WkkmsParams::default()
        }),
        other => unreachable!("algorithm {other} passed config validation"),
    }
}

/// Runs every (block, seed, algorithm) combination: generates the instance
/// once per (block, seed) so all algorithms race on identical topologies,
/// then records each experiment's final log row. Output row count is
/// Σ_blocks seeds × algorithms; identical config and seeds reproduce the
/// report byte for byte.
pub fn bench(config: &BenchConfig, base_dir: &Path) -> Result<BenchReport, HarnessError> {
    let mut rows = Vec::new();
    for run in &config.runs {
        let script = fs::read_to_string(base_dir.join(&run.shape))?;
        let mask = parse_shape_script(&script)?;
        for &seed in &run.seeds {
            let params = GenParams::for_size(run.nodes, run.degree, seed);
            let (topo, truth) = generate_topology(&params, &mask)?;
            let topo = match run.freq_mhz {
                Some(freq) => {
                    synthesize_rssi(&topo, &truth, freq, run.frame_scale, run.rssi_noise_sd, seed)?
                }
                None => topo,
            };
            for name in &run.algorithms {
                let spec = algorithm_spec(name, run);
                let result = run_experiment(
                    &topo,
                    &truth,
                    &spec,
                    &run.criteria,
                    TimeModel::Deterministic {
                        quantum_ms: run.quantum_ms,
                    },
                    seed,
                )?;
                let last = result.log.last().expect("log always has the initial row");
                rows.push(BenchRow {
                    shape: run.name.clone(),
                    algorithm: name.clone(),
                    seed,
                    iters: last.iter,
                    time_ms: last.time_ms,
                    energy: last.energy,
                    metrics: last.metrics,
                    counts: last.counts,
                });
            }
        }
    }
    Ok(BenchReport { rows })
}
