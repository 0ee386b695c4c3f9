use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use cncah_boundary::boundary_nodes;
use cncah_core::{parse_graph, serialize_graph, GraphFile, NodeId, Topology, VisualDrawing};
use cncah_harness::{
    bench, confusion, metrics, parse_bench_config, run_experiment, seeded_random_drawing,
    AlgorithmSpec, TerminationCriteria, TimeModel,
};
use cncah_layout::{
    dh_layout, fr_layout, kk_layout, run_to_budget, wkkms_layout, DhOptions, FrOptions, KkOptions,
    LayoutError, LayoutState, WkkmsParams,
};
use cncah_topogen::{generate_topology, parse_shape_script, synthesize_rssi, GenParams};

use crate::render::{render_svg, RenderOptions};

#[derive(Debug)]
pub enum CliError {
    /// Bad flag value or combination: exit code 2.
    Usage(String),
    /// Unreadable or invalid input data: exit code 1.
    Input(String),
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "cncah",
    version,
    about = "CNCAH network layout and boundary-detection toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a network instance inside a shape mask
    Generate(GenerateArgs),
    /// Lay out a topology from seeded random positions, optionally scoring
    /// boundary detection against a truth drawing after every work unit
    Layout(Box<LayoutArgs>),
    /// List the boundary nodes of a drawing, one id per line
    Boundary(BoundaryArgs),
    /// Score a laid-out drawing or a detected boundary list against a truth
    /// drawing
    Eval(EvalArgs),
    /// Render a drawing to an SVG snapshot
    Render(RenderArgs),
    /// Run a benchmark sweep from a config file
    Bench(BenchArgs),
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Layout(args) => layout(*args),
        Command::Boundary(args) => boundary(args),
        Command::Eval(args) => eval(args),
        Command::Render(args) => render(args),
        Command::Bench(args) => bench_sweep(args),
    }
}

// ---------------------------------------------------------------- helpers

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// `#`-comment block echoing the effective parameters of a run, prepended to
/// every artifact that supports comments so outputs are reproducible from
/// their own content.
fn echo_block(cmd: &str, params: &[(&str, String)]) -> String {
    let mut out = format!("# cncah {cmd}\n");
    for (key, value) in params {
        out.push_str(&format!("# {key} {value}\n"));
    }
    out
}

fn fmt_rate(rate: Option<f64>) -> String {
    match rate {
        Some(v) => v.to_string(),
        None => "NA".to_owned(),
    }
}

fn parse_id_lines(text: &str) -> Result<Vec<NodeId>, CliError> {
    let mut ids = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        ids.push(t.parse().map_err(|_| {
            CliError::Input(format!("line {}: invalid node id {t:?}", idx + 1))
        })?);
    }
    Ok(ids)
}

fn require_drawing(file: GraphFile, path: &Path) -> Result<(Topology, VisualDrawing), CliError> {
    let GraphFile {
        topology, drawing, ..
    } = file;
    match drawing {
        Some(d) => Ok((topology, d)),
        None => Err(CliError::Input(format!(
            "{}: graph carries no positions",
            path.display()
        ))),
    }
}

// --------------------------------------------------------------- generate

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Number of nodes
    #[arg(long)]
    nodes: usize,
    /// Average-degree floor
    #[arg(long)]
    degree: f64,
    /// Shape-script file defining the placement mask
    #[arg(long)]
    shape: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Carrier frequency used to synthesize edge signal strengths
    #[arg(long, default_value_t = 2400.0)]
    freq_mhz: f64,
    /// Metres represented by one drawing-frame unit
    #[arg(long, default_value_t = 100.0)]
    frame_scale: f64,
    /// Gaussian jitter (dB) added to each synthesized signal strength
    #[arg(long, default_value_t = 0.0)]
    rssi_noise_sd: f64,
    /// Skip signal-strength synthesis
    #[arg(long)]
    no_rssi: bool,
    /// Output graph file
    #[arg(short, long)]
    output: PathBuf,
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let script = read_text(&args.shape)?;
    let mask = parse_shape_script(&script).map_err(input)?;
    let params = GenParams::for_size(args.nodes, args.degree, args.seed);
    let (topology, drawing) = generate_topology(&params, &mask).map_err(input)?;
    let topology = if args.no_rssi {
        topology
    } else {
        synthesize_rssi(
            &topology,
            &drawing,
            args.freq_mhz,
            args.frame_scale,
            args.rssi_noise_sd,
            args.seed,
        )
        .map_err(input)?
    };

    let mut params_echo: Vec<(&str, String)> = vec![
        ("nodes", args.nodes.to_string()),
        ("degree", args.degree.to_string()),
        ("shape", args.shape.display().to_string()),
        ("seed", args.seed.to_string()),
        ("min_node_dist", params.d.to_string()),
        ("min_edge_len", params.e.to_string()),
        ("max_edge_len", params.gamma.to_string()),
        ("edge_keep_prob", params.gamma_b.to_string()),
        ("max_attempts", params.max_attempts.to_string()),
    ];
    if args.no_rssi {
        params_echo.push(("rssi", "none".to_owned()));
    } else {
        params_echo.push(("freq_mhz", args.freq_mhz.to_string()));
        params_echo.push(("frame_scale", args.frame_scale.to_string()));
        params_echo.push(("rssi_noise_sd", args.rssi_noise_sd.to_string()));
    }
    let echo = echo_block("generate", &params_echo);

    let file = GraphFile {
        topology,
        drawing: Some(drawing),
        frame: 1.0,
    };
    write_text(&args.output, &format!("{echo}{}", serialize_graph(&file)))?;
    println!(
        "{echo}wrote {}: {} nodes, {} edges",
        args.output.display(),
        file.topology.node_count(),
        file.topology.edge_count()
    );
    Ok(())
}

// ----------------------------------------------------------------- layout

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgName {
    Kk,
    Fr,
    Dh,
    Wkkms,
}

impl AlgName {
    fn as_str(self) -> &'static str {
        match self {
            AlgName::Kk => "kk",
            AlgName::Fr => "fr",
            AlgName::Dh => "dh",
            AlgName::Wkkms => "wkkms",
        }
    }
}

#[derive(Debug, Args)]
struct LayoutArgs {
    /// Layout algorithm
    #[arg(long, value_enum)]
    alg: AlgName,
    /// Input graph file (its positions, if any, are ignored: layout starts
    /// from seeded random positions)
    #[arg(short, long)]
    input: PathBuf,
    /// Truth graph file with positions; enables per-unit scoring
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Output graph file carrying the final positions
    #[arg(short, long)]
    output: PathBuf,
    /// Per-unit CSV log (requires --truth)
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Frame side length of the layout
    #[arg(long, default_value_t = 1.0)]
    l0: f64,
    /// Node-selection fraction per batch update
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    /// Folded-region detection threshold
    #[arg(long, default_value_t = 4.0)]
    theta: f64,
    /// Weight factors for the selected set, its 1-hop ring, its 2-hop ring,
    /// all other nodes, and anchors
    #[arg(long, value_delimiter = ',', num_args = 5, default_values_t = vec![1.0, 0.95, 0.7, 0.05, 0.0])]
    deltas: Vec<f64>,
    /// Regional-refinement stagnation threshold
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Stop after this many work units
    #[arg(long)]
    max_units: Option<u64>,
    /// Stop once sensitivity reaches this value (requires --truth)
    #[arg(long)]
    target_sensitivity: Option<f64>,
    /// Stop once specificity reaches this value (requires --truth)
    #[arg(long)]
    target_specificity: Option<f64>,
    /// Stop once accuracy reaches this value (requires --truth)
    #[arg(long)]
    target_accuracy: Option<f64>,
    /// Stop once normalized time reaches this many milliseconds (requires
    /// --truth)
    #[arg(long)]
    time_limit_ms: Option<u64>,
    /// Stop once the metrics are unchanged for this many units (requires
    /// --truth)
    #[arg(long)]
    stall_units: Option<u64>,
    /// Normalized milliseconds one work unit counts for
    #[arg(long, default_value_t = 100)]
    quantum_ms: u64,
}

fn algorithm_spec(args: &LayoutArgs) -> Result<AlgorithmSpec, CliError> {
    Ok(match args.alg {
        AlgName::Kk => AlgorithmSpec::Kk(KkOptions {
            l0: args.l0,
            ..KkOptions::default()
        }),
        AlgName::Fr => AlgorithmSpec::Fr(FrOptions {
            l0: args.l0,
            ..FrOptions::default()
        }),
        AlgName::Dh => AlgorithmSpec::Dh(DhOptions {
            l0: args.l0,
            ..DhOptions::default()
        }),
        AlgName::Wkkms => {
            let deltas: [f64; 5] = args.deltas.clone().try_into().map_err(|_| {
                CliError::Usage("--deltas needs exactly 5 comma-separated factors".to_owned())
            })?;
            AlgorithmSpec::Wkkms(WkkmsParams {
                p: args.p,
                deltas,
                theta: args.theta,
                epsilon: args.epsilon,
                l0: args.l0,
                ..WkkmsParams::default()
            })
        }
    })
}

fn layout_echo(args: &LayoutArgs) -> String {
    let mut params: Vec<(&str, String)> = vec![
        ("alg", args.alg.as_str().to_owned()),
        ("input", args.input.display().to_string()),
    ];
    if let Some(t) = &args.truth {
        params.push(("truth", t.display().to_string()));
    }
    params.extend([
        ("seed", args.seed.to_string()),
        ("l0", args.l0.to_string()),
        ("p", args.p.to_string()),
        ("theta", args.theta.to_string()),
        (
            "deltas",
            args.deltas
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("epsilon", args.epsilon.to_string()),
        ("quantum_ms", args.quantum_ms.to_string()),
    ]);
    let optional = [
        ("max_units", args.max_units.map(|v| v.to_string())),
        (
            "target_sensitivity",
            args.target_sensitivity.map(|v| v.to_string()),
        ),
        (
            "target_specificity",
            args.target_specificity.map(|v| v.to_string()),
        ),
        (
            "target_accuracy",
            args.target_accuracy.map(|v| v.to_string()),
        ),
        ("time_limit_ms", args.time_limit_ms.map(|v| v.to_string())),
        ("stall_units", args.stall_units.map(|v| v.to_string())),
    ];
    for (key, value) in optional {
        if let Some(value) = value {
            params.push((key, value));
        }
    }
    echo_block("layout", &params)
}

fn run_engine(
    topology: &Topology,
    init: &VisualDrawing,
    spec: &AlgorithmSpec,
    max_units: Option<u64>,
    seed: u64,
) -> Result<LayoutState, LayoutError> {
    match spec {
        AlgorithmSpec::Kk(o) => {
            let mut o = o.clone();
            o.seed = seed;
            o.max_units = max_units;
            kk_layout(topology, init, &o, run_to_budget)
        }
        AlgorithmSpec::Fr(o) => {
            let mut o = o.clone();
            o.seed = seed;
            o.max_units = max_units;
            fr_layout(topology, init, &o, run_to_budget)
        }
        AlgorithmSpec::Dh(o) => {
            let mut o = o.clone();
            o.seed = seed;
            o.max_units = max_units;
            dh_layout(topology, init, &o, run_to_budget)
        }
        AlgorithmSpec::Wkkms(p) => {
            let mut p = p.clone();
            p.seed = seed;
            p.max_units = max_units;
            wkkms_layout(topology, init, &p, run_to_budget)
        }
    }
}

fn layout(args: LayoutArgs) -> Result<(), CliError> {
    let file = parse_graph(&read_text(&args.input)?).map_err(input)?;
    let topology = file.topology;
    let n = topology.node_count();

    let spec = algorithm_spec(&args)?;
    if let AlgorithmSpec::Wkkms(p) = &spec {
        p.validate(n).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let echo = layout_echo(&args);

    match &args.truth {
        Some(truth_path) => {
            let truth_file = parse_graph(&read_text(truth_path)?).map_err(input)?;
            if truth_file.topology.node_count() != n
                || truth_file.topology.edges() != topology.edges()
            {
                return Err(CliError::Input(format!(
                    "{}: truth topology differs from the input graph",
                    truth_path.display()
                )));
            }
            let (_, truth_drawing) = require_drawing(truth_file, truth_path)?;
            let criteria = TerminationCriteria {
                max_iters: args.max_units,
                target_sensitivity: args.target_sensitivity,
                target_specificity: args.target_specificity,
                target_accuracy: args.target_accuracy,
                time_limit_ms: args.time_limit_ms,
                stall_iters: args.stall_units,
            };
            criteria
                .validate()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let result = run_experiment(
                &topology,
                &truth_drawing,
                &spec,
                &criteria,
                TimeModel::Deterministic {
                    quantum_ms: args.quantum_ms,
                },
                args.seed,
            )
            .map_err(input)?;
            if let Some(log_path) = &args.log {
                write_text(log_path, &format!("{echo}{}", result.log.to_csv()))?;
            }
            let out = GraphFile {
                topology,
                drawing: Some(result.state.drawing),
                frame: 1.0,
            };
            write_text(&args.output, &format!("{echo}{}", serialize_graph(&out)))?;
            let last = result.log.last().expect("log holds the initial row");
            println!(
                "{echo}finished at unit {}: energy {}, sensitivity {}, specificity {}, accuracy {}",
                last.iter,
                last.energy,
                fmt_rate(last.metrics.sensitivity),
                fmt_rate(last.metrics.specificity),
                fmt_rate(last.metrics.accuracy),
            );
        }
        None => {
            if args.log.is_some() {
                return Err(CliError::Usage("--log requires --truth".to_owned()));
            }
            if args.target_sensitivity.is_some()
                || args.target_specificity.is_some()
                || args.target_accuracy.is_some()
                || args.time_limit_ms.is_some()
                || args.stall_units.is_some()
            {
                return Err(CliError::Usage(
                    "metric targets, time limits and stall detection require --truth".to_owned(),
                ));
            }
            if args.max_units.is_none() && matches!(args.alg, AlgName::Fr | AlgName::Dh) {
                return Err(CliError::Usage(
                    "--alg fr and --alg dh do not terminate on their own; set --max-units"
                        .to_owned(),
                ));
            }
            let init = seeded_random_drawing(n, args.seed);
            let state = run_engine(&topology, &init, &spec, args.max_units, args.seed)
                .map_err(input)?;
            let out = GraphFile {
                topology,
                drawing: Some(state.drawing),
                frame: 1.0,
            };
            write_text(&args.output, &format!("{echo}{}", serialize_graph(&out)))?;
            println!(
                "{echo}finished after {} units: energy {}",
                state.units, state.energy
            );
        }
    }
    Ok(())
}

// --------------------------------------------------------------- boundary

#[derive(Debug, Args)]
struct BoundaryArgs {
    /// Graph file with positions
    #[arg(short, long)]
    input: PathBuf,
    /// Output file (one node id per line, ascending); stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn boundary(args: BoundaryArgs) -> Result<(), CliError> {
    let file = parse_graph(&read_text(&args.input)?).map_err(input)?;
    let (topology, drawing) = require_drawing(file, &args.input)?;
    let ids = boundary_nodes(&drawing, &topology).map_err(input)?;
    let mut body = String::new();
    for v in &ids {
        body.push_str(&format!("{v}\n"));
    }
    match &args.output {
        Some(path) => {
            write_text(path, &body)?;
            let echo = echo_block("boundary", &[("input", args.input.display().to_string())]);
            println!(
                "{echo}wrote {}: {} boundary nodes",
                path.display(),
                ids.len()
            );
        }
        None => print!("{body}"),
    }
    Ok(())
}

// ------------------------------------------------------------------- eval

#[derive(Debug, Args)]
struct EvalArgs {
    /// Truth graph file with positions
    #[arg(long)]
    truth: PathBuf,
    /// Laid-out graph file whose boundary to score
    #[arg(long, conflicts_with = "detected")]
    drawing: Option<PathBuf>,
    /// Detected boundary file (one id per line)
    #[arg(long)]
    detected: Option<PathBuf>,
    /// Output CSV; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn eval(args: EvalArgs) -> Result<(), CliError> {
    let truth_file = parse_graph(&read_text(&args.truth)?).map_err(input)?;
    let (topology, truth_drawing) = require_drawing(truth_file, &args.truth)?;
    let n = topology.node_count();
    let truth_set = boundary_nodes(&truth_drawing, &topology).map_err(input)?;

    let mut params: Vec<(&str, String)> = vec![("truth", args.truth.display().to_string())];
    let detected = match (&args.drawing, &args.detected) {
        (Some(path), None) => {
            let file = parse_graph(&read_text(path)?).map_err(input)?;
            if file.topology.node_count() != n || file.topology.edges() != topology.edges() {
                return Err(CliError::Input(format!(
                    "{}: topology differs from the truth graph",
                    path.display()
                )));
            }
            let (_, drawing) = require_drawing(file, path)?;
            params.push(("drawing", path.display().to_string()));
            boundary_nodes(&drawing, &topology).map_err(input)?
        }
        (None, Some(path)) => {
            params.push(("detected", path.display().to_string()));
            parse_id_lines(&read_text(path)?)?
        }
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --drawing or --detected".to_owned(),
            ))
        }
    };

    let counts = confusion(&truth_set, &detected, n).map_err(input)?;
    let m = metrics(&counts);
    let echo = echo_block("eval", &params);
    let csv = format!(
        "sensitivity,specificity,accuracy,tp,fn,fp,tn\n{},{},{},{},{},{},{}\n",
        fmt_rate(m.sensitivity),
        fmt_rate(m.specificity),
        fmt_rate(m.accuracy),
        counts.true_pos,
        counts.false_neg,
        counts.false_pos,
        counts.true_neg,
    );
    match &args.output {
        Some(path) => {
            write_text(path, &format!("{echo}{csv}"))?;
            println!("{echo}wrote {}", path.display());
        }
        None => print!("{echo}{csv}"),
    }
    Ok(())
}

// ----------------------------------------------------------------- render

#[derive(Debug, Args)]
struct RenderArgs {
    /// Graph file with positions
    #[arg(short, long)]
    input: PathBuf,
    /// Output SVG file
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = 1920, value_parser = clap::value_parser!(u32).range(1..))]
    width: u32,
    #[arg(long, default_value_t = 1080, value_parser = clap::value_parser!(u32).range(1..))]
    height: u32,
    /// Node circle radius in pixels
    #[arg(long, default_value_t = 4.0)]
    radius: f64,
    /// Boundary file whose node ids get the highlight fill
    #[arg(long)]
    boundary: Option<PathBuf>,
    /// Draw nodes only
    #[arg(long)]
    no_edges: bool,
}

fn render(args: RenderArgs) -> Result<(), CliError> {
    let file = parse_graph(&read_text(&args.input)?).map_err(input)?;
    let (topology, drawing) = require_drawing(file, &args.input)?;
    let mut params: Vec<(&str, String)> = vec![
        ("input", args.input.display().to_string()),
        ("width", args.width.to_string()),
        ("height", args.height.to_string()),
        ("radius", args.radius.to_string()),
    ];
    let highlight = match &args.boundary {
        Some(path) => {
            let ids = parse_id_lines(&read_text(path)?)?;
            if let Some(&bad) = ids.iter().find(|&&v| v >= drawing.len()) {
                return Err(CliError::Input(format!(
                    "{}: node id {bad} outside the {}-node graph",
                    path.display(),
                    drawing.len()
                )));
            }
            params.push(("boundary", path.display().to_string()));
            Some(ids)
        }
        None => None,
    };
    let opts = RenderOptions {
        width: args.width,
        height: args.height,
        node_radius: args.radius,
        highlight,
        show_edges: !args.no_edges,
    };
    let svg = render_svg(&drawing, &topology, &opts);
    // Embed the parameter echo as an XML comment after the declaration.
    let echo = echo_block("render", &params).replace("--", "- -");
    let svg = match svg.split_once('\n') {
        Some((decl, rest)) => format!("{decl}\n<!--\n{echo}-->\n{rest}"),
        None => svg,
    };
    write_text(&args.output, &svg)?;
    println!("wrote {}", args.output.display());
    Ok(())
}

// ------------------------------------------------------------------ bench

#[derive(Debug, Args)]
struct BenchArgs {
    /// Benchmark config file of [run] blocks
    #[arg(short, long)]
    config: PathBuf,
    /// Per-experiment rows CSV
    #[arg(short, long)]
    output: PathBuf,
    /// Per-cell mean/min/max CSV
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn bench_sweep(args: BenchArgs) -> Result<(), CliError> {
    let text = read_text(&args.config)?;
    let config = parse_bench_config(&text).map_err(input)?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let report = bench(&config, base).map_err(input)?;
    let echo = echo_block(
        "bench",
        &[
            ("config", args.config.display().to_string()),
            ("experiments", report.rows.len().to_string()),
        ],
    );
    write_text(&args.output, &format!("{echo}{}", report.rows_csv()))?;
    if let Some(path) = &args.summary {
        write_text(path, &format!("{echo}{}", report.summary_csv()))?;
    }
    println!("{echo}wrote {} experiment rows", report.rows.len());
    Ok(())
}
