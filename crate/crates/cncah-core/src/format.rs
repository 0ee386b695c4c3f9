use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{GraphError, Point, Topology, VisualDrawing};

/// One parsed graph file: connectivity, an optional ground-truth drawing and
/// the frame side length the drawing lives in.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub topology: Topology,
    pub drawing: Option<VisualDrawing>,
    pub frame: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unexpected end of file while expecting {0}")]
    UnexpectedEof(&'static str),
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Content lines (1-based line number, whitespace-split tokens), with blank
/// lines and `#` comments removed.
fn content_lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(idx, raw)| {
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                None
            } else {
                Some((idx + 1, trimmed.split_whitespace().collect()))
            }
        })
        .collect()
}

fn parse_count(line: usize, keyword: &str, tokens: &[&str]) -> Result<usize, FormatError> {
    if tokens.len() != 2 || tokens[0] != keyword {
        return Err(syntax(line, format!("expected `{keyword} <count>`")));
    }
    tokens[1]
        .parse()
        .map_err(|_| syntax(line, format!("invalid count {:?}", tokens[1])))
}

fn parse_float(line: usize, what: &str, token: &str) -> Result<f64, FormatError> {
    let v: f64 = token
        .parse()
        .map_err(|_| syntax(line, format!("invalid {what} {token:?}")))?;
    if !v.is_finite() {
        return Err(syntax(line, format!("non-finite {what} {token:?}")));
    }
    Ok(v)
}

fn parse_opt_float(line: usize, what: &str, token: &str) -> Result<Option<f64>, FormatError> {
    if token == "-" {
        Ok(None)
    } else {
        parse_float(line, what, token).map(Some)
    }
}

/// Parses the versioned line-based graph format. Node ids in the file may be
/// arbitrary non-negative integers; they are remapped to dense `0..n` in file
/// order, and edge endpoints are resolved through that mapping.
pub fn parse_graph(text: &str) -> Result<GraphFile, FormatError> {
    let lines = content_lines(text);
    let mut it = lines.iter();

    let (line, tokens) = it.next().ok_or(FormatError::UnexpectedEof("header"))?;
    if tokens.as_slice() != ["cncah-graph", "v1"] {
        return Err(syntax(*line, "expected header `cncah-graph v1`"));
    }

    let (line, tokens) = it.next().ok_or(FormatError::UnexpectedEof("node count"))?;
    let n = parse_count(*line, "nodes", tokens)?;
    let (line, tokens) = it.next().ok_or(FormatError::UnexpectedEof("edge count"))?;
    let m = parse_count(*line, "edges", tokens)?;

    let (line, tokens) = it.next().ok_or(FormatError::UnexpectedEof("frame length"))?;
    if tokens.len() != 2 || tokens[0] != "frame" {
        return Err(syntax(*line, "expected `frame <length>`"));
    }
    let frame = parse_float(*line, "frame length", tokens[1])?;
    if frame <= 0.0 {
        return Err(syntax(*line, "frame length must be positive"));
    }

    let (line, tokens) = it.next().ok_or(FormatError::UnexpectedEof("frequency"))?;
    if tokens.len() != 2 || tokens[0] != "freq" {
        return Err(syntax(*line, "expected `freq <MHz or ->`"));
    }
    let freq = parse_opt_float(*line, "frequency", tokens[1])?;
    if let Some(f) = freq {
        if f <= 0.0 {
            return Err(syntax(*line, "frequency must be positive"));
        }
    }

    let mut id_map: HashMap<u64, usize> = HashMap::with_capacity(n);
    let mut positions: Vec<Option<Point>> = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, tokens) = it.next().ok_or(FormatError::UnexpectedEof("node line"))?;
        if tokens.len() != 4 || tokens[0] != "node" {
            return Err(syntax(*line, "expected `node <id> <x|-> <y|->`"));
        }
        let file_id: u64 = tokens[1]
            .parse()
            .map_err(|_| syntax(*line, format!("invalid node id {:?}", tokens[1])))?;
        if id_map.insert(file_id, positions.len()).is_some() {
            return Err(syntax(*line, format!("duplicate node id {file_id}")));
        }
        let x = parse_opt_float(*line, "x coordinate", tokens[2])?;
        let y = parse_opt_float(*line, "y coordinate", tokens[3])?;
        let pos = match (x, y) {
            (Some(x), Some(y)) => Some(Point::new(x, y)),
            (None, None) => None,
            _ => {
                return Err(syntax(
                    *line,
                    "node position must give both coordinates or `- -`",
                ))
            }
        };
        positions.push(pos);
    }

    let mut edges = Vec::with_capacity(m);
    let mut rssi = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, tokens) = it.next().ok_or(FormatError::UnexpectedEof("edge line"))?;
        if tokens.len() != 4 || tokens[0] != "edge" {
            return Err(syntax(*line, "expected `edge <u> <v> <rssi|->`"));
        }
        let endpoint = |tok: &str| -> Result<usize, FormatError> {
            let file_id: u64 = tok
                .parse()
                .map_err(|_| syntax(*line, format!("invalid node id {tok:?}")))?;
            id_map
                .get(&file_id)
                .copied()
                .ok_or_else(|| syntax(*line, format!("edge references unknown node {file_id}")))
        };
        let u = endpoint(tokens[1])?;
        let v = endpoint(tokens[2])?;
        edges.push((u, v));
        rssi.push(parse_opt_float(*line, "rssi", tokens[3])?);
    }

    if let Some((line, _)) = it.next() {
        return Err(syntax(*line, "trailing content after declared edges"));
    }

    let first_edge_line = lines.len().saturating_sub(m);
    let mut topology = Topology::new(n, edges).map_err(|source| FormatError::Graph {
        line: lines
            .get(first_edge_line)
            .map(|(l, _)| *l)
            .unwrap_or_default(),
        source,
    })?;
    topology.set_rssi(rssi).expect("lengths match by construction");
    topology.set_freq_mhz(freq);

    let with_pos = positions.iter().filter(|p| p.is_some()).count();
    let drawing = if with_pos == n && n > 0 {
        let pts: Vec<Point> = positions.into_iter().map(|p| p.unwrap()).collect();
        Some(VisualDrawing::new(pts).map_err(|source| FormatError::Graph { line: 0, source })?)
    } else if with_pos == 0 {
        None
    } else {
        return Err(syntax(
            0,
            "either every node or no node may carry coordinates",
        ));
    };

    Ok(GraphFile {
        topology,
        drawing,
        frame,
    })
}

/// Writes the canonical form of a graph file: dense ids, floats rendered with
/// the shortest representation that parses back to the same value, `-` for
/// absent fields. Canonical output is a fixpoint of parse∘serialize.
pub fn serialize_graph(file: &GraphFile) -> String {
    let t = &file.topology;
    let n = t.node_count();
    let mut out = String::new();
    out.push_str("cncah-graph v1\n");
    out.push_str(&format!("nodes {n}\n"));
    out.push_str(&format!("edges {}\n", t.edge_count()));
    out.push_str(&format!("frame {}\n", file.frame));
    match t.freq_mhz() {
        Some(f) => out.push_str(&format!("freq {f}\n")),
        None => out.push_str("freq -\n"),
    }
    for v in 0..n {
        match &file.drawing {
            Some(d) => {
                let p = d.position(v);
                out.push_str(&format!("node {v} {} {}\n", p.x, p.y));
            }
            None => out.push_str(&format!("node {v} - -\n")),
        }
    }
    for (idx, &(u, v)) in t.edges().iter().enumerate() {
        match t.rssi()[idx] {
            Some(r) => out.push_str(&format!("edge {u} {v} {r}\n")),
            None => out.push_str(&format!("edge {u} {v} -\n")),
        }
    }
    out
}
