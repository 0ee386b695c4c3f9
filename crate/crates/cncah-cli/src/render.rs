use std::fmt::Write as _;

use cncah_core::{fit_to_frame, NodeId, Topology, VisualDrawing};

/// Visual settings for an SVG snapshot of a drawing.
#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub width: u32,
    pub height: u32,
    pub node_radius: f64,
    /// Node ids drawn with the highlight fill (e.g. a boundary set); every
    /// id must belong to the drawing.
    pub highlight: Option<Vec<NodeId>>,
    pub show_edges: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width: 1920,
            height: 1080,
            node_radius: 4.0,
            highlight: None,
            show_edges: true,
        }
    }
}

const NODE_FILL: &str = "#2a6f97";
const HIGHLIGHT_FILL: &str = "#d1495b";
const EDGE_STROKE: &str = "#9ab0c4";

/// Renders a drawing as an SVG 1.1 document. The drawing is fit to the unit
/// square, then x scales by `width` and y by `height`; the output holds one
/// `<line>` per edge (unless edges are hidden) followed by one `<circle>`
/// per node, highlighted ids in a distinct fill.
pub fn render_svg(drawing: &VisualDrawing, topology: &Topology, opts: &RenderOptions) -> String {
    assert!(opts.width > 0 && opts.height > 0, "frame must be positive");
    let n = drawing.len();
    let unit = fit_to_frame(drawing, 1.0);
    let px = |v: NodeId| {
        let p = unit.position(v);
        (p.x * opts.width as f64, p.y * opts.height as f64)
    };

    let mut highlighted = vec![false; n];
    if let Some(ids) = &opts.highlight {
        for &v in ids {
            assert!(v < n, "highlight id {v} outside the {n}-node drawing");
            highlighted[v] = true;
        }
    }

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = opts.width,
        h = opts.height,
    );
    if opts.show_edges {
        for &(u, v) in topology.edges() {
            let (x1, y1) = px(u);
            let (x2, y2) = px(v);
            let _ = writeln!(
                out,
                "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" \
                 stroke=\"{EDGE_STROKE}\" stroke-width=\"1\"/>",
            );
        }
    }
    for v in 0..n {
        let (cx, cy) = px(v);
        let fill = if highlighted[v] { HIGHLIGHT_FILL } else { NODE_FILL };
        let _ = writeln!(
            out,
            "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{r}\" fill=\"{fill}\"/>",
            r = opts.node_radius,
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cncah_core::Point;

    fn two_node_fixture() -> (Topology, VisualDrawing) {
        let topo = Topology::new(2, vec![(0, 1)]).unwrap();
        let drawing =
            VisualDrawing::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0)]).unwrap();
        (topo, drawing)
    }

    #[test]
    fn element_counts_match_the_graph() {
        let (topo, drawing) = two_node_fixture();
        let svg = render_svg(&drawing, &topo, &RenderOptions::default());
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let count = |tag: &str| {
            doc.descendants()
                .filter(|node| node.has_tag_name(tag))
                .count()
        };
        assert_eq!(count("circle"), 2);
        assert_eq!(count("line"), 1);
        assert_eq!(
            doc.root_element().attribute("version"),
            Some("1.1"),
            "document must declare SVG 1.1"
        );
    }

    #[test]
    fn center_node_lands_on_the_frame_center() {
        // A single extra node at the bounding-box center of a full-frame
        // square maps to (width/2, height/2).
        let topo = Topology::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]).unwrap();
        let drawing = VisualDrawing::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(0.5, 0.5),
        ])
        .unwrap();
        let opts = RenderOptions {
            width: 1920,
            height: 1080,
            ..RenderOptions::default()
        };
        let svg = render_svg(&drawing, &topo, &opts);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let centers: Vec<(&str, &str)> = doc
            .descendants()
            .filter(|n| n.has_tag_name("circle"))
            .map(|n| (n.attribute("cx").unwrap(), n.attribute("cy").unwrap()))
            .collect();
        assert_eq!(centers[4], ("960", "540"));
        assert_eq!(centers[0], ("0", "0"));
        assert_eq!(centers[2], ("1920", "1080"));
    }

    #[test]
    fn highlighted_nodes_get_a_distinct_fill() {
        let (topo, drawing) = two_node_fixture();
        let opts = RenderOptions {
            highlight: Some(vec![1]),
            ..RenderOptions::default()
        };
        let svg = render_svg(&drawing, &topo, &opts);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let fills: Vec<&str> = doc
            .descendants()
            .filter(|n| n.has_tag_name("circle"))
            .map(|n| n.attribute("fill").unwrap())
            .collect();
        assert_ne!(fills[0], fills[1]);
    }

    #[test]
    fn edges_can_be_hidden() {
        let (topo, drawing) = two_node_fixture();
        let opts = RenderOptions {
            show_edges: false,
            ..RenderOptions::default()
        };
        let svg = render_svg(&drawing, &topo, &opts);
        assert!(!svg.contains("<line"));
    }

    #[test]
    #[should_panic(expected = "outside")]
    fn out_of_range_highlight_ids_are_a_bug() {
        let (topo, drawing) = two_node_fixture();
        let opts = RenderOptions {
            highlight: Some(vec![7]),
            ..RenderOptions::default()
        };
        render_svg(&drawing, &topo, &opts);
    }
}
