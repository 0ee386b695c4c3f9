use cncah_core::{FormatError, Point};

/// One axis-aligned or polygonal shape in the unit frame.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Axis-aligned ellipse given by its bounding box: top-left corner and
    /// width/height.
    Ellipse { x: f64, y: f64, w: f64, h: f64 },
    /// Axis-aligned rectangle: top-left corner and width/height.
    Rect { x: f64, y: f64, w: f64, h: f64 },
    /// Simple polygon; containment uses the even-odd rule.
    Poly { points: Vec<(f64, f64)> },
}

/// A shape together with its sign: positive shapes open area for nodes and
/// edges, negative shapes close it.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedShape {
    pub positive: bool,
    pub shape: Shape,
}

/// An ordered list of signed shapes describing where network elements may
/// be placed. A point belongs to the mask when it lies inside at least one
/// positive shape and inside no negative shape.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    shapes: Vec<SignedShape>,
}

impl RegionMask {
    pub fn shapes(&self) -> &[SignedShape] {
        &self.shapes
    }
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn coord(line: usize, tok: &str) -> Result<f64, FormatError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| syntax(line, format!("invalid number {tok:?}")))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(syntax(line, format!("coordinate {v} outside [0, 1]")));
    }
    Ok(v)
}

/// Parses a shape script: one shape per line, `(+|-) (ellipse|rect|poly)
/// <params...>`, with `#` comments and blank lines ignored. Ellipses and
/// rectangles take `x y w h` (top-left corner plus width and height);
/// polygons take a vertex count followed by that many `x,y` pairs. All
/// values must lie in [0, 1] and the script must open at least one positive
/// area.
pub fn parse_shape_script(text: &str) -> Result<RegionMask, FormatError> {
    let mut shapes = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() < 2 {
            return Err(syntax(line, "expected `(+|-) (ellipse|rect|poly) <params...>`"));
        }
        let positive = match tokens[0] {
            "+" => true,
            "-" => false,
            other => return Err(syntax(line, format!("expected + or -, got {other:?}"))),
        };
        let shape = match tokens[1] {
            kind @ ("ellipse" | "rect") => {
                if tokens.len() != 6 {
                    return Err(syntax(line, format!("{kind} takes exactly 4 numbers: x y w h")));
                }
                let x = coord(line, tokens[2])?;
                let y = coord(line, tokens[3])?;
                let w = coord(line, tokens[4])?;
                let h = coord(line, tokens[5])?;
                if kind == "ellipse" {
                    Shape::Ellipse { x, y, w, h }
                } else {
                    Shape::Rect { x, y, w, h }
                }
            }
            "poly" => {
                let k: usize = tokens[2]
                    .parse()
                    .map_err(|_| syntax(line, format!("invalid vertex count {:?}", tokens[2])))?;
                if k < 3 {
                    return Err(syntax(line, format!("polygon needs at least 3 vertices, got {k}")));
                }
                if tokens.len() != 3 + k {
                    return Err(syntax(
                        line,
                        format!("polygon declares {k} vertices but lists {}", tokens.len() - 3),
                    ));
                }
                let mut points = Vec::with_capacity(k);
                for tok in &tokens[3..] {
                    let (xs, ys) = tok
                        .split_once(',')
                        .ok_or_else(|| syntax(line, format!("expected `x,y`, got {tok:?}")))?;
                    points.push((coord(line, xs)?, coord(line, ys)?));
                }
                Shape::Poly { points }
            }
            other => return Err(syntax(line, format!("unknown shape kind {other:?}"))),
        };
        shapes.push(SignedShape { positive, shape });
    }
    if !shapes.iter().any(|s| s.positive) {
        return Err(syntax(0, "script opens no positive area"));
    }
    Ok(RegionMask { shapes })
}

fn shape_contains(shape: &Shape, p: Point) -> bool {
    match *shape {
        Shape::Ellipse { x, y, w, h } => {
            let (rx, ry) = (w / 2.0, h / 2.0);
            let (cx, cy) = (x + rx, y + ry);
            if rx <= 0.0 || ry <= 0.0 {
                return false;
            }
            let (nx, ny) = ((p.x - cx) / rx, (p.y - cy) / ry);
            nx * nx + ny * ny <= 1.0
        }
        Shape::Rect { x, y, w, h } => {
            (x..=x + w).contains(&p.x) && (y..=y + h).contains(&p.y)
        }
        Shape::Poly { ref points } => poly_contains(points, p),
    }
}

/// Even-odd polygon containment with the boundary counted as inside.
fn poly_contains(points: &[(f64, f64)], p: Point) -> bool {
    let n = points.len();
    for i in 0..n {
        if on_segment(points[i], points[(i + 1) % n], p) {
            return true;
        }
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = points[i];
        let (xj, yj) = points[j];
        if (yi > p.y) != (yj > p.y) {
            let x_cross = xi + (p.y - yi) * (xj - xi) / (yj - yi);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn on_segment(a: (f64, f64), b: (f64, f64), p: Point) -> bool {
    let (abx, aby) = (b.0 - a.0, b.1 - a.1);
    let (apx, apy) = (p.x - a.0, p.y - a.1);
    if abx * apy - aby * apx != 0.0 {
        return false;
    }
    let dot = abx * apx + aby * apy;
    dot >= 0.0 && dot <= abx * abx + aby * aby
}

/// True iff `p` lies in at least one positive shape and in no negative
/// shape.
pub fn region_contains(mask: &RegionMask, p: Point) -> bool {
    let mut open = false;
    for signed in &mask.shapes {
        if shape_contains(&signed.shape, p) {
            if !signed.positive {
                return false;
            }
            open = true;
        }
    }
    open
}

/// Shape scripts for the four benchmark topology families.
pub mod fixtures {
    pub const SMILE: &str = include_str!("../shapes/smile.shape");
    pub const STAR: &str = include_str!("../shapes/star.shape");
    pub const USHAPE: &str = include_str!("../shapes/ushape.shape");
    pub const DONUT: &str = include_str!("../shapes/donut.shape");

    /// (name, script) pairs for all four families.
    pub const ALL: [(&str, &str); 4] = [
        ("star", STAR),
        ("ushape", USHAPE),
        ("smile", SMILE),
        ("donut", DONUT),
    ];
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smile() -> RegionMask {
        parse_shape_script(fixtures::SMILE).unwrap()
    }

    #[test]
    fn smile_script_has_one_positive_and_three_negative_shapes() {
        let mask = smile();
        assert_eq!(mask.shapes().len(), 4);
        assert!(mask.shapes()[0].positive);
        assert!(mask.shapes()[1..].iter().all(|s| !s.positive));
        assert!(matches!(mask.shapes()[0].shape, Shape::Ellipse { .. }));
        assert!(matches!(mask.shapes()[2].shape, Shape::Poly { .. }));
    }

    #[test]
    fn full_frame_rect_contains_everything() {
        let mask = parse_shape_script("+ rect 0 0 1 1").unwrap();
        for (x, y) in [(0.0, 0.0), (1.0, 1.0), (0.5, 0.99), (0.0, 1.0)] {
            assert!(region_contains(&mask, Point::new(x, y)));
        }
    }

    #[test]
    fn degenerate_polygon_is_rejected() {
        let err = parse_shape_script("- poly 2 0,0 1,1").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { .. }));
    }

    #[test]
    fn vertex_count_mismatch_is_rejected() {
        assert!(parse_shape_script("+ poly 4 0,0 1,0 1,1").is_err());
    }

    #[test]
    fn out_of_frame_coordinate_is_rejected() {
        assert!(parse_shape_script("+ rect 0 0 1 1.5").is_err());
    }

    #[test]
    fn script_without_positive_area_is_rejected() {
        assert!(parse_shape_script("- rect 0 0 1 1").is_err());
    }

    #[test]
    fn smile_center_is_open() {
        assert!(region_contains(&smile(), Point::new(0.5, 0.5)));
    }

    #[test]
    fn smile_left_eye_is_closed() {
        assert!(!region_contains(&smile(), Point::new(0.3, 0.4)));
    }

    #[test]
    fn smile_corner_is_outside_the_face() {
        assert!(!region_contains(&smile(), Point::new(0.99, 0.01)));
    }

    #[test]
    fn boundaries_count_as_inside() {
        let mask = smile();
        // Rightmost point of the positive ellipse.
        assert!(region_contains(&mask, Point::new(1.0, 0.5)));
        // Top-left corner of the left-eye rectangle: inside the negative
        // shape, hence closed.
        assert!(!region_contains(&mask, Point::new(0.22, 0.28)));
    }

    #[test]
    fn polygon_even_odd_rule() {
        let mask = parse_shape_script("+ poly 3 0.72,0.30 0.85,0.52 0.59,0.52").unwrap();
        assert!(region_contains(&mask, Point::new(0.72, 0.45)));
        assert!(!region_contains(&mask, Point::new(0.5, 0.5)));
        // A vertex lies on the boundary.
        assert!(region_contains(&mask, Point::new(0.72, 0.30)));
    }

    #[test]
    fn all_fixture_scripts_parse() {
        for (name, script) in fixtures::ALL {
            let mask = parse_shape_script(script).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(mask.shapes().iter().any(|s| s.positive), "{name}");
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let mask = parse_shape_script("# face\n\n+ ellipse 0 0 1 1  # outline\n").unwrap();
        assert_eq!(mask.shapes().len(), 1);
    }
}
