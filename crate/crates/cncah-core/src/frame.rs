use crate::graph::{Point, VisualDrawing};

/// Rescales a drawing so its bounding box fits exactly inside the square
/// `[0, frame] x [0, frame]`, preserving aspect ratio and centering the
/// shorter axis. Degenerate inputs (all nodes coincident, or a single node)
/// map to the frame center.
pub fn fit_to_frame(drawing: &VisualDrawing, frame: f64) -> VisualDrawing {
    assert!(frame > 0.0 && frame.is_finite(), "frame must be positive");
    let pts = drawing.positions();
    if pts.is_empty() {
        return drawing.clone();
    }
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let w = max_x - min_x;
    let h = max_y - min_y;
    let extent = w.max(h);
    if extent <= 0.0 {
        let c = Point::new(frame / 2.0, frame / 2.0);
        return VisualDrawing::new(vec![c; pts.len()]).expect("finite center");
    }
    let scale = frame / extent;
    // Center the slack on whichever axis is shorter.
    let off_x = (frame - w * scale) / 2.0;
    let off_y = (frame - h * scale) / 2.0;
    let out = pts
        .iter()
        .map(|p| Point::new((p.x - min_x) * scale + off_x, (p.y - min_y) * scale + off_y))
        .collect();
    VisualDrawing::new(out).expect("scaling finite points stays finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_fills_frame_exactly() {
        let d = VisualDrawing::new(vec![
            Point::new(-1.0, -1.0),
            Point::new(3.0, -1.0),
            Point::new(3.0, 3.0),
            Point::new(-1.0, 3.0),
        ])
        .unwrap();
        let f = fit_to_frame(&d, 2.0);
        assert_eq!(f.position(0), Point::new(0.0, 0.0));
        assert_eq!(f.position(2), Point::new(2.0, 2.0));
    }

    #[test]
    fn wide_rectangle_centers_vertically() {
        let d = VisualDrawing::new(vec![Point::new(0.0, 0.0), Point::new(4.0, 1.0)]).unwrap();
        let f = fit_to_frame(&d, 1.0);
        // Width 4 maps to 1, so height 1 maps to 0.25, centered at 0.375..0.625.
        assert!((f.position(0).x - 0.0).abs() < 1e-12);
        assert!((f.position(1).x - 1.0).abs() < 1e-12);
        assert!((f.position(0).y - 0.375).abs() < 1e-12);
        assert!((f.position(1).y - 0.625).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_map_to_center() {
        let d = VisualDrawing::new(vec![Point::new(5.0, 5.0); 3]).unwrap();
        let f = fit_to_frame(&d, 2.0);
        for v in 0..3 {
            assert_eq!(f.position(v), Point::new(1.0, 1.0));
        }
    }

    #[test]
    fn preserves_aspect_ratio() {
        let d = VisualDrawing::new(vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        let f = fit_to_frame(&d, 10.0);
        let w = f.position(1).x - f.position(0).x;
        let h = f.position(2).y - f.position(0).y;
        assert!((w / h - 2.0).abs() < 1e-12);
    }
}
