//! Minimal SVG diagnostics: curve outline, labeled orbit points, hollow midpoints.

use std::fmt::Write;

use outer_eds::Vec2;

enum Item {
    Path { pts: Vec<Vec2>, closed: bool, stroke: &'static str, width: f64 },
    Vertex { at: Vec2, label: usize },
    Midpoint(Vec2),
}

/// A plot in data coordinates; `y` points up.
#[derive(Default)]
pub struct Plot {
    items: Vec<Item>,
}

impl Plot {
    pub fn new() -> Self {
        Self::default()
    }

    /// Closed outline, e.g. the billiard curve.
    pub fn outline(&mut self, pts: &[Vec2]) {
        self.items.push(Item::Path {
            pts: pts.to_vec(),
            closed: true,
            stroke: "#2c3e50",
            width: 1.5,
        });
    }

    /// Orbit polygon: segments, labeled vertices, hollow midpoint markers.
    pub fn orbit(&mut self, pts: &[Vec2], closed: bool) {
        self.items.push(Item::Path {
            pts: pts.to_vec(),
            closed,
            stroke: "#c0392b",
            width: 0.8,
        });
        let segments = if closed { pts.len() } else { pts.len().saturating_sub(1) };
        for k in 0..segments {
            self.items.push(Item::Midpoint(pts[k].midpoint(pts[(k + 1) % pts.len()])));
        }
        for (label, &at) in pts.iter().enumerate() {
            self.items.push(Item::Vertex { at, label });
        }
    }

    fn bounds(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut add = |p: Vec2| {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        };
        for item in &self.items {
            match item {
                Item::Path { pts, .. } => pts.iter().for_each(|&p| add(p)),
                Item::Vertex { at, .. } | Item::Midpoint(at) => add(*at),
            }
        }
        if lo.x > hi.x {
            return (Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0));
        }
        (lo, hi)
    }

    /// The document, with a viewBox fitted to the data plus a 10% margin.
    pub fn render(&self) -> String {
        let (lo, hi) = self.bounds();
        let (dx, dy) = ((hi.x - lo.x).max(1e-12), (hi.y - lo.y).max(1e-12));
        let (mx, my) = (0.1 * dx, 0.1 * dy);
        let (w, h) = (dx + 2.0 * mx, dy + 2.0 * my);
        // SVG's y axis points down, so data y is negated
        let (x0, y0) = (lo.x - mx, -hi.y - my);
        let unit = w.max(h) / 300.0;
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x0} {y0} {w} {h}\" width=\"600\" height=\"{}\">\n",
            (600.0 * h / w).round()
        );
        for item in &self.items {
            let _ = match item {
                Item::Path { pts, closed, stroke, width } => {
                    let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", p.x, -p.y)).collect();
                    let tag = if *closed { "polygon" } else { "polyline" };
                    writeln!(
                        out,
                        r#"<{tag} points="{}" fill="none" stroke="{stroke}" stroke-width="{}"/>"#,
                        coords.join(" "),
                        width * unit
                    )
                }
                Item::Midpoint(p) => writeln!(
                    out,
                    r##"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="#2980b9" stroke-width="{}"/>"##,
                    p.x,
                    -p.y,
                    2.5 * unit,
                    0.8 * unit
                ),
                Item::Vertex { at, label } => writeln!(
                    out,
                    r##"<circle cx="{}" cy="{}" r="{}" fill="#c0392b"/><text x="{}" y="{}" font-size="{}">{label}</text>"##,
                    at.x,
                    -at.y,
                    2.0 * unit,
                    at.x + 3.0 * unit,
                    -at.y - 3.0 * unit,
                    8.0 * unit
                ),
            };
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn view_box_has_ten_percent_margin() {
        let mut plot = Plot::new();
        plot.outline(&[Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0), Vec2::new(0.0, 10.0)]);
        assert!(plot.render().contains(r#"viewBox="-1 -11 12 12""#));
    }

    #[test]
    fn orbit_labels_and_hollow_midpoints() {
        let mut plot = Plot::new();
        plot.orbit(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)], true);
        let svg = plot.render();
        assert_eq!(svg.matches(r##"fill="none" stroke="#2980b9""##).count(), 3);
        assert!(svg.contains(">2</text>"));
    }
}
