//! Minimal SVG renderings of the 3-simplex: tilings, region heatmaps and scatter plots.

use std::fmt::Write;

use crate::geometry::{ConvexPolygon, Point};
use crate::tiling::TilingAudit;

const WIDTH: f64 = 600.0;
const MARGIN: f64 = 20.0;

struct Canvas {
    body: String,
}

impl Canvas {
    fn new() -> Self {
        Canvas { body: String::new() }
    }

    fn height() -> f64 {
        WIDTH * 3f64.sqrt() / 2.0
    }

    fn xy(p: Point) -> (f64, f64) {
        (MARGIN + p[0] * WIDTH, MARGIN + Self::height() - p[1] * WIDTH)
    }

    fn polygon(&mut self, poly: &ConvexPolygon, fill: &str, stroke: &str, stroke_width: f64) {
        if poly.vertices().len() < 3 {
            return;
        }
        let pts: Vec<String> = poly
            .vertices()
            .iter()
            .map(|&p| {
                let (x, y) = Self::xy(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{fill}" stroke="{stroke}" stroke-width="{stroke_width}"/>"#,
            pts.join(" ")
        );
    }

    fn dot(&mut self, p: Point, r: f64, fill: &str) {
        let (x, y) = Self::xy(p);
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"/>"#);
    }

    fn line(&mut self, a: Point, b: Point, stroke: &str) {
        let ((x1, y1), (x2, y2)) = (Self::xy(a), Self::xy(b));
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{stroke}" stroke-width="1" stroke-dasharray="4 3"/>"#
        );
    }

    fn text(&mut self, p: Point, size: f64, s: &str) {
        let (x, y) = Self::xy(p);
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size}" font-family="sans-serif" text-anchor="middle">{s}</text>"#
        );
    }

    fn finish(self) -> String {
        let w = WIDTH + 2.0 * MARGIN;
        let h = Self::height() + 2.0 * MARGIN;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

/// Sequential palette over `[0, 1]`.
fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let r = (68.0 + t * (253.0 - 68.0)) as u8;
    let g = (1.0 + t * (231.0 - 1.0)) as u8;
    let b = (84.0 + t * (37.0 - 84.0)) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Diverging blue-white-red palette over `[-1, 1]`.
fn diverging(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t < 0.0 {
        let k = -t;
        (255.0 * (1.0 - k) + 33.0 * k, 255.0 * (1.0 - k) + 102.0 * k, 255.0 * (1.0 - k) + 172.0 * k)
    } else {
        (255.0 * (1.0 - t) + 178.0 * t, 255.0 * (1.0 - t) + 24.0 * t, 255.0 * (1.0 - t) + 43.0 * t)
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, b as u8)
}

/// Tiles of the simplex coloured by step count.
pub fn tiling_svg(audit: &TilingAudit) -> String {
    let mut c = Canvas::new();
    let depth = audit.report.depth.max(1) as f64;
    c.polygon(&ConvexPolygon::triangle(), "#dddddd", "none", 0.0);
    for t in &audit.tiles {
        let fill = ramp(t.steps() as f64 / depth);
        for p in &t.region {
            c.polygon(p, &fill, "black", 0.2);
        }
    }
    c.polygon(&audit.family.feasible, "none", "black", 1.5);
    c.polygon(&ConvexPolygon::triangle(), "none", "black", 1.0);
    c.finish()
}

/// Distinct projected tile shapes drawn over the feasible triangle.
pub fn shapes_svg(audit: &TilingAudit) -> String {
    let mut c = Canvas::new();
    c.polygon(&ConvexPolygon::triangle(), "none", "#999999", 1.0);
    c.polygon(&audit.family.feasible, "#f4f4f4", "black", 1.0);
    let k = audit.shapes.len().max(2) as f64 - 1.0;
    for (i, s) in audit.shapes.iter().enumerate() {
        let col = ramp(i as f64 / k);
        c.polygon(s, "none", &col, 2.0);
    }
    c.finish()
}

/// Regions of the feasible triangle coloured by realised minus target mass.
pub fn delta_svg(audit: &TilingAudit) -> String {
    let mut c = Canvas::new();
    c.polygon(&ConvexPolygon::triangle(), "none", "#999999", 1.0);
    let scale = audit.report.max_abs_delta.max(1e-12);
    for (region, row) in audit.regions.iter().zip(&audit.report.rows) {
        let fill = diverging(row.delta / scale);
        for p in &region.pieces {
            c.polygon(p, &fill, &fill, 0.5);
        }
    }
    for row in &audit.report.rows {
        c.text(row.centroid, 11.0, &format!("{}: {:+.2}", row.region, row.delta));
    }
    c.polygon(&audit.family.feasible, "none", "black", 1.5);
    c.finish()
}

/// Scatter plot of planar points over the simplex outline.
pub fn scatter_svg(points: &[Point]) -> String {
    scatter_svg_with_lines(points, &[], &[])
}

/// Scatter plot with shaded regions and constraint boundary segments.
pub fn scatter_svg_with_lines(points: &[Point], regions: &[ConvexPolygon], lines: &[(Point, Point)]) -> String {
    let mut c = Canvas::new();
    for r in regions {
        c.polygon(r, "#e8f0fa", "#3366aa", 1.0);
    }
    for &(a, b) in lines {
        c.line(a, b, "#aa3333");
    }
    c.polygon(&ConvexPolygon::triangle(), "none", "black", 1.0);
    let r = if points.len() > 10_000 { 0.4 } else { 1.2 };
    for &p in points {
        c.dot(p, r, "#202020");
    }
    c.finish()
}
