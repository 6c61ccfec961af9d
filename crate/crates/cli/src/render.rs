//! SVG pictures of a planning run.

use std::fmt::Write;

use ncrrt::{PlanOutcome, Scalar, Scenario};

/// Canvas and style. The canvas height follows from `width` and the world's
/// aspect ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub width: f64,
    pub edge_width: f64,
    pub path_width: f64,
    pub endpoint_radius: f64,
    pub free_color: String,
    pub obstacle_color: String,
    pub edge_color: String,
    pub start_color: String,
    pub goal_color: String,
    pub path_color: String,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            width: 800.0,
            edge_width: 1.0,
            path_width: 3.0,
            endpoint_radius: 6.0,
            free_color: "white".into(),
            obstacle_color: "black".into(),
            edge_color: "#888888".into(),
            start_color: "blue".into(),
            goal_color: "orange".into(),
            path_color: "red".into(),
        }
    }
}

/// World to canvas: uniform scale, y flipped.
struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl Frame {
    fn x(&self, x: f64) -> f64 {
        (x - self.x0) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        (self.y1 - y) * self.scale
    }
}

/// Standalone SVG document: free space, obstacles, one `line` per tree edge,
/// the path as a `polyline` when there is one, then start and goal circles.
pub fn render_svg<S: Scalar>(
    outcome: &PlanOutcome<S>,
    s: &Scenario<S>,
    spec: &RenderSpec,
) -> String {
    let b = s.bounds();
    let [x0, y0, x1, y1] = [b.x_min, b.y_min, b.x_max, b.y_max].map(Scalar::as_f64);
    let scale = spec.width / (x1 - x0);
    let height = (y1 - y0) * scale;
    let f = Frame { x0, y1, scale };

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        spec.width, height, spec.width, height
    );
    let _ = writeln!(
        w,
        r#"<rect class="free" x="0" y="0" width="{}" height="{}" fill="{}"/>"#,
        spec.width, height, spec.free_color
    );
    for o in s.obstacles() {
        let Some(o) = o.clip(b) else { continue };
        let [ox0, oy0, ox1, oy1] = [o.x_min, o.y_min, o.x_max, o.y_max].map(Scalar::as_f64);
        let _ = writeln!(
            w,
            r#"<rect class="obstacle" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
            f.x(ox0),
            f.y(oy1),
            (ox1 - ox0) * scale,
            (oy1 - oy0) * scale,
            spec.obstacle_color
        );
    }
    for (a, c) in outcome.tree.edges() {
        let _ = writeln!(
            w,
            r#"<line class="edge" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{}" stroke-width="{}"/>"#,
            f.x(a.x.as_f64()),
            f.y(a.y.as_f64()),
            f.x(c.x.as_f64()),
            f.y(c.y.as_f64()),
            spec.edge_color,
            spec.edge_width
        );
    }
    if let Some(path) = &outcome.path {
        let points: Vec<String> = path
            .iter()
            .map(|c| format!("{:.3},{:.3}", f.x(c.x.as_f64()), f.y(c.y.as_f64())))
            .collect();
        let _ = writeln!(
            w,
            r#"<polyline class="path" points="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
            points.join(" "),
            spec.path_color,
            spec.path_width
        );
    }
    for (class, c, color) in [
        ("start", s.start(), &spec.start_color),
        ("goal", s.goal(), &spec.goal_color),
    ] {
        let _ = writeln!(
            w,
            r#"<circle class="{class}" cx="{:.3}" cy="{:.3}" r="{}" fill="{color}"/>"#,
            f.x(c.x.as_f64()),
            f.y(c.y.as_f64()),
            spec.endpoint_radius
        );
    }
    svg.push_str("</svg>\n");
    svg
}
