//! Static SVG rendering of a scene and planned paths.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use apfsa_core::{ObstacleKind, PlanResult, Scene, Vec3};

use crate::output::OutputError;

/// Pixels per metre.
const SCALE: f64 = 4.0;
const MARGIN: f64 = 20.0;
const COS30: f64 = 0.866_025_403_784_438_6;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// Looking down the z axis; y grows upwards.
    TopDown,
    /// Isometric view from the (+x, -y, +z) octant.
    Iso,
}

impl Projection {
    pub fn as_str(self) -> &'static str {
        match self {
            Projection::TopDown => "topdown",
            Projection::Iso => "iso",
        }
    }
}

struct View {
    projection: Projection,
    lx: f64,
    ly: f64,
    lz: f64,
    width: f64,
    height: f64,
}

impl View {
    fn new(scene: &Scene, projection: Projection) -> Self {
        let b = scene.bounds();
        let (w, h) = match projection {
            Projection::TopDown => (b.lx, b.ly),
            Projection::Iso => ((b.lx + b.ly) * COS30, (b.lx + b.ly) * 0.5 + b.lz),
        };
        View {
            projection,
            lx: b.lx,
            ly: b.ly,
            lz: b.lz,
            width: w * SCALE + 2.0 * MARGIN,
            height: h * SCALE + 2.0 * MARGIN,
        }
    }

    fn point(&self, p: Vec3) -> (f64, f64) {
        let (u, v) = match self.projection {
            Projection::TopDown => (p.x, self.ly - p.y),
            Projection::Iso => (
                (p.x - p.y + self.ly) * COS30,
                (self.lx - p.x + self.ly - p.y) * 0.5 + self.lz - p.z,
            ),
        };
        (u * SCALE + MARGIN, v * SCALE + MARGIN)
    }
}

fn num(v: f64) -> String {
    format!("{v:.3}")
}

fn circle(out: &mut String, (cx, cy): (f64, f64), r: f64, attrs: &str) {
    let _ = writeln!(
        out,
        r#"<circle cx="{}" cy="{}" r="{}" {attrs}/>"#,
        num(cx),
        num(cy),
        num(r)
    );
}

fn polygon(out: &mut String, pts: &[(f64, f64)], attrs: &str) {
    let joined: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{},{}", num(x), num(y)))
        .collect();
    let _ = writeln!(out, r#"<polygon points="{}" {attrs}/>"#, joined.join(" "));
}

fn draw_bounds(out: &mut String, scene: &Scene, view: &View) {
    let b = scene.bounds();
    let attrs = r##"class="bounds" fill="none" stroke="#444" stroke-width="1""##;
    let corners = |z: f64| {
        [
            Vec3::new(0.0, 0.0, z),
            Vec3::new(b.lx, 0.0, z),
            Vec3::new(b.lx, b.ly, z),
            Vec3::new(0.0, b.ly, z),
        ]
        .map(|c| view.point(c))
    };
    polygon(out, &corners(0.0), attrs);
    if view.projection == Projection::Iso {
        polygon(
            out,
            &corners(b.lz),
            r##"class="bounds" fill="none" stroke="#bbb" stroke-width="1""##,
        );
    }
}

fn draw_obstacles(out: &mut String, scene: &Scene, view: &View) {
    for (i, ob) in scene.obstacles().iter().enumerate() {
        let c = scene.obstacle_position_at(i, 0);
        let r = ob.radius * SCALE;
        let (class, style) = match ob.kind {
            ObstacleKind::Cylinder => (
                "cylinder",
                r##"fill="#8c8c8c" fill-opacity="0.6" stroke="#333""##,
            ),
            ObstacleKind::StaticSphere => (
                "static-sphere",
                r##"fill="#e377c2" fill-opacity="0.5" stroke="#333""##,
            ),
            ObstacleKind::DynamicSphere => (
                "dynamic-sphere",
                r##"fill="#ff9896" fill-opacity="0.5" stroke="#333" stroke-dasharray="4 2""##,
            ),
        };
        let attrs = format!(r#"class="{class}" {style}"#);
        match (view.projection, ob.kind) {
            (Projection::Iso, ObstacleKind::Cylinder) => {
                // Silhouette: base and top discs joined by their horizontal extremes.
                let base = view.point(c);
                let top = view.point(Vec3::new(c.x, c.y, c.z + ob.height));
                polygon(
                    out,
                    &[
                        (base.0 - r, base.1),
                        (base.0 + r, base.1),
                        (top.0 + r, top.1),
                        (top.0 - r, top.1),
                    ],
                    &attrs,
                );
                circle(out, top, r, &attrs);
            }
            _ => circle(out, view.point(c), r, &attrs),
        }
        if ob.kind == ObstacleKind::DynamicSphere {
            let ahead = c + ob.velocity * 10.0;
            let (x1, y1) = view.point(c);
            let (x2, y2) = view.point(ahead);
            let _ = writeln!(
                out,
                r##"<line class="velocity" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#d62728" stroke-width="1"/>"##,
                num(x1),
                num(y1),
                num(x2),
                num(y2)
            );
        }
    }
}

fn draw_trace(out: &mut String, trace: &PlanResult, view: &View, colour: &str) {
    let pts: Vec<String> = trace
        .waypoints
        .iter()
        .map(|&p| {
            let (x, y) = view.point(p);
            format!("{},{}", num(x), num(y))
        })
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline class="trace" data-status="{}" points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
        trace.status.as_str(),
        pts.join(" ")
    );
    for e in &trace.escape_events {
        circle(
            out,
            view.point(e.waypoint),
            3.0,
            r##"class="escape" fill="#ffbf00" stroke="#000""##,
        );
    }
}

/// Renders the scene at t = 0 with one polyline per trace.
pub fn render_svg(scene: &Scene, traces: &[PlanResult], projection: Projection) -> String {
    let view = View::new(scene, projection);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = num(view.width),
        h = num(view.height)
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    draw_bounds(&mut out, scene, &view);
    draw_obstacles(&mut out, scene, &view);
    for (i, t) in traces.iter().enumerate() {
        draw_trace(&mut out, t, &view, PALETTE[i % PALETTE.len()]);
    }
    circle(
        &mut out,
        view.point(scene.start()),
        4.0,
        r##"class="start" fill="#2ca02c""##,
    );
    circle(
        &mut out,
        view.point(scene.goal()),
        4.0,
        r##"class="goal" fill="#d62728""##,
    );
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(
    scene: &Scene,
    traces: &[PlanResult],
    path: impl AsRef<Path>,
    projection: Projection,
) -> Result<(), OutputError> {
    let path = path.as_ref();
    fs::write(path, render_svg(scene, traces, projection)).map_err(|e| OutputError::io(path, e))
}

/// Converts an SVG x/y pair from a top-down render back to scene x/y.
pub fn topdown_to_scene(scene: &Scene, (sx, sy): (f64, f64)) -> (f64, f64) {
    (
        (sx - MARGIN) / SCALE,
        scene.bounds().ly - (sy - MARGIN) / SCALE,
    )
}
