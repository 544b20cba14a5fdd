//! Top-down SVG renders of worlds, paths, trees and trajectories, plus the
//! bench chart. Coordinates are written with fixed precision so identical
//! inputs give identical files.

use std::fmt::Write;

use arcshot_core::{GlobalPath, Obstacle, QuadModel, SimState, Tree, Vec3, World};

const PAD: f64 = 20.0;

/// Everything a plan/execute render can show. Empty parts are skipped.
#[derive(Debug, Clone, Copy)]
pub struct Scene<'a> {
    pub world: &'a World,
    pub quad: &'a QuadModel,
    pub desired: Option<&'a GlobalPath>,
    /// Inclusive index ranges of `desired` to highlight.
    pub spans: &'a [(usize, usize)],
    pub trees: &'a [Tree],
    pub final_path: Option<&'a GlobalPath>,
    pub executed: Option<&'a [SimState]>,
    /// Pixels per meter.
    pub scale: f64,
}

impl<'a> Scene<'a> {
    pub fn new(world: &'a World, quad: &'a QuadModel, scale: f64) -> Self {
        Scene {
            world,
            quad,
            desired: None,
            spans: &[],
            trees: &[],
            final_path: None,
            executed: None,
            scale,
        }
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

struct Frame {
    min: Vec3,
    max: Vec3,
    scale: f64,
}

impl Frame {
    fn x(&self, x: f64) -> String {
        num(PAD + (x - self.min.x) * self.scale)
    }

    /// SVG y grows downward; world y grows upward.
    fn y(&self, y: f64) -> String {
        num(PAD + (self.max.y - y) * self.scale)
    }

    fn len(&self, l: f64) -> String {
        num(l * self.scale)
    }

    fn width(&self) -> String {
        num(2.0 * PAD + (self.max.x - self.min.x) * self.scale)
    }

    fn height(&self) -> String {
        num(2.0 * PAD + (self.max.y - self.min.y) * self.scale)
    }

    fn points<I: IntoIterator<Item = Vec3>>(&self, pts: I) -> String {
        pts.into_iter()
            .map(|p| format!("{},{}", self.x(p.x), self.y(p.y)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn footprint(out: &mut String, f: &Frame, o: &Obstacle, class: &str, style: &str) {
    match *o {
        Obstacle::Cylinder {
            base_center, radius, ..
        } => {
            let _ = writeln!(
                out,
                r#"  <circle class="{class}" cx="{}" cy="{}" r="{}" {style}/>"#,
                f.x(base_center.x),
                f.y(base_center.y),
                f.len(radius)
            );
        }
        Obstacle::AxisBox { min, max } => {
            let _ = writeln!(
                out,
                r#"  <rect class="{class}" x="{}" y="{}" width="{}" height="{}" {style}/>"#,
                f.x(min.x),
                f.y(max.y),
                f.len(max.x - min.x),
                f.len(max.y - min.y)
            );
        }
    }
}

fn polyline(out: &mut String, f: &Frame, class: &str, style: &str, pts: impl IntoIterator<Item = Vec3>) {
    let _ = writeln!(
        out,
        r#"  <polyline class="{class}" points="{}" fill="none" {style}/>"#,
        f.points(pts)
    );
}

/// Renders a scene as a standalone SVG document.
pub fn scene_svg(s: &Scene) -> String {
    let b = s.world.bounds;
    let f = Frame {
        min: b.min,
        max: b.max,
        scale: s.scale,
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = f.width(),
        h = f.height()
    );
    let _ = writeln!(
        out,
        r#"  <rect class="bounds" x="{}" y="{}" width="{}" height="{}" fill="white" stroke="black" stroke-width="1"/>"#,
        f.x(b.min.x),
        f.y(b.max.y),
        f.len(b.max.x - b.min.x),
        f.len(b.max.y - b.min.y)
    );
    for o in &s.world.obstacles {
        footprint(&mut out, &f, o, "obstacle", r##"fill="#555555" stroke="none""##);
    }
    for o in s.world.inflated_obstacles(s.quad) {
        footprint(
            &mut out,
            &f,
            &o,
            "inflated",
            r##"fill="none" stroke="#555555" stroke-width="1" stroke-dasharray="4 3""##,
        );
    }
    for t in s.trees {
        for (a, c) in t.edges() {
            let _ = writeln!(
                out,
                r##"  <line class="tree-edge" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#7fa7d9" stroke-width="0.6"/>"##,
                f.x(a.x),
                f.y(a.y),
                f.x(c.x),
                f.y(c.y)
            );
        }
        for n in t.nodes() {
            let _ = writeln!(
                out,
                r##"  <circle class="tree-node" cx="{}" cy="{}" r="1.2" fill="#3b6fb6"/>"##,
                f.x(n.position.x),
                f.y(n.position.y)
            );
        }
    }
    if let Some(d) = s.desired {
        polyline(&mut out, &f, "desired", r##"stroke="#888888" stroke-width="1""##, d.positions());
        for &(a, z) in s.spans {
            polyline(
                &mut out,
                &f,
                "discontinuity",
                r##"stroke="#e8a33d" stroke-width="6" stroke-opacity="0.6""##,
                d.poses[a..=z].iter().map(|p| p.position),
            );
        }
    }
    if let Some(p) = s.final_path {
        polyline(&mut out, &f, "final", r##"stroke="#c0392b" stroke-width="2.5""##, p.positions());
    }
    if let Some(log) = s.executed {
        polyline(
            &mut out,
            &f,
            "executed",
            r##"stroke="#27ae60" stroke-width="1.2""##,
            log.iter().map(|st| st.position),
        );
    }
    let t = s.world.target;
    let _ = writeln!(
        out,
        r##"  <circle class="target" cx="{}" cy="{}" r="5" fill="none" stroke="#8e44ad" stroke-width="2"/>"##,
        f.x(t.x),
        f.y(t.y)
    );
    out.push_str("</svg>\n");
    out
}

/// One point of the duration-vs-loops chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub loops: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Line chart of duration (seconds) against loop count with min/max whiskers.
pub fn bench_chart_svg(points: &[ChartPoint], host: &str) -> String {
    let (w, h, left, bottom, top, right) = (640.0, 400.0, 70.0, 50.0, 40.0, 20.0);
    let lmin = points.iter().map(|p| p.loops).min().unwrap_or(0) as f64;
    let lmax = points.iter().map(|p| p.loops).max().unwrap_or(1) as f64;
    let tmax = points.iter().map(|p| p.max).fold(0.0, f64::max);
    let tmax = if tmax > 0.0 { tmax * 1.1 } else { 1.0 };
    let span = if lmax > lmin { lmax - lmin } else { 1.0 };
    let px = |l: f64| {
        if lmax > lmin {
            left + (l - lmin) / span * (w - left - right)
        } else {
            left + (w - left - right) / 2.0
        }
    };
    let py = |t: f64| h - bottom - t / tmax * (h - bottom - top);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"  <rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"  <text x="{}" y="20" font-family="sans-serif" font-size="13">RRT* loops vs computation time ({})</text>"#,
        num(left),
        escape(host)
    );
    let _ = writeln!(
        out,
        r#"  <line class="axis" x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#,
        l = num(left),
        r = num(w - right),
        b = num(h - bottom)
    );
    let _ = writeln!(
        out,
        r#"  <line class="axis" x1="{l}" y1="{t}" x2="{l}" y2="{b}" stroke="black"/>"#,
        l = num(left),
        t = num(top),
        b = num(h - bottom)
    );
    let _ = writeln!(
        out,
        r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">max loops</text>"#,
        num((left + w - right) / 2.0),
        num(h - 10.0)
    );
    let _ = writeln!(
        out,
        r#"  <text x="15" y="{y}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 15 {y})">duration (s)</text>"#,
        y = num((top + h - bottom) / 2.0)
    );
    for i in 0..=4 {
        let t = tmax * f64::from(i) / 4.0;
        let _ = writeln!(
            out,
            r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{:.4}</text>"#,
            num(left - 5.0),
            num(py(t) + 3.0),
            t
        );
    }
    for p in points {
        let x = num(px(p.loops as f64));
        let _ = writeln!(
            out,
            r#"  <line class="whisker" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="gray"/>"#,
            num(py(p.min)),
            num(py(p.max))
        );
        let _ = writeln!(
            out,
            r#"  <text x="{x}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"#,
            num(h - bottom + 15.0),
            p.loops
        );
    }
    let line: Vec<String> = points
        .iter()
        .map(|p| format!("{},{}", num(px(p.loops as f64)), num(py(p.mean))))
        .collect();
    let _ = writeln!(
        out,
        r##"  <polyline class="mean" points="{}" fill="none" stroke="#c0392b" stroke-width="2"/>"##,
        line.join(" ")
    );
    for p in points {
        let _ = writeln!(
            out,
            r##"  <circle class="mean-point" cx="{}" cy="{}" r="3" fill="#c0392b"/>"##,
            num(px(p.loops as f64)),
            num(py(p.mean))
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Number of vertices in the first polyline with the given class.
pub fn polyline_vertex_count(svg: &str, class: &str) -> Option<usize> {
    let tag = format!(r#"<polyline class="{class}" points=""#);
    let start = svg.find(&tag)? + tag.len();
    let end = start + svg[start..].find('"')?;
    Some(svg[start..end].split_whitespace().count())
}

/// Number of elements carrying `class`.
pub fn count_class(svg: &str, class: &str) -> usize {
    svg.matches(&format!(r#"class="{class}""#)).count()
}
