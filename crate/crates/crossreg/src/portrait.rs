//! Phase-portrait bundles and their deterministic SVG, CSV and JSON renderings.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use dynamics::{integrate_with_events, Event, IntegratorConfig, Orientation, Section, VectorField};

use crate::error::CrossError;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polyline {
    pub label: String,
    pub points: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Marker {
    pub label: String,
    pub at: [f64; 2],
    /// Classification or role, e.g. "saddle", "focus".
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionMarker {
    pub label: String,
    pub from: [f64; 2],
    pub to: [f64; 2],
}

/// [[x_min, x_max], [y_min, y_max]].
pub type DomainBox = [[f64; 2]; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortraitData {
    pub title: String,
    pub domain: DomainBox,
    pub trajectories: Vec<Polyline>,
    pub nullclines: Vec<Polyline>,
    pub equilibria: Vec<Marker>,
    pub sections: Vec<SectionMarker>,
}

fn inside(d: &DomainBox, p: &[f64; 2]) -> bool {
    let tol = 1e-9 * (d[0][1] - d[0][0]).abs().max((d[1][1] - d[1][0]).abs());
    p[0] >= d[0][0] - tol && p[0] <= d[0][1] + tol && p[1] >= d[1][0] - tol && p[1] <= d[1][1] + tol
}

impl PortraitData {
    pub fn new(title: &str, domain: DomainBox) -> Self {
        PortraitData {
            title: title.into(),
            domain,
            trajectories: Vec::new(),
            nullclines: Vec::new(),
            equilibria: Vec::new(),
            sections: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), CrossError> {
        let d = &self.domain;
        if !(d[0][0] < d[0][1] && d[1][0] < d[1][1]) {
            return Err(CrossError::Config("domain box must have positive extent".into()));
        }
        if self.trajectories.is_empty() && self.nullclines.is_empty() {
            return Err(CrossError::EmptyPortrait("no trajectories or nullclines".into()));
        }
        for l in self.trajectories.iter().chain(&self.nullclines) {
            if let Some(p) = l.points.iter().find(|p| !inside(d, p)) {
                return Err(CrossError::OutsideDomain { what: format!("{} point {:?}", l.label, p) });
            }
        }
        for m in &self.equilibria {
            if !inside(d, &m.at) {
                return Err(CrossError::OutsideDomain { what: format!("marker {}", m.label) });
            }
        }
        for s in &self.sections {
            if !inside(d, &s.from) || !inside(d, &s.to) {
                return Err(CrossError::OutsideDomain { what: format!("section {}", s.label) });
            }
        }
        Ok(())
    }
}

/// Twelve significant digits, written without an exponent.
pub fn num(v: f64) -> String {
    let r: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Frame {
    d: DomainBox,
}

impl Frame {
    fn px(&self, p: &[f64; 2]) -> (f64, f64) {
        let [[x0, x1], [y0, y1]] = self.d;
        let sx = MARGIN + (p[0] - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let sy = HEIGHT - MARGIN - (p[1] - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
        (sx, sy)
    }

    fn path(&self, pts: &[[f64; 2]]) -> String {
        let mut s = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.px(p);
            let _ = write!(s, "{}{} {}", if i == 0 { "M" } else { " L" }, num(x), num(y));
        }
        s
    }
}

fn marker_color(kind: &str) -> &'static str {
    match kind {
        "saddle" => "#c0392b",
        "focus" => "#27ae60",
        "node" => "#8e44ad",
        "center-candidate" => "#d68910",
        _ => "#222222",
    }
}

pub fn to_svg(data: &PortraitData) -> Result<String, CrossError> {
    data.validate()?;
    let f = Frame { d: data.domain };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&data.title));
    let _ = writeln!(
        s,
        "<rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>",
        num(WIDTH - 2.0 * MARGIN),
        num(HEIGHT - 2.0 * MARGIN),
        m = MARGIN
    );
    let [[x0, x1], [y0, y1]] = data.domain;
    let labels = [
        (MARGIN, HEIGHT - MARGIN + 20.0, "start", num(x0)),
        (WIDTH - MARGIN, HEIGHT - MARGIN + 20.0, "end", num(x1)),
        (MARGIN - 8.0, HEIGHT - MARGIN, "end", num(y0)),
        (MARGIN - 8.0, MARGIN + 4.0, "end", num(y1)),
        (WIDTH / 2.0, HEIGHT - MARGIN + 40.0, "middle", "x".to_string()),
        (MARGIN - 40.0, HEIGHT / 2.0, "middle", "y".to_string()),
        (WIDTH / 2.0, MARGIN - 20.0, "middle", escape(&data.title)),
    ];
    for (x, y, anchor, text) in labels {
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"14\">{text}</text>",
            num(x),
            num(y)
        );
    }
    for sec in &data.sections {
        let (a, b) = (f.px(&sec.from), f.px(&sec.to));
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#7f8c8d\" stroke-width=\"1\"><title>{}</title></line>",
            num(a.0),
            num(a.1),
            num(b.0),
            num(b.1),
            escape(&sec.label)
        );
    }
    for l in &data.nullclines {
        let _ = writeln!(
            s,
            "<path d=\"{}\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"6 4\"><title>{}</title></path>",
            f.path(&l.points),
            escape(&l.label)
        );
    }
    for l in &data.trajectories {
        let _ = writeln!(
            s,
            "<path d=\"{}\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"><title>{}</title></path>",
            f.path(&l.points),
            escape(&l.label)
        );
    }
    for m in &data.equilibria {
        let (x, y) = f.px(&m.at);
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"{}\"><title>{} ({})</title></circle>",
            num(x),
            num(y),
            marker_color(&m.kind),
            escape(&m.label),
            escape(&m.kind)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// One row per vertex: `kind,label,index,x,y`.
pub fn to_csv(data: &PortraitData) -> Result<String, CrossError> {
    data.validate()?;
    let mut s = String::from("kind,label,index,x,y\n");
    let mut line = |kind: &str, label: &str, i: usize, p: &[f64; 2]| {
        let _ = writeln!(s, "{kind},\"{}\",{i},{},{}", label.replace('"', "\"\""), num(p[0]), num(p[1]));
    };
    for l in &data.trajectories {
        l.points.iter().enumerate().for_each(|(i, p)| line("trajectory", &l.label, i, p));
    }
    for l in &data.nullclines {
        l.points.iter().enumerate().for_each(|(i, p)| line("nullcline", &l.label, i, p));
    }
    for m in &data.equilibria {
        line(&format!("equilibrium:{}", m.kind), &m.label, 0, &m.at);
    }
    for sec in &data.sections {
        line("section", &sec.label, 0, &sec.from);
        line("section", &sec.label, 1, &sec.to);
    }
    Ok(s)
}

pub fn render_to_string(data: &PortraitData, format: Format) -> Result<String, CrossError> {
    match format {
        Format::Svg => to_svg(data),
        Format::Csv => to_csv(data),
        Format::Json => {
            data.validate()?;
            Ok(serde_json::to_string_pretty(data)? + "\n")
        }
    }
}

pub fn render_portrait(data: &PortraitData, format: Format, path: &Path) -> Result<(), CrossError> {
    let body = render_to_string(data, format)?;
    std::fs::write(path, body).map_err(|source| CrossError::Io { path: path.display().to_string(), source })
}

/// Follows `field` from `x0` until t_end or the first crossing of the domain boundary.
pub fn trajectory_in_box<F: VectorField + ?Sized>(
    field: &F,
    x0: [f64; 2],
    t_end: f64,
    domain: &DomainBox,
    cfg: &IntegratorConfig,
) -> Result<Vec<[f64; 2]>, CrossError> {
    let mut events = Vec::with_capacity(4);
    for (axis, lim) in domain.iter().enumerate() {
        for &level in lim {
            events.push(Event { section: Section::coordinate(2, axis, level, Orientation::Both)?, terminal: true });
        }
    }
    let tr = integrate_with_events(field, &x0, (0.0, t_end), cfg, &events)?;
    let clamp = |p: &Vec<f64>| -> [f64; 2] {
        [p[0].clamp(domain[0][0], domain[0][1]), p[1].clamp(domain[1][0], domain[1][1])]
    };
    Ok(tr.x.iter().map(clamp).collect())
}

/// Samples y = g(x) on the box and splits it where it leaves the box.
pub fn graph_in_box(label: &str, g: impl Fn(f64) -> f64, domain: &DomainBox, samples: usize) -> Vec<Polyline> {
    let [[x0, x1], [y0, y1]] = *domain;
    let mut out = Vec::new();
    let mut cur: Vec<[f64; 2]> = Vec::new();
    for i in 0..samples.max(2) {
        let x = x0 + (x1 - x0) * i as f64 / (samples.max(2) - 1) as f64;
        let y = g(x);
        if y.is_finite() && y >= y0 && y <= y1 {
            cur.push([x, y]);
        } else if cur.len() > 1 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.clear();
        }
    }
    if cur.len() > 1 {
        out.push(cur);
    }
    let n = out.len();
    out.into_iter()
        .enumerate()
        .map(|(k, points)| Polyline { label: if n > 1 { format!("{label} #{}", k + 1) } else { label.into() }, points })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_line() -> PortraitData {
        let mut d = PortraitData::new("test", [[-1.0, 1.0], [-1.0, 1.0]]);
        d.trajectories.push(Polyline { label: "a".into(), points: vec![[0.0, 0.0], [0.5, 0.25], [0.9, -0.3]] });
        d
    }

    #[test]
    fn one_trajectory_gives_one_path() {
        let svg = to_svg(&one_line()).unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("viewBox=\"0 0 800 600\""));
    }

    #[test]
    fn numbers_have_twelve_digits_and_no_exponent() {
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(2.5e-7), "0.00000025");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(400.0), "400");
    }

    #[test]
    fn rejects_empty_and_escaping_geometry() {
        let mut d = PortraitData::new("t", [[0.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(to_svg(&d), Err(CrossError::EmptyPortrait(_))));
        d.trajectories.push(Polyline { label: "b".into(), points: vec![[0.5, 0.5], [1.5, 0.5]] });
        assert!(matches!(to_svg(&d), Err(CrossError::OutsideDomain { .. })));
    }

    #[test]
    fn graph_splits_at_the_boundary() {
        let d = [[-1.0, 1.0], [-1.0, 1.0]];
        let parts = graph_in_box("h", |x| 0.1 / x, &d, 201);
        assert_eq!(parts.len(), 2);
        assert!(parts.iter().all(|p| p.points.iter().all(|q| q[1].abs() <= 1.0)));
    }
}
