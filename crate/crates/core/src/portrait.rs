//! Deterministic SVG phase portraits.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::invariants::extract;
use crate::poly::RealPolyField;
use crate::roots::{find_roots, PointKind, SingularPoint};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Style {
    pub separatrix: String,
    pub orbit: String,
    pub tree: String,
    pub separatrix_width: f64,
    pub orbit_width: f64,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            separatrix: "#2a9d3a".into(),
            orbit: "#8a8a8a".into(),
            tree: "#c0392b".into(),
            separatrix_width: 2.0,
            orbit_width: 0.8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PortraitSpec {
    pub poly: RealPolyField<f64>,
    /// `[x_min, x_max, y_min, y_max]`.
    #[serde(default = "default_window")]
    pub window: [f64; 4],
    /// Orbit seeds per axis.
    #[serde(default = "default_density")]
    pub density: usize,
    #[serde(default = "yes")]
    pub tree_overlay: bool,
    #[serde(default)]
    pub style: Style,
}

fn default_window() -> [f64; 4] {
    [-2.5, 2.5, -2.5, 2.5]
}

fn default_density() -> usize {
    8
}

fn yes() -> bool {
    true
}

impl PortraitSpec {
    pub fn new(poly: RealPolyField<f64>, window: [f64; 4]) -> Self {
        Self {
            poly,
            window,
            density: default_density(),
            tree_overlay: true,
            style: Style::default(),
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        let [x0, x1, y0, y1] = self.window;
        if !(x1 > x0 && y1 > y0) || !self.window.iter().all(|v| v.is_finite()) {
            return Err(crate::StrataError::invalid("portrait window is empty"));
        }
        if self.density == 0 {
            return Err(crate::StrataError::invalid("orbit density must be positive"));
        }
        Ok(())
    }
}

const SIZE: f64 = 600.0;
const ORBIT_STEPS: usize = 1500;

struct View {
    x0: f64,
    y1: f64,
    sx: f64,
    sy: f64,
}

impl View {
    fn map(&self, z: Complex64) -> (f64, f64) {
        ((z.re - self.x0) * self.sx, (self.y1 - z.im) * self.sy)
    }
}

/// Fixed 4-decimal rendering without a negative zero.
fn num(v: f64) -> String {
    let r = (v * 1e4).round() / 1e4;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.4}")
}

fn polyline(out: &mut String, view: &View, pts: &[Complex64], class: &str) {
    if pts.len() < 2 {
        return;
    }
    let _ = write!(out, "<polyline class=\"{class}\" points=\"");
    for (i, z) in pts.iter().enumerate() {
        let (x, y) = view.map(*z);
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{},{}", num(x), num(y));
    }
    out.push_str("\"/>\n");
}

fn kind_color(kind: PointKind) -> &'static str {
    match kind {
        PointKind::RadialNode => "#1f4e9c",
        PointKind::StrongFocus => "#e08e0b",
        PointKind::Center => "#7d3c98",
        PointKind::Parabolic => "#111111",
    }
}

/// Fixed-step orbit of `sign P / (1 + |P|)` inside an enlarged window.
fn orbit(p: &RealPolyField<f64>, roots: &[SingularPoint<f64>], z0: Complex64, sign: f64, h: f64, bound: [f64; 4]) -> Vec<Complex64> {
    let f = |z: Complex64| {
        let v = p.eval(z);
        v * (sign / (1.0 + v.norm()))
    };
    let mut z = z0;
    let mut pts = vec![z];
    for _ in 0..ORBIT_STEPS {
        let k1 = f(z);
        let k2 = f(z + k1 * (h / 2.0));
        let k3 = f(z + k2 * (h / 2.0));
        let k4 = f(z + k3 * h);
        z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        pts.push(z);
        if z.re < bound[0] || z.re > bound[1] || z.im < bound[2] || z.im > bound[3] {
            break;
        }
        if roots.iter().any(|r| (z - r.location).norm() < 0.5 * h) {
            break;
        }
    }
    pts
}

pub fn render_portrait(spec: &PortraitSpec, tol: &Tolerances) -> crate::Result<String> {
    spec.validate()?;
    let [x0, x1, y0, y1] = spec.window;
    let view = View {
        x0,
        y1,
        sx: SIZE / (x1 - x0),
        sy: SIZE / (y1 - y0),
    };
    let p = &spec.poly;
    let st = &spec.style;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(
        out,
        "<style>.orbit{{fill:none;stroke:{};stroke-width:{}}} .separatrix{{fill:none;stroke:{};stroke-width:{}}} .tree{{fill:none;stroke:{};stroke-width:1.5;stroke-dasharray:6 3}} .warning{{font:14px sans-serif;fill:#c0392b}}</style>",
        st.orbit, num(st.orbit_width), st.separatrix, num(st.separatrix_width), st.tree
    );
    let _ = writeln!(out, "<clipPath id=\"w\"><rect x=\"0\" y=\"0\" width=\"{SIZE}\" height=\"{SIZE}\"/></clipPath>");
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g clip-path=\"url(#w)\">\n");

    let roots = find_roots(p, tol)?;
    let diag = (x1 - x0).hypot(y1 - y0);
    let h = 4e-3 * diag;
    let pad = 0.5 * diag;
    let bound = [x0 - pad, x1 + pad, y0 - pad, y1 + pad];
    let n = spec.density;
    for a in 0..n {
        for b in 0..n {
            let z = Complex64::new(
                x0 + (x1 - x0) * (a as f64 + 0.5) / n as f64,
                y0 + (y1 - y0) * (b as f64 + 0.5) / n as f64,
            );
            let mut back = orbit(p, &roots, z, -1.0, h, bound);
            back.reverse();
            back.pop();
            back.extend(orbit(p, &roots, z, 1.0, h, bound));
            polyline(&mut out, &view, &back, "orbit");
        }
    }

    match extract(p, tol) {
        Ok(ex) => {
            for t in &ex.traces {
                polyline(&mut out, &view, &t.points, "separatrix");
            }
            if spec.tree_overlay {
                let k = p.k();
                let mut edges: Vec<(usize, usize)> = Vec::new();
                for c in 0..2 * k {
                    let prev = (c + 2 * k - 1) % (2 * k);
                    if let (Some(u), Some(v)) = (ex.traces[prev].landing, ex.traces[c].landing) {
                        let e = (u.min(v), u.max(v));
                        if u != v && !edges.contains(&e) {
                            edges.push(e);
                        }
                    }
                }
                edges.sort();
                for (u, v) in edges {
                    polyline(&mut out, &view, &[ex.roots[u].location, ex.roots[v].location], "tree");
                }
            }
        }
        Err(e) => {
            let _ = writeln!(
                out,
                "<text class=\"warning\" x=\"8\" y=\"20\">no separatrix overlay: {}</text>",
                xml_escape(&e.to_string())
            );
        }
    }
    for r in &roots {
        let (x, y) = view.map(r.location);
        let _ = writeln!(
            out,
            "<circle class=\"root {}\" cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"{}\"/>",
            r.kind.as_str(),
            num(x),
            num(y),
            kind_color(r.kind)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_output() {
        let p = RealPolyField::from_eps(&[-1.0]).unwrap();
        let spec = PortraitSpec::new(p, [-2.0, 2.0, -2.0, 2.0]);
        let tol = Tolerances::default();
        let a = render_portrait(&spec, &tol).unwrap();
        let b = render_portrait(&spec, &tol).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("class=\"separatrix\"").count(), 2);
        assert_eq!(a.matches("class=\"root radial-node\"").count(), 2);
        assert!(!a.contains("-0.0000"));
    }

    #[test]
    fn non_generic_degrades() {
        let p = RealPolyField::from_eps(&[0.0, 0.0]).unwrap();
        let spec = PortraitSpec::new(p, [-2.0, 2.0, -2.0, 2.0]);
        let s = render_portrait(&spec, &Tolerances::default()).unwrap();
        assert!(s.contains("class=\"warning\""));
        assert!(!s.contains("class=\"separatrix\""));
    }
}
