//! Transversal times measured by flowing, independent of the residue
//! formula used by extraction.
//!
//! In the rectifying time `t = int dz / P` a zone is a horizontal strip.
//! From a point `w_a` deep in end `a`, the flows of `+-iP` reach the two
//! boundary separatrices after times `s+` and `s-`, so the strip height is
//! `s+ + s-`. Moving `w_a` and `w_b` to the midline and joining them by the
//! real flow gives `t(w_b) - t(w_a)`; radial tails to infinity finish the
//! job.

use num_complex::Complex64;

use crate::error::{Result, StrataError};
use crate::invariants::Extraction;
use crate::quad;

const STEP: f64 = 5e-4;
const MAX_STEPS: usize = 2_000_000;

struct Walker<'a> {
    ex: &'a Extraction,
    /// Bounding boxes and segments of the traced separatrices.
    segments: Vec<(Complex64, Complex64)>,
    loop_axis: bool,
}

fn cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let orient = |p: Complex64, q: Complex64, r: Complex64| ((q - p).conj() * (r - p)).im;
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

impl<'a> Walker<'a> {
    fn new(ex: &'a Extraction) -> Self {
        let mut segments = Vec::new();
        for t in &ex.traces {
            for w in t.points.windows(2) {
                segments.push((w[0], w[1]));
            }
        }
        let loop_axis = ex.tau.ell() == 1;
        Self { ex, segments, loop_axis }
    }

    fn hits_boundary(&self, a: Complex64, b: Complex64) -> bool {
        if self.loop_axis && a.im * b.im < 0.0 {
            return true;
        }
        let (lo_re, hi_re) = (a.re.min(b.re), a.re.max(b.re));
        let (lo_im, hi_im) = (a.im.min(b.im), a.im.max(b.im));
        self.segments.iter().any(|&(c, d)| {
            c.re.max(d.re) >= lo_re
                && c.re.min(d.re) <= hi_re
                && c.im.max(d.im) >= lo_im
                && c.im.min(d.im) <= hi_im
                && cross(a, b, c, d)
        })
    }

    /// One RK4 step of `dz/dq = rot P / (1 + |P|)`, `ds/dq = 1 / (1 + |P|)`.
    fn step(&self, z: Complex64, rot: Complex64, h: f64) -> (Complex64, f64) {
        let f = |z: Complex64| {
            let v = self.ex.poly.eval(z);
            let w = 1.0 / (1.0 + v.norm());
            (rot * v * w, w)
        };
        let (k1, s1) = f(z);
        let (k2, s2) = f(z + k1 * (h / 2.0));
        let (k3, s3) = f(z + k2 * (h / 2.0));
        let (k4, s4) = f(z + k3 * h);
        (
            z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0),
            (s1 + 2.0 * s2 + 2.0 * s3 + s4) * (h / 6.0),
        )
    }

    fn scale(&self) -> f64 {
        crate::invariants::escape_radius(&self.ex.poly)
    }

    /// Time of the `rot P` flow from `z` to the first separatrix.
    fn time_to_boundary(&self, z0: Complex64, rot: Complex64) -> Result<f64> {
        let h = STEP * self.scale();
        let mut z = z0;
        let mut s = 0.0;
        for _ in 0..MAX_STEPS {
            let (zn, ds) = self.step(z, rot, h);
            if self.hits_boundary(z, zn) {
                // bisect the last step
                let (mut lo, mut hi) = (0.0, h);
                for _ in 0..50 {
                    let mid = 0.5 * (lo + hi);
                    let (zm, _) = self.step(z, rot, mid);
                    if self.hits_boundary(z, zm) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let (_, ds) = self.step(z, rot, 0.5 * (lo + hi));
                return Ok(s + ds);
            }
            z = zn;
            s += ds;
        }
        Err(StrataError::numeric("transversal flow did not reach a separatrix"))
    }

    /// Flows `rot P` for rectified time `target` (>= 0).
    fn flow_for(&self, z0: Complex64, rot: Complex64, target: f64) -> Complex64 {
        let h = STEP * self.scale();
        let mut z = z0;
        let mut s = 0.0;
        loop {
            let (zn, ds) = self.step(z, rot, h);
            if s + ds >= target {
                let (mut lo, mut hi) = (0.0, h);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if self.step(z, rot, mid).1 < target - s {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return self.step(z, rot, 0.5 * (lo + hi)).0;
            }
            z = zn;
            s += ds;
        }
    }

    /// Moves `w` along `iP` to the midline of its strip; returns the new
    /// point and the signed time `sigma` with `t(mid) = t(w) + i sigma`.
    fn to_midline(&self, w: Complex64) -> Result<(Complex64, f64, f64)> {
        let i = Complex64::new(0.0, 1.0);
        let up = self.time_to_boundary(w, i)?;
        let down = self.time_to_boundary(w, -i)?;
        let sigma = 0.5 * (up - down);
        let m = if sigma >= 0.0 {
            self.flow_for(w, i, sigma)
        } else {
            self.flow_for(w, -i, -sigma)
        };
        Ok((m, sigma, up + down))
    }

    /// Real time from `a` to `b` along the real flow through `a`.
    fn real_time(&self, a: Complex64, b: Complex64) -> Result<Complex64> {
        let h = STEP * self.scale();
        for dir in [1.0, -1.0] {
            let rot = Complex64::new(dir, 0.0);
            let mut z = a;
            let mut s = 0.0;
            let mut best = (a - b).norm();
            for _ in 0..MAX_STEPS {
                let (zn, ds) = self.step(z, rot, h);
                let d = (zn - b).norm();
                if d > best && best < 10.0 * h {
                    // closest approach passed; correct with the local time
                    let v = self.ex.poly.eval(z);
                    return Ok(Complex64::new(dir * s, 0.0) + (b - z) / v);
                }
                best = best.min(d);
                z = zn;
                s += ds;
                if z.norm() > 4.0 * self.scale() || s > 1e6 {
                    break;
                }
                if self.ex.roots.iter().any(|r| (z - r.location).norm() < 1e-5) {
                    break;
                }
            }
        }
        Err(StrataError::numeric("midline flow missed the other end"))
    }
}

/// `int_w^infinity dz / P` along the ray through `w`.
fn tail(p: &crate::poly::RealPolyField<f64>, w: Complex64) -> Result<Complex64> {
    quad::integrate(
        |u: f64| {
            if u == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            w / (u * u) / p.eval(w / u)
        },
        0.0,
        1.0,
        1e-14,
        1e-12,
        2000,
    )
}

/// Point at radius `r` on the bisector of the end at circle position `c`.
pub fn end_point(k: usize, c: usize, r: f64) -> Complex64 {
    Complex64::from_polar(r, std::f64::consts::PI * (c as f64 - 0.5) / k as f64)
}

#[derive(Clone, Copy, Debug)]
pub struct FlowMeasurement {
    /// `t(inf_b) - t(inf_a)`, normalized to `Im > 0`.
    pub eta: Complex64,
    /// Strip heights measured independently from each end.
    pub height_a: f64,
    pub height_b: f64,
}

/// Flow-based transversal time of the zone containing the ends at circle
/// positions `a` and `b`.
pub fn flow_transversal_time(ex: &Extraction, a: usize, b: usize) -> Result<FlowMeasurement> {
    let walker = Walker::new(ex);
    let k = ex.poly.k();
    let r = walker.scale();
    let wa = end_point(k, a, r);
    let wb = end_point(k, b, r);
    let (tail_a, tail_b) = (tail(&ex.poly, wa)?, tail(&ex.poly, wb)?);
    // the vertical line through w itself passes next to infinity; first
    // move along the real flow into the part of the strip where the
    // boundary is traced. The shift cancels between the two ends.
    let shift = 4.0 * tail_a.norm().max(tail_b.norm());
    let one = Complex64::new(1.0, 0.0);
    let pa = walker.flow_for(wa, one, shift);
    let pb = walker.flow_for(wb, one, shift);
    let (ma, sa, ha) = walker.to_midline(pa)?;
    let (mb, sb, hb) = walker.to_midline(pb)?;
    let i = Complex64::new(0.0, 1.0);
    let t_mid = walker.real_time(ma, mb)?;
    // t(wb) - t(wa) = [t(mb) - i sb] - [t(ma) - i sa]
    let finite = t_mid - i * sb + i * sa;
    let mut eta = finite + tail_b - tail_a;
    if eta.im < 0.0 {
        eta = -eta;
    }
    Ok(FlowMeasurement {
        eta,
        height_a: ha,
        height_b: hb,
    })
}
