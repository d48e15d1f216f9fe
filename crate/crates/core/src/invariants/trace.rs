//! Tracing the `2k` separatrices of the pole at infinity.
//!
//! `s_j` is tangent to `exp(i pi j / k)` at infinity. For even `j` it is an
//! outgoing separatrix (it reaches infinity in forward time) and is traced
//! with `-P`; for odd `j` it is incoming and is traced with `+P`. Both use
//! the bounded-speed field `P / (1 + |P|)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Result, StrataError};
use crate::ode::{integrate, Control, Dopri5Config};
use crate::poly::RealPolyField;
use crate::roots::SingularPoint;

#[derive(Clone, Debug, Serialize)]
pub struct SeparatrixTrace {
    pub index: usize,
    /// Polyline from the escape radius to the landing neighbourhood.
    pub points: Vec<Complex64>,
    /// Index into the root list, or `None` if the trace returned to infinity
    /// along the real axis (only when there are no real roots).
    pub landing: Option<usize>,
    /// Argument of the last point seen from the landing root.
    pub incoming_angle: Option<f64>,
}

pub fn escape_radius(p: &RealPolyField<f64>) -> f64 {
    (2.0 * (1.0 + p.max_abs_coeff())).max(2.0)
}

fn trace_one(
    p: &RealPolyField<f64>,
    roots: &[SingularPoint<f64>],
    j: usize,
    tol: &Tolerances,
) -> Result<SeparatrixTrace> {
    let k = p.k();
    let r = escape_radius(p);
    let start = if j == 0 {
        Complex64::new(r, 0.0)
    } else if j == k {
        Complex64::new(-r, 0.0)
    } else {
        Complex64::from_polar(r, std::f64::consts::PI * j as f64 / k as f64)
    };
    let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
    let field = |z: Complex64| {
        let v = p.eval(z);
        v * (sign / (1.0 + v.norm()))
    };
    let mut cfg = Dopri5Config::new(tol.trace_rtol, tol.trace_max_steps);
    cfg.atol = tol.trace_rtol * r;
    cfg.h_init = 1e-2 * r;
    cfg.h_max = 0.25 * r;

    let mut points = vec![start];
    let mut landing = None;
    let mut escaped = false;
    integrate(field, start, &cfg, |_, z| {
        points.push(z);
        for (i, root) in roots.iter().enumerate() {
            if (z - root.location).norm() < tol.landing * (1.0 + root.location.norm()) {
                landing = Some(i);
                return Control::Stop;
            }
        }
        if z.norm() > 2.0 * r {
            escaped = true;
            return Control::Stop;
        }
        Control::Continue
    })?;
    if escaped {
        let on_axis = (j == 0 || j == k) && roots.iter().all(|r| !r.is_real);
        if !on_axis {
            return Err(StrataError::not_generic(format!(
                "separatrix s_{j} returns to infinity"
            )));
        }
    }
    let incoming_angle = landing.map(|i| {
        let w = points.last().unwrap() - roots[i].location;
        w.arg()
    });
    Ok(SeparatrixTrace {
        index: j,
        points,
        landing,
        incoming_angle,
    })
}

/// Traces all `2k` separatrices. `roots` must be the sorted root list of `p`
/// (conjugate pairs exact), so that conjugate traces land on conjugate
/// roots.
pub fn trace_separatrices(
    p: &RealPolyField<f64>,
    roots: &[SingularPoint<f64>],
    tol: &Tolerances,
) -> Result<Vec<SeparatrixTrace>> {
    let k = p.k();
    let upper: Vec<SeparatrixTrace> = (0..=k)
        .into_par_iter()
        .map(|j| trace_one(p, roots, j, tol))
        .collect::<Result<Vec<_>>>()?;
    let conj_index = |i: usize| -> Result<usize> {
        let target = roots[i].location.conj();
        roots
            .iter()
            .position(|r| r.location == target)
            .ok_or_else(|| StrataError::numeric("root list is not conjugation closed"))
    };
    let mut all = upper.clone();
    for j in (k + 1)..(2 * k) {
        let src = &upper[2 * k - j];
        let landing = match src.landing {
            Some(i) => Some(conj_index(i)?),
            None => None,
        };
        all.push(SeparatrixTrace {
            index: j,
            points: src.points.iter().map(|z| z.conj()).collect(),
            landing,
            incoming_angle: src.incoming_angle.map(|a| -a),
        });
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::find_roots;

    #[test]
    fn quadratic_nodes() {
        let p = RealPolyField::from_eps(&[-1.0]).unwrap();
        let tol = Tolerances::default();
        let roots = find_roots(&p, &tol).unwrap();
        let tr = trace_separatrices(&p, &roots, &tol).unwrap();
        assert_eq!(tr.len(), 2);
        assert_eq!(roots[tr[0].landing.unwrap()].location.re, 1.0);
        assert_eq!(roots[tr[1].landing.unwrap()].location.re, -1.0);
        assert!(tr.iter().all(|t| t.points.iter().all(|z| z.im == 0.0)));
    }

    #[test]
    fn real_loop_does_not_land() {
        let p = RealPolyField::from_eps(&[1.0]).unwrap();
        let tol = Tolerances::default();
        let roots = find_roots(&p, &tol).unwrap();
        let tr = trace_separatrices(&p, &roots, &tol).unwrap();
        assert!(tr.iter().all(|t| t.landing.is_none()));
    }

    #[test]
    fn cubic_landing_classes() {
        let p = RealPolyField::from_eps(&[-1.0, 0.0]).unwrap();
        let tol = Tolerances::default();
        let roots = find_roots(&p, &tol).unwrap();
        let tr = trace_separatrices(&p, &roots, &tol).unwrap();
        let loc = |j: usize| roots[tr[j].landing.unwrap()].location.re;
        assert_eq!(loc(0), 1.0);
        assert_eq!(loc(2), -1.0);
        assert_eq!(loc(1), 0.0);
        assert_eq!(loc(3), 0.0);
        let first = tr[0].points[0].norm();
        assert!(first >= escape_radius(&p) - 1e-12);
    }
}
