//! The modulus `(tau, eta)` of a generic field.
//!
//! Ends are keyed by the pair (landing of the outgoing bounding separatrix,
//! landing of the incoming one), i.e. by the alpha and omega points of the
//! zone they belong to, and the two ends of a zone share that key.
//!
//! The transversal time of the zone from end `c` to end `c'` (counter
//! clockwise) is `-2 pi i` times the sum of the residues of `1/P` at the
//! landing points of `s_c, ..., s_{c'-1}`: a path through the zone differs
//! from the path along the circle at infinity by loops around exactly those
//! points.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{attachment_classes, circle_position, end_label, NonXInvolution, StratumDescriptor};
use crate::config::Tolerances;
use crate::error::{Result, StrataError};
use crate::genericity::is_generic_real;
use crate::invariants::trace::{trace_separatrices, SeparatrixTrace};
use crate::poly::RealPolyField;
use crate::quad;
use crate::roots::SingularPoint;

#[derive(Clone, Debug)]
pub struct Extraction {
    pub poly: RealPolyField<f64>,
    pub roots: Vec<SingularPoint<f64>>,
    pub traces: Vec<SeparatrixTrace>,
    pub tau: NonXInvolution,
    pub descriptor: StratumDescriptor,
}

fn inconsistent(msg: impl Into<String>, traces: &[SeparatrixTrace]) -> StrataError {
    let landings: Vec<String> = traces
        .iter()
        .map(|t| format!("s_{}->{:?}", t.index, t.landing))
        .collect();
    StrataError::ExtractionInconsistency(format!("{}; landings: {}", msg.into(), landings.join(" ")))
}

/// Genericity check, tracing and recovery of the combinatorial invariant.
pub fn extract(p: &RealPolyField<f64>, tol: &Tolerances) -> Result<Extraction> {
    let k = p.k();
    let g = is_generic_real(p, tol)?;
    let roots = g.roots;
    let m = roots.iter().filter(|r| r.is_real).count();
    if !g.generic {
        // at k = 1 the center pair of z^2 + a^2 is forced by the real loop
        let forced = k == 1 && m == 0 && roots.iter().all(|r| r.multiplicity == 1);
        if !forced {
            let v = g.violation.map(|v| v.to_string()).unwrap_or_default();
            return Err(StrataError::not_generic(v));
        }
    }
    let traces = trace_separatrices(p, &roots, tol)?;
    let n = 2 * k;
    let land = |j: usize| traces[j % n].landing;

    let tau = if m > 0 {
        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for c in 0..n {
            let a = (c + n - 1) % n;
            let (even, odd) = if a % 2 == 0 { (a, c) } else { (c, a) };
            let key = (
                land(even).ok_or_else(|| inconsistent("separatrix did not land", &traces))?,
                land(odd).ok_or_else(|| inconsistent("separatrix did not land", &traces))?,
            );
            groups.entry(key).or_default().push(c);
        }
        let mut on_circle = vec![usize::MAX; n];
        for (key, ends) in &groups {
            if ends.len() != 2 {
                return Err(inconsistent(
                    format!("zone {key:?} has {} ends", ends.len()),
                    &traces,
                ));
            }
            on_circle[ends[0]] = ends[1];
            on_circle[ends[1]] = ends[0];
        }
        let mirror = |c: usize| (n - c + 1) % n;
        for c in 0..n {
            if on_circle[mirror(c)] != mirror(on_circle[c]) {
                return Err(inconsistent("pairing is not conjugation symmetric", &traces));
            }
        }
        let mut pairing = vec![0usize; k];
        for j in 1..=k {
            let t = end_label(k, on_circle[circle_position(k, j as i64)]);
            if t == -(j as i64) {
                pairing[j - 1] = j;
            } else if t > 0 {
                pairing[j - 1] = t as usize;
            } else {
                return Err(inconsistent(format!("end {j} linked to end {t}"), &traces));
            }
        }
        NonXInvolution::new(k, 0, pairing).map_err(|e| inconsistent(e.to_string(), &traces))?
    } else if k == 1 {
        NonXInvolution::new(1, 1, vec![]).expect("k = 1 loop stratum")
    } else {
        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for c in 2..k {
            let a = c - 1;
            let (even, odd) = if a % 2 == 0 { (a, c) } else { (c, a) };
            let key = (
                land(even).ok_or_else(|| inconsistent("separatrix did not land", &traces))?,
                land(odd).ok_or_else(|| inconsistent("separatrix did not land", &traces))?,
            );
            groups.entry(key).or_default().push(c);
        }
        let loop_key = (
            land(k - 1).ok_or_else(|| inconsistent("s_(k-1) did not land", &traces))?,
            land(1).ok_or_else(|| inconsistent("s_1 did not land", &traces))?,
        );
        let mut pairing = vec![0usize; k - 1];
        for (key, ends) in &groups {
            match ends.len() {
                2 => {
                    pairing[ends[0] - 1] = ends[1];
                    pairing[ends[1] - 1] = ends[0];
                }
                1 if *key == loop_key && pairing[0] == 0 => {
                    pairing[0] = ends[0];
                    pairing[ends[0] - 1] = 1;
                }
                _ => {
                    return Err(inconsistent(format!("zone {key:?} has ends {ends:?}"), &traces));
                }
            }
        }
        if k == 2 || pairing.iter().any(|&t| t == 0) {
            return Err(inconsistent("ends left unpaired", &traces));
        }
        NonXInvolution::new(k, 1, pairing).map_err(|e| inconsistent(e.to_string(), &traces))?
    };

    let descriptor = attachment_classes(&tau).map_err(|e| inconsistent(e.to_string(), &traces))?;
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for t in &traces {
        if let Some(i) = t.landing {
            by_root.entry(i).or_default().push(t.index);
        }
    }
    let mut observed: Vec<Vec<usize>> = by_root.into_values().collect();
    observed.sort();
    let expected: Vec<Vec<usize>> = descriptor.classes.iter().filter(|c| !c.is_empty()).cloned().collect();
    if observed != expected {
        return Err(inconsistent(
            format!("landing classes {observed:?} differ from {expected:?}"),
            &traces,
        ));
    }
    Ok(Extraction {
        poly: p.clone(),
        roots,
        traces,
        tau,
        descriptor,
    })
}

pub fn extract_combinatorial(p: &RealPolyField<f64>, tol: &Tolerances) -> Result<NonXInvolution> {
    Ok(extract(p, tol)?.tau)
}

impl Extraction {
    /// Transversal time of the zone running counterclockwise from the end at
    /// circle position `c` to the end at `c2`, normalized to `Im > 0`.
    pub fn zone_time(&self, c: usize, c2: usize, tol: &Tolerances) -> Result<Complex64> {
        let n = 2 * self.poly.k();
        let mut set = std::collections::BTreeSet::new();
        let mut i = c % n;
        while i != c2 % n {
            if let Some(r) = self.traces[i].landing {
                set.insert(r);
            }
            i = (i + 1) % n;
        }
        let mut s = Complex64::new(0.0, 0.0);
        for &r in &set {
            s += self.roots[r].residue;
        }
        let mut eta = Complex64::new(0.0, -2.0 * std::f64::consts::PI) * s;
        if eta.im < 0.0 {
            eta = -eta;
        }
        if !(eta.im > tol.generic_margin * eta.norm()) {
            return Err(StrataError::not_generic(format!(
                "zone ({c}, {c2}) is nearly degenerate (eta = {eta})"
            )));
        }
        Ok(eta)
    }

    /// Transversal time of the zone bounded by the signed ends `j` and
    /// `tau(j)`.
    pub fn transversal_time(&self, j: i64, tol: &Tolerances) -> Result<Complex64> {
        let k = self.poly.k();
        let ell = self.tau.ell() as usize;
        if j == 0 || j.unsigned_abs() as usize > k - ell {
            return Err(StrataError::invalid(format!("end {j} is not in the domain of tau")));
        }
        let r = j.unsigned_abs() as usize;
        if self.tau.apply(r) == r {
            // symmetric zone r <-> -r: from position r to 2k - r + 1
            let eta = self.zone_time(r, 2 * k - r + 1, tol)?;
            return project_imaginary(eta);
        }
        let (a, b) = (circle_position(k, j), circle_position(k, self.tau.extended(j)));
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.zone_time(lo, hi, tol)
    }

    /// `eta_R` for fields without real roots.
    pub fn period(&self, tol: &Tolerances) -> Result<f64> {
        if self.roots.iter().any(|r| r.is_real) {
            return Err(StrataError::invalid("the real axis is not a loop"));
        }
        period_from_roots(&self.poly, &self.roots, tol)
    }
}

fn project_imaginary(eta: Complex64) -> Result<Complex64> {
    if eta.re.abs() < 1e-7 * eta.norm() {
        Ok(Complex64::new(0.0, eta.im))
    } else {
        Err(StrataError::not_generic(format!(
            "symmetric transversal time {eta} is not imaginary"
        )))
    }
}

fn period_from_roots(p: &RealPolyField<f64>, roots: &[SingularPoint<f64>], tol: &Tolerances) -> Result<f64> {
    let mut s = Complex64::new(0.0, 0.0);
    for r in roots.iter().filter(|r| r.location.im > 0.0) {
        s += r.residue;
    }
    let by_residue = (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * s).re;
    let by_quad = period_quadrature(p, roots)?;
    if (by_residue - by_quad).abs() > tol.period_agreement * by_residue.abs() {
        return Err(StrataError::numeric(format!(
            "period by residues {by_residue} and by quadrature {by_quad} disagree"
        )));
    }
    if by_residue <= 0.0 {
        return Err(StrataError::numeric("period is not positive"));
    }
    Ok(by_residue)
}

/// `int_R dx / P(x)` after the substitution `x = c tan(theta)`.
pub fn period_quadrature(p: &RealPolyField<f64>, roots: &[SingularPoint<f64>]) -> Result<f64> {
    let c = 1.0 + roots.iter().fold(0.0f64, |a, r| a.max(r.location.norm()));
    let f = |th: f64| {
        let x = c * th.tan();
        let cs = th.cos();
        Complex64::new(c / (p.eval_real(x) * cs * cs), 0.0)
    };
    let h = std::f64::consts::FRAC_PI_2;
    Ok(quad::integrate(f, -h, h, 1e-14, 1e-11, 4000)?.re)
}

/// Period of `P` (no real roots) by residues, cross-checked by quadrature.
pub fn period_r(p: &RealPolyField<f64>, tol: &Tolerances) -> Result<f64> {
    let roots = crate::roots::find_roots(p, tol)?;
    if roots.iter().any(|r| r.is_real) {
        return Err(StrataError::invalid("period_r needs a field without real roots"));
    }
    period_from_roots(p, &roots, tol)
}

/// Transversal time of the zone bounded by the ends `j` and `tau(j)`.
pub fn transversal_time(p: &RealPolyField<f64>, j: i64, tol: &Tolerances) -> Result<Complex64> {
    extract(p, tol)?.transversal_time(j, tol)
}

/// The analytic coordinates in their canonical order: upper zones indexed
/// by increasing odd non-fixed end, then symmetric zones by increasing fixed
/// point, then the period of the real loop.
#[derive(Clone, Debug, PartialEq)]
pub struct Modulus {
    pub tau: NonXInvolution,
    pub eta_h: Vec<Complex64>,
    /// Imaginary parts of the symmetric transversal times.
    pub eta_i: Vec<f64>,
    pub eta_r: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModulusJson {
    tau: NonXInvolution,
    #[serde(rename = "eta_H", default)]
    eta_h: Vec<[f64; 2]>,
    #[serde(rename = "eta_I", default)]
    eta_i: Vec<f64>,
    #[serde(rename = "eta_R", default)]
    eta_r: Option<f64>,
}

impl Serialize for Modulus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModulusJson {
            tau: self.tau.clone(),
            eta_h: self.eta_h.iter().map(|z| [z.re, z.im]).collect(),
            eta_i: self.eta_i.clone(),
            eta_r: self.eta_r,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Modulus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ModulusJson::deserialize(d)?;
        let m = Modulus {
            tau: raw.tau,
            eta_h: raw.eta_h.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
            eta_i: raw.eta_i,
            eta_r: raw.eta_r,
        };
        m.validate().map_err(serde::de::Error::custom)?;
        Ok(m)
    }
}

/// Odd endpoints of the links of `tau`, increasing; each link has exactly
/// one.
pub fn odd_link_ends(tau: &NonXInvolution) -> Vec<usize> {
    (1..=tau.domain_len())
        .filter(|&q| q % 2 == 1 && tau.apply(q) != q)
        .collect()
}

impl Modulus {
    pub fn k(&self) -> usize {
        self.tau.k()
    }

    pub fn validate(&self) -> Result<()> {
        let h = odd_link_ends(&self.tau).len();
        let i = self.tau.fixed_points().len();
        if self.eta_h.len() != h || self.eta_i.len() != i {
            return Err(StrataError::invalid(format!(
                "modulus needs {h} upper and {i} symmetric transversal times"
            )));
        }
        if self.eta_r.is_some() != (self.tau.ell() == 1) {
            return Err(StrataError::invalid("eta_R is present exactly when ell = 1"));
        }
        if self.eta_h.iter().any(|z| !(z.im > 0.0) || !z.re.is_finite()) {
            return Err(StrataError::invalid("upper transversal times need Im > 0"));
        }
        if self.eta_i.iter().any(|&y| !(y > 0.0) || !y.is_finite()) {
            return Err(StrataError::invalid("symmetric transversal times need Im > 0"));
        }
        if let Some(r) = self.eta_r {
            if !(r > 0.0) || !r.is_finite() {
                return Err(StrataError::invalid("the period must be positive"));
            }
        }
        if self.real_dimension() != self.k() {
            return Err(StrataError::invalid("modulus dimension differs from k"));
        }
        Ok(())
    }

    pub fn real_dimension(&self) -> usize {
        2 * self.eta_h.len() + self.eta_i.len() + self.eta_r.is_some() as usize
    }

    /// `(Re h_1, Im h_1, ..., i_1, ..., r)`.
    pub fn real_coords(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.k());
        for z in &self.eta_h {
            v.push(z.re);
            v.push(z.im);
        }
        v.extend_from_slice(&self.eta_i);
        if let Some(r) = self.eta_r {
            v.push(r);
        }
        v
    }

    pub fn from_real_coords(tau: &NonXInvolution, x: &[f64]) -> Result<Self> {
        let h = odd_link_ends(tau).len();
        let i = tau.fixed_points().len();
        let need = 2 * h + i + tau.ell() as usize;
        if x.len() != need {
            return Err(StrataError::invalid("wrong number of modulus coordinates"));
        }
        let m = Modulus {
            tau: tau.clone(),
            eta_h: (0..h).map(|q| Complex64::new(x[2 * q], x[2 * q + 1])).collect(),
            eta_i: x[2 * h..2 * h + i].to_vec(),
            eta_r: (tau.ell() == 1).then(|| x[need - 1]),
        };
        Ok(m)
    }

    /// All transversal times as complex numbers, upper zones first.
    pub fn imaginary_count(&self) -> usize {
        self.eta_h.iter().filter(|z| z.re.abs() <= 1e-7 * z.norm()).count() + self.eta_i.len()
    }
}

impl Extraction {
    pub fn modulus(&self, tol: &Tolerances) -> Result<Modulus> {
        let tau = &self.tau;
        let eta_h = odd_link_ends(tau)
            .into_iter()
            .map(|q| self.transversal_time(q as i64, tol))
            .collect::<Result<Vec<_>>>()?;
        let eta_i = tau
            .fixed_points()
            .into_iter()
            .map(|r| self.transversal_time(r as i64, tol).map(|z| z.im))
            .collect::<Result<Vec<_>>>()?;
        let eta_r = if tau.ell() == 1 { Some(self.period(tol)?) } else { None };
        let m = Modulus {
            tau: tau.clone(),
            eta_h,
            eta_i,
            eta_r,
        };
        m.validate()?;
        Ok(m)
    }
}

pub fn extract_modulus(p: &RealPolyField<f64>, tol: &Tolerances) -> Result<Modulus> {
    extract(p, tol)?.modulus(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn f(c: &[f64]) -> RealPolyField<f64> {
        RealPolyField::from_eps(c).unwrap()
    }

    #[test]
    fn quadratic_moduli() {
        let tol = Tolerances::default();
        let m = extract_modulus(&f(&[1.0]), &tol).unwrap();
        assert_eq!(m.tau.ell(), 1);
        assert!((m.eta_r.unwrap() - PI).abs() < 1e-12);
        let m = extract_modulus(&f(&[-1.0]), &tol).unwrap();
        assert_eq!(m.tau.fixed_points(), vec![1]);
        assert!((m.eta_i[0] - PI).abs() < 1e-12);
        let m = extract_modulus(&f(&[-4.0]), &tol).unwrap();
        assert!((m.eta_i[0] - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn periods() {
        let tol = Tolerances::default();
        assert!((period_r(&f(&[4.0]), &tol).unwrap() - PI / 2.0).abs() < 1e-12);
        // (z^2 + 1)(z^2 + 4)
        let p = period_r(&f(&[5.0, 0.0, 4.0]), &tol).unwrap();
        assert!((p - PI / 6.0).abs() < 1e-12);
        assert!(period_r(&f(&[-1.0]), &tol).is_err());
    }

    #[test]
    fn cubic_three_nodes() {
        let tol = Tolerances::default();
        let ex = extract(&f(&[-1.0, 0.0]), &tol).unwrap();
        assert_eq!(ex.tau.pairing(), &[1, 2]);
        assert_eq!(ex.descriptor.classes, vec![vec![0], vec![1, 3], vec![2]]);
    }

    #[test]
    fn quartic_with_focus_pair() {
        let tol = Tolerances::default();
        let (p, _) = RealPolyField::from_roots(&[
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.2, 0.0),
            Complex64::new(-0.1, 2.0),
            Complex64::new(-0.1, -2.0),
        ])
        .unwrap();
        let ex = extract(&p, &tol).unwrap();
        assert_eq!(ex.tau.m(), 2);
        assert_eq!(ex.tau.fixed_points().len(), 1);
        assert_eq!(ex.tau.arcs().len(), 1);
        let m = ex.modulus(&tol).unwrap();
        assert_eq!(m.real_dimension(), 3);
    }

    #[test]
    fn refuses_non_generic() {
        let tol = Tolerances::default();
        assert!(matches!(extract(&f(&[3.0, 0.0, -4.0]), &tol), Err(StrataError::NotGeneric(_))));
        assert!(matches!(extract(&f(&[1.0, 0.0, 0.0]), &tol), Err(StrataError::NotGeneric(_))));
    }

    #[test]
    fn json_round_trip() {
        let tol = Tolerances::default();
        let m = extract_modulus(&f(&[-1.0, 0.0]), &tol).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: Modulus = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let s = r#"{"tau":{"k":1,"ell":0,"fixed":[1]},"eta_I":[3.14159265]}"#;
        let m: Modulus = serde_json::from_str(s).unwrap();
        assert_eq!(m.eta_r, None);
    }
}
