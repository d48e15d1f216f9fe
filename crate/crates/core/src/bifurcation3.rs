//! The bifurcation diagram of `z^4 + e2 z^2 + e1 z + e0`.
//!
//! Bands are relative to the weighted size
//! `rho = max(1, |e2|^(1/2), |e1|^(1/3), |e0|^(1/4))`, so that the loci are
//! compared with quantities of the same weight under the zoom.

use num_traits::Num;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{stratum_id, NonXInvolution};
use crate::config::Tolerances;
use crate::error::{Result, StrataError};
use crate::genericity::is_generic_real;
use crate::invariants::extract;
use crate::poly::RealPolyField;
use crate::roots::find_roots;

fn int<T: Num + Copy>(n: u32) -> T {
    let mut acc = T::zero();
    let mut pow = T::one();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc + pow;
        }
        pow = pow + pow;
        n >>= 1;
    }
    acc
}

/// `256 e0^3 - 27 e1^4 + 144 e0 e1^2 e2 - 128 e0^2 e2^2 - 4 e1^2 e2^3 + 16 e0 e2^4`.
pub fn discriminant<T: Num + Copy>(e2: T, e1: T, e0: T) -> T {
    let e1_2 = e1 * e1;
    let e2_2 = e2 * e2;
    int::<T>(256) * e0 * e0 * e0 + int::<T>(144) * e0 * e1_2 * e2 + int::<T>(16) * e0 * e2_2 * e2_2
        - int::<T>(27) * e1_2 * e1_2
        - int::<T>(128) * e0 * e0 * e2_2
        - int::<T>(4) * e1_2 * e2_2 * e2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum K3Kind {
    Generic,
    RealParabolic,
    NonrealParabolicPair,
    HomoclinicPairM2,
    HomoclinicPairM0,
    HigherCodim,
}

impl K3Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            K3Kind::Generic => "generic",
            K3Kind::RealParabolic => "real-parabolic",
            K3Kind::NonrealParabolicPair => "nonreal-parabolic-pair",
            K3Kind::HomoclinicPairM2 => "homoclinic-pair-m2",
            K3Kind::HomoclinicPairM0 => "homoclinic-pair-m0",
            K3Kind::HigherCodim => "higher-codim",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct K3Label {
    pub kind: K3Kind,
    /// The stratum for generic points.
    pub tau: Option<NonXInvolution>,
    /// Real roots counted with multiplicity.
    pub m: usize,
    pub delta: f64,
    pub witnesses: Vec<String>,
}

impl K3Label {
    /// `generic(k3-<index>)` or the bifurcation tag.
    pub fn tag(&self) -> String {
        match &self.tau {
            Some(t) if self.kind == K3Kind::Generic => format!("generic({})", stratum_id(t)),
            _ => self.kind.as_str().to_string(),
        }
    }
}

pub fn weighted_scale(e2: f64, e1: f64, e0: f64) -> f64 {
    1f64.max(e2.abs().sqrt()).max(e1.abs().cbrt()).max(e0.abs().powf(0.25))
}

pub fn classify_k3(e2: f64, e1: f64, e0: f64, tol: &Tolerances) -> Result<K3Label> {
    if ![e2, e1, e0].iter().all(|x| x.is_finite()) {
        return Err(StrataError::invalid("coefficients must be finite"));
    }
    let p = RealPolyField::new(3, vec![e2, e1, e0])?;
    let rho = weighted_scale(e2, e1, e0);
    let band = tol.locus_band;
    let delta = discriminant(e2, e1, e0);
    let roots = find_roots(&p, tol)?;
    let m: usize = roots.iter().filter(|r| r.is_real).map(|r| r.multiplicity).sum();
    let multiple: Vec<_> = roots.iter().filter(|r| r.multiplicity > 1).collect();
    let label = |kind: K3Kind, witnesses: Vec<String>| K3Label {
        kind,
        tau: None,
        m,
        delta,
        witnesses,
    };
    let mut witnesses: Vec<String> = multiple
        .iter()
        .map(|r| format!("root {} of multiplicity {}", r.location, r.multiplicity))
        .collect();
    witnesses.push(format!("delta = {delta:e}"));

    let e1_zero = e1.abs() <= band * rho.powi(3);
    let e0_zero = e0.abs() <= band * rho.powi(4);
    let e2_zero = e2.abs() <= band * rho.powi(2);
    let disc2 = e2 * e2 - 4.0 * e0;
    let disc2_zero = disc2.abs() <= band * rho.powi(4);
    let delta_zero = delta.abs() <= tol.discriminant_band * rho.powi(12);

    if e1_zero {
        witnesses.push(format!("e1 = {e1:e} on the symmetric plane"));
        if e0_zero {
            if e2_zero {
                witnesses.push("quadruple root at the origin".into());
                return Ok(label(K3Kind::HigherCodim, witnesses));
            }
            if e2 > 0.0 {
                witnesses.push("real parabolic point at 0 with homoclinic loops".into());
                return Ok(label(K3Kind::HigherCodim, witnesses));
            }
            return Ok(label(K3Kind::RealParabolic, witnesses));
        }
        if e0 < 0.0 {
            return Ok(label(K3Kind::HomoclinicPairM2, witnesses));
        }
        if disc2_zero {
            if e2 > 0.0 {
                return Ok(label(K3Kind::NonrealParabolicPair, witnesses));
            }
            witnesses.push("two real double roots".into());
            return Ok(label(K3Kind::HigherCodim, witnesses));
        }
        if disc2 > 0.0 && e2 > 0.0 {
            return Ok(label(K3Kind::HomoclinicPairM0, witnesses));
        }
    }
    if delta_zero || !multiple.is_empty() {
        let real_multiple = multiple.iter().any(|r| r.is_real);
        if real_multiple && delta_zero {
            return Ok(label(K3Kind::RealParabolic, witnesses));
        }
        witnesses.push("discriminant and root clustering disagree".into());
        return Ok(label(K3Kind::HigherCodim, witnesses));
    }
    match is_generic_real(&p, tol) {
        Ok(g) if g.generic => {}
        Ok(g) => {
            if let Some(v) = g.violation {
                witnesses.push(v.to_string());
            }
            witnesses.push("center off the symmetric plane".into());
            return Ok(label(K3Kind::HigherCodim, witnesses));
        }
        Err(StrataError::NotGeneric(msg)) => {
            witnesses.push(msg);
            return Ok(label(K3Kind::HigherCodim, witnesses));
        }
        Err(e) => return Err(e),
    }
    match extract(&p, tol) {
        Ok(ex) => Ok(K3Label {
            kind: K3Kind::Generic,
            tau: Some(ex.tau),
            m,
            delta,
            witnesses: Vec::new(),
        }),
        Err(StrataError::NotGeneric(msg)) => {
            witnesses.push(msg);
            Ok(label(K3Kind::HigherCodim, witnesses))
        }
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabeledPoint {
    pub eps: [f64; 3],
    pub label: String,
    pub m: usize,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SampleSpec {
    /// `n^3` points of the cube `[lo, hi]^3`, endpoints included.
    Grid { lo: f64, hi: f64, n: usize },
    /// `n` uniform points of `[lo, hi]^3` from a ChaCha stream.
    Random { lo: f64, hi: f64, n: usize, seed: u64 },
    /// Directions on the unit sphere of `(e2, e1, e0)`; by the zoom
    /// `(e2, e1, e0) -> (r^2 e2, r^3 e1, r^4 e0)` every orbit meets this
    /// sphere once, so it shows the whole diagram.
    Sphere { n_theta: usize, n_phi: usize },
    /// `e0` from `lo` to `hi` in `n` equal steps at fixed `(e2, e1)`.
    Sweep { e2: f64, e1: f64, lo: f64, hi: f64, n: usize },
}

impl SampleSpec {
    pub fn points(&self) -> Vec<[f64; 3]> {
        match *self {
            SampleSpec::Grid { lo, hi, n } => {
                let at = |i: usize| if n <= 1 { lo } else { (lo * (n - 1 - i) as f64 + hi * i as f64) / (n - 1) as f64 };
                let mut v = Vec::with_capacity(n * n * n);
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            v.push([at(a), at(b), at(c)]);
                        }
                    }
                }
                v
            }
            SampleSpec::Random { lo, hi, n, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n)
                    .map(|_| [rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(lo..hi)])
                    .collect()
            }
            SampleSpec::Sphere { n_theta, n_phi } => {
                let mut v = Vec::with_capacity(n_theta * n_phi);
                for i in 0..n_theta {
                    let th = std::f64::consts::PI * (i as f64 + 0.5) / n_theta as f64;
                    for j in 0..n_phi {
                        let ph = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_phi as f64;
                        v.push([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
                    }
                }
                v
            }
            SampleSpec::Sweep { e2, e1, lo, hi, n } => (0..=n)
                .map(|i| [e2, e1, (lo * (n - i) as f64 + hi * i as f64) / n as f64])
                .collect(),
        }
    }
}

pub fn label_point(eps: [f64; 3], tol: &Tolerances) -> Result<LabeledPoint> {
    let l = classify_k3(eps[0], eps[1], eps[2], tol)?;
    Ok(LabeledPoint {
        eps,
        label: l.tag(),
        m: l.m,
        delta: l.delta,
    })
}

/// Labels every sample point, in the order of [`SampleSpec::points`].
pub fn sample_diagram(spec: &SampleSpec, tol: &Tolerances) -> Result<Vec<LabeledPoint>> {
    spec.points()
        .into_par_iter()
        .map(|e| label_point(e, tol))
        .collect()
}

/// The labels along a sweep with consecutive repeats merged.
pub fn label_sequence(points: &[LabeledPoint]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for p in points {
        if out.last() != Some(&p.label) {
            out.push(p.label.clone());
        }
    }
    out
}
