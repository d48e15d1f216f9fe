//! Numerical inversion of the modulus map on a stratum.
//!
//! The unknown is the coefficient vector `(e_{k-1}, ..., e_0)` and the
//! residual is the difference of real modulus coordinates. Iterates that
//! leave the target stratum are rejected like a failed line-search trial.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{predecessor, stratum_id, NonXInvolution, SuccessorKind};
use crate::config::Tolerances;
use crate::error::{Result, StrataError};
use crate::invariants::{extract, Modulus};
use crate::poly::RealPolyField;

/// Attempts of the randomized seed search.
const RANDOM_BUDGET: usize = 4000;
/// Smallest continuation step before giving up.
const MIN_CONTINUATION_STEP: f64 = 1.0 / 4096.0;
const MAX_NEWTON: usize = 40;

#[derive(Clone, Debug)]
pub struct RealizationProblem {
    pub target: Modulus,
    pub seed: RealPolyField<f64>,
    pub tolerances: Tolerances,
}

impl RealizationProblem {
    /// Validates the target and checks that the seed lies in its stratum.
    pub fn new(target: Modulus, seed: RealPolyField<f64>, tolerances: Tolerances) -> Result<Self> {
        target.validate()?;
        if seed.k() != target.k() {
            return Err(StrataError::invalid("seed and target have different k"));
        }
        let tau = extract(&seed, &tolerances)?.tau;
        if tau != target.tau {
            return Err(StrataError::invalid(format!(
                "seed lies in stratum {tau}, target in {}",
                target.tau
            )));
        }
        Ok(Self { target, seed, tolerances })
    }

    /// Uses [`seed_for_stratum`] for the seed.
    pub fn with_default_seed(target: Modulus, tolerances: Tolerances) -> Result<Self> {
        let seed = seed_for_stratum(&target.tau, &tolerances)?;
        Self::new(target, seed, tolerances)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RealizationResult {
    pub poly: RealPolyField<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub continuation_steps: usize,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Real modulus coordinates of `p`, or `None` if `p` is not a generic field
/// of stratum `tau`.
fn coords_in(p: &RealPolyField<f64>, tau: &NonXInvolution, tol: &Tolerances) -> Option<Vec<f64>> {
    let ex = extract(p, tol).ok()?;
    if &ex.tau != tau {
        return None;
    }
    ex.modulus(tol).ok().map(|m| m.real_coords())
}

fn field(k: usize, x: &[f64]) -> RealPolyField<f64> {
    RealPolyField::new(k, x.to_vec()).expect("finite coefficients")
}

fn verify(p: &RealPolyField<f64>, tau: &NonXInvolution, tol: &Tolerances) -> bool {
    matches!(extract(p, tol), Ok(ex) if &ex.tau == tau)
}

fn from_roots_scaled(roots: &[Complex64]) -> Option<RealPolyField<f64>> {
    let (p, _) = RealPolyField::from_roots(roots).ok()?;
    let big = roots.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    Some(if big > 0.0 { p.scaled(1.0 / big) } else { p })
}

fn real_roots(p: &RealPolyField<f64>, tol: &Tolerances) -> Option<Vec<Complex64>> {
    crate::roots::find_roots(p, tol)
        .ok()
        .map(|r| r.iter().map(|s| s.location).collect())
}

/// Some generic field of stratum `tau`, built by following the successor
/// construction from `z^2 -+ 1` and falling back to a randomized search.
pub fn seed_for_stratum(tau: &NonXInvolution, tol: &Tolerances) -> Result<RealPolyField<f64>> {
    if let Some(p) = constructed_seed(tau, tol) {
        return Ok(p);
    }
    random_seed_for_stratum(tau, crate::combinatorics::stratum_index(tau) as u64, tol)
}

fn constructed_seed(tau: &NonXInvolution, tol: &Tolerances) -> Option<RealPolyField<f64>> {
    let k = tau.k();
    if k == 1 {
        let c = if tau.ell() == 1 { 1.0 } else { -1.0 };
        return Some(RealPolyField::from_eps(&[c]).unwrap());
    }
    let (prev, kind) = predecessor(tau)?;
    let base = constructed_seed(&prev, tol).or_else(|| random_seed_for_stratum(&prev, 7, tol).ok())?;
    let roots = real_roots(&base, tol)?;
    let span = roots.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(0.5);
    let leftmost = roots
        .iter()
        .filter(|z| z.im == 0.0)
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    if !leftmost.is_finite() {
        return None;
    }
    match kind {
        SuccessorKind::RealPoint => {
            let cands = [1.0, 2.0, 0.5, 4.0].map(|gap| {
                let mut r = roots.clone();
                r.push(Complex64::new(leftmost - gap * span, 0.0));
                r
            });
            best_candidate(cands.iter(), tau, tol)
        }
        SuccessorKind::ConjugatePair => {
            let pos = roots.iter().position(|z| z.im == 0.0 && z.re == leftmost)?;
            let offsets = [(0.5, 0.5), (0.25, 1.0), (1.0, 1.0), (0.0, 0.5), (1.0, 0.3), (0.5, 2.0)];
            let cands = offsets.map(|(d, b)| {
                let mut r = roots.clone();
                r.remove(pos);
                let c = leftmost - d * span;
                r.push(Complex64::new(c, b * span));
                r.push(Complex64::new(c, -b * span));
                r
            });
            best_candidate(cands.iter(), tau, tol)
        }
    }
}

/// Among root configurations landing in `tau`, the one with the smallest
/// modulus coordinates; large transversal times mean nearly colliding roots.
fn best_candidate<'a>(
    cands: impl Iterator<Item = &'a Vec<Complex64>>,
    tau: &NonXInvolution,
    tol: &Tolerances,
) -> Option<RealPolyField<f64>> {
    let mut best: Option<(f64, RealPolyField<f64>)> = None;
    for r in cands {
        let Some(p) = from_roots_scaled(r) else { continue };
        let Some(c) = coords_in(&p, tau, tol) else { continue };
        let q = sup(&c);
        if best.as_ref().map_or(true, |(b, _)| q < *b) {
            best = Some((q, p));
        }
    }
    best.map(|(_, p)| p)
}

fn separated(r: &[Complex64], gap: f64) -> bool {
    r.iter()
        .enumerate()
        .all(|(i, a)| r[i + 1..].iter().all(|b| (a - b).norm() >= gap))
}

/// Random root configurations with the right number of real points, drawn
/// from a ChaCha stream seeded by `seed`, until one lands in `tau`.
pub fn random_seed_for_stratum(tau: &NonXInvolution, seed: u64, tol: &Tolerances) -> Result<RealPolyField<f64>> {
    let k = tau.k();
    let m = tau.m();
    let pairs = (k + 1 - m) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0000_u64.wrapping_mul(k as u64 + 1));
    for _ in 0..RANDOM_BUDGET {
        let mut r = Vec::with_capacity(k + 1);
        for _ in 0..m {
            r.push(Complex64::new(rng.gen_range(-2.0..2.0), 0.0));
        }
        for _ in 0..pairs {
            let c = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.15..2.0));
            r.push(c);
            r.push(c.conj());
        }
        if !separated(&r, 0.3) {
            continue;
        }
        if let Some(p) = from_roots_scaled(&r) {
            if verify(&p, tau, tol) {
                return Ok(p);
            }
        }
    }
    Err(StrataError::SeedFailure(stratum_id(tau)))
}

#[derive(Clone, Debug)]
pub struct ModulusJacobian {
    /// Row `i`, column `j`: derivative of real coordinate `i` with respect
    /// to the coefficient `e_{k-1-j}`.
    pub matrix: DMatrix<f64>,
    /// Smallest singular value after scaling every column to unit norm.
    pub min_singular_value: f64,
}

fn jacobian_at(
    x: &[f64],
    tau: &NonXInvolution,
    tol: &Tolerances,
) -> Result<DMatrix<f64>> {
    let k = x.len();
    let cols: Vec<Result<Vec<f64>>> = (0..k)
        .into_par_iter()
        .map(|j| {
            let mut h = tol.jacobian_step * (1.0 + x[j].abs());
            let min_h = 1e-4 * tol.jacobian_step * (1.0 + x[j].abs());
            while h >= min_h {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[j] += h;
                xm[j] -= h;
                if let (Some(fp), Some(fm)) = (coords_in(&field(k, &xp), tau, tol), coords_in(&field(k, &xm), tau, tol)) {
                    return Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect());
                }
                h *= 0.5;
            }
            Err(StrataError::BoundaryFailure(format!(
                "difference step for e_{} left the stratum",
                k - 1 - j
            )))
        })
        .collect();
    let mut jac = DMatrix::zeros(k, k);
    for (j, col) in cols.into_iter().enumerate() {
        for (i, v) in col?.into_iter().enumerate() {
            jac[(i, j)] = v;
        }
    }
    Ok(jac)
}

fn scaled_min_singular_value(j: &DMatrix<f64>) -> f64 {
    let mut s = j.clone();
    for mut c in s.column_iter_mut() {
        let n = c.norm();
        if n > 0.0 {
            c /= n;
        }
    }
    s.singular_values().iter().fold(f64::INFINITY, |a, &v| a.min(v))
}

/// Central-difference Jacobian of the real modulus coordinates with respect
/// to the coefficients.
pub fn modulus_jacobian(p: &RealPolyField<f64>, tol: &Tolerances) -> Result<ModulusJacobian> {
    let tau = extract(p, tol)?.tau;
    let matrix = jacobian_at(p.coeffs(), &tau, tol)?;
    let min_singular_value = scaled_min_singular_value(&matrix);
    Ok(ModulusJacobian { matrix, min_singular_value })
}

fn closed_form_k1(target: &Modulus, tol: &Tolerances) -> Result<RealizationResult> {
    let pi = std::f64::consts::PI;
    let c = match target.eta_r {
        Some(r) => (pi / r).powi(2),
        None => -(pi / target.eta_i[0]).powi(2),
    };
    let poly = RealPolyField::from_eps(&[c])?;
    let got = coords_in(&poly, &target.tau, tol)
        .ok_or_else(|| StrataError::numeric("closed form left the stratum"))?;
    let residual = (got[0] - target.real_coords()[0]).abs();
    Ok(RealizationResult {
        poly,
        residual,
        iterations: 0,
        continuation_steps: 0,
    })
}

enum NewtonOutcome {
    Converged { x: Vec<f64>, residual: f64, iterations: usize },
    Stalled { iterations: usize },
}

fn newton(
    x0: &[f64],
    y: &[f64],
    tau: &NonXInvolution,
    tol: &Tolerances,
    accept: f64,
) -> Result<NewtonOutcome> {
    let k = x0.len();
    let mut x = x0.to_vec();
    let residual_at = |x: &[f64]| -> Option<(Vec<f64>, f64)> {
        let c = coords_in(&field(k, x), tau, tol)?;
        let f: Vec<f64> = c.iter().zip(y).map(|(a, b)| a - b).collect();
        let r = sup(&f);
        Some((f, r))
    };
    let Some((mut f, mut r)) = residual_at(&x) else {
        return Ok(NewtonOutcome::Stalled { iterations: 0 });
    };
    for it in 0..MAX_NEWTON {
        if r <= accept {
            return Ok(NewtonOutcome::Converged { x, residual: r, iterations: it });
        }
        let jac = jacobian_at(&x, tau, tol)?;
        let smin = scaled_min_singular_value(&jac);
        if !(smin > 1e-12) {
            return Err(StrataError::Conditioning(format!(
                "smallest scaled singular value {smin:e}"
            )));
        }
        let rhs = -DVector::from_column_slice(&f);
        let dx = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| StrataError::Conditioning("singular modulus Jacobian".into()))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let xt: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + lambda * d).collect();
            if let Some((ft, rt)) = residual_at(&xt) {
                if rt <= (1.0 - 1e-4 * lambda) * r {
                    x = xt;
                    f = ft;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            if r <= accept {
                break;
            }
            return Ok(NewtonOutcome::Stalled { iterations: it + 1 });
        }
    }
    if r <= accept {
        Ok(NewtonOutcome::Converged { x, residual: r, iterations: MAX_NEWTON })
    } else {
        Ok(NewtonOutcome::Stalled { iterations: MAX_NEWTON })
    }
}

/// Finds the field with modulus `problem.target`: damped Newton from the
/// seed, and continuation along the segment from the seed's modulus to the
/// target when Newton stalls. k = 1 uses the closed forms.
pub fn realize(problem: &RealizationProblem) -> Result<RealizationResult> {
    let target = &problem.target;
    let tol = &problem.tolerances;
    let tau = &target.tau;
    target.validate()?;
    if target.k() == 1 {
        return closed_form_k1(target, tol);
    }
    let k = target.k();
    let y_end = target.real_coords();
    let x0 = problem.seed.coeffs().to_vec();
    let y0 = coords_in(&problem.seed, tau, tol)
        .ok_or_else(|| StrataError::invalid("seed is not in the target stratum"))?;
    // intermediate targets are solved loosely, the last one to solver_tol
    let loose = (1e3 * tol.solver_tol).max(1e-8);
    let mut total_iter = 0;
    let mut steps = 0;

    let mut x = x0;
    let mut t: f64 = 0.0;
    let mut dt: f64 = 1.0;
    loop {
        let t_next = (t + dt).min(1.0);
        let last = t_next >= 1.0;
        let y: Vec<f64> = y0.iter().zip(&y_end).map(|(a, b)| a + t_next * (b - a)).collect();
        let accept = if last { tol.solver_tol } else { loose };
        match newton(&x, &y, tau, tol, accept)? {
            NewtonOutcome::Converged { x: xn, residual, iterations } => {
                total_iter += iterations;
                x = xn;
                t = t_next;
                if last {
                    return Ok(RealizationResult {
                        poly: field(k, &x),
                        residual,
                        iterations: total_iter,
                        continuation_steps: steps,
                    });
                }
                steps += 1;
                dt = (2.0 * dt).min(1.0 - t);
            }
            NewtonOutcome::Stalled { iterations } => {
                total_iter += iterations;
                dt *= 0.5;
                if dt < MIN_CONTINUATION_STEP {
                    return Err(StrataError::BoundaryFailure(format!(
                        "continuation stalled at t = {t:.6} in stratum {}",
                        stratum_id(tau)
                    )));
                }
            }
        }
    }
}

/// Convenience wrapper: realize with the default seed.
pub fn realize_modulus(target: &Modulus, tol: &Tolerances) -> Result<RealizationResult> {
    realize(&RealizationProblem::with_default_seed(target.clone(), *tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::enumerate_strata;
    use crate::invariants::extract_modulus;
    use std::f64::consts::PI;

    #[test]
    fn k1_closed_forms() {
        let tol = Tolerances::default();
        let loop_tau = NonXInvolution::new(1, 1, vec![]).unwrap();
        let target = Modulus { tau: loop_tau, eta_h: vec![], eta_i: vec![], eta_r: Some(PI) };
        let r = realize_modulus(&target, &tol).unwrap();
        assert!((r.poly.coeffs()[0] - 1.0).abs() < 1e-12 && r.residual < 1e-8);
        let fix = NonXInvolution::new(1, 0, vec![1]).unwrap();
        let target = Modulus { tau: fix, eta_h: vec![], eta_i: vec![PI / 2.0], eta_r: None };
        let r = realize_modulus(&target, &tol).unwrap();
        assert!((r.poly.coeffs()[0] + 4.0).abs() < 1e-12);
    }

    #[test]
    fn seeds_land_in_their_strata() {
        let tol = Tolerances::default();
        for k in 1..=4 {
            for tau in enumerate_strata(k) {
                let p = seed_for_stratum(&tau, &tol).unwrap();
                assert_eq!(extract(&p, &tol).unwrap().tau, tau);
            }
        }
    }

    #[test]
    fn k1_jacobians() {
        let tol = Tolerances::default();
        let j = modulus_jacobian(&RealPolyField::from_eps(&[1.0]).unwrap(), &tol).unwrap();
        assert!((j.matrix[(0, 0)] + PI / 2.0).abs() < 1e-6);
        let j = modulus_jacobian(&RealPolyField::from_eps(&[-1.0]).unwrap(), &tol).unwrap();
        assert!((j.matrix[(0, 0)] - PI / 2.0).abs() < 1e-6);
    }

    #[test]
    fn k2_round_trip() {
        let tol = Tolerances::default();
        for tau in enumerate_strata(2) {
            let p = random_seed_for_stratum(&tau, 11, &tol).unwrap();
            let target = extract_modulus(&p, &tol).unwrap();
            let r = realize_modulus(&target, &tol).unwrap();
            let d = sup(&r.poly.coeffs().iter().zip(p.coeffs()).map(|(a, b)| a - b).collect::<Vec<_>>());
            assert!(d < 1e-6, "{tau}: {d}");
        }
    }
}
