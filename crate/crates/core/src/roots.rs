//! Simultaneous root finding (Aberth-Ehrlich) and singular-point data.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Result, StrataError};
use crate::poly::RealPolyField;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointKind {
    RadialNode,
    StrongFocus,
    Center,
    Parabolic,
}

impl PointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::RadialNode => "radial-node",
            PointKind::StrongFocus => "strong-focus",
            PointKind::Center => "center",
            PointKind::Parabolic => "parabolic",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularPoint<T: Scalar> {
    pub location: Complex<T>,
    pub multiplicity: usize,
    /// `P'` at the root; exactly zero for multiple roots.
    pub eigenvalue: Complex<T>,
    /// `Res(1/P, z)`.
    pub residue: Complex<T>,
    pub kind: PointKind,
    pub is_real: bool,
}

/// Type of a simple antisaddle from its eigenvalue.
///
/// `rel_tol` is the relative size below which a real or imaginary part is
/// treated as zero.
pub fn classify_eigenvalue<T: Scalar>(lambda: Complex<T>, rel_tol: T) -> Result<PointKind> {
    let a = lambda.norm();
    if a == T::zero() {
        return Err(StrataError::invalid(
            "zero eigenvalue: root is parabolic, use its multiplicity",
        ));
    }
    if lambda.re.abs() <= rel_tol * a {
        Ok(PointKind::Center)
    } else if lambda.im.abs() <= rel_tol * a {
        Ok(PointKind::RadialNode)
    } else {
        Ok(PointKind::StrongFocus)
    }
}

fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Raw Aberth-Ehrlich iteration; returns `k + 1` approximations.
fn aberth<T: Scalar>(p: &RealPolyField<T>, max_iter: usize) -> Result<Vec<Complex<T>>> {
    let n = p.degree();
    let asc = p.ascending();
    // Cauchy-type radius bound from the coefficients.
    let mut rho = T::zero();
    for (j, &a) in asc.iter().enumerate().take(n) {
        if a != T::zero() {
            rho = rho.max(a.abs().powf(T::one() / T::lit((n - j) as f64)));
        }
    }
    if rho == T::zero() {
        return Ok(vec![czero(); n]);
    }
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|j| {
            let th = T::lit(2.0 * std::f64::consts::PI * j as f64 / n as f64 + 0.4);
            Complex::from_polar(rho, th)
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, d) = p.eval_with_derivative(z[i]);
            if v.norm() <= p.eval_noise(z[i]) {
                done[i] = true;
                continue;
            }
            all = false;
            let ratio = v / d;
            let mut s = czero();
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > T::zero() {
                        s += diff.inv();
                    }
                }
            }
            let w = ratio / (Complex::new(T::one(), T::zero()) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                // derivative vanished away from a root: nudge
                let bump = T::lit(1e-3) * (T::one() + z[i].norm());
                z[i] += Complex::new(bump, bump);
                continue;
            }
            z[i] -= w;
            if w.norm() <= T::lit(4.0) * T::eps() * (T::one() + z[i].norm()) {
                done[i] = true;
            }
        }
        if all {
            return Ok(z);
        }
    }
    if done.iter().all(|&d| d) {
        return Ok(z);
    }
    Err(StrataError::numeric(format!(
        "root finder did not converge after {max_iter} iterations"
    )))
}

/// Roots of `P` with multiplicities, sorted by `(Im, Re)`.
pub fn find_roots<T: Scalar>(p: &RealPolyField<T>, tol: &Tolerances) -> Result<Vec<SingularPoint<T>>> {
    let raw = aberth(p, tol.root_max_iter)?;
    let n = raw.len();
    // tolerances never drop below what the working precision can resolve
    let cluster = T::lit(tol.cluster_radius).max(T::lit(1e3) * T::eps());

    // union-find clustering
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = T::one() + raw[i].norm().max(raw[j].norm());
            if (raw[i] - raw[j]).norm() <= cluster * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_of[r] == usize::MAX {
            root_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_of[r]].push(i);
    }

    let snap = T::lit(tol.real_snap).max(T::lit(1e2) * T::eps());
    let mut centers: Vec<(Complex<T>, usize)> = groups
        .iter()
        .map(|g| {
            let mut c = czero();
            for &i in g {
                c += raw[i];
            }
            c = c / T::lit(g.len() as f64);
            // a multiple root is only known to within its cluster's spread
            let spread = g.iter().fold(T::zero(), |a, &i| a.max((raw[i] - c).norm()));
            if c.im.abs() < (snap * (T::one() + c.norm())).max(spread) {
                c.im = T::zero();
            }
            (c, g.len())
        })
        .collect();

    // enforce exact conjugate pairs
    let mut upper: Vec<usize> = Vec::new();
    let mut lower: Vec<usize> = Vec::new();
    for (i, (c, _)) in centers.iter().enumerate() {
        if c.im > T::zero() {
            upper.push(i);
        } else if c.im < T::zero() {
            lower.push(i);
        }
    }
    if upper.len() != lower.len() {
        return Err(StrataError::numeric("roots are not closed under conjugation"));
    }
    let mut used = vec![false; lower.len()];
    for &u in &upper {
        let cu = centers[u].0;
        let mut best: Option<(usize, T)> = None;
        for (li, &l) in lower.iter().enumerate() {
            if used[li] || centers[l].1 != centers[u].1 {
                continue;
            }
            let d = (centers[l].0.conj() - cu).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((li, d));
            }
        }
        let (li, d) = best.ok_or_else(|| StrataError::numeric("unmatched conjugate root"))?;
        if d > T::lit(1e-6) * (T::one() + cu.norm()) {
            return Err(StrataError::numeric("conjugate roots disagree"));
        }
        used[li] = true;
        let l = lower[li];
        let sym = (cu + centers[l].0.conj()) / T::lit(2.0);
        centers[u].0 = sym;
        centers[l].0 = sym.conj();
    }

    // polish simple roots with one Newton step
    for (c, mult) in centers.iter_mut() {
        if *mult != 1 {
            continue;
        }
        let (v, d) = p.eval_with_derivative(*c);
        if d.norm() > T::zero() {
            let cand = *c - v / d;
            if p.eval(cand).norm() <= v.norm() {
                *c = cand;
            }
        }
    }
    // re-symmetrize after polishing
    let snapshot = centers.clone();
    for (c, _) in centers.iter_mut() {
        if c.im < T::zero() {
            let partner = snapshot
                .iter()
                .filter(|(o, _)| o.im > T::zero())
                .min_by(|a, b| {
                    (a.0.conj() - *c)
                        .norm()
                        .partial_cmp(&(b.0.conj() - *c).norm())
                        .unwrap()
                });
            if let Some((o, _)) = partner {
                *c = o.conj();
            }
        }
    }

    let mut out = Vec::with_capacity(centers.len());
    for (idx, &(c, mult)) in centers.iter().enumerate() {
        let is_real = c.im == T::zero();
        let (eigenvalue, residue, kind) = if mult == 1 {
            let (_, d) = p.eval_with_derivative(c);
            let lambda = if is_real { Complex::new(d.re, T::zero()) } else { d };
            let kind = if is_real {
                PointKind::RadialNode
            } else {
                classify_eigenvalue(lambda, T::lit(tol.generic_margin))?
            };
            (lambda, lambda.inv(), kind)
        } else {
            let others: Vec<(Complex<T>, usize)> = centers
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != idx)
                .map(|(_, &o)| o)
                .collect();
            (czero(), multiple_residue(c, mult, &others), PointKind::Parabolic)
        };
        out.push(SingularPoint {
            location: c,
            multiplicity: mult,
            eigenvalue,
            residue,
            kind,
            is_real,
        });
    }
    out.sort_by(|a, b| {
        a.location
            .im
            .partial_cmp(&b.location.im)
            .unwrap()
            .then(a.location.re.partial_cmp(&b.location.re).unwrap())
    });
    Ok(out)
}

/// `Res(1/P, z0)` for a root of multiplicity `s`, where `P = (z - z0)^s Q` and
/// `Q` has the roots `others`: the Taylor coefficient of order `s - 1` of
/// `1/Q` at `z0`.
fn multiple_residue<T: Scalar>(z0: Complex<T>, s: usize, others: &[(Complex<T>, usize)]) -> Complex<T> {
    // f = 1/Q, g = f'/f = -sum m_i/(z - z_i); f^{(n+1)} = sum C(n,j) f^{(j)} g^{(n-j)}
    let mut g = Vec::with_capacity(s);
    let mut fact = T::one();
    for order in 0..s {
        if order > 0 {
            fact *= T::lit(order as f64);
        }
        let mut acc = czero();
        for &(zi, mi) in others {
            let w = (z0 - zi).inv();
            let mut pw = w;
            for _ in 0..order {
                pw *= w;
            }
            acc += pw * T::lit(mi as f64);
        }
        // g^{(order)} = -(-1)^order order! sum m_i w^{order+1}
        let sign = if order % 2 == 0 { -T::one() } else { T::one() };
        g.push(acc * (sign * fact));
    }
    let mut q0 = Complex::new(T::one(), T::zero());
    for &(zi, mi) in others {
        for _ in 0..mi {
            q0 *= z0 - zi;
        }
    }
    let mut f = vec![q0.inv()];
    for n in 0..s.saturating_sub(1) {
        let mut acc = czero();
        let mut binom = T::one();
        for j in 0..=n {
            acc += f[j] * g[n - j] * binom;
            binom = binom * T::lit((n - j) as f64) / T::lit((j + 1) as f64);
        }
        f.push(acc);
    }
    let mut fac = T::one();
    for i in 1..s {
        fac *= T::lit(i as f64);
    }
    f[s - 1] / fac
}

/// `sum Res(1/P, z_j)` over all roots.
pub fn residue_sum<T: Scalar>(p: &RealPolyField<T>, tol: &Tolerances) -> Result<Complex<T>> {
    let roots = find_roots(p, tol)?;
    let mut s = czero();
    for r in &roots {
        s += r.residue;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(c: &[f64]) -> RealPolyField<f64> {
        RealPolyField::from_eps(c).unwrap()
    }

    #[test]
    fn quadratic_centers() {
        let r = find_roots(&field(&[1.0]), &Tolerances::default()).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].location - Complex::new(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1].eigenvalue - Complex::new(0.0, 2.0)).norm() < 1e-13);
        assert!(r.iter().all(|p| p.kind == PointKind::Center && !p.is_real));
        assert_eq!(r[0].location, r[1].location.conj());
    }

    #[test]
    fn quadratic_nodes() {
        let r = find_roots(&field(&[-1.0]), &Tolerances::default()).unwrap();
        assert_eq!(r[0].location, Complex::new(-1.0, 0.0));
        assert_eq!(r[1].eigenvalue, Complex::new(2.0, 0.0));
        assert!(r.iter().all(|p| p.kind == PointKind::RadialNode && p.is_real));
    }

    #[test]
    fn detects_double_root() {
        let r = find_roots(&field(&[1.0, 0.0, 0.0]), &Tolerances::default()).unwrap();
        assert_eq!(r.len(), 3);
        let zero = r.iter().find(|p| p.multiplicity == 2).unwrap();
        assert!(zero.location.norm() < 1e-7);
        assert_eq!(zero.kind, PointKind::Parabolic);
        // Res(1/(z^2 (z^2+1)), 0) = 0 and the simple ones are +-i/2... sum to zero
        assert!(zero.residue.norm() < 1e-9);
        assert_eq!(r.iter().map(|p| p.multiplicity).sum::<usize>(), 4);
    }

    #[test]
    fn two_real_double_roots() {
        let r = find_roots(&field(&[-2.0, 0.0, 1.0]), &Tolerances::default()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| x.is_real && x.multiplicity == 2));
    }

    #[test]
    fn double_nonreal_pair() {
        // (z^2 + 1)^2
        let r = find_roots(&field(&[2.0, 0.0, 1.0]), &Tolerances::default()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|p| p.multiplicity == 2));
        // Res(1/(z-i)^2 (z+i)^2, i) = d/dz (z+i)^{-2} at i = -2 (2i)^{-3} = -i/4
        let up = &r[1];
        assert!((up.residue - Complex::new(0.0, -0.25)).norm() < 1e-6);
    }

    #[test]
    fn eigenvalue_classes() {
        let t = 1e-7;
        assert_eq!(classify_eigenvalue(Complex::new(2.0, 0.0), t).unwrap(), PointKind::RadialNode);
        assert_eq!(classify_eigenvalue(Complex::new(0.0, 3.0), t).unwrap(), PointKind::Center);
        assert_eq!(classify_eigenvalue(Complex::new(1.0, 1.0), t).unwrap(), PointKind::StrongFocus);
        assert!(classify_eigenvalue(Complex::new(0.0, 0.0), t).is_err());
    }

    #[test]
    fn residues_and_sum() {
        let tol = Tolerances::default();
        let s = residue_sum(&field(&[1.0]), &tol).unwrap();
        assert!(s.norm() < 1e-15);
        let s = residue_sum(&field(&[1.0, 1.0, 1.0]), &tol).unwrap();
        assert!(s.norm() < 1e-10);
        for p in find_roots(&field(&[0.5, -2.0, 0.3, 1.0]), &tol).unwrap() {
            assert!((p.residue * p.eigenvalue - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn single_precision_roots() {
        let p = RealPolyField::<f32>::from_eps(&[-1.0]).unwrap();
        let r = find_roots(&p, &Tolerances::default()).unwrap();
        assert!((r[1].location.re - 1.0).abs() < 1e-6);
    }
}
