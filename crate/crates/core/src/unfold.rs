//! Explicit unfolding of a nonreal parabolic pair inside the family of monic
//! centered real polynomials.
//!
//! For a root `z0 = a + ib` of multiplicity `s` and `l = k + 1 - 2s`,
//!
//! ```text
//! R(z)  = (z - z0)^s + sum_{j<s} (d_j + i h_j) (z - z0)^j
//! Q(z)  = Q*(z) - 2 d_{s-1} z^{l-1} + sum_{j<=l-2} m_j z^j
//! P_nu  = R * conj(R) * Q
//! ```
//!
//! where `conj(R)` conjugates coefficients and centre. When `l = 0` the root
//! is purely imaginary, `d_{s-1}` is dropped and `Q = 1`; the term of order
//! `s - 1` in `conj(R)` is `-i h_{s-1} (z + ib)^{s-1}`.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::config::Tolerances;
use crate::error::{Result, StrataError};
use crate::poly::{cpoly, RealPolyField};
use crate::roots::find_roots;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct UnfoldingFamily<T: Scalar> {
    pub base: RealPolyField<T>,
    pub parabolic_root: Complex<T>,
    pub multiplicity_s: usize,
    pub param_dim: usize,
    /// Ascending coefficients of the real cofactor `Q*` (degree `l`).
    q_star: Vec<T>,
}

/// Divides an ascending real polynomial by `z^2 + b1 z + b0`, returning the
/// quotient and the remainder's magnitude.
fn div_quadratic<T: Scalar>(p: &[T], b1: T, b0: T) -> (Vec<T>, T) {
    let n = p.len() - 1;
    let mut rem = p.to_vec();
    let mut quot = vec![T::zero(); n - 1];
    for d in (2..=n).rev() {
        let c = rem[d];
        quot[d - 2] = c;
        rem[d] = T::zero();
        rem[d - 1] -= c * b1;
        rem[d - 2] -= c * b0;
    }
    (quot, rem[0].abs().max(rem[1].abs()))
}

pub fn unfold_parabolic<T: Scalar>(
    base: &RealPolyField<T>,
    z0: Complex<T>,
    tol: &Tolerances,
) -> Result<UnfoldingFamily<T>> {
    let k = base.k();
    if k < 2 {
        return Err(StrataError::invalid("unfolding needs k >= 2"));
    }
    if z0.im.abs() <= T::lit(tol.real_snap) * (T::one() + z0.norm()) {
        return Err(StrataError::invalid("parabolic root must be nonreal"));
    }
    let roots = find_roots(base, tol)?;
    let nearest = roots
        .iter()
        .min_by(|a, b| {
            (a.location - z0)
                .norm()
                .partial_cmp(&(b.location - z0).norm())
                .unwrap()
        })
        .expect("at least two roots");
    if (nearest.location - z0).norm() > T::lit(1e-6) * (T::one() + z0.norm()) {
        return Err(StrataError::invalid("z0 is not a root of the base polynomial"));
    }
    let s = nearest.multiplicity;
    let ell = k + 1 - 2 * s;

    let mut q = base.ascending();
    let b1 = -(z0.re + z0.re);
    let b0 = z0.norm_sqr();
    let scale = T::one() + base.max_abs_coeff();
    for _ in 0..s {
        let (quot, rem) = div_quadratic(&q, b1, b0);
        if rem > T::lit(1e-6) * scale {
            return Err(StrataError::invalid("z0 does not divide the base polynomial"));
        }
        q = quot;
    }
    if ell == 0 && z0.re.abs() > T::lit(1e-9) * (T::one() + z0.norm()) {
        return Err(StrataError::invalid("base is not centered around z0"));
    }
    Ok(UnfoldingFamily {
        base: base.clone(),
        parabolic_root: z0,
        multiplicity_s: s,
        param_dim: k,
        q_star: q,
    })
}

impl<T: Scalar> UnfoldingFamily<T> {
    pub fn ell(&self) -> usize {
        self.base.k() + 1 - 2 * self.multiplicity_s
    }

    /// Parameter names in the order `at` expects them.
    pub fn param_names(&self) -> Vec<String> {
        let s = self.multiplicity_s;
        let ell = self.ell();
        let mut v = Vec::new();
        let nd = if ell == 0 { s - 1 } else { s };
        v.extend((0..nd).map(|j| format!("delta{j}")));
        v.extend((0..s).map(|j| format!("eta{j}")));
        if ell >= 2 {
            v.extend((0..ell - 1).map(|j| format!("mu{j}")));
        }
        v
    }

    /// The member of the family at parameter `nu`.
    pub fn at(&self, nu: &[T]) -> Result<RealPolyField<T>> {
        let k = self.base.k();
        if nu.len() != k {
            return Err(StrataError::invalid(format!(
                "expected {k} unfolding parameters, got {}",
                nu.len()
            )));
        }
        let s = self.multiplicity_s;
        let ell = self.ell();
        let z0 = self.parabolic_root;
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());

        let nd = if ell == 0 { s - 1 } else { s };
        let delta = &nu[..nd];
        let eta = &nu[nd..nd + s];
        let mu = &nu[nd + s..];

        let mut r = cpoly::binomial_power(z0, s);
        let mut rb = cpoly::binomial_power(z0.conj(), s);
        for j in 0..s {
            let d = if j < nd { delta[j] } else { T::zero() };
            let c = Complex::new(d, eta[j]);
            cpoly::add_assign(&mut r, &cpoly::scale(&cpoly::binomial_power(z0, j), c));
            cpoly::add_assign(
                &mut rb,
                &cpoly::scale(&cpoly::binomial_power(z0.conj(), j), c.conj()),
            );
        }
        let mut q: Vec<Complex<T>> = self.q_star.iter().map(|&c| Complex::new(c, T::zero())).collect();
        if ell >= 1 {
            q[ell - 1] -= one * (delta[s - 1] + delta[s - 1]);
            for (j, &m) in mu.iter().enumerate() {
                q[j] += one * m;
            }
        } else {
            q = vec![one];
        }
        let prod = cpoly::mul(&cpoly::mul(&r, &rb), &q);
        debug_assert_eq!(prod.len(), k + 2);
        let mag = prod.iter().fold(T::one(), |a, c| a.max(c.norm()));
        for c in &prod {
            if c.im.abs() > T::lit(1e-10) * mag {
                return Err(StrataError::numeric("unfolding produced a nonreal coefficient"));
            }
        }
        if (prod[k] - zero).norm() > T::lit(1e-10) * mag {
            return Err(StrataError::numeric("unfolding left the centered family"));
        }
        let coeffs = (0..k).rev().map(|j| prod[j].re).collect();
        RealPolyField::new(k, coeffs)
    }

    /// Central-difference Jacobian of `nu -> (e_{k-1}, ..., e_0)` at `nu = 0`.
    /// The map is a cubic polynomial in `nu`, so the truncation error is
    /// `O(h^2)`.
    pub fn coefficient_jacobian(&self) -> Result<DMatrix<f64>> {
        let k = self.base.k();
        let h = T::lit(1e-4);
        let mut jac = DMatrix::zeros(k, k);
        for col in 0..k {
            let mut plus = vec![T::zero(); k];
            let mut minus = vec![T::zero(); k];
            plus[col] = h;
            minus[col] = -h;
            let a = self.at(&plus)?;
            let b = self.at(&minus)?;
            for row in 0..k {
                let d = (a.coeffs()[row] - b.coeffs()[row]) / (h + h);
                jac[(row, col)] = d.to_f64_lossy();
            }
        }
        Ok(jac)
    }

    /// Smallest singular value of the coefficient Jacobian after scaling each
    /// column to unit length.
    pub fn min_scaled_singular_value(&self) -> Result<f64> {
        let mut jac = self.coefficient_jacobian()?;
        for mut col in jac.column_iter_mut() {
            let n = col.norm();
            if n > 0.0 {
                col /= n;
            }
        }
        let sv = jac.singular_values();
        Ok(sv.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Numerical rank at threshold `1e-6`.
    pub fn jacobian_rank(&self) -> Result<usize> {
        let mut jac = self.coefficient_jacobian()?;
        for mut col in jac.column_iter_mut() {
            let n = col.norm();
            if n > 0.0 {
                col /= n;
            }
        }
        Ok(jac.singular_values().iter().filter(|&&s| s > 1e-6).count())
    }
}
