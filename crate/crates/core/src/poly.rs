//! Monic centered real polynomials `P(z) = z^{k+1} + e_{k-1} z^{k-1} + ... + e_0`
//! and the affine normalization that brings an arbitrary real polynomial to
//! that form.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StrataError};
use crate::scalar::Scalar;

/// The vector field `P(z) d/dz` for a monic centered real polynomial of
/// degree `k + 1`.
///
/// `coeffs` stores `(e_{k-1}, ..., e_1, e_0)`, highest degree first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldJson", into = "FieldJson")]
pub struct RealPolyField<T: Scalar> {
    k: usize,
    coeffs: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    k: usize,
    coeffs: Vec<f64>,
}

impl<T: Scalar> TryFrom<FieldJson> for RealPolyField<T> {
    type Error = StrataError;

    fn try_from(value: FieldJson) -> Result<Self> {
        let coeffs = value.coeffs.iter().map(|&c| T::lit(c)).collect();
        Self::new(value.k, coeffs)
    }
}

impl<T: Scalar> From<RealPolyField<T>> for FieldJson {
    fn from(value: RealPolyField<T>) -> Self {
        FieldJson {
            k: value.k,
            coeffs: value.coeffs.iter().map(|c| c.to_f64_lossy()).collect(),
        }
    }
}

impl<T: Scalar> RealPolyField<T> {
    pub fn new(k: usize, coeffs: Vec<T>) -> Result<Self> {
        if k == 0 {
            return Err(StrataError::invalid("codimension k must be at least 1"));
        }
        if coeffs.len() != k {
            return Err(StrataError::invalid(format!(
                "expected {k} coefficients (e_{{k-1}}..e_0), got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(StrataError::invalid("coefficients must be finite"));
        }
        Ok(Self { k, coeffs })
    }

    /// `z^(k+1) + e_0`-style constructor from `(e_{k-1}, ..., e_0)`; the
    /// codimension is the slice length.
    pub fn from_eps(coeffs: &[T]) -> Result<Self> {
        Self::new(coeffs.len(), coeffs.to_vec())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> usize {
        self.k + 1
    }

    /// `(e_{k-1}, ..., e_0)`.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `z^j` for `j < k`.
    pub fn eps(&self, j: usize) -> T {
        self.coeffs[self.k - 1 - j]
    }

    /// Ascending coefficients `a_0, ..., a_{k+1}` of the full polynomial.
    pub fn ascending(&self) -> Vec<T> {
        let mut a: Vec<T> = self.coeffs.iter().rev().copied().collect();
        a.push(T::zero());
        a.push(T::one());
        a
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc.max(c.abs()))
    }

    /// Horner evaluation of `P(z)`.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        // leading 1 and the absent z^k term fold into the starting value
        let mut acc = z;
        for &c in &self.coeffs {
            acc = acc * z + c;
        }
        acc
    }

    /// `(P(z), P'(z))` via a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let a = self.ascending();
        let zero = Complex::new(T::zero(), T::zero());
        let mut p = zero;
        let mut dp = zero;
        for &c in a.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn eval_real(&self, x: T) -> T {
        let mut acc = x;
        for &c in &self.coeffs {
            acc = acc * x + c;
        }
        acc
    }

    /// Upper bound for the rounding error of evaluating at `z`, proportional
    /// to `sum |a_j| |z|^j`.
    pub fn eval_noise(&self, z: Complex<T>) -> T {
        let r = z.norm();
        let mut acc = T::one();
        acc = acc * r; // z^k coefficient is zero
        for &c in &self.coeffs {
            acc = acc * r + c.abs();
        }
        acc * T::eps() * T::lit(4.0 * (self.k as f64 + 2.0))
    }

    /// Applies the zoom `z -> r z` (with time rescaled by `r^{-k}`), which maps
    /// `e_j` to `e_j r^{k+1-j}`.
    pub fn scaled(&self, r: T) -> Self {
        let coeffs = (0..self.k)
            .map(|idx| {
                let j = self.k - 1 - idx;
                self.coeffs[idx] * r.powi((self.k + 1 - j) as i32)
            })
            .collect();
        Self { k: self.k, coeffs }
    }

    /// Builds the monic polynomial with the given roots after translating
    /// them to have zero sum. Roots must be closed under conjugation.
    /// Returns the field and the translation that was subtracted.
    pub fn from_roots(roots: &[Complex<T>]) -> Result<(Self, T)> {
        let n = roots.len();
        if n < 2 {
            return Err(StrataError::invalid("need at least two roots"));
        }
        let mut sum = Complex::new(T::zero(), T::zero());
        for r in roots {
            sum += r;
        }
        let scale = roots.iter().fold(T::one(), |a, r| a.max(r.norm()));
        if sum.im.abs() > T::lit(1e-9) * scale * T::lit(n as f64) {
            return Err(StrataError::invalid("roots are not closed under conjugation"));
        }
        let shift = sum.re / T::lit(n as f64);
        let mut asc = vec![Complex::new(T::one(), T::zero())];
        for r in roots {
            let c = *r - shift;
            let mut next = vec![Complex::new(T::zero(), T::zero()); asc.len() + 1];
            for (i, &a) in asc.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * c;
            }
            asc = next;
        }
        for a in &asc {
            if a.im.abs() > T::lit(1e-8) * scale.powi(n as i32) {
                return Err(StrataError::invalid("roots are not closed under conjugation"));
            }
        }
        let k = n - 1;
        let coeffs = (0..k).rev().map(|j| asc[j].re).collect();
        Ok((Self::new(k, coeffs)?, shift))
    }

    pub fn to_f64(&self) -> RealPolyField<f64> {
        RealPolyField {
            k: self.k,
            coeffs: self.coeffs.iter().map(|c| c.to_f64_lossy()).collect(),
        }
    }
}

/// How a raw polynomial was mapped onto its normal form: the raw variable is
/// `z = shift + scale * w`, and the normalized field is the raw one
/// multiplied by a positive constant and, if `time_reversed`, by `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineChange<T> {
    pub shift: T,
    pub scale: T,
    pub time_reversed: bool,
}

impl<T: Scalar> AffineChange<T> {
    pub fn identity() -> Self {
        Self {
            shift: T::zero(),
            scale: T::one(),
            time_reversed: false,
        }
    }

    /// Maps a point of the normalized coordinate back to the raw coordinate.
    pub fn pull_back(&self, w: Complex<T>) -> Complex<T> {
        w * self.scale + self.shift
    }
}

/// Brings `a_{k+1} z^{k+1} + a_k z^k + ... + a_0` (coefficients highest
/// degree first) to the monic centered form.
///
/// When `k` is even and the leading coefficient is negative no real zoom can
/// make it `+1`; the result then carries `time_reversed = true` and the
/// returned polynomial is the normal form of `-P`.
pub fn normalize<T: Scalar>(raw: &[T]) -> Result<(RealPolyField<T>, AffineChange<T>)> {
    if raw.len() < 3 {
        return Err(StrataError::invalid(
            "need a polynomial of degree at least 2",
        ));
    }
    if raw.iter().any(|c| !c.is_finite()) {
        return Err(StrataError::invalid("coefficients must be finite"));
    }
    let lead = raw[0];
    if lead == T::zero() {
        return Err(StrataError::invalid("leading coefficient is zero"));
    }
    let n = raw.len() - 1;
    let k = n - 1;
    let shift = -raw[1] / (T::lit(n as f64) * lead);

    // Taylor shift: coefficients of p(w + shift), ascending.
    let mut asc: Vec<T> = raw.iter().rev().copied().collect();
    if shift != T::zero() {
        for i in 0..n {
            for j in (i..n).rev() {
                let add = asc[j + 1] * shift;
                asc[j] += add;
            }
        }
    }

    let mut time_reversed = false;
    let mag = lead.abs().powf(-T::one() / T::lit(k as f64));
    let scale = if lead > T::zero() {
        mag
    } else if k % 2 == 1 {
        -mag
    } else {
        time_reversed = true;
        mag
    };
    // e_j = (q_j / a) * scale^{j - k - 1}
    let coeffs = (0..k)
        .rev()
        .map(|j| {
            if scale == T::one() {
                asc[j] / lead
            } else {
                asc[j] / lead * scale.powi(j as i32 - (k as i32 + 1))
            }
        })
        .collect();
    let field = RealPolyField::new(k, coeffs)?;
    Ok((
        field,
        AffineChange {
            shift,
            scale,
            time_reversed,
        },
    ))
}

/// Dense complex polynomial helpers (ascending coefficients).
pub(crate) mod cpoly {
    use crate::scalar::Scalar;
    use num_complex::Complex;

    pub fn mul<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    pub fn add_assign<T: Scalar>(a: &mut Vec<Complex<T>>, b: &[Complex<T>]) {
        if a.len() < b.len() {
            a.resize(b.len(), Complex::new(T::zero(), T::zero()));
        }
        for (x, &y) in a.iter_mut().zip(b) {
            *x += y;
        }
    }

    pub fn scale<T: Scalar>(a: &[Complex<T>], c: Complex<T>) -> Vec<Complex<T>> {
        a.iter().map(|&x| x * c).collect()
    }

    /// `(z - c)^n`.
    pub fn binomial_power<T: Scalar>(c: Complex<T>, n: usize) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::one(), T::zero())];
        for _ in 0..n {
            out = mul(&out, &[-c, Complex::new(T::one(), T::zero())]);
        }
        out
    }
}
