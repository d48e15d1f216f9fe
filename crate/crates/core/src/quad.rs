//! Globally adaptive Gauss-Kronrod (7, 15) quadrature of complex-valued
//! functions on a finite interval.

use num_complex::Complex;

use crate::error::{Result, StrataError};
use crate::scalar::Scalar;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<T: Scalar, F: Fn(T) -> Complex<T>>(f: &F, a: T, b: T) -> (Complex<T>, T) {
    let c = (a + b) / T::lit(2.0);
    let hw = (b - a) / T::lit(2.0);
    let fc = f(c);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for i in 0..7 {
        let dx = hw * T::lit(XGK[i]);
        let s = f(c - dx) + f(c + dx);
        k += s * T::lit(WGK[i]);
        if i % 2 == 1 {
            g += s * T::lit(WG[i / 2]);
        }
    }
    ((k * hw), ((k - g) * hw).norm())
}

/// `int_a^b f` to `max(abs_tol, rel_tol |I|)`; errors after `max_intervals`
/// bisections without convergence.
pub fn integrate<T, F>(f: F, a: T, b: T, abs_tol: T, rel_tol: T, max_intervals: usize) -> Result<Complex<T>>
where
    T: Scalar,
    F: Fn(T) -> Complex<T>,
{
    let (v, e) = kronrod(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let mut total = Complex::new(T::zero(), T::zero());
        let mut err = T::zero();
        for p in &parts {
            total += p.2;
            err += p.3;
        }
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(StrataError::numeric("integrand is not finite"));
        }
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(total);
        }
        if parts.len() >= max_intervals {
            return Err(StrataError::numeric(format!(
                "quadrature did not converge (error estimate {})",
                err.to_f64_lossy()
            )));
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = (lo + hi) / T::lit(2.0);
        let (v1, e1) = kronrod(&f, lo, mid);
        let (v2, e2) = kronrod(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}
