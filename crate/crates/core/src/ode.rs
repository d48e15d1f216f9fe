//! Embedded Dormand-Prince 5(4) integrator for autonomous complex ODEs
//! `z' = f(z)`.

use num_complex::Complex;

use crate::error::{Result, StrataError};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug)]
pub struct Dopri5Config<T> {
    pub rtol: T,
    pub atol: T,
    pub h_init: T,
    pub h_max: T,
    pub max_steps: usize,
    /// Integrate up to this time and stop.
    pub t_end: Option<T>,
}

impl<T: Scalar> Dopri5Config<T> {
    pub fn new(rtol: T, max_steps: usize) -> Self {
        Self {
            rtol,
            atol: rtol,
            h_init: T::lit(1e-2),
            h_max: T::infinity(),
            max_steps,
            t_end: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Copy, Debug)]
pub struct Trajectory<T> {
    pub end: Complex<T>,
    pub time: T,
    pub steps: usize,
    /// The observer asked to stop (as opposed to reaching `t_end`).
    pub stopped: bool,
}

struct Tableau<T> {
    a: [[T; 6]; 6],
    b: [T; 6],
    e: [T; 7],
}

fn tableau<T: Scalar>() -> Tableau<T> {
    let l = T::lit;
    let z = T::zero();
    Tableau {
        a: [
            [l(1.0 / 5.0), z, z, z, z, z],
            [l(3.0 / 40.0), l(9.0 / 40.0), z, z, z, z],
            [l(44.0 / 45.0), l(-56.0 / 15.0), l(32.0 / 9.0), z, z, z],
            [
                l(19372.0 / 6561.0),
                l(-25360.0 / 2187.0),
                l(64448.0 / 6561.0),
                l(-212.0 / 729.0),
                z,
                z,
            ],
            [
                l(9017.0 / 3168.0),
                l(-355.0 / 33.0),
                l(46732.0 / 5247.0),
                l(49.0 / 176.0),
                l(-5103.0 / 18656.0),
                z,
            ],
            [
                l(35.0 / 384.0),
                z,
                l(500.0 / 1113.0),
                l(125.0 / 192.0),
                l(-2187.0 / 6784.0),
                l(11.0 / 84.0),
            ],
        ],
        b: [
            l(35.0 / 384.0),
            z,
            l(500.0 / 1113.0),
            l(125.0 / 192.0),
            l(-2187.0 / 6784.0),
            l(11.0 / 84.0),
        ],
        e: [
            l(71.0 / 57600.0),
            z,
            l(-71.0 / 16695.0),
            l(71.0 / 1920.0),
            l(-17253.0 / 339200.0),
            l(22.0 / 525.0),
            l(-1.0 / 40.0),
        ],
    }
}

/// Integrates from `z0`, calling `observer(t, z)` after every accepted step.
pub fn integrate<T, F, O>(f: F, z0: Complex<T>, cfg: &Dopri5Config<T>, mut observer: O) -> Result<Trajectory<T>>
where
    T: Scalar,
    F: Fn(Complex<T>) -> Complex<T>,
    O: FnMut(T, Complex<T>) -> Control,
{
    let tab = tableau::<T>();
    let mut z = z0;
    let mut t = T::zero();
    let mut h = cfg.h_init.min(cfg.h_max);
    let mut k1 = f(z);
    let mut steps = 0usize;
    let mut rejects = 0usize;
    let h_floor = T::lit(1e3) * T::eps();
    loop {
        if let Some(te) = cfg.t_end {
            if t >= te {
                return Ok(Trajectory { end: z, time: t, steps, stopped: false });
            }
            if t + h > te {
                h = te - t;
            }
        }
        if steps >= cfg.max_steps {
            return Err(StrataError::not_generic(format!(
                "trajectory exceeded {} steps",
                cfg.max_steps
            )));
        }
        let mut k = [k1; 7];
        for s in 1..7 {
            let mut acc = z;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = tab.a[s - 1][j];
                if a != T::zero() {
                    acc += *kj * (h * a);
                }
            }
            k[s] = f(acc);
        }
        let mut z_new = z;
        for (j, kj) in k.iter().enumerate().take(6) {
            if tab.b[j] != T::zero() {
                z_new += *kj * (h * tab.b[j]);
            }
        }
        // k[6] is f at the 5th-order solution (first same as last)
        let mut err = Complex::new(T::zero(), T::zero());
        for (j, kj) in k.iter().enumerate() {
            if tab.e[j] != T::zero() {
                err += *kj * (h * tab.e[j]);
            }
        }
        let sc = cfg.atol + cfg.rtol * z.norm().max(z_new.norm());
        let en = err.norm() / sc;
        if !en.is_finite() || !z_new.re.is_finite() || !z_new.im.is_finite() {
            h = h * T::lit(0.25);
            rejects += 1;
            if h < h_floor || rejects > 10_000 {
                return Err(StrataError::numeric("integrator step size underflow"));
            }
            continue;
        }
        if en <= T::one() {
            t += h;
            z = z_new;
            k1 = k[6];
            steps += 1;
            if observer(t, z) == Control::Stop {
                return Ok(Trajectory { end: z, time: t, steps, stopped: true });
            }
            let fac = if en == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * en.powf(T::lit(-0.2))).min(T::lit(5.0))
            };
            h = (h * fac).min(cfg.h_max);
        } else {
            let fac = (T::lit(0.9) * en.powf(T::lit(-0.2))).max(T::lit(0.2));
            h = h * fac;
            rejects += 1;
            if h < h_floor {
                return Err(StrataError::numeric("integrator step size underflow"));
            }
        }
    }
}
