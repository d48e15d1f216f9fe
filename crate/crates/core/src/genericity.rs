//! Genericity test for real polynomial vector fields.
//!
//! A field is generic when every root is simple and no nonreal root is a
//! center. Absence of every other homoclinic loop (a zone boundary through a
//! group of points) is detected during modulus extraction.

use num_complex::Complex;

use crate::config::Tolerances;
use crate::error::{Result, StrataError};
use crate::poly::RealPolyField;
use crate::roots::{find_roots, SingularPoint};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Violation<T: Scalar> {
    MultipleRoot { location: Complex<T>, multiplicity: usize },
    /// Nonreal root with purely imaginary eigenvalue, hence surrounded by
    /// homoclinic loops.
    Center { location: Complex<T>, eigenvalue: Complex<T> },
}

impl<T: Scalar> std::fmt::Display for Violation<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::MultipleRoot { location, multiplicity } => write!(
                f,
                "root {}{:+}i has multiplicity {multiplicity}",
                location.re, location.im
            ),
            Violation::Center { location, eigenvalue } => write!(
                f,
                "nonreal root {}{:+}i is a center (eigenvalue {}{:+}i)",
                location.re, location.im, eigenvalue.re, eigenvalue.im
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Genericity<T: Scalar> {
    pub generic: bool,
    pub violation: Option<Violation<T>>,
    pub roots: Vec<SingularPoint<T>>,
}

/// Checks the two generic conditions. Values that miss a violation only by
/// less than the configured margin produce a `NotGeneric` error rather than
/// a clean answer.
pub fn is_generic_real<T: Scalar>(p: &RealPolyField<T>, tol: &Tolerances) -> Result<Genericity<T>> {
    let roots = find_roots(p, tol)?;
    let clean = |v: Violation<T>, roots: Vec<SingularPoint<T>>| {
        Ok(Genericity {
            generic: false,
            violation: Some(v),
            roots,
        })
    };
    if let Some(r) = roots.iter().find(|r| r.multiplicity > 1) {
        let v = Violation::MultipleRoot {
            location: r.location,
            multiplicity: r.multiplicity,
        };
        return clean(v, roots);
    }
    let exact = T::lit(tol.exact_violation);
    let margin = T::lit(tol.generic_margin);
    for r in roots.iter().filter(|r| !r.is_real) {
        let rel = r.eigenvalue.re.abs() / r.eigenvalue.norm();
        if rel <= exact {
            let v = Violation::Center {
                location: r.location,
                eigenvalue: r.eigenvalue,
            };
            return clean(v, roots);
        }
        if rel <= margin {
            return Err(StrataError::not_generic(format!(
                "root {}{:+}i is within {} of a center",
                r.location.re,
                r.location.im,
                rel.to_f64_lossy()
            )));
        }
    }
    let band = T::lit(tol.separation_band);
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            let (a, b) = (roots[i].location, roots[j].location);
            let scale = T::one() + a.norm().max(b.norm());
            if (a - b).norm() < band * scale {
                return Err(StrataError::not_generic(format!(
                    "roots {}{:+}i and {}{:+}i are nearly colliding",
                    a.re, a.im, b.re, b.im
                )));
            }
        }
    }
    Ok(Genericity {
        generic: true,
        violation: None,
        roots,
    })
}
