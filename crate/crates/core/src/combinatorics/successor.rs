//! Passing from codimension `k` to `k + 1`.
//!
//! A new real point `z_s` is added to the far left of the real points. It
//! either stays real (the new end `k + 1` becomes a fixed point) or it joins
//! the leftmost real point `z_m` in a conjugate pair. In the second case the
//! largest fixed point `j` turns into the link `(j, k + 1)`, or, when `z_m`
//! was the only real point, the real axis becomes a homoclinic loop.

use crate::error::{Result, StrataError};

use super::involution::NonXInvolution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SuccessorKind {
    /// `z_s` added on the real axis.
    RealPoint,
    /// `z_m` and `z_s` moved to a conjugate pair.
    ConjugatePair,
}

pub fn successor(tau: &NonXInvolution, kind: SuccessorKind) -> Result<NonXInvolution> {
    if tau.ell() == 1 {
        return Err(StrataError::invalid(
            "successors are built from strata with real points",
        ));
    }
    let k = tau.k();
    let mut p = tau.pairing().to_vec();
    match kind {
        SuccessorKind::RealPoint => {
            p.push(k + 1);
            NonXInvolution::new(k + 1, 0, p)
        }
        SuccessorKind::ConjugatePair => match tau.fixed_points().last() {
            Some(&j) => {
                p[j - 1] = k + 1;
                p.push(j);
                NonXInvolution::new(k + 1, 0, p)
            }
            None => NonXInvolution::new(k + 1, 1, p),
        },
    }
}

/// Both successors of a stratum with real points.
pub fn successor_strata(tau: &NonXInvolution) -> Result<[NonXInvolution; 2]> {
    Ok([
        successor(tau, SuccessorKind::RealPoint)?,
        successor(tau, SuccessorKind::ConjugatePair)?,
    ])
}

/// Inverse of [`successor`]; `None` at `k = 1`.
pub fn predecessor(tau: &NonXInvolution) -> Option<(NonXInvolution, SuccessorKind)> {
    let k = tau.k();
    if k == 1 {
        return None;
    }
    let mut p = tau.pairing().to_vec();
    if tau.ell() == 1 {
        let prev = NonXInvolution::new(k - 1, 0, p).ok()?;
        return Some((prev, SuccessorKind::ConjugatePair));
    }
    let t = tau.apply(k);
    p.pop();
    if t == k {
        let prev = NonXInvolution::new(k - 1, 0, p).ok()?;
        Some((prev, SuccessorKind::RealPoint))
    } else {
        p[t - 1] = t;
        let prev = NonXInvolution::new(k - 1, 0, p).ok()?;
        Some((prev, SuccessorKind::ConjugatePair))
    }
}
