//! Numerical tolerances, centralized so that every module uses the same
//! thresholds and callers can pass a modified copy explicitly.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Roots closer than `cluster_radius * (1 + |z|)` are merged into one
    /// multiple root.
    pub cluster_radius: f64,
    /// A root with `|Im z| < real_snap * (1 + |z|)` is declared real.
    pub real_snap: f64,
    /// Relative margin used by every "generic within tolerance" decision.
    pub generic_margin: f64,
    /// Below this relative size a violation is treated as exact rather than
    /// borderline.
    pub exact_violation: f64,
    /// Simple roots closer than `separation_band * (1 + |z|)` are too close
    /// to a parabolic point to classify.
    pub separation_band: f64,
    /// Iteration cap for the simultaneous root finder.
    pub root_max_iter: usize,
    /// Relative/absolute local error target of the separatrix integrator.
    pub trace_rtol: f64,
    /// Landing radius is `landing * (1 + |root|)`.
    pub landing: f64,
    /// Step budget per separatrix.
    pub trace_max_steps: usize,
    /// Residue-based and quadrature-based real periods must agree to this
    /// relative accuracy.
    pub period_agreement: f64,
    /// Sup-norm residual accepted by the realization solver.
    pub solver_tol: f64,
    /// Relative step of the central-difference modulus Jacobian.
    pub jacobian_step: f64,
    /// Relative band for the k = 3 bifurcation loci.
    pub locus_band: f64,
    /// Relative band for the quartic discriminant.
    pub discriminant_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cluster_radius: 1e-7,
            real_snap: 1e-9,
            generic_margin: 1e-7,
            exact_violation: 1e-12,
            separation_band: 1e-5,
            root_max_iter: 500,
            trace_rtol: 1e-10,
            landing: 1e-6,
            trace_max_steps: 200_000,
            period_agreement: 1e-6,
            solver_tol: 1e-11,
            jacobian_step: 1e-5,
            locus_band: 1e-7,
            discriminant_band: 1e-9,
        }
    }
}

impl Tolerances {
    /// Default tolerances with the solver acceptance threshold replaced.
    pub fn with_solver_tol(tol: f64) -> Self {
        Self {
            solver_tol: tol,
            ..Self::default()
        }
    }
}
