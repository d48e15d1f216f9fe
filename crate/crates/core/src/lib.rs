//! Classification moduli of generic real polynomial vector fields
//! `P(z) d/dz` in the complex plane.
//!
//! The crate covers polynomial arithmetic and root finding, the
//! combinatorics of generic strata, extraction of the modulus
//! `(tau, eta)` from a polynomial, numerical realization of a prescribed
//! modulus and the bifurcation diagram in degree four.

pub mod bifurcation3;
pub mod combinatorics;
pub mod config;
pub mod error;
pub mod genericity;
pub mod invariants;
pub mod ode;
pub mod poly;
pub mod portrait;
pub mod quad;
pub mod realization;
pub mod roots;
pub mod scalar;
pub mod selfcheck;
pub mod unfold;

pub use combinatorics::{NonXInvolution, StratumDescriptor};
pub use config::Tolerances;
pub use error::{Result, StrataError};
pub use genericity::{is_generic_real, Genericity, Violation};
pub use invariants::{extract, extract_combinatorial, extract_modulus, period_r, transversal_time, Extraction, Modulus};
pub use poly::{normalize, AffineChange, RealPolyField};
pub use roots::{classify_eigenvalue, find_roots, residue_sum, PointKind, SingularPoint};
pub use scalar::Scalar;
pub use unfold::{unfold_parabolic, UnfoldingFamily};

/// Double-precision field, the type used by the analysis pipeline.
pub type Field = RealPolyField<f64>;
/// Single-precision field.
pub type Field32 = RealPolyField<f32>;
pub type Point = SingularPoint<f64>;
pub type Complex64 = num_complex::Complex<f64>;
