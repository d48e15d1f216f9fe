//! Separatrix tracing and the analytic modulus.

pub mod modulus;
pub mod trace;

pub use modulus::{
    extract, extract_combinatorial, extract_modulus, odd_link_ends, period_quadrature, period_r,
    transversal_time, Extraction, Modulus,
};
pub use trace::{escape_radius, trace_separatrices, SeparatrixTrace};
