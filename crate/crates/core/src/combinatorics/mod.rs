//! Exact combinatorics of the generic strata.

pub mod attachment;
pub mod counts;
pub mod dyck;
pub mod involution;
pub mod successor;

pub use attachment::{attachment_classes, PlaneTree, StratumDescriptor};
pub use counts::{binomial, catalan, count_d, count_dkm, dispersed_count};
pub use dyck::{
    all_dispersed, all_plain, dispersed_to_involution, dispersed_to_plain, involution_to_dispersed,
    plain_to_dispersed, DispersedDyckPath, Step,
};
pub use involution::{circle_position, end_label, enumerate_strata, stratum_id, stratum_index, NonXInvolution};
pub use successor::{predecessor, successor, successor_strata, SuccessorKind};
