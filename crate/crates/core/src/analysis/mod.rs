//! Closed-form evaluations: positional and cell-averaged outage, worst-case
//! co-channel S/I, and DS-CDMA cell capacity.

mod capacity;
mod outage;
mod quadrature;
mod sir;

pub use capacity::{capacity_imperfect, capacity_perfect, CapacityParams};
pub use outage::{
    cell_averaged_outage, compare_literal_profile, outage_at, outage_profile_literal,
    spearman_rank_correlation, AnalysisParams, LiteralReading, ProfileForm, ProfilePoint,
};
pub use quadrature::adaptive_simpson;
pub use sir::{sir_from_distances, worst_case_distance_ratios, worst_case_sir_formula};
