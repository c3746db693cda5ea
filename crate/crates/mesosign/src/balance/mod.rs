mod frustration;
mod nmi;
mod triads;

pub use frustration::{
    frustration_report, overall_frustration, pairwise_frustration, FrustrationReport,
};
pub use nmi::nmi;
pub use triads::{
    blockmodel_dob_zscore, sign_shuffle_zscores, triad_census, DobZScore, MotifZScores,
    TriadCensus,
};
