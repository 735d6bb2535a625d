//! Funk distance on the interval, chains of projective maps and upper
//! bounds for the projective pseudo-distance.

mod axioms;
mod chain;
mod estimate;
mod funk;
mod shoot;

pub use axioms::{pseudo_distance_axioms_report, AxiomsReport, TriangleCheck, SLACK_FLOOR};
pub use chain::{chain_length, lemma2_chain, Chain, ChainSegment, SegmentKind, MATCH_TOL};
pub use estimate::{estimate_pseudo_distance, FamilyBound, PseudoDistanceEstimate, SearchBudget};
pub use funk::{funk_distance, funk_metric_1d, lemma2_length, FunkInterval};
pub use shoot::{shoot_geodesic, ShotGeodesic};
