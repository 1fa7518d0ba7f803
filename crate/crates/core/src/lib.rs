//! Safe3Step ranking: Power Ratings from game scores, quality-win points,
//! and a head-to-head swap pass, plus a reference RPI for comparison.
//!
//! The pipeline is
//! [`parse_dataset`](ingest::parse_dataset) →
//! [`solve_ratings`](power_rating::solve_ratings) →
//! [`allocation_from_ratings`](power_rating::allocation_from_ratings) →
//! [`tally_all`](s3s_points::tally_all) →
//! [`rank`](ranking::rank).

pub mod error;
pub mod fixtures;
pub mod ingest;
pub mod power_rating;
pub mod ranking;
pub mod report;
pub mod rpi;
pub mod s3s_points;

pub use error::{Error, Result};
pub use ingest::{parse_dataset, schedule_components, Game, SeasonDataset, TeamId, Venue};
pub use power_rating::{
    allocation_from_ratings, neutral_margin, solve_ratings, HfaMode, RatingTable, SolverConfig,
};
pub use ranking::{head_to_head, rank, RankingList};
pub use rpi::{acc_ify, compute_rpi, perturb_and_compare, Method, RankDelta, RpiTable, RpiWeights};
pub use s3s_points::{normalize, tally_all, tally_team, AllocationTable, SeasonTally, TallyLine};
