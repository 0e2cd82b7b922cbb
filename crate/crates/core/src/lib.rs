//! Rank-calibrated conference reviewing.
//!
//! Review scores are noisy; authors know how their own papers compare. This
//! crate adjusts raw scores toward each author's reported internal ranking by
//! isotonic projection, selects award winners from the adjusted scores,
//! simulates whole conferences to measure how much the calibration helps, and
//! audits historical decision data for the convexity condition under which
//! reporting the truthful ranking is the authors' best strategy.
//!
//! Modules, bottom up:
//!
//! - [`score`]: validated score vectors and strict rankings.
//! - [`isotonic`]: projection onto the descending cone and onto the cone of
//!   a reported ranking.
//! - [`majorization`]: dominance predicates and T-transform chains.
//! - [`utility`]: author utility families and the flags (monotone, convex)
//!   that the incentive guarantees depend on.
//! - [`network`]: authorship networks and per-author rankings.
//! - [`mechanism`]: greedy partition into fully-owned blocks and the
//!   owner-averaged score adjustment.
//! - [`selection`]: award protocols on top of adjusted scores.
//! - [`synthesis`]: seeded generators for networks, qualities, reviews, and
//!   truthful rankings.
//! - [`simlab`]: sweep runner and Monte-Carlo verifiers.
//! - [`audit`]: empirical selection curves, ridge logistic fits, and the
//!   convexity report.
//! - [`io`]: CSV interchange with dense-id mapping.

pub mod audit;
pub mod error;
pub mod io;
pub mod isotonic;
pub mod majorization;
pub mod mechanism;
pub mod network;
pub mod score;
pub mod seeding;
pub mod selection;
pub mod simlab;
pub mod synthesis;
pub mod utility;

pub use error::{Error, Result};
pub use score::{Ranking, ScoreVector};
