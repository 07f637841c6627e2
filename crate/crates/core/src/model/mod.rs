//! Parameters, rating vectors, link functions and score laws.

mod config;
mod link;
mod params;
mod rating;
mod score;

pub use config::{ParamConfig, ScoreSetting};
pub use link::{ell_m, link_eval, LinkFunction, LinkKind};
pub use params::EloParams;
pub use rating::{RatingVector, TrueSkillVector, RECENTRE_TOL, ZERO_SUM_TOL};
pub use score::{score_sample, score_variance, ScoreKind, ScoreLaw, ScoreModel, CUSTOM_VALIDATION_DRAWS};

pub(crate) use rating::{euclidean_distance, recentre};
