//! Rapidly-exploring random tree planners for bounded 2D worlds with
//! rectangular obstacles, including a narrow-channel variant (NCRRT) that
//! biases sampling towards thin free corridors, and a seeded benchmark
//! harness for comparing them.
//!
//! Geometry and planners are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common cases.

pub mod bench;
pub mod error;
pub mod planners;
pub mod rng;
pub mod samplers;
pub mod scalar;
pub mod space;
pub mod tree;

pub use bench::{
    classify_short, make_histogram, run_campaign, run_campaign_detailed, summarize, Histogram,
    SummaryStats, TrialRecord,
};
pub use error::{Error, Result};
pub use planners::{
    extend, new_state, plan, ExtendResult, PlanOutcome, PlannerKind, PlannerParams,
};
pub use rng::RngStream;
pub use samplers::{
    goal_bias_state, goal_zoom_state, is_narrow, narrow_state, random_state, SamplerParams,
};
pub use scalar::Scalar;
pub use space::{
    collision_check, metric, segment_free, Config, Obstacle, Rect, Scenario, WorldBounds,
};
pub use tree::{path_length, NodeId, Tree};

pub type Config64 = Config<f64>;
pub type Config32 = Config<f32>;
pub type Scenario64 = Scenario<f64>;
pub type Scenario32 = Scenario<f32>;
pub type Tree64 = Tree<f64>;
pub type Tree32 = Tree<f32>;
pub type PlannerParams64 = PlannerParams<f64>;
pub type PlannerParams32 = PlannerParams<f32>;
pub type PlanOutcome64 = PlanOutcome<f64>;
pub type PlanOutcome32 = PlanOutcome<f32>;
