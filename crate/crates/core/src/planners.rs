//! The EXTEND primitive and the four RRT build loops.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::samplers::{
    goal_bias_state, goal_zoom_state, narrow_state, random_state, SamplerParams,
};
use crate::scalar::Scalar;
use crate::space::{collision_check, metric, segment_free, Config, Scenario};
use crate::tree::{path_length, NodeId, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Basic,
    GoalBias,
    GoalZoom,
    #[serde(rename = "ncrrt")]
    NarrowChannel,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 4] = [
        PlannerKind::Basic,
        PlannerKind::GoalBias,
        PlannerKind::GoalZoom,
        PlannerKind::NarrowChannel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::Basic => "basic",
            PlannerKind::GoalBias => "goalbias",
            PlannerKind::GoalZoom => "goalzoom",
            PlannerKind::NarrowChannel => "ncrrt",
        }
    }

    /// Stable small integer mixed into trial seeds.
    pub fn tag(self) -> u64 {
        match self {
            PlannerKind::Basic => 1,
            PlannerKind::GoalBias => 2,
            PlannerKind::GoalZoom => 3,
            PlannerKind::NarrowChannel => 4,
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim())
            .ok_or_else(|| {
                Error::InvalidParams(format!(
                    "unknown planner {s:?}; expected one of basic, goalbias, goalzoom, ncrrt"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerParams<S> {
    /// Maximum step length.
    pub epsilon: S,
    /// Iteration cap.
    pub max_iterations: usize,
    /// Edge-check resolution; must not exceed `epsilon`.
    pub delta: S,
    /// Narrow-sample period for NCRRT: iterations `k` with `k % alpha == 0`
    /// draw from the narrow-channel sampler.
    pub alpha: usize,
    pub sampler: SamplerParams<S>,
}

impl<S: Scalar> Default for PlannerParams<S> {
    fn default() -> Self {
        Self {
            epsilon: S::of(20.0),
            max_iterations: 1500,
            delta: S::of(2.0),
            alpha: 3,
            sampler: SamplerParams::default(),
        }
    }
}

impl<S: Scalar> PlannerParams<S> {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidParams(m));
        if !(self.epsilon.is_finite() && self.epsilon > S::zero()) {
            return fail(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.max_iterations == 0 {
            return fail("max_iterations must be at least 1".into());
        }
        if self.alpha == 0 {
            return fail("alpha must be at least 1".into());
        }
        if !(self.delta > S::zero() && self.delta <= self.epsilon) {
            return fail(format!(
                "delta must lie in (0, epsilon], got {} with epsilon {}",
                self.delta, self.epsilon
            ));
        }
        self.sampler.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtendResult {
    /// The target itself was added.
    Reached(NodeId),
    /// A clamped step towards the target was added.
    Advanced(NodeId),
    /// Nothing was added.
    Trapped,
}

/// Step of at most `epsilon` from `near` towards `x`; `x` itself when it is
/// within reach.
pub fn new_state<S: Scalar>(x: Config<S>, near: Config<S>, epsilon: S) -> Config<S> {
    let d = metric(near, x);
    if d <= epsilon {
        x
    } else {
        near.lerp(x, epsilon / d)
    }
}

/// Grows `tree` one step towards `x`.
///
/// The new configuration and the edge to its nearest tree node must both be
/// collision-free; the edge is checked with [`segment_free`] at `delta`.
pub fn extend<S: Scalar>(
    tree: &mut Tree<S>,
    x: Config<S>,
    params: &PlannerParams<S>,
    s: &Scenario<S>,
) -> ExtendResult {
    let near_id = tree.nearest_neighbour(x);
    let near = tree.config(near_id);
    let new = new_state(x, near, params.epsilon);
    if collision_check(new, s) || !segment_free(near, new, s, params.delta) {
        return ExtendResult::Trapped;
    }
    let id = tree.add_node(new, near_id);
    if new == x {
        ExtendResult::Reached(id)
    } else {
        ExtendResult::Advanced(id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome<S> {
    pub success: bool,
    pub tree: Tree<S>,
    /// Root-to-goal path, present iff `success`.
    pub path: Option<Vec<Config<S>>>,
    pub path_length: Option<S>,
    /// Iteration at which the goal was reached, or the cap on failure.
    pub iterations_used: usize,
    /// Seconds spent inside the build loop.
    pub wall_time: f64,
}

impl<S: Scalar> PlanOutcome<S> {
    /// Equality ignoring the timing field.
    pub fn same_result(&self, other: &Self) -> bool {
        self.success == other.success
            && self.tree == other.tree
            && self.path == other.path
            && self.path_length == other.path_length
            && self.iterations_used == other.iterations_used
    }

    pub fn to_json(&self, include_tree: bool) -> serde_json::Value {
        let path = self.path.as_ref().map(|p| {
            p.iter()
                .map(|c| [c.x.as_f64(), c.y.as_f64()])
                .collect::<Vec<_>>()
        });
        let mut doc = json!({
            "success": self.success,
            "iterations": self.iterations_used,
            "path": path,
            "path_length": self.path_length.map(Scalar::as_f64),
            "wall_time_s": self.wall_time,
        });
        if include_tree {
            doc["tree"] = serde_json::to_value(self.tree.dump()).expect("tree dump serializes");
        }
        doc
    }
}

/// Runs one planner until the goal is connected or the iteration cap is hit.
///
/// Each iteration draws one sample from the planner's sampler, extends the
/// tree towards it, then, if the node nearest the goal is within `epsilon`,
/// tries to extend to the goal itself. Success is only ever declared by an
/// extension to the goal returning `Reached`.
pub fn plan<S: Scalar>(
    kind: PlannerKind,
    s: &Scenario<S>,
    params: &PlannerParams<S>,
    rng: &mut RngStream,
) -> Result<PlanOutcome<S>> {
    params.validate()?;
    let started = Instant::now();
    let goal = s.goal();
    let mut tree = Tree::with_capacity(s.start(), params.max_iterations + 1);

    for k in 1..=params.max_iterations {
        let sample = match kind {
            PlannerKind::Basic => random_state(s, rng, &params.sampler)?,
            PlannerKind::GoalBias => goal_bias_state(s, rng, &params.sampler)?,
            PlannerKind::GoalZoom => goal_zoom_state(s, &tree, rng, &params.sampler)?,
            PlannerKind::NarrowChannel if k % params.alpha == 0 => {
                narrow_state(s, rng, &params.sampler)?
            }
            PlannerKind::NarrowChannel => random_state(s, rng, &params.sampler)?,
        };

        let mut reached_goal = match extend(&mut tree, sample, params, s) {
            ExtendResult::Reached(id) if sample == goal => Some(id),
            _ => None,
        };
        if reached_goal.is_none() {
            let near = tree.config(tree.nearest_neighbour(goal));
            if metric(near, goal) <= params.epsilon {
                if let ExtendResult::Reached(id) = extend(&mut tree, goal, params, s) {
                    reached_goal = Some(id);
                }
            }
        }

        if let Some(goal_id) = reached_goal {
            let path = tree.extract_path(goal_id);
            let length = path_length(&path);
            return Ok(PlanOutcome {
                success: true,
                tree,
                path: Some(path),
                path_length: Some(length),
                iterations_used: k,
                wall_time: started.elapsed().as_secs_f64(),
            });
        }
    }

    Ok(PlanOutcome {
        success: false,
        tree,
        path: None,
        path_length: None,
        iterations_used: params.max_iterations,
        wall_time: started.elapsed().as_secs_f64(),
    })
}
