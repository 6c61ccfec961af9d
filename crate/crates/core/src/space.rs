//! Planar configuration space: configurations, rectangular obstacles,
//! the Euclidean metric and the collision predicates.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point `(x, y)` of the configuration space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Config<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Config<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn cast<T: Scalar>(self) -> Config<T> {
        Config::new(T::of(self.x.as_f64()), T::of(self.y.as_f64()))
    }

    /// Point `self + t (other - self)`.
    pub fn lerp(self, other: Self, t: S) -> Self {
        Config::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }
}

impl Config<f64> {
    pub fn xy(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Euclidean distance.
pub fn metric<S: Scalar>(a: Config<S>, b: Config<S>) -> S {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

/// Closed axis-aligned box. Used both for the world bounds and obstacles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<S> {
    pub x_min: S,
    pub y_min: S,
    pub x_max: S,
    pub y_max: S,
}

impl<S: Scalar> Rect<S> {
    pub fn new(x_min: S, y_min: S, x_max: S, y_max: S) -> Self {
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    #[inline]
    pub fn contains(&self, c: Config<S>) -> bool {
        // `&` rather than `&&`: the four tests are cheap and their outcomes
        // are hard to predict
        (c.x >= self.x_min) & (c.x <= self.x_max) & (c.y >= self.y_min) & (c.y <= self.y_max)
    }

    pub fn width(&self) -> S {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> S {
        self.y_max - self.y_min
    }

    pub fn intersects(&self, other: &Rect<S>) -> bool {
        self.x_min <= other.x_max
            && other.x_min <= self.x_max
            && self.y_min <= other.y_max
            && other.y_min <= self.y_max
    }

    /// Overlap of two rectangles, if any.
    pub fn clip(&self, other: &Rect<S>) -> Option<Rect<S>> {
        self.intersects(other).then(|| {
            Rect::new(
                self.x_min.max(other.x_min),
                self.y_min.max(other.y_min),
                self.x_max.min(other.x_max),
                self.y_max.min(other.y_max),
            )
        })
    }

    fn all_finite(&self) -> bool {
        [self.x_min, self.y_min, self.x_max, self.y_max]
            .iter()
            .all(|v| v.is_finite())
    }

    fn to_array(self) -> [f64; 4] {
        [
            self.x_min.as_f64(),
            self.y_min.as_f64(),
            self.x_max.as_f64(),
            self.y_max.as_f64(),
        ]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Rect::new(S::of(a[0]), S::of(a[1]), S::of(a[2]), S::of(a[3]))
    }
}

/// World extent; strictly positive width and height.
pub type WorldBounds<S> = Rect<S>;

/// Obstacle rectangle. Degenerate (zero width or height) rectangles are
/// allowed and act as line or point obstacles.
pub type Obstacle<S> = Rect<S>;

/// A planning problem: bounds, obstacles, start and goal.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<S> {
    name: String,
    bounds: WorldBounds<S>,
    obstacles: Vec<Obstacle<S>>,
    start: Config<S>,
    goal: Config<S>,
    short_path_threshold: Option<f64>,
}

impl<S: Scalar> Scenario<S> {
    pub fn new(
        name: impl Into<String>,
        bounds: WorldBounds<S>,
        obstacles: Vec<Obstacle<S>>,
        start: Config<S>,
        goal: Config<S>,
    ) -> Result<Self> {
        let scenario = Self {
            name: name.into(),
            bounds,
            obstacles,
            start,
            goal,
            short_path_threshold: None,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn with_short_path_threshold(mut self, threshold: f64) -> Result<Self> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "short_path_threshold must be positive, got {threshold}"
            )));
        }
        self.short_path_threshold = Some(threshold);
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let b = &self.bounds;
        if !b.all_finite() || b.x_min >= b.x_max || b.y_min >= b.y_max {
            return Err(Error::InvalidScenario(format!(
                "bounds must satisfy x_min < x_max and y_min < y_max, got {:?}",
                b.to_array()
            )));
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if !o.all_finite() || o.x_min > o.x_max || o.y_min > o.y_max {
                return Err(Error::InvalidScenario(format!(
                    "obstacle {i} has inverted extents {:?}",
                    o.to_array()
                )));
            }
            if !o.intersects(b) {
                return Err(Error::InvalidScenario(format!(
                    "obstacle {i} {:?} lies entirely outside the bounds",
                    o.to_array()
                )));
            }
        }
        for (role, c) in [("start", self.start), ("goal", self.goal)] {
            if !c.is_finite() || !b.contains(c) {
                return Err(Error::InvalidScenario(format!(
                    "{role} ({}, {}) is outside the bounds",
                    c.x, c.y
                )));
            }
            if self.obstacles.iter().any(|o| o.contains(c)) {
                return Err(Error::InvalidScenario(format!(
                    "{role} ({}, {}) lies inside an obstacle",
                    c.x, c.y
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bounds(&self) -> &WorldBounds<S> {
        &self.bounds
    }

    pub fn obstacles(&self) -> &[Obstacle<S>] {
        &self.obstacles
    }

    pub fn start(&self) -> Config<S> {
        self.start
    }

    pub fn goal(&self) -> Config<S> {
        self.goal
    }

    pub fn short_path_threshold(&self) -> Option<f64> {
        self.short_path_threshold
    }

    /// Same scenario with its coordinates converted to another scalar type.
    pub fn cast<T: Scalar>(&self) -> Scenario<T> {
        Scenario::from_file(self.to_file()).expect("a valid scenario stays valid")
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        let scenario = Scenario::new(
            file.name,
            Rect::from_array(file.bounds),
            file.obstacles.into_iter().map(Rect::from_array).collect(),
            Config::new(S::of(file.start[0]), S::of(file.start[1])),
            Config::new(S::of(file.goal[0]), S::of(file.goal[1])),
        )?;
        match file.short_path_threshold {
            Some(t) => scenario.with_short_path_threshold(t),
            None => Ok(scenario),
        }
    }

    pub fn to_file(&self) -> ScenarioFile {
        ScenarioFile {
            name: self.name.clone(),
            bounds: self.bounds.to_array(),
            obstacles: self.obstacles.iter().map(|o| o.to_array()).collect(),
            start: [self.start.x.as_f64(), self.start.y.as_f64()],
            goal: [self.goal.x.as_f64(), self.goal.y.as_f64()],
            short_path_threshold: self.short_path_threshold,
        }
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(json)
            .map_err(|e| Error::InvalidScenario(format!("cannot parse scenario JSON: {e}")))?;
        Self::from_file(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidScenario(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("scenario serializes")
    }
}

/// On-disk scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub bounds: [f64; 4],
    pub obstacles: Vec<[f64; 4]>,
    pub start: [f64; 2],
    pub goal: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub short_path_threshold: Option<f64>,
}

/// True when `c` is in the obstacle region. Obstacles are closed, and
/// anything outside the world bounds (or non-finite) counts as a collision.
#[inline]
pub fn collision_check<S: Scalar>(c: Config<S>, s: &Scenario<S>) -> bool {
    if !c.is_finite() || !s.bounds.contains(c) {
        return true;
    }
    // no early exit: scanning every obstacle beats a mispredicted branch
    s.obstacles.iter().fold(false, |hit, o| hit | o.contains(c))
}

/// Fixed-step edge check.
///
/// Samples `a + t (b - a)` at `t = k * delta / |b - a|` for
/// `k = 0..=ceil(|b - a| / delta)`, with the last sample clamped onto the far
/// endpoint. Interpolation always starts at the lexicographically smaller
/// endpoint so `segment_free(a, b) == segment_free(b, a)` exactly.
pub fn segment_free<S: Scalar>(a: Config<S>, b: Config<S>, s: &Scenario<S>, delta: S) -> bool {
    assert!(delta > S::zero(), "segment resolution must be positive");
    let (from, to) = if (a.x, a.y) <= (b.x, b.y) {
        (a, b)
    } else {
        (b, a)
    };
    let length = metric(from, to);
    if length == S::zero() {
        return !collision_check(from, s);
    }
    let steps = (length / delta).ceil().to_usize().unwrap_or(usize::MAX);
    (0..=steps).all(|k| {
        let t = S::of(k as f64) * delta / length;
        let p = if t >= S::one() { to } else { from.lerp(to, t) };
        !collision_check(p, s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn world(obstacles: Vec<[f64; 4]>) -> Scenario<f64> {
        Scenario::new(
            "t",
            Rect::new(0.0, 0.0, 100.0, 100.0),
            obstacles.into_iter().map(Rect::from_array).collect(),
            Config::xy(1.0, 1.0),
            Config::xy(99.0, 99.0),
        )
        .unwrap()
    }

    fn wide_world(obstacles: Vec<[f64; 4]>) -> Scenario<f64> {
        Scenario::new(
            "t",
            Rect::new(-100.0, -100.0, 100.0, 100.0),
            obstacles.into_iter().map(Rect::from_array).collect(),
            Config::xy(-99.0, -99.0),
            Config::xy(99.0, 99.0),
        )
        .unwrap()
    }

    #[test]
    fn metric_examples() {
        assert_eq!(metric(Config::xy(0.0, 0.0), Config::xy(3.0, 4.0)), 5.0);
        assert_eq!(metric(Config::xy(7.0, -2.0), Config::xy(7.0, -2.0)), 0.0);
        let a = Config::xy(1.0, 2.0);
        let b = Config::xy(-5.0, 9.0);
        let expected = (36.0f64 + 49.0).sqrt();
        assert_eq!(metric(a, b), expected);
        assert_eq!(metric(b, a), expected);
    }

    #[test]
    fn collision_examples() {
        let s = world(vec![[10.0, 10.0, 20.0, 20.0]]);
        assert!(collision_check(Config::xy(15.0, 15.0), &s));
        assert!(!collision_check(Config::xy(0.0, 0.0), &s));
        // closed obstacle boundary
        assert!(collision_check(Config::xy(10.0, 15.0), &s));
        assert!(collision_check(Config::xy(20.0, 20.0), &s));
    }

    #[test]
    fn out_of_bounds_collides() {
        let s = world(vec![]);
        assert!(collision_check(Config::xy(-0.001, 50.0), &s));
        assert!(collision_check(Config::xy(50.0, 100.5), &s));
        assert!(!collision_check(Config::xy(100.0, 100.0), &s));
        assert!(collision_check(Config::xy(f64::NAN, 1.0), &s));
    }

    #[test]
    fn degenerate_obstacle_is_a_line() {
        let s = world(vec![[50.0, 0.0, 50.0, 100.0]]);
        assert!(collision_check(Config::xy(50.0, 30.0), &s));
        assert!(!collision_check(Config::xy(50.0001, 30.0), &s));
        assert!(!segment_free(
            Config::xy(40.0, 30.0),
            Config::xy(60.0, 30.0),
            &s,
            1.0
        ));
    }

    /// Dense reference check, independent of the step grid.
    fn dense_oracle(a: Config<f64>, b: Config<f64>, s: &Scenario<f64>) -> bool {
        let n = 10_000;
        (0..=n).all(|k| !collision_check(a.lerp(b, k as f64 / n as f64), s))
    }

    #[test]
    fn segment_examples() {
        let s = wide_world(vec![[10.0, 10.0, 20.0, 20.0]]);
        let (a, b) = (Config::xy(0.0, 15.0), Config::xy(30.0, 15.0));
        assert!(!dense_oracle(a, b, &s));
        assert!(!segment_free(a, b, &s, 1.0));

        let o = Config::xy(0.0, 0.0);
        assert!(segment_free(o, o, &wide_world(vec![]), 1.0));

        let b = Config::xy(5.0, 0.0);
        assert!(dense_oracle(o, b, &s));
        assert!(segment_free(o, b, &s, 1.0));
    }

    #[test]
    fn segment_checks_far_endpoint() {
        let s = wide_world(vec![[4.5, -1.0, 6.0, 1.0]]);
        // length 5.0 at delta 2: samples at 0, 2, 4 and the clamped endpoint 5
        assert!(!segment_free(
            Config::xy(0.0, 0.0),
            Config::xy(5.0, 0.0),
            &s,
            2.0
        ));
    }

    #[test]
    fn scenario_rejects_bad_inputs() {
        let ok = |obs: Vec<[f64; 4]>, start: [f64; 2]| {
            Scenario::<f64>::new(
                "x",
                Rect::new(0.0, 0.0, 10.0, 10.0),
                obs.into_iter().map(Rect::from_array).collect(),
                Config::xy(start[0], start[1]),
                Config::xy(9.0, 9.0),
            )
        };
        assert!(ok(vec![], [1.0, 1.0]).is_ok());
        assert!(ok(vec![], [11.0, 1.0]).is_err());
        assert!(ok(vec![[0.0, 0.0, 2.0, 2.0]], [1.0, 1.0]).is_err());
        assert!(ok(vec![[3.0, 3.0, 2.0, 4.0]], [1.0, 1.0]).is_err());
        assert!(ok(vec![[20.0, 20.0, 30.0, 30.0]], [1.0, 1.0]).is_err());
        // touching the bounds counts as intersecting
        assert!(ok(vec![[10.0, 0.0, 12.0, 5.0]], [1.0, 1.0]).is_ok());

        let bad_bounds = Scenario::<f64>::new(
            "x",
            Rect::new(0.0, 0.0, 0.0, 10.0),
            vec![],
            Config::xy(0.0, 1.0),
            Config::xy(0.0, 2.0),
        );
        assert!(bad_bounds.is_err());
    }

    #[test]
    fn scenario_json_round_trip_and_errors() {
        let json = r#"{"name":"demo","bounds":[0,0,500,500],
            "obstacles":[[100,100,200,200]],"start":[10,10],"goal":[490,490],
            "short_path_threshold":700}"#;
        let s = Scenario::<f64>::from_json_str(json).unwrap();
        assert_eq!(s.name(), "demo");
        assert_eq!(s.short_path_threshold(), Some(700.0));
        let again = Scenario::<f64>::from_json_str(&s.to_json_string()).unwrap();
        assert_eq!(s, again);

        let err = Scenario::<f64>::from_json_str(r#"{"name":"x"}"#).unwrap_err();
        assert!(err.to_string().contains("cannot parse"));
        let inside = json.replace("[10,10]", "[150,150]");
        let err = Scenario::<f64>::from_json_str(&inside).unwrap_err();
        assert!(err.to_string().contains("inside an obstacle"), "{err}");
    }

    #[test]
    fn f32_scenario_behaves_like_f64() {
        let s64 = world(vec![[10.0, 10.0, 20.0, 20.0]]);
        let s32: Scenario<f32> = s64.cast();
        assert!(collision_check(Config::new(15.0f32, 15.0), &s32));
        assert!(!segment_free(
            Config::new(0.0f32, 15.0),
            Config::new(30.0, 15.0),
            &s32,
            1.0
        ));
    }

    fn coord() -> impl Strategy<Value = f64> {
        -1000.0..1000.0f64
    }

    fn config() -> impl Strategy<Value = Config<f64>> {
        (coord(), coord()).prop_map(|(x, y)| Config::xy(x, y))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn metric_axioms(a in config(), b in config(), c in config()) {
            prop_assert_eq!(metric(a, a), 0.0);
            prop_assert_eq!(metric(a, b), metric(b, a));
            prop_assert!(metric(a, b) >= 0.0);
            let slack = 1e-9 * (1.0 + metric(a, b) + metric(b, c));
            prop_assert!(metric(a, c) <= metric(a, b) + metric(b, c) + slack);
        }
    }

    fn rect_in(lo: f64, hi: f64) -> impl Strategy<Value = [f64; 4]> {
        (lo..hi, lo..hi, 0.0..40.0f64, 0.0..40.0f64).prop_map(|(x, y, w, h)| [x, y, x + w, y + h])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn adding_obstacles_never_frees_a_point(
            obs in prop::collection::vec(rect_in(-100.0, 100.0), 0..6),
            extra in rect_in(-100.0, 100.0),
            probes in prop::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 50),
        ) {
            let open = Config::xy(-100.0, -100.0);
            let mut rects: Vec<Rect<f64>> = obs.iter().copied().map(Rect::from_array).collect();
            rects.retain(|r| !r.contains(open) && !r.contains(Config::xy(100.0, 100.0)));
            let bounds = Rect::new(-100.0, -100.0, 100.0, 100.0);
            let before = Scenario::new("a", bounds, rects.clone(), open, Config::xy(100.0, 100.0));
            prop_assume!(before.is_ok());
            let before = before.unwrap();
            let mut more = rects;
            more.push(Rect::from_array(extra));
            let after = Scenario { obstacles: more, ..before.clone() };
            for (x, y) in probes {
                let c = Config::xy(x, y);
                if collision_check(c, &before) {
                    prop_assert!(collision_check(c, &after));
                }
            }
        }

        #[test]
        fn segment_free_is_symmetric(
            obs in prop::collection::vec(rect_in(-90.0, 90.0), 0..5),
            a in (-100.0..100.0f64, -100.0..100.0f64),
            b in (-100.0..100.0f64, -100.0..100.0f64),
            delta in 0.05..5.0f64,
        ) {
            let s = Scenario {
                name: "p".into(),
                bounds: Rect::new(-100.0, -100.0, 100.0, 100.0),
                obstacles: obs.into_iter().map(Rect::from_array).collect(),
                start: Config::xy(0.0, 0.0),
                goal: Config::xy(0.0, 0.0),
                short_path_threshold: None,
            };
            let (a, b) = (Config::xy(a.0, a.1), Config::xy(b.0, b.1));
            prop_assert_eq!(segment_free(a, b, &s, delta), segment_free(b, a, &s, delta));
        }

        /// The coarse grid at `m * delta` is a subset of the fine grid at
        /// `delta`; power-of-two steps keep the multiples exact.
        #[test]
        fn fine_pass_implies_coarser_multiple_pass(
            obs in prop::collection::vec(rect_in(-90.0, 90.0), 0..5),
            a in (-100.0..100.0f64, -100.0..100.0f64),
            b in (-100.0..100.0f64, -100.0..100.0f64),
            exp in -3i32..3,
            m in 1u32..6,
        ) {
            let s = Scenario {
                name: "p".into(),
                bounds: Rect::new(-100.0, -100.0, 100.0, 100.0),
                obstacles: obs.into_iter().map(Rect::from_array).collect(),
                start: Config::xy(0.0, 0.0),
                goal: Config::xy(0.0, 0.0),
                short_path_threshold: None,
            };
            let (a, b) = (Config::xy(a.0, a.1), Config::xy(b.0, b.1));
            let delta = 2f64.powi(exp);
            if segment_free(a, b, &s, delta) {
                prop_assert!(segment_free(a, b, &s, delta * m as f64));
            }
        }
    }
}
