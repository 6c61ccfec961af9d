//! Random-state generators: uniform free sampling, goal bias, goal zoom and
//! the narrow-channel sampler built on cluster sampling.
//!
//! Every sampler is a pure function of its inputs and the [`RngStream`]
//! state, and every returned configuration is collision-free.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::space::{collision_check, metric, Config, Obstacle, Scenario};
use crate::tree::Tree;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerParams<S> {
    /// Probability of drawing a plain uniform sample. The goal heuristics
    /// fire with probability `1 - p`.
    pub p: f64,
    /// Cluster neighbourhood radius.
    pub lambda: S,
    /// Narrowness threshold in percent of cluster points colliding.
    pub sigma: f64,
    /// Cluster size.
    pub cluster_size: usize,
    /// Candidate budget per narrow draw; random draws may reject up to ten
    /// times this many points before giving up.
    pub max_attempts: usize,
}

impl<S: Scalar> Default for SamplerParams<S> {
    fn default() -> Self {
        Self {
            p: 0.9,
            lambda: S::of(20.0),
            sigma: 40.0,
            cluster_size: 50,
            max_attempts: 100,
        }
    }
}

impl<S: Scalar> SamplerParams<S> {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidParams(m));
        if !(0.0..=1.0).contains(&self.p) {
            return fail(format!("p must lie in [0, 1], got {}", self.p));
        }
        if !(self.lambda.is_finite() && self.lambda > S::zero()) {
            return fail(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.sigma > 0.0 && self.sigma <= 100.0) {
            return fail(format!("sigma must lie in (0, 100], got {}", self.sigma));
        }
        if self.cluster_size == 0 {
            return fail("cluster_size must be at least 1".into());
        }
        if self.max_attempts == 0 {
            return fail("max_attempts must be at least 1".into());
        }
        Ok(())
    }

    /// Rejections tolerated by [`random_state`] before it reports exhaustion.
    pub fn rejection_budget(&self) -> usize {
        self.max_attempts.saturating_mul(10)
    }
}

/// Uniform point over the bounds, resampled until collision-free.
pub fn random_state<S: Scalar>(
    s: &Scenario<S>,
    rng: &mut RngStream,
    params: &SamplerParams<S>,
) -> Result<Config<S>> {
    let b = s.bounds();
    let (x0, x1) = (b.x_min.as_f64(), b.x_max.as_f64());
    let (y0, y1) = (b.y_min.as_f64(), b.y_max.as_f64());
    let budget = params.rejection_budget();
    for _ in 0..budget {
        let c = Config::new(S::of(rng.uniform_in(x0, x1)), S::of(rng.uniform_in(y0, y1)));
        if !collision_check(c, s) {
            return Ok(c);
        }
    }
    Err(Error::SamplingExhausted { attempts: budget })
}

/// Coin flip consuming one uniform: true means "take the uniform branch".
fn uniform_branch(rng: &mut RngStream, p: f64) -> bool {
    rng.uniform() < p
}

/// The goal itself with probability `1 - p`, otherwise [`random_state`].
pub fn goal_bias_state<S: Scalar>(
    s: &Scenario<S>,
    rng: &mut RngStream,
    params: &SamplerParams<S>,
) -> Result<Config<S>> {
    if uniform_branch(rng, params.p) {
        random_state(s, rng, params)
    } else {
        Ok(s.goal())
    }
}

/// With probability `1 - p`, a free point uniform in the disk around the goal
/// whose radius is the current tree-to-goal distance; otherwise
/// [`random_state`]. Falls back to `random_state` when the disk yields no
/// free point within `max_attempts` draws.
pub fn goal_zoom_state<S: Scalar>(
    s: &Scenario<S>,
    tree: &Tree<S>,
    rng: &mut RngStream,
    params: &SamplerParams<S>,
) -> Result<Config<S>> {
    if uniform_branch(rng, params.p) {
        return random_state(s, rng, params);
    }
    let goal = s.goal();
    let radius = metric(tree.config(tree.nearest_neighbour(goal)), goal);
    if radius == S::zero() {
        return Ok(goal);
    }
    for _ in 0..params.max_attempts {
        let c = sample_disk(goal, radius, rng);
        if !collision_check(c, s) {
            return Ok(c);
        }
    }
    random_state(s, rng, params)
}

/// Exact-uniform disk sample: radius `r * sqrt(u)`, angle `2 pi v`.
/// Always consumes two uniforms, `u` first.
pub fn sample_disk<S: Scalar>(center: Config<S>, r: S, rng: &mut RngStream) -> Config<S> {
    let u = rng.uniform();
    let v = rng.uniform();
    disk_point(center, r.as_f64(), u, v)
}

fn disk_point<S: Scalar>(center: Config<S>, r: f64, u: f64, v: f64) -> Config<S> {
    let rho = r * u.sqrt();
    let (sin, cos) = sin_cos_turns(v);
    Config::new(center.x + S::of(rho * cos), center.y + S::of(rho * sin))
}

/// `(sin 2 pi v, cos 2 pi v)` using only IEEE basic arithmetic, so results do
/// not depend on the platform libm.
///
/// `v` is split into the nearest quarter turn and an exact remainder in
/// `[-1/8, 1/8]`; the remainder is evaluated with the fdlibm minimax kernels
/// for `|x| <= pi/4`.
// constants kept digit for digit as published
#[allow(clippy::excessive_precision)]
pub fn sin_cos_turns(v: f64) -> (f64, f64) {
    const S1: f64 = -1.666_666_666_666_663_243_48e-1;
    const S2: f64 = 8.333_333_333_322_489_461_24e-3;
    const S3: f64 = -1.984_126_982_985_794_931_34e-4;
    const S4: f64 = 2.755_731_370_707_006_767_89e-6;
    const S5: f64 = -2.505_076_025_340_686_341_95e-8;
    const S6: f64 = 1.589_690_995_211_550_102_21e-10;
    const C1: f64 = 4.166_666_666_666_660_190_37e-2;
    const C2: f64 = -1.388_888_888_887_410_957_49e-3;
    const C3: f64 = 2.480_158_728_947_672_941_78e-5;
    const C4: f64 = -2.755_731_435_139_066_330_35e-7;
    const C5: f64 = 2.087_572_321_298_174_827_90e-9;
    const C6: f64 = -1.135_964_755_778_819_482_65e-11;

    // nearest quarter turn; `as` truncates, so shift by half away from zero
    let t = v * 4.0;
    let quarter = (t + 0.5f64.copysign(t)) as i64;
    let x = (v - quarter as f64 * 0.25) * std::f64::consts::TAU;
    let z = x * x;
    let sin = x + x * z * (S1 + z * (S2 + z * (S3 + z * (S4 + z * (S5 + z * S6)))));
    let cos = 1.0 - 0.5 * z + z * z * (C1 + z * (C2 + z * (C3 + z * (C4 + z * (C5 + z * C6)))));
    // rotate by `quarter` right angles; a table lookup avoids a jump
    let turn = [sin, cos, -sin, -cos];
    let q = (quarter & 3) as usize;
    (turn[q], turn[(q + 1) & 3])
}

/// Uniforms consumed by one [`is_narrow`] call with cluster size `n`.
pub const fn cluster_draws(n: usize) -> usize {
    2 * n
}

/// Closed arc of directions `[start, start + width]`, in turns, with
/// `start` in `[0, 1)`, cast by an obstacle that disk points with radius
/// uniform below `near` cannot reach.
#[derive(Clone, Copy)]
struct Arc {
    start: f64,
    width: f64,
    near: f64,
}

impl Arc {
    /// Whether the point drawn from `(u, v)` may hit this arc's obstacle.
    /// `v` must lie in `[0, 1)`.
    fn blocks(self, u: f64, v: f64) -> bool {
        let d = v - self.start;
        let d = d + f64::from(u8::from(d < 0.0));
        (u >= self.near) & (d <= self.width)
    }
}

/// Bound on the error of [`approx_turns`], in turns (1e-5 rad, padded).
const APPROX_TURNS_ERROR: f64 = 2e-6;

/// Direction of `(x, y)` in turns, in `[-1/2, 1/2]`. Abramowitz and Stegun
/// 4.4.49 on one octant; only used to bound arcs, so accuracy to
/// [`APPROX_TURNS_ERROR`] is enough.
fn approx_turns(x: f64, y: f64) -> f64 {
    use std::f64::consts::{FRAC_PI_2, PI, TAU};
    let (ax, ay) = (x.abs(), y.abs());
    let (lo, hi) = if ax < ay { (ax, ay) } else { (ay, ax) };
    if hi == 0.0 {
        return 0.0;
    }
    let a = lo / hi;
    let z = a * a;
    let mut r = a
        * (0.999_866_0
            + z * (-0.330_299_5 + z * (0.180_141_0 + z * (-0.085_133_0 + z * 0.020_835_1))));
    if ay > ax {
        r = FRAC_PI_2 - r;
    }
    if x < 0.0 {
        r = PI - r;
    }
    if y < 0.0 {
        r = -r;
    }
    r / TAU
}

/// Directions from `(cx, cy)` that hit the rectangle, which must not contain
/// the centre. A convex set seen from outside spans less than half a turn,
/// so the corner directions bound it.
fn shadow(cx: f64, cy: f64, r: [f64; 4], slack: f64) -> Arc {
    let corners = [(r[0], r[1]), (r[2], r[1]), (r[0], r[3]), (r[2], r[3])];
    let base = approx_turns(corners[0].0 - cx, corners[0].1 - cy);
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for &(x, y) in &corners[1..] {
        let mut d = approx_turns(x - cx, y - cy) - base;
        if d > 0.5 {
            d -= 1.0;
        } else if d < -0.5 {
            d += 1.0;
        }
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let slack = slack + APPROX_TURNS_ERROR;
    let mut start = base + lo - slack;
    while start < 0.0 {
        start += 1.0;
    }
    Arc {
        start,
        width: hi - lo + 2.0 * slack,
        near: 0.0,
    }
}

/// Buffers reused across [`is_narrow`] calls so that testing a run of
/// candidates does not allocate per candidate.
struct Scratch<S> {
    obstacles: Vec<Obstacle<S>>,
    arcs: Vec<Arc>,
}

impl<S> Scratch<S> {
    fn new() -> Self {
        Self {
            obstacles: Vec::new(),
            arcs: Vec::new(),
        }
    }
}

/// What the disk of radius `reach` around `c` can touch.
struct Neighbourhood {
    /// Distance from `c` to the nearest obstacle or bounds edge, zero when
    /// `c` itself collides. Exact only when no larger than `reach`.
    clearance: f64,
    leaves_bounds: bool,
}

impl Neighbourhood {
    /// Also leaves the obstacles within `reach` in `near`.
    fn around<S: Scalar>(
        c: Config<S>,
        reach: S,
        s: &Scenario<S>,
        near: &mut Vec<Obstacle<S>>,
    ) -> Self {
        let b = s.bounds();
        let to_bounds = (c.x - b.x_min)
            .min(b.x_max - c.x)
            .min(c.y - b.y_min)
            .min(b.y_max - c.y)
            .max(S::zero());
        let reach2 = reach * reach;
        let mut nearest2 = S::infinity();
        near.clear();
        for o in s.obstacles() {
            let dx = (o.x_min - c.x).max(c.x - o.x_max).max(S::zero());
            let dy = (o.y_min - c.y).max(c.y - o.y_max).max(S::zero());
            let d2 = dx * dx + dy * dy;
            if d2 <= reach2 {
                nearest2 = nearest2.min(d2);
                near.push(*o);
            }
        }
        Self {
            clearance: to_bounds.min(nearest2.sqrt()).as_f64(),
            leaves_bounds: to_bounds <= reach,
        }
    }

    /// Same answer as [`collision_check`] for points within `reach` of the centre.
    fn collides<S: Scalar>(&self, p: Config<S>, s: &Scenario<S>, near: &[Obstacle<S>]) -> bool {
        if self.leaves_bounds && (!p.is_finite() || !s.bounds().contains(p)) {
            return true;
        }
        near.iter().fold(false, |hit, o| hit | o.contains(p))
    }

    /// Fills `arcs` with arcs covering every colliding direction around `c`:
    /// one per nearby obstacle plus the outside of the bounds. Only
    /// meaningful when `c` has positive clearance.
    #[allow(clippy::too_many_arguments)]
    fn shadows<S: Scalar>(
        &self,
        c: Config<S>,
        reach: f64,
        s: &Scenario<S>,
        near: &[Obstacle<S>],
        slack: f64,
        radial: impl Fn(f64) -> f64,
        arcs: &mut Vec<Arc>,
    ) {
        let (cx, cy) = (c.x.as_f64(), c.y.as_f64());
        let cast = |r: [f64; 4]| {
            let dx = (r[0] - cx).max(cx - r[2]).max(0.0);
            let dy = (r[1] - cy).max(cy - r[3]).max(0.0);
            let d = (dx * dx + dy * dy).sqrt();
            (
                d,
                Arc {
                    near: radial(d),
                    ..shadow(cx, cy, r, slack)
                },
            )
        };
        arcs.clear();
        arcs.extend(
            near.iter()
                .map(|o| cast([o.x_min, o.y_min, o.x_max, o.y_max].map(Scalar::as_f64)).1),
        );
        if self.leaves_bounds {
            let b = s.bounds();
            let [x0, y0, x1, y1] = [b.x_min, b.y_min, b.x_max, b.y_max].map(Scalar::as_f64);
            let far = 2.0 * reach + 1.0;
            let outside = [
                [x0 - far, y0 - far, x0, y1 + far],
                [x1, y0 - far, x1 + far, y1 + far],
                [x0 - far, y0 - far, x1 + far, y0],
                [x0 - far, y1, x1 + far, y1 + far],
            ];
            for r in outside {
                let (d, arc) = cast(r);
                if d <= reach {
                    arcs.push(arc);
                }
            }
        }
    }
}

/// Cluster narrowness test.
///
/// Conceptually draws `cluster_size` points uniformly in the disk of radius
/// `lambda` around `c` and reports whether at least `sigma` percent of them
/// collide. The stream always advances by exactly `cluster_size` disk draws,
/// but points are classified as cheaply as possible: a point closer to `c`
/// than its clearance is free whatever its angle, a point whose direction
/// misses every nearby obstacle is free whatever its radius, and the exact
/// check stops once the count is decided.
pub fn is_narrow<S: Scalar>(
    c: Config<S>,
    s: &Scenario<S>,
    rng: &mut RngStream,
    lambda: S,
    sigma: f64,
    cluster_size: usize,
) -> bool {
    is_narrow_with(&mut Scratch::new(), c, s, rng, lambda, sigma, cluster_size)
}

fn is_narrow_with<S: Scalar>(
    scratch: &mut Scratch<S>,
    c: Config<S>,
    s: &Scenario<S>,
    rng: &mut RngStream,
    lambda: S,
    sigma: f64,
    cluster_size: usize,
) -> bool {
    // colliding * 100 >= sigma * n  <=>  colliding >= ceil(sigma * n / 100)
    let needed = (sigma * cluster_size as f64 / 100.0).ceil() as usize;
    let n = cluster_size;
    // a few ulps of the coordinates absorb rounding in the disk points
    let pad = (c.x.abs() + c.y.abs() + lambda) * S::epsilon() * S::of(8.0);
    let reach = lambda + pad;
    let near = Neighbourhood::around(c, reach, s, &mut scratch.obstacles);
    let safe = near.clearance - pad.as_f64();
    let lambda64 = lambda.as_f64();
    let mut colliding = 0;
    if safe <= lambda64 {
        // radius lambda * sqrt(u) < d - pad  <=>  u < ((d - pad) / lambda)^2
        let pad64 = pad.as_f64();
        let radial = |d: f64| {
            let safe = d - pad64;
            if safe > 0.0 {
                (safe / lambda64).powi(2)
            } else {
                0.0
            }
        };
        let free_below = radial(near.clearance);
        // Points past the radial test lie at least `safe` from `c`, so
        // rounding moves their direction by at most about pad / safe radians.
        let filter = safe > 0.0;
        if filter {
            let slack = 2.0 * pad.as_f64() / safe + 1e-12;
            near.shadows(
                c,
                reach.as_f64(),
                s,
                &scratch.obstacles,
                slack,
                radial,
                &mut scratch.arcs,
            );
        }
        // point j uses the uniforms at offsets 2j (radius) and 2j + 1 (angle)
        for j in 0..n {
            if colliding >= needed || colliding + (n - j) < needed {
                break;
            }
            let u = rng.peek_uniform(2 * j as u64);
            if u < free_below {
                continue;
            }
            let v = rng.peek_uniform(2 * j as u64 + 1);
            if filter
                && !scratch
                    .arcs
                    .iter()
                    .fold(false, |hit, a| hit | a.blocks(u, v))
            {
                continue;
            }
            if near.collides(disk_point(c, lambda64, u, v), s, &scratch.obstacles) {
                colliding += 1;
            }
        }
    }
    rng.skip_uniforms(cluster_draws(n));
    colliding >= needed
}

/// Outcome of one [`narrow_state`] call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NarrowDraw<S> {
    pub config: Config<S>,
    /// Whether `config` passed the narrowness test (false on fallback).
    pub narrow: bool,
    /// Candidates drawn, including the returned one.
    pub candidates: usize,
}

/// Draws free candidates until one passes [`is_narrow`], up to
/// `max_attempts`; otherwise returns the last candidate.
pub fn narrow_state<S: Scalar>(
    s: &Scenario<S>,
    rng: &mut RngStream,
    params: &SamplerParams<S>,
) -> Result<Config<S>> {
    narrow_state_traced(s, rng, params).map(|d| d.config)
}

pub fn narrow_state_traced<S: Scalar>(
    s: &Scenario<S>,
    rng: &mut RngStream,
    params: &SamplerParams<S>,
) -> Result<NarrowDraw<S>> {
    let mut scratch = Scratch::new();
    let mut last = None;
    for attempt in 1..=params.max_attempts {
        let candidate = random_state(s, rng, params)?;
        if is_narrow_with(
            &mut scratch,
            candidate,
            s,
            rng,
            params.lambda,
            params.sigma,
            params.cluster_size,
        ) {
            return Ok(NarrowDraw {
                config: candidate,
                narrow: true,
                candidates: attempt,
            });
        }
        last = Some(candidate);
    }
    Ok(NarrowDraw {
        config: last.expect("max_attempts >= 1"),
        narrow: false,
        candidates: params.max_attempts,
    })
}
