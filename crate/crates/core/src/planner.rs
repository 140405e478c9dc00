//! Field-following planners: classic APF and APF with annealing escape.
//!
//! Both move a particle in fixed steps of `delta_s` along the resultant
//! force. Waypoint `i` lives at tick `i`; moving obstacles advance one tick
//! per step, and every new waypoint is checked against the obstacles at its
//! own tick before it is accepted.

use alloc::vec::Vec;
use core::fmt;

use crate::anneal::{escape_local_minimum, RngStream, SaParams};
use crate::fields::{total_force, FieldError, FieldMode, FieldParams, ForceSample};
use crate::scene::Scene;
use crate::vec3::Vec3;

/// Slack allowed on unit-direction length.
pub const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavParams {
    pub delta_s: f64,
    /// Energy budget.
    pub w_max: f64,
    /// Energy per meter flown.
    pub delta_w: f64,
    /// Speed bounds in m/s. Carried for completeness; no planner reads them.
    pub v_min: f64,
    pub v_max: f64,
    pub goal_tolerance: f64,
    pub max_steps: usize,
    /// Number of recent waypoints inspected for oscillation.
    pub stall_window: usize,
    /// A full window whose bounding-box diagonal is below
    /// `stall_span * delta_s` counts as an oscillation trap.
    pub stall_span: f64,
}

impl UavParams {
    pub fn with_step(delta_s: f64) -> Self {
        Self {
            delta_s,
            w_max: 1e6,
            delta_w: 1.0,
            v_min: 0.0,
            v_max: 10.0,
            goal_tolerance: delta_s,
            max_steps: 5000,
            stall_window: 8,
            stall_span: 2.0,
        }
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.delta_s) {
            return Err("delta_s");
        }
        if !positive(self.w_max) {
            return Err("w_max");
        }
        if !positive(self.delta_w) {
            return Err("delta_w");
        }
        if !(self.v_min >= 0.0 && self.v_max >= self.v_min && self.v_max.is_finite()) {
            return Err("v_max");
        }
        if !(self.goal_tolerance >= 0.5 * self.delta_s && self.goal_tolerance.is_finite()) {
            return Err("goal_tolerance");
        }
        if self.max_steps == 0 {
            return Err("max_steps");
        }
        if self.stall_window < 2 {
            return Err("stall_window");
        }
        if !positive(self.stall_span) {
            return Err("stall_span");
        }
        Ok(())
    }
}

impl Default for UavParams {
    fn default() -> Self {
        Self::with_step(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApfMode {
    /// Classic fields; a trap ends the run.
    ClassicApf,
    /// Fields per `FieldParams::mode`; traps are escaped by annealing.
    ApfSa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanStatus {
    Reached,
    EnergyExhausted,
    StepLimit,
    EscapeFailed,
    Stalled,
}

impl PlanStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanStatus::Reached => "reached",
            PlanStatus::EnergyExhausted => "energy_exhausted",
            PlanStatus::StepLimit => "step_limit",
            PlanStatus::EscapeFailed => "escape_failed",
            PlanStatus::Stalled => "stalled",
        }
    }
}

impl fmt::Display for PlanStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeEvent {
    /// Index of the waypoint produced by the escape.
    pub step: usize,
    pub waypoint: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    /// Starts at the scene's start point.
    pub waypoints: Vec<Vec3>,
    /// Force evaluated at each waypoint; empty for sampling planners.
    pub forces: Vec<ForceSample>,
    pub status: PlanStatus,
    pub path_length: f64,
    pub energy_used: f64,
    pub escape_events: Vec<EscapeEvent>,
    /// Planner iterations: steps for field planners, samples for trees.
    pub iterations: usize,
    /// Wall-clock seconds. The core never reads a clock; callers fill this in.
    pub elapsed: f64,
}

impl PlanResult {
    pub fn is_escape(&self, index: usize) -> bool {
        self.escape_events.iter().any(|e| e.step == index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanError {
    StartBlocked,
    InvalidParams(&'static str),
    Field(FieldError),
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::StartBlocked => write!(f, "start is not a free state"),
            PlanError::InvalidParams(field) => write!(f, "invalid parameter `{field}`"),
            PlanError::Field(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PlanError {}

impl From<FieldError> for PlanError {
    fn from(e: FieldError) -> Self {
        PlanError::Field(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepError {
    ZeroDirection,
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step direction has zero length")
    }
}

impl core::error::Error for StepError {}

/// `p + delta_s * direction` for a unit `direction`. A direction that is not
/// unit length within [`UNIT_TOLERANCE`] is normalised first.
pub fn step_position(p: Vec3, direction: Vec3, delta_s: f64) -> Result<Vec3, StepError> {
    let n = direction.norm();
    if n < 1e-12 {
        return Err(StepError::ZeroDirection);
    }
    let unit = if (n - 1.0).abs() <= UNIT_TOLERANCE {
        direction
    } else {
        direction / n
    };
    Ok(p + unit * delta_s)
}

/// Local-minimum test: the resultant force has (numerically) vanished, or the
/// last `window` waypoints stay inside a box whose diagonal is shorter than
/// `span`. `recent` holds the most recent waypoints, oldest first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StallDetector {
    pub force_eps: f64,
    pub window: usize,
    pub span: f64,
}

impl StallDetector {
    pub fn new(field: &FieldParams, uav: &UavParams) -> Self {
        Self {
            force_eps: 1e-6 * field.eta * field.delta_s,
            window: uav.stall_window,
            span: uav.stall_span * uav.delta_s,
        }
    }

    pub fn is_stalled(&self, force: &ForceSample, recent: &[Vec3]) -> bool {
        if force.total.norm() < self.force_eps {
            return true;
        }
        if recent.len() < self.window {
            return false;
        }
        let tail = &recent[recent.len() - self.window..];
        let mut lo = tail[0];
        let mut hi = tail[0];
        for p in &tail[1..] {
            lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        (hi - lo).norm() < self.span
    }
}

pub fn path_length(waypoints: &[Vec3]) -> f64 {
    waypoints.windows(2).map(|w| w[0].distance(w[1])).sum()
}

pub fn energy_used(waypoints: &[Vec3], delta_w: f64) -> f64 {
    path_length(waypoints) * delta_w
}

/// Drops the components of `direction` that would carry `p` out of the
/// scene, so the particle slides along a wall instead of leaving.
fn slide_along_walls(scene: &Scene, p: Vec3, direction: Vec3, delta_s: f64) -> Option<Vec3> {
    let b = scene.bounds();
    let next = p + direction * delta_s;
    if b.contains(next) {
        return Some(direction);
    }
    let clip = |v: f64, c: f64, hi: f64| {
        if (c < 0.0 && v < 0.0) || (c > hi && v > 0.0) {
            0.0
        } else {
            v
        }
    };
    let clipped = Vec3::new(
        clip(direction.x, next.x, b.lx),
        clip(direction.y, next.y, b.ly),
        clip(direction.z, next.z, b.lz),
    );
    let unit = clipped.normalized()?;
    b.contains(p + unit * delta_s).then_some(unit)
}

/// Follows the resultant force from the scene's start to its goal.
///
/// `ClassicApf` uses classic fields and stops with `Stalled` at the first
/// trap (vanishing force, oscillation, or a step that would hit an obstacle).
/// `ApfSa` uses `field.mode` fields and answers each trap with an annealing
/// escape, recorded in `escape_events`.
pub fn plan(
    scene: &Scene,
    field: &FieldParams,
    uav: &UavParams,
    sa: &SaParams,
    mode: ApfMode,
    rng: &mut RngStream,
) -> Result<PlanResult, PlanError> {
    field.validate().map_err(PlanError::InvalidParams)?;
    uav.validate().map_err(PlanError::InvalidParams)?;
    sa.validate().map_err(PlanError::InvalidParams)?;
    let start = scene.start();
    if !scene.is_state_free(start, 0) {
        return Err(PlanError::StartBlocked);
    }
    let fields = match mode {
        ApfMode::ClassicApf => FieldMode::Classic,
        ApfMode::ApfSa => field.mode,
    };
    let detector = StallDetector::new(field, uav);
    let goal = scene.goal();

    let mut waypoints = Vec::from([start]);
    let mut forces = Vec::new();
    let mut escape_events = Vec::new();
    let mut length = 0.0;
    // Oscillation window restarts after every escape.
    let mut window_start = 0;
    let mut iterations = 0;

    let status = loop {
        let tick = waypoints.len() - 1;
        let p = waypoints[tick];
        let force = total_force(p, scene, tick, field, fields)?;
        forces.push(force);

        if p.distance(goal) <= uav.goal_tolerance {
            break PlanStatus::Reached;
        }
        if iterations >= uav.max_steps {
            break PlanStatus::StepLimit;
        }
        iterations += 1;

        let stepped = force
            .total
            .normalized()
            .and_then(|dir| slide_along_walls(scene, p, dir, uav.delta_s))
            .map(|dir| p + dir * uav.delta_s)
            .filter(|next| scene.is_state_free(*next, tick + 1));
        let trapped = stepped.is_none() || detector.is_stalled(&force, &waypoints[window_start..]);

        let next = if !trapped {
            stepped.unwrap_or(p)
        } else {
            match mode {
                ApfMode::ClassicApf => break PlanStatus::Stalled,
                ApfMode::ApfSa => {
                    match escape_local_minimum(p, scene, field, fields, sa, tick + 1, rng) {
                        Ok(x) => x,
                        Err(_) => break PlanStatus::EscapeFailed,
                    }
                }
            }
        };

        let hop = p.distance(next);
        if (length + hop) * uav.delta_w > uav.w_max {
            break PlanStatus::EnergyExhausted;
        }
        length += hop;
        waypoints.push(next);
        if trapped {
            escape_events.push(EscapeEvent {
                step: tick + 1,
                waypoint: next,
            });
            window_start = tick + 1;
        }
    };

    Ok(PlanResult {
        path_length: length,
        energy_used: length * uav.delta_w,
        waypoints,
        forces,
        status,
        escape_events,
        iterations,
        elapsed: 0.0,
    })
}
