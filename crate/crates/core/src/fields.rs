//! Attractive and repulsive potential fields.
//!
//! Two variants are provided. The classic field pulls linearly toward the
//! goal and pushes with the inverse-distance barrier inside each obstacle's
//! influence radius. The modified field strengthens attraction near the goal
//! with an exponential term and scales repulsion by `rho_goal^mu`, so that
//! repulsion fades as the goal is approached and the goal is the global
//! minimum of the total potential.
//!
//! Every force here is the exact negative gradient of its potential.

use core::fmt;

use crate::scene::{Bounds, Obstacle, Scene};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldMode {
    Classic,
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    /// Attraction gain.
    pub eta: f64,
    /// Repulsion gain.
    pub beta: f64,
    /// Exponent on the goal distance in the modified repulsion.
    pub mu: f64,
    /// Step-size impact factor in the modified attraction.
    pub epsilon: f64,
    pub delta_s: f64,
    /// Influence radius assigned to obstacles that do not declare one.
    pub rho0_default: f64,
    /// Field variant used by the annealing planner.
    pub mode: FieldMode,
}

impl Default for FieldParams {
    fn default() -> Self {
        Self {
            eta: 1.0,
            beta: 1000.0,
            mu: 2.0,
            epsilon: 1.0,
            delta_s: 1.0,
            rho0_default: 10.0,
            mode: FieldMode::Modified,
        }
    }
}

impl FieldParams {
    /// Returns the name of the first invalid field.
    pub fn validate(&self) -> Result<(), &'static str> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        for (name, v) in [
            ("eta", self.eta),
            ("beta", self.beta),
            ("mu", self.mu),
            ("epsilon", self.epsilon),
            ("delta_s", self.delta_s),
            ("rho0_default", self.rho0_default),
        ] {
            if !positive(v) {
                return Err(name);
            }
        }
        // rho_goal^(mu - 1) is singular at the goal below 1.
        if self.mu < 1.0 {
            return Err("mu");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldError {
    /// The point sits on an obstacle core, where repulsion is unbounded.
    SingularPoint { obstacle: usize },
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::SingularPoint { obstacle } => {
                write!(
                    f,
                    "repulsion is singular on the core of obstacle {obstacle}"
                )
            }
        }
    }
}

impl core::error::Error for FieldError {}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ForceSample {
    pub attractive: Vec3,
    pub repulsive: Vec3,
    pub total: Vec3,
}

impl ForceSample {
    pub fn new(attractive: Vec3, repulsive: Vec3) -> Self {
        Self {
            attractive,
            repulsive,
            total: attractive + repulsive,
        }
    }
}

pub fn attractive_potential_classic(p: Vec3, goal: Vec3, params: &FieldParams) -> f64 {
    0.5 * params.eta * (p - goal).norm_squared()
}

pub fn attractive_force_classic(p: Vec3, goal: Vec3, params: &FieldParams) -> Vec3 {
    -((p - goal) * params.eta)
}

/// Potential whose negative gradient is [`attractive_force_modified`],
/// normalised to zero at the goal:
/// `eta * (rho^2 / 2 + e^(eps*ds) * (1 - e^-rho))`.
pub fn attractive_potential_modified(p: Vec3, goal: Vec3, params: &FieldParams) -> f64 {
    let rho = p.distance(goal);
    let shell = params.epsilon * params.delta_s;
    params.eta * (0.5 * rho * rho + libm::exp(shell) * (1.0 - libm::exp(-rho)))
}

/// Magnitude `eta * (rho + e^-(rho - eps*ds))`, pointing at the goal.
/// Zero at the goal itself.
pub fn attractive_force_modified(p: Vec3, goal: Vec3, params: &FieldParams) -> Vec3 {
    let offset = goal - p;
    let rho = offset.norm();
    if rho == 0.0 {
        return Vec3::ZERO;
    }
    let magnitude = params.eta * (rho + libm::exp(-(rho - params.epsilon * params.delta_s)));
    offset * (magnitude / rho)
}

/// `(rho, 1/rho - 1/rho0, unit vector from core to p)` when `p` is inside the
/// obstacle's influence, `None` outside it.
fn barrier(
    p: Vec3,
    ob: &Obstacle,
    index: usize,
    bounds: &Bounds,
    t: usize,
) -> Result<Option<(f64, f64, Vec3)>, FieldError> {
    let away = p - ob.closest_core_point(p, t, bounds);
    let rho = away.norm();
    if rho == 0.0 {
        return Err(FieldError::SingularPoint { obstacle: index });
    }
    if rho >= ob.influence_radius {
        return Ok(None);
    }
    Ok(Some((
        rho,
        1.0 / rho - 1.0 / ob.influence_radius,
        away / rho,
    )))
}

pub fn repulsive_potential_classic(
    p: Vec3,
    ob: &Obstacle,
    bounds: &Bounds,
    t: usize,
    params: &FieldParams,
) -> Result<f64, FieldError> {
    Ok(match barrier(p, ob, 0, bounds, t)? {
        Some((_, gap, _)) => 0.5 * params.beta * gap * gap,
        None => 0.0,
    })
}

pub fn repulsive_force_classic(
    p: Vec3,
    ob: &Obstacle,
    bounds: &Bounds,
    t: usize,
    params: &FieldParams,
) -> Result<Vec3, FieldError> {
    Ok(match barrier(p, ob, 0, bounds, t)? {
        Some((rho, gap, away)) => away * (params.beta * gap / (rho * rho)),
        None => Vec3::ZERO,
    })
}

pub fn repulsive_potential_modified(
    p: Vec3,
    ob: &Obstacle,
    goal: Vec3,
    bounds: &Bounds,
    t: usize,
    params: &FieldParams,
) -> Result<f64, FieldError> {
    Ok(match barrier(p, ob, 0, bounds, t)? {
        Some((_, gap, _)) => 0.5 * params.beta * gap * gap * libm::pow(p.distance(goal), params.mu),
        None => 0.0,
    })
}

/// Sum of the push away from the obstacle (scaled by `rho_goal^mu`) and the
/// pull toward the goal that comes from differentiating `rho_goal^mu`.
pub fn repulsive_force_modified(
    p: Vec3,
    ob: &Obstacle,
    goal: Vec3,
    bounds: &Bounds,
    t: usize,
    params: &FieldParams,
) -> Result<Vec3, FieldError> {
    let Some((rho, gap, away)) = barrier(p, ob, 0, bounds, t)? else {
        return Ok(Vec3::ZERO);
    };
    let to_goal = goal - p;
    let rho_goal = to_goal.norm();
    if rho_goal == 0.0 {
        return Ok(Vec3::ZERO);
    }
    let push = away * (params.beta * gap * libm::pow(rho_goal, params.mu) / (rho * rho));
    let pull = to_goal
        * (0.5 * params.mu * params.beta * gap * gap * libm::pow(rho_goal, params.mu - 1.0)
            / rho_goal);
    Ok(push + pull)
}

/// Resultant force at `p` and tick `t`.
pub fn total_force(
    p: Vec3,
    scene: &Scene,
    t: usize,
    params: &FieldParams,
    mode: FieldMode,
) -> Result<ForceSample, FieldError> {
    let goal = scene.goal();
    let bounds = scene.bounds();
    let attractive = match mode {
        FieldMode::Classic => attractive_force_classic(p, goal, params),
        FieldMode::Modified => attractive_force_modified(p, goal, params),
    };
    let mut repulsive = Vec3::ZERO;
    for (i, ob) in scene.obstacles().iter().enumerate() {
        let f = match mode {
            FieldMode::Classic => repulsive_force_classic(p, ob, bounds, t, params),
            FieldMode::Modified => repulsive_force_modified(p, ob, goal, bounds, t, params),
        }
        .map_err(|_| FieldError::SingularPoint { obstacle: i })?;
        repulsive += f;
    }
    Ok(ForceSample::new(attractive, repulsive))
}

/// Total potential at `p` and tick `t`; zero at the goal in modified mode
/// unless an obstacle body contains the goal.
pub fn total_potential(
    p: Vec3,
    scene: &Scene,
    t: usize,
    params: &FieldParams,
    mode: FieldMode,
) -> Result<f64, FieldError> {
    let goal = scene.goal();
    let bounds = scene.bounds();
    let mut u = match mode {
        FieldMode::Classic => attractive_potential_classic(p, goal, params),
        FieldMode::Modified => attractive_potential_modified(p, goal, params),
    };
    for (i, ob) in scene.obstacles().iter().enumerate() {
        u += match mode {
            FieldMode::Classic => repulsive_potential_classic(p, ob, bounds, t, params),
            FieldMode::Modified => repulsive_potential_modified(p, ob, goal, bounds, t, params),
        }
        .map_err(|_| FieldError::SingularPoint { obstacle: i })?;
    }
    Ok(u)
}
