//! Simulated-annealing escape from local minima of the potential field.

use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{total_potential, FieldMode, FieldParams};
use crate::scene::Scene;
use crate::vec3::Vec3;

/// Candidates must beat the current potential by more than this to end the
/// escape early.
pub const IMPROVEMENT_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaParams {
    pub t0: f64,
    /// Geometric cooling factor, `0 < alpha < 1`.
    pub alpha: f64,
    /// Proposals per temperature level.
    pub inner_iters: usize,
    pub proposal_radius: f64,
    pub t_min: f64,
    /// Maximum number of temperature levels.
    pub max_outer: usize,
    /// Rejection-sampling budget for a single free proposal.
    pub max_tries: usize,
}

impl SaParams {
    /// Defaults scaled to the step length.
    pub fn with_step(delta_s: f64) -> Self {
        Self {
            t0: 100.0,
            alpha: 0.95,
            inner_iters: 20,
            proposal_radius: 3.0 * delta_s,
            t_min: 1e-3,
            max_outer: 500,
            max_tries: 50,
        }
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err("alpha");
        }
        if !(self.t_min > 0.0 && self.t_min.is_finite()) {
            return Err("t_min");
        }
        if !(self.t0 > self.t_min && self.t0.is_finite()) {
            return Err("t0");
        }
        if self.inner_iters == 0 {
            return Err("inner_iters");
        }
        if !(self.proposal_radius > 0.0 && self.proposal_radius.is_finite()) {
            return Err("proposal_radius");
        }
        if self.max_outer == 0 {
            return Err("max_outer");
        }
        if self.max_tries == 0 {
            return Err("max_tries");
        }
        Ok(())
    }
}

impl Default for SaParams {
    fn default() -> Self {
        Self::with_step(1.0)
    }
}

/// Seeded random stream. The same seed gives the same draws on every
/// platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
    draws: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
            draws: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of uniform variates drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.draws += 1;
        self.inner.gen::<f64>()
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform point in the unit ball, by rejection from the enclosing cube.
    pub fn unit_ball(&mut self) -> Vec3 {
        loop {
            let v = Vec3::new(
                self.uniform_in(-1.0, 1.0),
                self.uniform_in(-1.0, 1.0),
                self.uniform_in(-1.0, 1.0),
            );
            if v.norm_squared() <= 1.0 {
                return v;
            }
        }
    }
}

/// Source of uniform variates for the Metropolis test.
pub trait Uniform {
    fn uniform(&mut self) -> f64;
}

impl Uniform for RngStream {
    fn uniform(&mut self) -> f64 {
        RngStream::uniform(self)
    }
}

pub fn cool(temperature: f64, alpha: f64) -> f64 {
    alpha * temperature
}

/// Metropolis acceptance. Downhill (or level) moves are always accepted
/// without touching `rng`; uphill moves draw exactly one variate and pass
/// with probability `exp(-(e_new - e_old) / temperature)`.
pub fn metropolis_accept<R: Uniform + ?Sized>(
    e_new: f64,
    e_old: f64,
    temperature: f64,
    rng: &mut R,
) -> bool {
    if e_new <= e_old {
        return true;
    }
    let p = libm::exp(-(e_new - e_old) / temperature);
    rng.uniform() < p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnealError {
    /// No free neighbor was found within the try budget.
    Exhausted,
    /// The schedule ended without accepting any candidate.
    EscapeFailed,
}

impl fmt::Display for AnnealError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnealError::Exhausted => write!(f, "no free neighbor found"),
            AnnealError::EscapeFailed => write!(f, "annealing accepted no candidate"),
        }
    }
}

impl core::error::Error for AnnealError {}

/// Uniform free point in the ball of `radius` around `p`, free at tick `t`.
pub fn propose_neighbor(
    p: Vec3,
    radius: f64,
    scene: &Scene,
    t: usize,
    rng: &mut RngStream,
    max_tries: usize,
) -> Result<Vec3, AnnealError> {
    for _ in 0..max_tries {
        let candidate = p + rng.unit_ball() * radius;
        if scene.is_state_free(candidate, t) {
            return Ok(candidate);
        }
    }
    Err(AnnealError::Exhausted)
}

/// Anneals around a stalled point `p` and returns the waypoint to jump to.
///
/// Every candidate is compared against the potential at `p`. The first
/// accepted candidate that strictly improves on it is returned at once;
/// otherwise the lowest-potential accepted candidate is returned when the
/// schedule runs out. Candidates are free at tick `t`, and the potential is
/// evaluated at `t` as well.
pub fn escape_local_minimum(
    p: Vec3,
    scene: &Scene,
    params: &FieldParams,
    mode: FieldMode,
    sa: &SaParams,
    t: usize,
    rng: &mut RngStream,
) -> Result<Vec3, AnnealError> {
    // A point that has become singular is as bad as it gets.
    let energy = |x: Vec3| total_potential(x, scene, t, params, mode).unwrap_or(f64::INFINITY);
    let e_here = energy(p);
    let mut best: Option<(f64, Vec3)> = None;
    let mut temperature = sa.t0;

    for _ in 0..sa.max_outer {
        if temperature < sa.t_min {
            break;
        }
        for _ in 0..sa.inner_iters {
            let candidate = propose_neighbor(p, sa.proposal_radius, scene, t, rng, sa.max_tries)
                .map_err(|_| AnnealError::EscapeFailed)?;
            let e_candidate = energy(candidate);
            if !e_candidate.is_finite() {
                continue;
            }
            if metropolis_accept(e_candidate, e_here, temperature, rng) {
                if e_candidate < e_here - IMPROVEMENT_MARGIN {
                    return Ok(candidate);
                }
                if best.is_none_or(|(e, _)| e_candidate < e) {
                    best = Some((e_candidate, candidate));
                }
            }
        }
        temperature = cool(temperature, sa.alpha);
    }
    best.map(|(_, x)| x).ok_or(AnnealError::EscapeFailed)
}
