//! Scene geometry: bounds, obstacle bodies, time-indexed obstacle motion and
//! collision predicates.
//!
//! Distances are measured to an obstacle's *core*: the center point for
//! spheres and the vertical axis segment for cylinders. Repulsion and the
//! collision flag are both defined against that distance.

use alloc::vec::Vec;
use core::fmt;

use crate::vec3::Vec3;

/// Tolerance on `l / cell` being integral.
pub const GRID_TOLERANCE: f64 = 1e-9;

/// Axis-aligned box `[0, lx] x [0, ly] x [0, lz]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
}

impl Bounds {
    pub const fn new(lx: f64, ly: f64, lz: f64) -> Self {
        Self { lx, ly, lz }
    }

    pub fn extent(&self) -> Vec3 {
        Vec3::new(self.lx, self.ly, self.lz)
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (0.0..=self.lx).contains(&p.x)
            && (0.0..=self.ly).contains(&p.y)
            && (0.0..=self.lz).contains(&p.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObstacleKind {
    /// Vertical cylinder (tree). `center` is the center of the base disc.
    Cylinder,
    /// Fixed sphere (no-fly zone).
    StaticSphere,
    /// Sphere moving at constant velocity, reflecting off the scene walls.
    DynamicSphere,
}

impl ObstacleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObstacleKind::Cylinder => "cylinder",
            ObstacleKind::StaticSphere => "static_sphere",
            ObstacleKind::DynamicSphere => "dynamic_sphere",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    pub kind: ObstacleKind,
    pub center: Vec3,
    pub radius: f64,
    /// Cylinder height; zero for spheres.
    pub height: f64,
    /// Meters per tick; zero unless `kind` is `DynamicSphere`.
    pub velocity: Vec3,
    /// Distance beyond which the obstacle exerts no repulsion.
    pub influence_radius: f64,
}

/// An invalid obstacle field, named as it appears in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvalidField {
    pub field: &'static str,
    pub reason: &'static str,
}

impl Obstacle {
    pub fn cylinder(base: Vec3, radius: f64, height: f64, influence_radius: f64) -> Self {
        Self {
            kind: ObstacleKind::Cylinder,
            center: base,
            radius,
            height,
            velocity: Vec3::ZERO,
            influence_radius,
        }
    }

    pub fn static_sphere(center: Vec3, radius: f64, influence_radius: f64) -> Self {
        Self {
            kind: ObstacleKind::StaticSphere,
            center,
            radius,
            height: 0.0,
            velocity: Vec3::ZERO,
            influence_radius,
        }
    }

    pub fn dynamic_sphere(
        center: Vec3,
        radius: f64,
        velocity: Vec3,
        influence_radius: f64,
    ) -> Self {
        Self {
            kind: ObstacleKind::DynamicSphere,
            center,
            radius,
            height: 0.0,
            velocity,
            influence_radius,
        }
    }

    pub fn validate(&self) -> Result<(), InvalidField> {
        let bad = |field, reason| Err(InvalidField { field, reason });
        if !self.center.is_finite() {
            return bad("center", "must be finite");
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad("radius", "must be positive and finite");
        }
        if !(self.influence_radius > self.radius && self.influence_radius.is_finite()) {
            return bad("influence_radius", "must be finite and exceed radius");
        }
        match self.kind {
            ObstacleKind::Cylinder => {
                if !(self.height > 0.0 && self.height.is_finite()) {
                    return bad("height", "cylinder height must be positive");
                }
            }
            _ => {
                if self.height != 0.0 {
                    return bad("height", "only cylinders have a height");
                }
            }
        }
        if !self.velocity.is_finite() {
            return bad("velocity", "must be finite");
        }
        if self.kind != ObstacleKind::DynamicSphere && self.velocity != Vec3::ZERO {
            return bad("velocity", "only dynamic spheres move");
        }
        Ok(())
    }

    /// Center (or cylinder base) at tick `t`.
    ///
    /// Moving spheres travel `t * velocity` and reflect off the walls so that
    /// the whole body stays inside `bounds`.
    pub fn position_at(&self, t: usize, bounds: &Bounds) -> Vec3 {
        if self.kind != ObstacleKind::DynamicSphere {
            return self.center;
        }
        let t = t as f64;
        let r = self.radius;
        Vec3::new(
            reflect(self.center.x + t * self.velocity.x, r, bounds.lx - r),
            reflect(self.center.y + t * self.velocity.y, r, bounds.ly - r),
            reflect(self.center.z + t * self.velocity.z, r, bounds.lz - r),
        )
    }

    /// Point of the obstacle core (sphere center, cylinder axis segment)
    /// nearest to `p` at tick `t`.
    pub fn closest_core_point(&self, p: Vec3, t: usize, bounds: &Bounds) -> Vec3 {
        let c = self.position_at(t, bounds);
        match self.kind {
            ObstacleKind::Cylinder => {
                let z = p.z.clamp(c.z, c.z + self.height);
                Vec3::new(c.x, c.y, z)
            }
            _ => c,
        }
    }

    pub fn distance(&self, p: Vec3, t: usize, bounds: &Bounds) -> f64 {
        p.distance(self.closest_core_point(p, t, bounds))
    }

    /// Boundary contact counts as a collision.
    pub fn collides(&self, p: Vec3, t: usize, bounds: &Bounds) -> bool {
        let d = self.distance(p, t, bounds);
        if d > self.radius {
            return false;
        }
        match self.kind {
            ObstacleKind::Cylinder => p.z >= self.center.z && p.z <= self.center.z + self.height,
            _ => true,
        }
    }
}

/// Fold an unbounded coordinate into `[lo, hi]` by mirror reflection.
fn reflect(u: f64, lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    if width <= 0.0 {
        return 0.5 * (lo + hi);
    }
    let period = 2.0 * width;
    let mut m = libm::fmod(u - lo, period);
    if m < 0.0 {
        m += period;
    }
    if m <= width {
        lo + m
    } else {
        lo + period - m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SceneError {
    /// `l_axis / grid_cell` is not an integer.
    NonDivisible {
        axis: char,
        cells: f64,
    },
    InvalidBounds,
    InvalidGridCell,
    InvalidObstacle {
        index: usize,
        field: &'static str,
        reason: &'static str,
    },
    NonFinitePoint {
        which: &'static str,
    },
    /// `which` is `"start"` or `"goal"`.
    OutOfBounds {
        which: &'static str,
    },
    InsideObstacle {
        which: &'static str,
        index: usize,
    },
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SceneError::NonDivisible { axis, cells } => {
                write!(f, "grid_cell does not divide l{axis} (ratio {cells})")
            }
            SceneError::InvalidBounds => write!(f, "bounds must be positive and finite"),
            SceneError::InvalidGridCell => write!(f, "grid_cell must be positive and finite"),
            SceneError::InvalidObstacle {
                index,
                field,
                reason,
            } => {
                write!(f, "obstacles[{index}].{field}: {reason}")
            }
            SceneError::NonFinitePoint { which } => write!(f, "{which} must be finite"),
            SceneError::OutOfBounds { which } => write!(f, "{which} lies outside bounds"),
            SceneError::InsideObstacle { which, index } => {
                write!(f, "{which} lies inside obstacles[{index}]")
            }
        }
    }
}

impl core::error::Error for SceneError {}

/// Rescue environment: bounds, grid resolution, obstacles, start and goal.
///
/// Immutable once built; every query is a pure function of its inputs and
/// the tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    bounds: Bounds,
    grid_cell: f64,
    obstacles: Vec<Obstacle>,
    start: Vec3,
    goal: Vec3,
}

impl Scene {
    pub fn new(
        bounds: Bounds,
        grid_cell: f64,
        obstacles: Vec<Obstacle>,
        start: Vec3,
        goal: Vec3,
    ) -> Result<Self, SceneError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(bounds.lx) && positive(bounds.ly) && positive(bounds.lz)) {
            return Err(SceneError::InvalidBounds);
        }
        if !positive(grid_cell) {
            return Err(SceneError::InvalidGridCell);
        }
        grid_dims(&bounds, grid_cell)?;
        for (index, ob) in obstacles.iter().enumerate() {
            ob.validate().map_err(|e| SceneError::InvalidObstacle {
                index,
                field: e.field,
                reason: e.reason,
            })?;
        }
        let scene = Self {
            bounds,
            grid_cell,
            obstacles,
            start,
            goal,
        };
        for (which, p) in [("start", start), ("goal", goal)] {
            if !p.is_finite() {
                return Err(SceneError::NonFinitePoint { which });
            }
            if !bounds.contains(p) {
                return Err(SceneError::OutOfBounds { which });
            }
            if let Some(index) = scene
                .obstacles
                .iter()
                .position(|o| o.collides(p, 0, &bounds))
            {
                return Err(SceneError::InsideObstacle { which, index });
            }
        }
        Ok(scene)
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn grid_cell(&self) -> f64 {
        self.grid_cell
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn start(&self) -> Vec3 {
        self.start
    }

    pub fn goal(&self) -> Vec3 {
        self.goal
    }

    pub fn grid_dims(&self) -> (usize, usize, usize) {
        // Validated on construction.
        grid_dims(&self.bounds, self.grid_cell).unwrap_or((0, 0, 0))
    }

    pub fn obstacle_position_at(&self, index: usize, t: usize) -> Vec3 {
        self.obstacles[index].position_at(t, &self.bounds)
    }

    pub fn distance_to_obstacle(&self, p: Vec3, index: usize, t: usize) -> f64 {
        self.obstacles[index].distance(p, t, &self.bounds)
    }

    pub fn collision_flag(&self, p: Vec3, index: usize, t: usize) -> u8 {
        self.obstacles[index].collides(p, t, &self.bounds) as u8
    }

    /// In bounds and clear of every obstacle body at tick `t`.
    pub fn is_state_free(&self, p: Vec3, t: usize) -> bool {
        p.is_finite()
            && self.bounds.contains(p)
            && !self
                .obstacles
                .iter()
                .any(|o| o.collides(p, t, &self.bounds))
    }

    /// Checks the straight segment `a -> b` at spacing no larger than `spacing`.
    pub fn is_segment_free(&self, a: Vec3, b: Vec3, spacing: f64, t: usize) -> bool {
        let len = a.distance(b);
        let n = libm::ceil(len / spacing).max(1.0) as usize;
        (0..=n).all(|i| self.is_state_free(a.lerp(b, i as f64 / n as f64), t))
    }
}

/// Number of grid cells along each axis.
pub fn grid_dims(bounds: &Bounds, cell: f64) -> Result<(usize, usize, usize), SceneError> {
    let count = |axis: char, l: f64| {
        let ratio = l / cell;
        let n = libm::round(ratio);
        if (ratio - n).abs() > GRID_TOLERANCE || n < 1.0 {
            Err(SceneError::NonDivisible { axis, cells: ratio })
        } else {
            Ok(n as usize)
        }
    };
    Ok((
        count('x', bounds.lx)?,
        count('y', bounds.ly)?,
        count('z', bounds.lz)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const WIDE: Bounds = Bounds::new(1e6, 1e6, 1e6);

    #[test]
    fn grid_counts() {
        assert_eq!(
            grid_dims(&Bounds::new(200.0, 200.0, 20.0), 1.0),
            Ok((200, 200, 20))
        );
        assert_eq!(
            grid_dims(&Bounds::new(10.0, 10.0, 10.0), 10.0),
            Ok((1, 1, 1))
        );
        assert!(matches!(
            grid_dims(&Bounds::new(10.0, 10.0, 10.0), 3.0),
            Err(SceneError::NonDivisible { axis: 'x', .. })
        ));
    }

    #[test]
    fn grid_counts_tolerate_rounding() {
        let (nx, _, _) = grid_dims(&Bounds::new(0.3, 1.0, 1.0), 0.1).unwrap();
        assert_eq!(nx, 3);
    }

    #[test]
    fn static_obstacles_do_not_move() {
        let s = Obstacle::static_sphere(Vec3::new(5.0, 5.0, 5.0), 1.0, 2.0);
        assert_eq!(s.position_at(100, &WIDE), Vec3::new(5.0, 5.0, 5.0));
    }

    #[test]
    fn dynamic_sphere_moves_linearly() {
        let s = Obstacle::dynamic_sphere(
            Vec3::new(0.0, 0.0, 10.0),
            1e-3,
            Vec3::new(1.0, 0.0, 0.0),
            1.0,
        );
        let b = Bounds::new(1e6, 1e6, 1e6);
        let p = s.position_at(3, &b);
        assert!((p.x - 3.0).abs() < 1e-12);
        assert_eq!(p.z, 10.0);
    }

    #[test]
    fn dynamic_sphere_reflects_off_wall() {
        let s = Obstacle::dynamic_sphere(
            Vec3::new(199.0, 0.0, 10.0),
            1.0,
            Vec3::new(2.0, 0.0, 0.0),
            2.0,
        );
        let b = Bounds::new(200.0, 200.0, 20.0);
        let p = s.position_at(1, &b);
        assert_eq!(p.x, 197.0);
        assert_eq!(p.z, 10.0);
    }

    #[test]
    fn distances() {
        let s = Obstacle::static_sphere(Vec3::ZERO, 1.0, 2.0);
        assert_eq!(s.distance(Vec3::new(3.0, 4.0, 0.0), 7, &WIDE), 5.0);
        let c = Obstacle::cylinder(Vec3::ZERO, 1.0, 10.0, 2.0);
        assert_eq!(c.distance(Vec3::new(0.0, 0.0, 5.0), 0, &WIDE), 0.0);
        let d = c.distance(Vec3::new(4.0, 0.0, 12.0), 0, &WIDE);
        assert!((d - libm::sqrt(20.0)).abs() < 1e-12);
    }

    #[test]
    fn collision_boundary_and_height_gate() {
        let s = Obstacle::static_sphere(Vec3::ZERO, 5.0, 6.0);
        assert!(s.collides(Vec3::new(5.0, 0.0, 0.0), 0, &WIDE));
        assert!(!s.collides(Vec3::new(6.0, 0.0, 0.0), 0, &WIDE));
        let c = Obstacle::cylinder(Vec3::ZERO, 1.0, 10.0, 2.0);
        assert!(!c.collides(Vec3::new(0.5, 0.0, 20.0), 0, &WIDE));
        assert!(c.collides(Vec3::new(0.5, 0.0, 9.0), 0, &WIDE));
    }

    #[test]
    fn state_freedom() {
        let b = Bounds::new(20.0, 20.0, 20.0);
        let empty = Scene::new(
            b,
            1.0,
            vec![],
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(2.0, 2.0, 2.0),
        )
        .unwrap();
        assert!(empty.is_state_free(Vec3::new(5.0, 5.0, 5.0), 0));
        assert!(!empty.is_state_free(Vec3::new(25.0, 5.0, 5.0), 0));

        let sphere = Obstacle::static_sphere(Vec3::new(10.0, 10.0, 10.0), 2.0, 4.0);
        let scene = Scene::new(
            b,
            1.0,
            vec![sphere],
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(2.0, 2.0, 2.0),
        )
        .unwrap();
        assert!(!scene.is_state_free(Vec3::new(12.0, 10.0, 10.0), 0));
        assert_eq!(scene.collision_flag(Vec3::new(12.0, 10.0, 10.0), 0, 0), 1);
    }

    #[test]
    fn invalid_scenes_rejected() {
        let b = Bounds::new(20.0, 20.0, 20.0);
        let bad = Obstacle::static_sphere(Vec3::new(10.0, 10.0, 10.0), 2.0, 1.0);
        let err = Scene::new(
            b,
            1.0,
            vec![bad],
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(2.0, 2.0, 2.0),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            SceneError::InvalidObstacle {
                field: "influence_radius",
                ..
            }
        ));

        let s = Obstacle::static_sphere(Vec3::new(10.0, 10.0, 10.0), 2.0, 3.0);
        let err = Scene::new(
            b,
            1.0,
            vec![s],
            Vec3::new(10.0, 10.0, 11.0),
            Vec3::new(2.0, 2.0, 2.0),
        )
        .unwrap_err();
        assert_eq!(
            err,
            SceneError::InsideObstacle {
                which: "start",
                index: 0
            }
        );

        let err = Scene::new(
            b,
            1.0,
            vec![],
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(2.0, 2.0, 30.0),
        )
        .unwrap_err();
        assert_eq!(err, SceneError::OutOfBounds { which: "goal" });
    }
}
