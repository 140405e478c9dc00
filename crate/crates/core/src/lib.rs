//! Potential-field path planning for a point UAV in 3D scenes with
//! cylindrical, static spherical and moving spherical obstacles.
//!
//! The crate is `no_std` and only needs an allocator. It provides:
//!
//! - [`scene`]: bounds, obstacles, obstacle motion and collision predicates;
//! - [`fields`]: classic and modified attractive/repulsive fields;
//! - [`anneal`]: Metropolis acceptance, cooling and the escape loop;
//! - [`planner`]: fixed-step field following with and without escapes;
//! - [`baselines`]: RRT and RRT* over the same scene.
//!
//! All randomness flows through an explicit [`anneal::RngStream`], so a run
//! is fully determined by its inputs and seed.
#![no_std]

extern crate alloc;

pub mod anneal;
pub mod baselines;
pub mod fields;
pub mod planner;
pub mod scene;
pub mod vec3;

pub use anneal::{RngStream, SaParams};
pub use baselines::{plan_rrt, plan_rrt_star, RrtParams};
pub use fields::{FieldMode, FieldParams, ForceSample};
pub use planner::{plan, ApfMode, PlanError, PlanResult, PlanStatus, UavParams};
pub use scene::{Bounds, Obstacle, ObstacleKind, Scene, SceneError};
pub use vec3::Vec3;
