//! RRT and RRT* over the same scene and collision predicates.
//!
//! Trees grow against the tick-0 snapshot of the scene. Edges are checked by
//! sampling every `step / 2` along the segment.

use alloc::vec::Vec;

use crate::anneal::RngStream;
use crate::planner::{path_length, PlanError, PlanResult, PlanStatus, UavParams};
use crate::scene::Scene;
use crate::vec3::Vec3;

/// Hard cap on samples per node budget, so a fully blocked tree still ends.
const SAMPLES_PER_NODE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RrtParams {
    /// Extension length.
    pub step: f64,
    /// Probability of sampling the goal itself.
    pub goal_bias: f64,
    pub max_nodes: usize,
    /// Neighborhood for choose-parent and rewiring (RRT* only).
    pub rewire_radius: f64,
    pub goal_tolerance: f64,
}

impl RrtParams {
    pub fn with_step(step: f64) -> Self {
        Self {
            step,
            goal_bias: 0.05,
            max_nodes: 20_000,
            rewire_radius: 4.0 * step,
            goal_tolerance: step,
        }
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err("step");
        }
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return Err("goal_bias");
        }
        if self.max_nodes == 0 {
            return Err("max_nodes");
        }
        if !(self.rewire_radius >= self.step && self.rewire_radius.is_finite()) {
            return Err("rewire_radius");
        }
        if !(self.goal_tolerance > 0.0 && self.goal_tolerance.is_finite()) {
            return Err("goal_tolerance");
        }
        Ok(())
    }
}

impl Default for RrtParams {
    fn default() -> Self {
        Self::with_step(1.0)
    }
}

struct Node {
    at: Vec3,
    parent: Option<usize>,
    cost: f64,
    children: Vec<usize>,
}

struct Tree<'a> {
    scene: &'a Scene,
    spacing: f64,
    nodes: Vec<Node>,
}

impl<'a> Tree<'a> {
    fn edge_free(&self, a: Vec3, b: Vec3) -> bool {
        self.scene.is_segment_free(a, b, self.spacing, 0)
    }

    fn nearest(&self, q: Vec3) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, n) in self.nodes.iter().enumerate() {
            let d = (n.at - q).norm_squared();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    fn near(&self, q: Vec3, radius: f64) -> Vec<usize> {
        let r2 = radius * radius;
        (0..self.nodes.len())
            .filter(|&i| (self.nodes[i].at - q).norm_squared() <= r2)
            .collect()
    }

    fn push(&mut self, at: Vec3, parent: usize) -> usize {
        let cost = self.nodes[parent].cost + self.nodes[parent].at.distance(at);
        let id = self.nodes.len();
        self.nodes.push(Node {
            at,
            parent: Some(parent),
            cost,
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        id
    }

    fn reparent(&mut self, node: usize, parent: usize) {
        if let Some(old) = self.nodes[node].parent {
            self.nodes[old].children.retain(|&c| c != node);
        }
        self.nodes[node].parent = Some(parent);
        self.nodes[parent].children.push(node);
        let new_cost =
            self.nodes[parent].cost + self.nodes[parent].at.distance(self.nodes[node].at);
        let delta = self.nodes[node].cost - new_cost;
        let mut stack = Vec::from([node]);
        while let Some(i) = stack.pop() {
            self.nodes[i].cost -= delta;
            stack.extend(self.nodes[i].children.iter().copied());
        }
    }

    fn path_to(&self, mut i: usize) -> Vec<Vec3> {
        let mut out = Vec::from([self.nodes[i].at]);
        while let Some(p) = self.nodes[i].parent {
            out.push(self.nodes[p].at);
            i = p;
        }
        out.reverse();
        out
    }
}

pub fn plan_rrt(
    scene: &Scene,
    params: &RrtParams,
    uav: &UavParams,
    rng: &mut RngStream,
) -> Result<PlanResult, PlanError> {
    grow(scene, params, uav, rng, false)
}

/// RRT with choose-parent and rewiring. Draws exactly the same random
/// variates as [`plan_rrt`] for a given seed, so both trees hold the same
/// node positions and differ only in their parent links.
pub fn plan_rrt_star(
    scene: &Scene,
    params: &RrtParams,
    uav: &UavParams,
    rng: &mut RngStream,
) -> Result<PlanResult, PlanError> {
    grow(scene, params, uav, rng, true)
}

fn grow(
    scene: &Scene,
    params: &RrtParams,
    uav: &UavParams,
    rng: &mut RngStream,
    rewire: bool,
) -> Result<PlanResult, PlanError> {
    params.validate().map_err(PlanError::InvalidParams)?;
    uav.validate().map_err(PlanError::InvalidParams)?;
    let start = scene.start();
    let goal = scene.goal();
    if !scene.is_state_free(start, 0) {
        return Err(PlanError::StartBlocked);
    }
    let b = *scene.bounds();
    let mut tree = Tree {
        scene,
        spacing: 0.5 * params.step,
        nodes: Vec::from([Node {
            at: start,
            parent: None,
            cost: 0.0,
            children: Vec::new(),
        }]),
    };

    let max_samples = params.max_nodes.saturating_mul(SAMPLES_PER_NODE);
    let mut samples = 0;
    let mut reached = (start.distance(goal) <= params.goal_tolerance).then_some(0);

    while reached.is_none() && tree.nodes.len() < params.max_nodes && samples < max_samples {
        samples += 1;
        let target = if rng.uniform() < params.goal_bias {
            goal
        } else {
            Vec3::new(
                rng.uniform_in(0.0, b.lx),
                rng.uniform_in(0.0, b.ly),
                rng.uniform_in(0.0, b.lz),
            )
        };
        let nearest = tree.nearest(target);
        let from = tree.nodes[nearest].at;
        let offset = target - from;
        let d = offset.norm();
        if d < 1e-12 {
            continue;
        }
        let new = if d <= params.step {
            target
        } else {
            from + offset * (params.step / d)
        };
        if !scene.is_state_free(new, 0) || !tree.edge_free(from, new) {
            continue;
        }

        let id = if rewire {
            let near = tree.near(new, params.rewire_radius);
            let mut parent = nearest;
            let mut cost = tree.nodes[nearest].cost + from.distance(new);
            for &j in &near {
                let c = tree.nodes[j].cost + tree.nodes[j].at.distance(new);
                if c < cost && tree.edge_free(tree.nodes[j].at, new) {
                    parent = j;
                    cost = c;
                }
            }
            let id = tree.push(new, parent);
            for &j in &near {
                let via = cost + new.distance(tree.nodes[j].at);
                if via < tree.nodes[j].cost && tree.edge_free(new, tree.nodes[j].at) {
                    tree.reparent(j, id);
                }
            }
            id
        } else {
            tree.push(new, nearest)
        };

        if new.distance(goal) <= params.goal_tolerance {
            reached = Some(id);
        }
    }

    let (mut waypoints, mut status) = match reached {
        Some(i) => (tree.path_to(i), PlanStatus::Reached),
        None => (Vec::from([start]), PlanStatus::StepLimit),
    };
    // Keep the longest prefix the energy budget can pay for.
    if path_length(&waypoints) * uav.delta_w > uav.w_max {
        let mut len = 0.0;
        let mut keep = 1;
        while keep < waypoints.len() {
            let hop = waypoints[keep - 1].distance(waypoints[keep]);
            if (len + hop) * uav.delta_w > uav.w_max {
                break;
            }
            len += hop;
            keep += 1;
        }
        waypoints.truncate(keep);
        status = PlanStatus::EnergyExhausted;
    }
    let length = path_length(&waypoints);
    Ok(PlanResult {
        waypoints,
        forces: Vec::new(),
        status,
        path_length: length,
        energy_used: length * uav.delta_w,
        escape_events: Vec::new(),
        iterations: samples,
        elapsed: 0.0,
    })
}
