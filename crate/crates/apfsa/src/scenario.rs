//! JSON scenario files.
//!
//! A scenario holds the scene plus every parameter block the planners need.
//! Parameter blocks and most of their fields are optional; omitted values
//! take defaults derived from the step length. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use apfsa_core::fields::FieldMode;
use apfsa_core::{
    Bounds, FieldParams, Obstacle, ObstacleKind, RrtParams, SaParams, Scene, SceneError, UavParams,
    Vec3,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl ScenarioError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Name of the offending field for validation failures.
    pub fn field(&self) -> Option<&str> {
        match self {
            ScenarioError::Validation { field, .. } => Some(field),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Free-form notes on how the geometry was laid out.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub bounds: BoundsDoc,
    pub grid_cell: f64,
    pub start: [f64; 3],
    pub goal: [f64; 3],
    #[serde(default)]
    pub obstacles: Vec<ObstacleDoc>,
    #[serde(default)]
    pub field_params: FieldParamsDoc,
    #[serde(default)]
    pub uav_params: UavParamsDoc,
    #[serde(default)]
    pub sa_params: SaParamsDoc,
    #[serde(default)]
    pub rrt_params: RrtParamsDoc,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundsDoc {
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KindDoc {
    Cylinder,
    StaticSphere,
    DynamicSphere,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ObstacleDoc {
    pub kind: KindDoc,
    pub center: [f64; 3],
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub influence_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ModeDoc {
    Classic,
    Modified,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldParamsDoc {
    pub eta: Option<f64>,
    pub beta: Option<f64>,
    pub mu: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta_s: Option<f64>,
    pub rho0_default: Option<f64>,
    pub mode: Option<ModeDoc>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct UavParamsDoc {
    pub delta_s: Option<f64>,
    pub w_max: Option<f64>,
    pub delta_w: Option<f64>,
    pub v_min: Option<f64>,
    pub v_max: Option<f64>,
    pub goal_tolerance: Option<f64>,
    pub max_steps: Option<usize>,
    pub stall_window: Option<usize>,
    pub stall_span: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SaParamsDoc {
    pub t0: Option<f64>,
    pub alpha: Option<f64>,
    pub inner_iters: Option<usize>,
    pub proposal_radius: Option<f64>,
    pub t_min: Option<f64>,
    pub max_outer: Option<usize>,
    pub max_tries: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RrtParamsDoc {
    pub step: Option<f64>,
    pub goal_bias: Option<f64>,
    pub max_nodes: Option<usize>,
    pub rewire_radius: Option<f64>,
    pub goal_tolerance: Option<f64>,
}

/// A validated scenario bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub scene: Scene,
    pub field: FieldParams,
    pub uav: UavParams,
    pub sa: SaParams,
    pub rrt: RrtParams,
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut scenario = parse_scenario(&text)?;
    if scenario.name.is_empty() {
        if let Some(stem) = path.file_stem() {
            scenario.name = stem.to_string_lossy().into_owned();
        }
    }
    Ok(scenario)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = serde_json::from_str(text)?;
    doc.into_scenario()
}

impl ScenarioDoc {
    pub fn into_scenario(self) -> Result<Scenario, ScenarioError> {
        let f = &self.field_params;
        let field_defaults = FieldParams::default();
        let delta_s = f
            .delta_s
            .or(self.uav_params.delta_s)
            .unwrap_or(field_defaults.delta_s);
        let field = FieldParams {
            eta: f.eta.unwrap_or(field_defaults.eta),
            beta: f.beta.unwrap_or(field_defaults.beta),
            mu: f.mu.unwrap_or(field_defaults.mu),
            epsilon: f.epsilon.unwrap_or(field_defaults.epsilon),
            delta_s,
            rho0_default: f.rho0_default.unwrap_or(field_defaults.rho0_default),
            mode: match f.mode {
                Some(ModeDoc::Classic) => FieldMode::Classic,
                Some(ModeDoc::Modified) | None => FieldMode::Modified,
            },
        };
        field.validate().map_err(|name| {
            ScenarioError::invalid(format!("field_params.{name}"), "out of range")
        })?;

        let u = &self.uav_params;
        if let Some(d) = u.delta_s {
            if d != delta_s {
                return Err(ScenarioError::invalid(
                    "uav_params.delta_s",
                    "must equal field_params.delta_s",
                ));
            }
        }
        let ud = UavParams::with_step(delta_s);
        let uav = UavParams {
            delta_s,
            w_max: u.w_max.unwrap_or(ud.w_max),
            delta_w: u.delta_w.unwrap_or(ud.delta_w),
            v_min: u.v_min.unwrap_or(ud.v_min),
            v_max: u.v_max.unwrap_or(ud.v_max),
            goal_tolerance: u.goal_tolerance.unwrap_or(ud.goal_tolerance),
            max_steps: u.max_steps.unwrap_or(ud.max_steps),
            stall_window: u.stall_window.unwrap_or(ud.stall_window),
            stall_span: u.stall_span.unwrap_or(ud.stall_span),
        };
        uav.validate()
            .map_err(|name| ScenarioError::invalid(format!("uav_params.{name}"), "out of range"))?;

        let s = &self.sa_params;
        let sd = SaParams::with_step(delta_s);
        let sa = SaParams {
            t0: s.t0.unwrap_or(sd.t0),
            alpha: s.alpha.unwrap_or(sd.alpha),
            inner_iters: s.inner_iters.unwrap_or(sd.inner_iters),
            proposal_radius: s.proposal_radius.unwrap_or(sd.proposal_radius),
            t_min: s.t_min.unwrap_or(sd.t_min),
            max_outer: s.max_outer.unwrap_or(sd.max_outer),
            max_tries: s.max_tries.unwrap_or(sd.max_tries),
        };
        sa.validate()
            .map_err(|name| ScenarioError::invalid(format!("sa_params.{name}"), "out of range"))?;

        let r = &self.rrt_params;
        let step = r.step.unwrap_or(delta_s);
        let rd = RrtParams::with_step(step);
        let rrt = RrtParams {
            step,
            goal_bias: r.goal_bias.unwrap_or(rd.goal_bias),
            max_nodes: r.max_nodes.unwrap_or(rd.max_nodes),
            rewire_radius: r.rewire_radius.unwrap_or(rd.rewire_radius),
            goal_tolerance: r.goal_tolerance.unwrap_or(uav.goal_tolerance),
        };
        rrt.validate()
            .map_err(|name| ScenarioError::invalid(format!("rrt_params.{name}"), "out of range"))?;

        let mut obstacles = Vec::with_capacity(self.obstacles.len());
        for (i, o) in self.obstacles.iter().enumerate() {
            if o.kind == KindDoc::Cylinder && o.height.is_none() {
                return Err(ScenarioError::invalid(
                    format!("obstacles[{i}].height"),
                    "required for cylinders",
                ));
            }
            let ob = Obstacle {
                kind: match o.kind {
                    KindDoc::Cylinder => ObstacleKind::Cylinder,
                    KindDoc::StaticSphere => ObstacleKind::StaticSphere,
                    KindDoc::DynamicSphere => ObstacleKind::DynamicSphere,
                },
                center: Vec3::from(o.center),
                radius: o.radius,
                height: o.height.unwrap_or(0.0),
                velocity: o.velocity.map(Vec3::from).unwrap_or(Vec3::ZERO),
                influence_radius: o.influence_radius.unwrap_or(field.rho0_default),
            };
            obstacles.push(ob);
        }

        let bounds = Bounds::new(self.bounds.lx, self.bounds.ly, self.bounds.lz);
        let scene = Scene::new(
            bounds,
            self.grid_cell,
            obstacles,
            Vec3::from(self.start),
            Vec3::from(self.goal),
        )
        .map_err(scene_error)?;

        Ok(Scenario {
            name: self.name.unwrap_or_default(),
            scene,
            field,
            uav,
            sa,
            rrt,
        })
    }
}

fn scene_error(e: SceneError) -> ScenarioError {
    let field = match &e {
        SceneError::NonDivisible { .. } | SceneError::InvalidGridCell => "grid_cell".to_owned(),
        SceneError::InvalidBounds => "bounds".to_owned(),
        SceneError::InvalidObstacle { index, field, .. } => format!("obstacles[{index}].{field}"),
        SceneError::NonFinitePoint { which }
        | SceneError::OutOfBounds { which }
        | SceneError::InsideObstacle { which, .. } => (*which).to_owned(),
    };
    ScenarioError::invalid(field, e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "bounds": {"lx": 20, "ly": 20, "lz": 10},
        "grid_cell": 1,
        "start": [1, 1, 5],
        "goal": [19, 19, 5],
        "obstacles": [
            {"kind": "cylinder", "center": [10, 10, 0], "radius": 1, "height": 8, "influence_radius": 3},
            {"kind": "dynamic_sphere", "center": [5, 15, 5], "radius": 1, "velocity": [0.5, 0, 0]},
            {"kind": "static_sphere", "center": [15, 5, 5], "radius": 2, "influence_radius": 4}
        ],
        "field_params": {"eta": 2, "delta_s": 0.5, "rho0_default": 6}
    }"#;

    #[test]
    fn minimal_document_loads_with_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.field.eta, 2.0);
        assert_eq!(s.field.mu, 2.0);
        assert_eq!(s.uav.delta_s, 0.5);
        assert_eq!(s.uav.goal_tolerance, 0.5);
        assert_eq!(s.sa.proposal_radius, 1.5);
        assert_eq!(s.rrt.step, 0.5);
        assert_eq!(s.rrt.rewire_radius, 2.0);
        let obs = s.scene.obstacles();
        assert_eq!(obs[0].kind, ObstacleKind::Cylinder);
        assert_eq!(obs[1].influence_radius, 6.0);
        assert_eq!(obs[1].velocity, Vec3::new(0.5, 0.0, 0.0));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MINIMAL.replace("\"grid_cell\": 1,", "\"grid_cell\": 1, \"wind\": 3,");
        assert!(matches!(
            parse_scenario(&text),
            Err(ScenarioError::Parse(_))
        ));
    }

    #[test]
    fn empty_document_is_a_parse_error() {
        assert!(matches!(parse_scenario(""), Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn validation_names_the_field() {
        let text = MINIMAL.replace(
            "\"radius\": 2, \"influence_radius\": 4",
            "\"radius\": 2, \"influence_radius\": 1",
        );
        let err = parse_scenario(&text).unwrap_err();
        assert_eq!(err.field(), Some("obstacles[2].influence_radius"));

        let text = MINIMAL.replace("\"eta\": 2", "\"eta\": 2, \"mu\": 0.5");
        assert_eq!(
            parse_scenario(&text).unwrap_err().field(),
            Some("field_params.mu")
        );

        let text = MINIMAL.replace("\"grid_cell\": 1", "\"grid_cell\": 3");
        assert_eq!(
            parse_scenario(&text).unwrap_err().field(),
            Some("grid_cell")
        );

        let text = MINIMAL.replace("\"height\": 8, ", "");
        assert_eq!(
            parse_scenario(&text).unwrap_err().field(),
            Some("obstacles[0].height")
        );

        let text = MINIMAL.replace("\"start\": [1, 1, 5]", "\"start\": [10, 10, 5]");
        assert_eq!(parse_scenario(&text).unwrap_err().field(), Some("start"));
    }

    #[test]
    fn height_on_a_sphere_is_rejected() {
        let text = MINIMAL.replace(
            "\"radius\": 2, \"influence_radius\": 4",
            "\"radius\": 2, \"height\": 3, \"influence_radius\": 4",
        );
        assert_eq!(
            parse_scenario(&text).unwrap_err().field(),
            Some("obstacles[2].height")
        );
    }

    #[test]
    fn mismatched_step_lengths_rejected() {
        let text = MINIMAL.replace(
            "\"rho0_default\": 6}",
            "\"rho0_default\": 6}, \"uav_params\": {\"delta_s\": 1}",
        );
        assert_eq!(
            parse_scenario(&text).unwrap_err().field(),
            Some("uav_params.delta_s")
        );
    }
}
