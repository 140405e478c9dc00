mod common;

use std::fs;

use apfsa::campaign::{run_campaign_with, run_trial, Algorithm, CampaignOptions};
use apfsa::scenario::{load_scenario, ScenarioError};
use apfsa_core::{PlanStatus, Vec3};
use common::{bundled, scenario_path, BUNDLED};

#[test]
fn trap_endpoints() {
    let s = bundled("trap");
    assert_eq!(s.name, "trap");
    assert_eq!(s.scene.start(), Vec3::new(10.0, 100.0, 10.0));
    assert_eq!(s.scene.goal(), Vec3::new(190.0, 100.0, 10.0));
}

#[test]
fn influence_inside_body_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = fs::read_to_string(scenario_path("trap"))
        .unwrap()
        .replace("\"influence_radius\": 20", "\"influence_radius\": 4");
    fs::write(&path, text).unwrap();
    let err = load_scenario(&path).unwrap_err();
    assert!(matches!(err, ScenarioError::Validation { .. }), "{err}");
    assert!(err.field().unwrap().contains("influence_radius"), "{err}");
}

#[test]
fn empty_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    fs::write(&path, "").unwrap();
    assert!(matches!(load_scenario(&path), Err(ScenarioError::Parse(_))));
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        load_scenario(dir.path().join("absent.json")),
        Err(ScenarioError::Io { .. })
    ));
}

#[test]
fn every_bundled_scenario_terminates_for_every_algorithm() {
    for name in BUNDLED {
        let s = bundled(name);
        for algo in Algorithm::ALL {
            let r = run_trial(&s, algo, 1).unwrap();
            assert!(
                r.iterations <= s.uav.max_steps.max(s.rrt.max_nodes),
                "{name}/{algo}"
            );
            assert!(r.energy_used <= s.uav.w_max, "{name}/{algo}");
        }
    }
}

#[test]
fn apf_sa_waypoints_are_free_at_their_tick() {
    for name in BUNDLED {
        let s = bundled(name);
        for seed in 0..100 {
            let r = run_trial(&s, Algorithm::ApfSa, seed).unwrap();
            for (i, w) in r.waypoints.iter().enumerate() {
                assert!(
                    s.scene.is_state_free(*w, i),
                    "{name} seed {seed}: waypoint {i} collides"
                );
            }
        }
    }
}

#[test]
fn rrt_star_is_no_longer_than_rrt_on_compare() {
    let s = bundled("compare");
    let mut wins = 0;
    for seed in 1..=100 {
        let plain = run_trial(&s, Algorithm::Rrt, seed).unwrap();
        let star = run_trial(&s, Algorithm::RrtStar, seed).unwrap();
        if plain.status == PlanStatus::Reached
            && star.status == PlanStatus::Reached
            && star.path_length <= plain.path_length
        {
            wins += 1;
        }
    }
    assert!(wins >= 80, "{wins}/100");
}

#[test]
fn campaign_is_independent_of_thread_count() {
    let s = bundled("goal_guard");
    let algos = [Algorithm::ApfSa, Algorithm::Rrt];
    let seq = run_campaign_with(
        &s,
        &algos,
        12,
        5,
        &CampaignOptions {
            threads: Some(0),
            timing: false,
        },
    );
    let par = run_campaign_with(
        &s,
        &algos,
        12,
        5,
        &CampaignOptions {
            threads: Some(4),
            timing: false,
        },
    );
    assert_eq!(seq, par);
    assert_eq!(seq[0].seeds, (5..17).collect::<Vec<u64>>());
    for st in &seq {
        assert!(st.n_reached <= st.n_runs);
        if st.n_reached > 0 {
            assert!(st.best <= st.mean && st.mean <= st.worst);
        }
    }
}

#[test]
fn single_run_free_space_campaign() {
    let text = r#"{
        "bounds": {"lx": 100, "ly": 100, "lz": 20},
        "grid_cell": 1,
        "start": [5, 5, 5],
        "goal": [90, 70, 15]
    }"#;
    let s = apfsa::scenario::parse_scenario(text).unwrap();
    let straight = s.scene.start().distance(s.scene.goal());
    let stats = run_campaign_with(&s, &Algorithm::ALL, 1, 0, &CampaignOptions::default());
    for st in &stats {
        assert_eq!(st.n_reached, 1, "{}", st.algorithm);
    }
    let apf_sa = stats
        .iter()
        .find(|st| st.algorithm == Algorithm::ApfSa)
        .unwrap();
    assert!(
        apf_sa.mean <= straight + s.uav.delta_s,
        "{} vs {straight}",
        apf_sa.mean
    );
}
