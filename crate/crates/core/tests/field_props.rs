use apfsa_core::fields::{
    attractive_force_classic, attractive_force_modified, repulsive_potential_classic,
    repulsive_potential_modified, total_force, total_potential,
};
use apfsa_core::{Bounds, FieldMode, FieldParams, Obstacle, Scene, Vec3};
use proptest::prelude::*;

fn bounds() -> Bounds {
    Bounds {
        lx: 200.0,
        ly: 200.0,
        lz: 20.0,
    }
}

fn vec3(lo: f64, hi: f64, zlo: f64, zhi: f64) -> impl Strategy<Value = Vec3> + Clone {
    (lo..hi, lo..hi, zlo..zhi).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn unit() -> impl Strategy<Value = Vec3> {
    vec3(-1.0, 1.0, -1.0, 1.0).prop_filter_map("zero", |v| v.normalized())
}

fn sphere() -> impl Strategy<Value = Obstacle> {
    (vec3(20.0, 180.0, 5.0, 15.0), 1.0f64..4.0, 1.0f64..10.0)
        .prop_map(|(c, r, extra)| Obstacle::static_sphere(c, r, r + extra))
}

fn obstacles() -> impl Strategy<Value = Vec<Obstacle>> {
    let cylinder = (
        vec3(20.0, 180.0, 0.0, 0.1),
        1.0f64..4.0,
        2.0f64..18.0,
        1.0f64..10.0,
    )
        .prop_map(|(c, r, h, extra)| Obstacle::cylinder(c, r, h, r + extra));
    prop::collection::vec(prop_oneof![sphere(), cylinder], 0..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn repulsion_vanishes_at_cutoff(ob in sphere(), dir in unit(), goal in vec3(0.0, 200.0, 0.0, 20.0), beta in 1.0f64..1e6) {
        let fp = FieldParams { beta, ..FieldParams::default() };
        let p = ob.center + dir * (ob.influence_radius - 1e-6);
        let classic = repulsive_potential_classic(p, &ob, &bounds(), 0, &fp).unwrap();
        prop_assert!(classic <= 1e-9 * beta, "{classic}");
        let outside = ob.center + dir * (ob.influence_radius + 1e-6);
        prop_assert_eq!(repulsive_potential_classic(outside, &ob, &bounds(), 0, &fp).unwrap(), 0.0);
        prop_assert_eq!(repulsive_potential_modified(outside, &ob, goal, &bounds(), 0, &fp).unwrap(), 0.0);
    }

    #[test]
    fn modified_attraction_dominates_near_goal(goal in vec3(10.0, 190.0, 5.0, 15.0), dir in unit(), frac in 0.0f64..=1.0, eps in 0.5f64..5.0, eta in 0.1f64..10.0) {
        let fp = FieldParams { eta, epsilon: eps, ..FieldParams::default() };
        let p = goal + dir * (frac * eps * fp.delta_s);
        let modified = attractive_force_modified(p, goal, &fp).norm();
        let classic = attractive_force_classic(p, goal, &fp).norm();
        prop_assert!(modified >= classic, "{modified} < {classic}");
    }

    #[test]
    fn goal_is_global_minimum(obs in obstacles(), goal in vec3(5.0, 195.0, 1.0, 19.0), probes in prop::collection::vec(vec3(0.0, 200.0, 0.0, 20.0), 50)) {
        let start = Vec3::new(1.0, 1.0, 1.0);
        let Ok(scene) = Scene::new(bounds(), 1.0, obs, start, goal) else { return Ok(()) };
        let fp = FieldParams::default();
        let at_goal = total_potential(goal, &scene, 0, &fp, FieldMode::Modified).unwrap();
        prop_assert_eq!(at_goal, 0.0);
        for p in probes.into_iter().filter(|p| scene.is_state_free(*p, 0)) {
            let u = total_potential(p, &scene, 0, &fp, FieldMode::Modified).unwrap();
            prop_assert!(u >= at_goal);
        }
    }

    #[test]
    fn total_is_sum_of_parts(obs in obstacles(), p in vec3(0.0, 200.0, 0.0, 20.0), modified in any::<bool>()) {
        let goal = Vec3::new(199.0, 199.0, 19.0);
        let Ok(scene) = Scene::new(bounds(), 1.0, obs, Vec3::new(1.0, 1.0, 1.0), goal) else { return Ok(()) };
        let mode = if modified { FieldMode::Modified } else { FieldMode::Classic };
        if let Ok(f) = total_force(p, &scene, 0, &FieldParams::default(), mode) {
            prop_assert_eq!(f.total, f.attractive + f.repulsive);
        }
    }
}
