mod common;

use apfsa::campaign::{run_trial, Algorithm};
use apfsa::scenario::parse_scenario;
use apfsa::svg::{render_svg, topdown_to_scene, write_svg, Projection};
use apfsa_core::{ObstacleKind, PlanStatus};
use common::bundled;

fn polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
    svg.lines()
        .filter(|l| l.starts_with("<polyline"))
        .map(|l| {
            let pts = l
                .split("points=\"")
                .nth(1)
                .unwrap()
                .split('"')
                .next()
                .unwrap();
            pts.split(' ')
                .map(|xy| {
                    let (x, y) = xy.split_once(',').unwrap();
                    (x.parse().unwrap(), y.parse().unwrap())
                })
                .collect()
        })
        .collect()
}

#[test]
fn straight_trace_in_empty_scene_is_one_polyline() {
    let s = parse_scenario(
        r#"{"bounds": {"lx": 50, "ly": 50, "lz": 10}, "grid_cell": 1, "start": [5, 5, 5], "goal": [45, 45, 5]}"#,
    )
    .unwrap();
    let r = run_trial(&s, Algorithm::ApfSa, 0).unwrap();
    for projection in [Projection::TopDown, Projection::Iso] {
        let svg = render_svg(&s.scene, std::slice::from_ref(&r), projection);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains(r#"class="start""#) && svg.contains(r#"class="goal""#));
    }
}

#[test]
fn trap_trace_detours_around_the_footprint() {
    let s = bundled("trap");
    let r = run_trial(&s, Algorithm::ApfSa, 0).unwrap();
    assert_eq!(r.status, PlanStatus::Reached);
    let svg = render_svg(&s.scene, std::slice::from_ref(&r), Projection::TopDown);
    let lines = polylines(&svg);
    assert_eq!(lines.len(), 1);
    assert!(svg.contains(r#"class="escape""#));
    let ob = &s.scene.obstacles()[0];
    assert_eq!(ob.kind, ObstacleKind::StaticSphere);
    let mut max_offset: f64 = 0.0;
    for &v in &lines[0] {
        let (x, y) = topdown_to_scene(&s.scene, v);
        let d = ((x - ob.center.x).powi(2) + (y - ob.center.y).powi(2)).sqrt();
        // Coordinates are printed to 1e-3 px.
        assert!(
            d > ob.radius - 1e-3,
            "vertex ({x}, {y}) inside the footprint"
        );
        max_offset = max_offset.max((y - ob.center.y).abs());
    }
    assert!(max_offset >= ob.radius, "path never left the centre line");
}

#[test]
fn identical_inputs_give_identical_files() {
    let s = bundled("compare");
    let traces: Vec<_> = Algorithm::ALL
        .iter()
        .map(|&a| run_trial(&s, a, 3).unwrap())
        .collect();
    let dir = tempfile::tempdir().unwrap();
    for projection in [Projection::TopDown, Projection::Iso] {
        let a = dir.path().join("a.svg");
        let b = dir.path().join("b.svg");
        write_svg(&s.scene, &traces, &a, projection).unwrap();
        write_svg(&s.scene, &traces, &b, projection).unwrap();
        let bytes = std::fs::read(&a).unwrap();
        assert_eq!(bytes, std::fs::read(&b).unwrap());
        assert_eq!(
            String::from_utf8(bytes)
                .unwrap()
                .matches("<polyline")
                .count(),
            traces.len()
        );
    }
}

#[test]
fn unwritable_path_is_an_io_error() {
    let s = bundled("trap");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nope").join("out.svg");
    assert!(write_svg(&s.scene, &[], path, Projection::Iso).is_err());
}
