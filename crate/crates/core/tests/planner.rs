mod common;

use common::box_rows;
use ringtraj::geometry::{HeightMap, HeightMapMeta};
use ringtraj::planner::{plan, PlannerConfig, TrajectoryPlan};
use ringtraj::ringpath::YawPolicy;

fn meta<T: ringtraj::Real>() -> HeightMapMeta<T> {
    HeightMapMeta {
        cell_size: T::one(),
        origin: [T::zero(), T::zero()],
    }
}

const CONFIG: &str = r#"{"d": 3, "f": 0.004, "h_s": 0.0036, "o": 0.5, "v_max": 2, "a_max": 3,
    "resolution": 0.5, "terms": 31}"#;

#[test]
fn single_precision_pipeline() {
    let rows: Vec<Vec<f32>> = box_rows(12, 7.0).into_iter().map(|r| r.into_iter().map(|v| v as f32).collect()).collect();
    let hm = HeightMap::from_rows(&rows, meta::<f32>()).unwrap();
    let cfg = PlannerConfig::<f32>::from_json_str(CONFIG).unwrap();
    let out = plan(&hm, &cfg).unwrap();
    // Δh = (3 / 0.004)·0.0036·0.5 = 1.35 m, so ceil(7 / 1.35) = 6 rings
    assert_eq!(out.plan.rings.len(), 6);
    assert!(out.feasibility.iter().all(|r| r.feasible));
}

#[test]
fn rings_circle_the_footprint_at_standoff() {
    let hm = HeightMap::from_rows(&box_rows(12, 7.0), meta::<f64>()).unwrap();
    let cfg = PlannerConfig::<f64>::from_json_str(CONFIG).unwrap();
    let out = plan(&hm, &cfg).unwrap();
    // footprint occupies [1, 13]²; rings stay roughly d outside it
    for tr in &out.plan.rings {
        assert!(matches!(tr.yaw_mode, YawPolicy::CentroidFacing { .. }));
        for i in 0..200 {
            let p = tr.position(tr.period * i as f64 / 200.0);
            let dx = (1.0 - p[0]).max(p[0] - 13.0).max(0.0);
            let dy = (1.0 - p[1]).max(p[1] - 13.0).max(0.0);
            let outside = dx.hypot(dy).max(dx.max(dy));
            assert!(outside > 1.5 && outside < 5.0, "ring {} at {:?}", tr.ring_index, p);
        }
    }
    let json = serde_json::to_string(&out.plan).unwrap();
    assert_eq!(TrajectoryPlan::<f64>::from_json_str(&json).unwrap(), out.plan);
}
