//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::Rng;

use common::*;
use ringtraj::contour::{dilate, find_contours, orient_ccw, KernelShape, Orientation, StructuringElement};
use ringtraj::evaluate::{
    build_table, default_approaches, load_fixture_dir, reconstruct, simulate_follow, simulate_follow_from,
    tracking_error, Approach, FollowerConfig,
};
use ringtraj::geometry::{HeightMap, HeightMapMeta};
use ringtraj::planner::{plan, PlannerConfig};
use ringtraj::slicing::{altitude_increment, ring_count, SensorConfig, SlicePlan};
use ringtraj::spectral::{dft, feasibility_check};

const N: usize = 100;

type Check = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/paths")
}

fn c1_machine_zero() -> Outcome {
    let paths = load_fixture_dir::<f64>(&fixtures(), N).expect("fixtures");
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut cells = Vec::new();
    for p in &paths {
        let rx = reconstruct(&p.xs, Approach::Ift(N)).unwrap();
        let ry = reconstruct(&p.ys, Approach::Ift(N)).unwrap();
        let e = (0..N).map(|i| (rx[i] - p.xs[i]).powi(2) + (ry[i] - p.ys[i]).powi(2)).sum::<f64>() / N as f64;
        worst = worst.max(e);
        cells.push(format!("{}={e:.2e}", p.name));
    }
    let elapsed = start.elapsed();
    let names: BTreeSet<_> = paths.iter().map(|p| p.name.as_str()).collect();
    let shipped = ["bat", "square", "trapezoid"].iter().all(|n| names.contains(n));
    outcome(
        shipped && worst <= 1e-20 && elapsed < Duration::from_secs(1),
        format!("{} in {:.1} ms (limit 1e-20, 1 s)", cells.join(" "), elapsed.as_secs_f64() * 1e3),
    )
}

fn c2_trends() -> Outcome {
    let paths = load_fixture_dir::<f64>(&fixtures(), N).expect("fixtures");
    let rep = build_table(&paths, &default_approaches()).unwrap();
    let steps = [1, 2, 5, 50, 100];
    let mut ok = true;
    for p in &paths {
        let ift: Vec<f64> = steps.iter().map(|&k| rep.cell(Approach::Ift(k), &p.name).unwrap()).collect();
        let poly: Vec<f64> = steps.iter().map(|&d| rep.cell(Approach::Poly(d), &p.name).unwrap()).collect();
        ok &= ift.windows(2).all(|w| w[1] <= w[0]);
        ok &= poly.windows(2).all(|w| w[1] <= w[0]);
    }
    outcome(ok, format!("IFT and Poly columns non-increasing on {} figures", paths.len()))
}

fn c3_dft_oracle() -> Outcome {
    let mut r = rng(1003);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let q = r.gen_range(3..=256);
        let s: Vec<f64> = (0..q).map(|_| r.gen_range(-10.0..10.0)).collect();
        let got = dft(&s).unwrap();
        let want = naive_dft(&s);
        for (a, b) in got.bins().iter().zip(&want) {
            worst = worst.max((a - b).norm());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-9 && elapsed < Duration::from_secs(10),
        format!("max |dev| {worst:.2e} in {:.2} s (limit 1e-9, 10 s)", elapsed.as_secs_f64()),
    )
}

fn c4_parseval() -> Outcome {
    let mut r = rng(1004);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let q = r.gen_range(1..=1024);
        let s: Vec<f64> = (0..q).map(|_| r.gen_range(-10.0..10.0)).collect();
        let time: f64 = s.iter().map(|v| v * v).sum();
        let freq = dft(&s).unwrap().energy();
        worst = worst.max((time - freq).abs() / time);
    }
    outcome(worst < 1e-6, format!("max relative defect {worst:.2e} (limit 1e-6)"))
}

fn c5_dc_identity() -> Outcome {
    let mut r = rng(1005);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let q = r.gen_range(3..=300);
        let axes: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                let c = r.gen_range(-50.0..50.0);
                (0..q).map(|_| c + r.gen_range(-10.0..10.0)).collect()
            })
            .collect();
        let mut mse = 0.0;
        let mut var = 0.0;
        for s in &axes {
            let rec = reconstruct(s, Approach::Ift(1)).unwrap();
            mse += rec.iter().zip(s).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / q as f64;
            var += variance(s);
        }
        worst = worst.max((mse - var).abs());
    }
    outcome(worst < 1e-9, format!("max |MSE - variance sum| {worst:.2e} (limit 1e-9)"))
}

fn c6_contours() -> Outcome {
    let mut r = rng(1006);
    let mut failures = 0;
    for _ in 0..200 {
        let blob = random_blob(&mut r, 64);
        let cs = find_contours(&blob);
        if cs.len() != 1 {
            failures += 1;
            continue;
        }
        let (c, orientation) = orient_ccw(&cs[0]);
        let set: BTreeSet<_> = c.points.iter().copied().collect();
        let n = c.len();
        let linked = n == 1
            || (0..n).all(|k| {
                let (a, b) = (c.points[k], c.points[(k + 1) % n]);
                let (dx, dy) = (a.0.abs_diff(b.0), a.1.abs_diff(b.1));
                dx <= 1 && dy <= 1 && dx + dy > 0
            });
        let ccw = orientation == Orientation::Degenerate || c.signed_area2() > 0;
        if set != boundary_set(&blob) || !c.closed || !linked || !ccw {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures}/200 blobs mismatched"))
}

fn c7_dilation() -> Outcome {
    let mut r = rng(1007);
    let mut failures = 0;
    for i in 0..100 {
        let density = r.gen_range(0.005..0.1);
        let img = random_image(&mut r, 64, density);
        let shape = if i % 4 == 0 { KernelShape::Square } else { KernelShape::Disk };
        let se = StructuringElement::new(shape, r.gen_range(1..=6)).unwrap();
        if dilate(&img, &se) != minkowski(&img, &se) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures}/100 images differ from the Minkowski sum"))
}

fn c8_slicing() -> Outcome {
    let mut r = rng(1008);
    let mut failures = 0;
    for _ in 0..1000 {
        let cfg = SensorConfig {
            d: r.gen_range(0.5..60.0),
            f: r.gen_range(0.002..0.1),
            h_s: r.gen_range(0.001..0.05),
            o: r.gen_range(0.0..0.95),
            v_max: 1.0,
            a_max: 1.0,
        };
        let h_b = r.gen_range(0.1..500.0);
        let dh = altitude_increment(&cfg).unwrap();
        let n = ring_count(h_b, dh).unwrap();
        let layers = r.gen_range(1..1000);
        let plan = SlicePlan::new(&cfg, h_b).unwrap();
        let in_range = plan.slice_indices(layers).iter().all(|&k| (1..=layers).contains(&k));
        if !(n as f64 * dh >= h_b) || !in_range {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures}/1000 configurations failed coverage"))
}

fn c9_derivatives() -> Outcome {
    let mut r = rng(1009);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = r.gen_range(1..=20);
        let tr = random_trajectory_decay(&mut r, n, 4);
        let h = 1e-4 * tr.period;
        let t = r.gen_range(0.0..tr.period);
        let v = tr.velocity(t);
        let (p1, p0) = (tr.position(t + h), tr.position(t - h));
        let err = (0..3).map(|ax| (v[ax] - (p1[ax] - p0[ax]) / (2.0 * h)).powi(2)).sum::<f64>().sqrt();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        worst = worst.max(err / norm);
    }
    outcome(worst < 1e-6, format!("max relative error {worst:.2e} (limit 1e-6)"))
}

fn c10_scaling() -> Outcome {
    let mut r = rng(1010);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (radius, period) = (r.gen_range(0.5..30.0), r.gen_range(2.0..200.0));
        let a = feasibility_check(&circle(radius, period), 1.0, 1.0).sampled_accel;
        let b = feasibility_check(&circle(radius, 2.0 * period), 1.0, 1.0).sampled_accel;
        let closed = (std::f64::consts::TAU / period).powi(2) * radius;
        worst = worst.max((a / b / 4.0 - 1.0).abs()).max((a / closed - 1.0).abs());
    }
    outcome(worst < 0.01, format!("max relative deviation {worst:.2e} (limit 1%)"))
}

fn c11_end_to_end() -> Outcome {
    let rows = box_rows(20, 10.0);
    let hm = HeightMap::from_rows(
        &rows,
        HeightMapMeta {
            cell_size: 1.0,
            origin: [-1.0, -1.0],
        },
    )
    .unwrap();
    let cfg: PlannerConfig<f64> = PlannerConfig::from_json_str(
        r#"{"d": 4, "f": 0.004, "h_s": 0.0048, "o": 0.5, "v_max": 3, "a_max": 4, "resolution": 0.5}"#,
    )
    .unwrap();
    let start = Instant::now();
    let out = match plan(&hm, &cfg) {
        Ok(o) => o,
        Err(e) => return outcome(false, format!("planning failed: {e}")),
    };
    let elapsed = start.elapsed();
    let dh = altitude_increment(&cfg.sensor).unwrap();
    let want_rings = (10.0 / dh).ceil() as usize;
    let wp = out.plan.waypoints(cfg.samples_per_ring);
    let z_ok = wp.windows(2).all(|w| w[1].position[2] >= w[0].position[2]);
    let feasible = out.feasibility.iter().all(|r| r.feasible);
    let sim = simulate_follow(&out.plan, &FollowerConfig::default(), 3.0 * out.plan.duration());
    let (sim_ok, rms) = match sim.as_ref().map(tracking_error) {
        Ok(Ok((rms, _))) => (rms.is_finite(), rms),
        _ => (false, f64::NAN),
    };
    outcome(
        out.plan.rings.len() == want_rings && z_ok && feasible && sim_ok && elapsed < Duration::from_secs(5),
        format!(
            "{} rings (expected {want_rings}), z non-decreasing {z_ok}, feasible {feasible}, \
             plan {:.2} s, 3-period RMS {rms:.3} m",
            out.plan.rings.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn c12_step() -> Outcome {
    let kp = 4.0;
    let cfg = FollowerConfig::critically_damped(kp, 0.001);
    let step = |_t: f64| ([1.0, 0.0, 0.0], [0.0; 3]);
    let trace = simulate_follow_from(&step, &cfg, 10.0, [0.0; 3], [0.0; 3]).unwrap();
    let overshoot = trace.steps.iter().map(|s| s.position[0] - 1.0).fold(f64::NEG_INFINITY, f64::max);
    let envelope = trace
        .steps
        .iter()
        .map(|s| (s.position[0] - critically_damped_step(kp.sqrt(), s.t)).abs())
        .fold(0.0, f64::max);
    outcome(
        overshoot <= 1e-3 && envelope <= 0.05,
        format!("overshoot {overshoot:.2e} m (limit 1e-3), max deviation from closed form {envelope:.2e} m (limit 0.05)"),
    )
}

fn main() {
    let checks: [Check; 12] = [
        ("full-term reconstruction is exact on fixtures", c1_machine_zero),
        ("error table trends", c2_trends),
        ("transform equals direct summation", c3_dft_oracle),
        ("energy identity", c4_parseval),
        ("DC reconstruction error equals variance", c5_dc_identity),
        ("contours equal outer boundaries", c6_contours),
        ("dilation equals Minkowski sum", c7_dilation),
        ("rings cover the building", c8_slicing),
        ("velocity equals finite difference", c9_derivatives),
        ("acceleration scales as 1/T^2", c10_scaling),
        ("box building end to end", c11_end_to_end),
        ("step response", c12_step),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {}: {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
