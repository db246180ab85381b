use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use ringtraj::planner::PlanArtifacts;
use ringtraj::{TrajectoryPlan64, TrajectorySample64};

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write into {}", dir.display()))?;
    let mut w = BufWriter::new(tmp);
    body(&mut w)?;
    let tmp = w.into_inner().map_err(|e| e.into_error())?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn sample_rows(w: &mut dyn Write, samples: &[TrajectorySample64]) -> Result<()> {
    writeln!(w, "t,x,y,z,vx,vy,vz,psi")?;
    for s in samples {
        let [x, y, z] = s.position;
        let [vx, vy, vz] = s.velocity;
        writeln!(w, "{},{x},{y},{z},{vx},{vy},{vz},{}", s.t, s.yaw)?;
    }
    Ok(())
}

pub fn waypoint_csv(w: &mut dyn Write, waypoints: &[TrajectorySample64]) -> Result<()> {
    sample_rows(w, waypoints)
}

/// `samples` points spread evenly over the whole plan.
pub fn sample_series(plan: &TrajectoryPlan64, samples: usize) -> Vec<TrajectorySample64> {
    let duration = plan.duration();
    (0..samples)
        .map(|i| plan.sample(duration * i as f64 / samples as f64))
        .collect()
}

pub fn series_csv(w: &mut dyn Write, series: &[TrajectorySample64]) -> Result<()> {
    sample_rows(w, series)
}

/// One closed outline per ring in the x-y plane, y pointing up.
pub fn svg(w: &mut dyn Write, plan: &TrajectoryPlan64, samples: usize) -> Result<()> {
    let per_ring = (samples / plan.rings.len().max(1)).max(1);
    let outlines: Vec<Vec<[f64; 2]>> = plan
        .rings
        .iter()
        .map(|r| {
            let mut pts: Vec<[f64; 2]> = Vec::with_capacity(per_ring);
            for i in 0..per_ring {
                let p = r.position(r.period * i as f64 / per_ring as f64);
                let q = [p[0], p[1]];
                if pts.last() != Some(&q) {
                    pts.push(q);
                }
            }
            while pts.len() > 1 && pts.first() == pts.last() {
                pts.pop();
            }
            pts
        })
        .collect();

    let mut bbox = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for p in outlines.iter().flatten() {
        bbox = [bbox[0].min(p[0]), bbox[1].min(p[1]), bbox[2].max(p[0]), bbox[3].max(p[1])];
    }
    if !bbox[0].is_finite() {
        bbox = [0.0, 0.0, 0.0, 0.0];
    }
    let margin = (0.05 * (bbox[2] - bbox[0]).max(bbox[3] - bbox[1])).max(1.0);
    let (x0, y0) = (bbox[0] - margin, -bbox[3] - margin);
    let (width, height) = (bbox[2] - bbox[0] + 2.0 * margin, bbox[3] - bbox[1] + 2.0 * margin);

    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0} {y0} {width} {height}">"#
    )?;
    writeln!(w, r#"<g transform="scale(1,-1)" fill="none" stroke="black">"#)?;
    for (ring, pts) in plan.rings.iter().zip(&outlines) {
        match pts.as_slice() {
            [] => {}
            [p] => writeln!(
                w,
                r#"<circle data-ring="{}" cx="{}" cy="{}" r="{}" fill="black"/>"#,
                ring.ring_index,
                p[0],
                p[1],
                margin * 0.1
            )?,
            _ => {
                let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", p[0], p[1])).collect();
                writeln!(
                    w,
                    r#"<polygon data-ring="{}" vector-effect="non-scaling-stroke" points="{}"/>"#,
                    ring.ring_index,
                    coords.join(" ")
                )?;
            }
        }
    }
    writeln!(w, "</g>")?;
    writeln!(w, "</svg>")?;
    Ok(())
}

/// Slice images, grown slices, and the discrete target path.
pub fn write_debug(dir: &Path, art: &PlanArtifacts<f64>) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    for (s, grown) in art.slices.iter().zip(&art.dilated) {
        write_atomic(&dir.join(format!("slice_{:02}.pgm", s.ring)), |w| Ok(s.image.write_pgm(w)?))?;
        write_atomic(&dir.join(format!("dilated_{:02}.pgm", s.ring)), |w| Ok(grown.write_pgm(w)?))?;
    }
    let t = &art.target;
    write_atomic(&dir.join("target_path.csv"), |w| {
        writeln!(w, "i,x,y,z,yaw")?;
        for i in 0..t.len() {
            writeln!(w, "{i},{},{},{},{}", t.xs[i], t.ys[i], t.zs[i], t.yaw[i])?;
        }
        Ok(())
    })
}
