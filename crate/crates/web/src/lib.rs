//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export is a thin wrapper over a plain function so the logic can be
//! tested natively.

use billiards_core::alcove::{check_alcove, classify, type_string, EPS_ANGLE};
use billiards_core::corner::{sweep, unfold_wedge};
use billiards_core::dynamics::{simulate, CornerPolicy, TrajectoryState};
use billiards_core::Polytope;
use wasm_bindgen::prelude::*;

/// Path of a billiard in a convex polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonRun {
    /// Flat `x0, y0, x1, y1, ...`: start, bounce points, end.
    pub path: Vec<f64>,
    /// Affine type of the table, or empty when it is not an alcove.
    pub alcove: String,
}

fn polygon(vertices: &[f64]) -> Result<Polytope, String> {
    if vertices.len() < 6 || !vertices.len().is_multiple_of(2) {
        return Err("need at least three (x, y) vertices".into());
    }
    let pts: Vec<[f64; 2]> = vertices.chunks(2).map(|c| [c[0], c[1]]).collect();
    Polytope::polygon(&pts).map_err(|e| e.to_string())
}

pub fn run_polygon(
    vertices: &[f64],
    start: [f64; 2],
    dir: [f64; 2],
    horizon: f64,
) -> Result<PolygonRun, String> {
    let table = polygon(vertices)?;
    let verdict = check_alcove(&table, EPS_ANGLE);
    let alcove = match (&verdict.diagram, verdict.is_alcove) {
        (Some(d), true) => classify(d).map(|t| type_string(&t)).unwrap_or_default(),
        _ => String::new(),
    };
    // Folding is the continuous rule on alcoves; elsewhere corners reflect
    // through the point.
    let policy = if verdict.is_alcove {
        CornerPolicy::FoldGroup
    } else {
        CornerPolicy::PointReflect
    };
    let st = TrajectoryState::from_slices(&start, &dir).map_err(|e| e.to_string())?;
    let t = simulate(&table, &st, horizon, policy).map_err(|e| e.to_string())?;
    let mut path = vec![t.start.point[0], t.start.point[1]];
    for e in &t.events {
        path.extend([e.point[0], e.point[1]]);
    }
    path.extend([t.end.point[0], t.end.point[1]]);
    Ok(PolygonRun { path, alcove })
}

/// Flat `alpha, gap` pairs over `n` angles in `[lo, hi]`.
pub fn gap_curve(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, String> {
    let reports = sweep(lo, hi, n.clamp(1, 100_000)).map_err(|e| e.to_string())?;
    Ok(reports.iter().flat_map(|r| [r.alpha, r.gap]).collect())
}

/// Outgoing angles on either side of the corner followed by the mirror rays
/// crossed from above: `[angle_above, angle_below, bounces, ray...]`.
pub fn fan(alpha: f64, offset: f64) -> Result<Vec<f64>, String> {
    let up = unfold_wedge(alpha, offset.abs(), 3.0).map_err(|e| e.to_string())?;
    let down = unfold_wedge(alpha, -offset.abs(), 3.0).map_err(|e| e.to_string())?;
    let mut out = vec![up.angle, down.angle, up.bounces as f64];
    out.extend(up.fan);
    Ok(out)
}

#[wasm_bindgen]
pub struct Trajectory2D {
    path: Vec<f64>,
    alcove: String,
}

#[wasm_bindgen]
impl Trajectory2D {
    #[wasm_bindgen(getter)]
    pub fn path(&self) -> Vec<f64> {
        self.path.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn alcove(&self) -> String {
        self.alcove.clone()
    }
}

#[wasm_bindgen]
pub fn polygon_trajectory(
    vertices: &[f64],
    x: f64,
    y: f64,
    dx: f64,
    dy: f64,
    horizon: f64,
) -> Result<Trajectory2D, JsError> {
    let run = run_polygon(vertices, [x, y], [dx, dy], horizon).map_err(|e| JsError::new(&e))?;
    Ok(Trajectory2D {
        path: run.path,
        alcove: run.alcove,
    })
}

#[wasm_bindgen]
pub fn corner_gap_sweep(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    gap_curve(lo, hi, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn wedge_fan(alpha: f64, offset: f64) -> Result<Vec<f64>, JsError> {
    fan(alpha, offset).map_err(|e| JsError::new(&e))
}
