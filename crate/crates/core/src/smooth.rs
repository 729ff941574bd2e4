//! Billiards on smooth strictly convex planar tables near the boundary.
//!
//! Tables are closed analytic curves `phi -> gamma(phi)` traversed
//! counterclockwise; arclength is tabulated once by Gauss-Legendre quadrature
//! and inverted by Newton iteration.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::map_slice;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmoothError {
    #[error("invalid table parameters: {0}")]
    InvalidShape(String),
    #[error("table is not strictly convex (minimum curvature {0})")]
    NotConvex(f64),
    #[error("base angle {0} is not in (0, pi/2]")]
    InvalidAngle(f64),
    #[error("no boundary intersection found from arclength {0}")]
    RootSearch(f64),
}

fn three() -> u32 {
    3
}

/// Built-in table families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SmoothShape {
    Circle {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// `r(phi) = 1 + delta cos(lobes phi)`.
    Perturbed {
        delta: f64,
        #[serde(default = "three")]
        lobes: u32,
    },
}

type V2 = [f64; 2];

fn sub(a: V2, b: V2) -> V2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: V2, b: V2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: V2, b: V2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: V2) -> f64 {
    a[0].hypot(a[1])
}

fn scale(a: V2, s: f64) -> V2 {
    [a[0] * s, a[1] * s]
}

fn add(a: V2, b: V2) -> V2 {
    [a[0] + b[0], a[1] + b[1]]
}

impl SmoothShape {
    /// Position, first and second derivative at parameter `phi`.
    fn jet(&self, phi: f64) -> (V2, V2, V2) {
        let (s, c) = phi.sin_cos();
        match *self {
            SmoothShape::Circle { radius: r } => {
                ([r * c, r * s], [-r * s, r * c], [-r * c, -r * s])
            }
            SmoothShape::Ellipse { a, b } => ([a * c, b * s], [-a * s, b * c], [-a * c, -b * s]),
            SmoothShape::Perturbed { delta, lobes } => {
                let n = lobes as f64;
                let (sn, cn) = (n * phi).sin_cos();
                let r = 1.0 + delta * cn;
                let r1 = -delta * n * sn;
                let r2 = -delta * n * n * cn;
                (
                    [r * c, r * s],
                    [r1 * c - r * s, r1 * s + r * c],
                    [r2 * c - 2.0 * r1 * s - r * c, r2 * s + 2.0 * r1 * c - r * s],
                )
            }
        }
    }

    fn validate(&self) -> Result<(), SmoothError> {
        let ok = match *self {
            SmoothShape::Circle { radius } => radius > 0.0 && radius.is_finite(),
            SmoothShape::Ellipse { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
            SmoothShape::Perturbed { delta, lobes } => {
                delta.abs() < 1.0 && lobes >= 1 && delta.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SmoothError::InvalidShape(format!("{self:?}")))
        }
    }
}

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];
const PANELS: usize = 1024;
const SAMPLES: usize = 4096;

/// Smooth strictly convex table with arclength access.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothTable2D {
    shape: SmoothShape,
    cumulative: Vec<f64>,
    perimeter: f64,
    k_min: f64,
    k_max: f64,
    speed_max: f64,
}

impl SmoothTable2D {
    pub fn new(shape: SmoothShape) -> Result<Self, SmoothError> {
        shape.validate()?;
        let mut t = Self {
            shape,
            cumulative: vec![0.0; PANELS + 1],
            perimeter: 0.0,
            k_min: f64::INFINITY,
            k_max: 0.0,
            speed_max: 0.0,
        };
        let h = TAU / PANELS as f64;
        for i in 0..PANELS {
            let lo = i as f64 * h;
            t.cumulative[i + 1] = t.cumulative[i] + t.speed_integral(lo, lo + h);
        }
        t.perimeter = t.cumulative[PANELS];
        for i in 0..SAMPLES {
            let phi = TAU * i as f64 / SAMPLES as f64;
            let k = t.curvature_at(phi);
            t.k_min = t.k_min.min(k);
            t.k_max = t.k_max.max(k);
            t.speed_max = t.speed_max.max(norm(t.shape.jet(phi).1));
        }
        if !(t.k_min > 0.0) {
            return Err(SmoothError::NotConvex(t.k_min));
        }
        let closure = norm(sub(t.shape.jet(TAU).0, t.shape.jet(0.0).0));
        if closure > 1e-9 {
            return Err(SmoothError::InvalidShape("curve does not close".into()));
        }
        Ok(t)
    }

    pub fn circle(radius: f64) -> Result<Self, SmoothError> {
        Self::new(SmoothShape::Circle { radius })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self, SmoothError> {
        Self::new(SmoothShape::Ellipse { a, b })
    }

    pub fn perturbed(delta: f64) -> Result<Self, SmoothError> {
        Self::new(SmoothShape::Perturbed { delta, lobes: 3 })
    }

    pub fn shape(&self) -> SmoothShape {
        self.shape
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    fn speed_integral(&self, lo: f64, hi: f64) -> f64 {
        let (m, r) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        GL_NODES
            .iter()
            .zip(GL_WEIGHTS)
            .map(|(x, w)| w * norm(self.shape.jet(m + r * x).1))
            .sum::<f64>()
            * r
    }

    fn curvature_at(&self, phi: f64) -> f64 {
        let (_, d1, d2) = self.shape.jet(phi);
        cross(d1, d2) / norm(d1).powi(3)
    }

    /// Arclength from parameter 0 to `phi`, unwrapped over laps.
    pub fn arclength_of(&self, phi: f64) -> f64 {
        let laps = (phi / TAU).floor();
        let r = phi - laps * TAU;
        let h = TAU / PANELS as f64;
        let i = ((r / h) as usize).min(PANELS - 1);
        laps * self.perimeter + self.cumulative[i] + self.speed_integral(i as f64 * h, r)
    }

    /// Parameter at unwrapped arclength `s`.
    pub fn param_of(&self, s: f64) -> f64 {
        let laps = (s / self.perimeter).floor();
        let r = s - laps * self.perimeter;
        let i = self
            .cumulative
            .partition_point(|&c| c <= r)
            .clamp(1, PANELS)
            - 1;
        let h = TAU / PANELS as f64;
        let span = self.cumulative[i + 1] - self.cumulative[i];
        let mut phi = i as f64 * h + h * (r - self.cumulative[i]) / span;
        for _ in 0..8 {
            let err = self.arclength_of(phi) - r;
            let step = err / norm(self.shape.jet(phi).1);
            phi -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        phi + laps * TAU
    }

    pub fn point(&self, s: f64) -> V2 {
        self.shape.jet(self.param_of(s)).0
    }

    /// Unit tangent in the direction of increasing arclength.
    pub fn tangent(&self, s: f64) -> V2 {
        let d = self.shape.jet(self.param_of(s)).1;
        scale(d, 1.0 / norm(d))
    }

    /// Outward unit normal.
    pub fn normal(&self, s: f64) -> V2 {
        let t = self.tangent(s);
        [t[1], -t[0]]
    }

    pub fn curvature(&self, s: f64) -> f64 {
        self.curvature_at(self.param_of(s))
    }

    /// Distance from an interior point to the boundary, searching from the
    /// parameter `seed`.
    pub fn distance_to_boundary(&self, p: V2, seed: f64) -> f64 {
        let mut phi = seed;
        for _ in 0..50 {
            let (g, d1, d2) = self.shape.jet(phi);
            let r = sub(g, p);
            let f = dot(r, d1);
            let fp = dot(d1, d1) + dot(r, d2);
            if fp <= 0.0 {
                return self.distance_global(p);
            }
            let step = f / fp;
            if step.abs() > 0.5 {
                return self.distance_global(p);
            }
            phi -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        norm(sub(self.shape.jet(phi).0, p))
    }

    fn distance_global(&self, p: V2) -> f64 {
        let best = (0..SAMPLES)
            .map(|i| TAU * i as f64 / SAMPLES as f64)
            .min_by(|&a, &b| {
                norm(sub(self.shape.jet(a).0, p)).total_cmp(&norm(sub(self.shape.jet(b).0, p)))
            })
            .unwrap();
        let mut phi = best;
        for _ in 0..50 {
            let (g, d1, d2) = self.shape.jet(phi);
            let r = sub(g, p);
            let fp = dot(d1, d1) + dot(r, d2);
            if fp <= 0.0 {
                break;
            }
            let step = (dot(r, d1) / fp).clamp(-0.01, 0.01);
            phi -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        norm(sub(self.shape.jet(phi).0, p))
    }
}

/// One bounce: the next position, base angle, chord, and direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothBounce {
    /// Unwrapped arclength of the next bounce point.
    pub s: f64,
    pub alpha: f64,
    pub chord: f64,
    /// `+1` when travelling with increasing arclength.
    pub side: f64,
    /// Largest distance of the chord from the boundary.
    pub depth: f64,
    /// Difference of the angles that the incoming and outgoing velocities
    /// make with the tangent at the new bounce point.
    pub specular_defect: f64,
}

/// Shoots the chord leaving arclength `s` at base angle `alpha` towards
/// increasing (`side > 0`) or decreasing arclength, and reflects it.
pub fn smooth_bounce(
    table: &SmoothTable2D,
    s: f64,
    alpha: f64,
    side: f64,
) -> Result<SmoothBounce, SmoothError> {
    if !(alpha > 0.0 && alpha <= PI / 2.0 + 1e-15) {
        return Err(SmoothError::InvalidAngle(alpha));
    }
    let side = if side < 0.0 { -1.0 } else { 1.0 };
    let phi0 = table.param_of(s);
    let (p, d1, _) = table.shape.jet(phi0);
    let tau = scale(d1, 1.0 / norm(d1));
    let inward = [-tau[1], tau[0]];
    let v = add(scale(tau, side * alpha.cos()), scale(inward, alpha.sin()));
    let g = |phi: f64| cross(v, sub(table.shape.jet(phi).0, p));

    // Walk along the boundary in steps short enough not to skip the chord.
    let ds = (0.25 * alpha / table.k_max).min(table.perimeter / 200.0);
    let h = side * ds / table.speed_max;
    let mut lo = phi0;
    let first = g(phi0 + h);
    if first == 0.0 {
        return Err(SmoothError::RootSearch(s));
    }
    let mut hi = phi0 + h;
    let max_steps = (TAU / h.abs()).ceil() as usize + 2;
    let mut found = false;
    for _ in 0..max_steps {
        let next = hi + h;
        if g(next).signum() != first.signum() {
            lo = hi;
            hi = next;
            found = true;
            break;
        }
        hi = next;
    }
    if !found {
        return Err(SmoothError::RootSearch(s));
    }
    let f_lo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi1 = 0.5 * (lo + hi);
    let (q, e1, _) = table.shape.jet(phi1);
    let chord = dot(sub(q, p), v);
    let tq = scale(e1, 1.0 / norm(e1));
    let nq = [tq[1], -tq[0]];
    let w = sub(v, scale(nq, 2.0 * dot(v, nq)));
    let side1 = if dot(v, tq) >= 0.0 { 1.0 } else { -1.0 };
    let t_side = scale(tq, side1);
    let angle_in = cross(t_side, v).abs().atan2(dot(t_side, v));
    let alpha1 = cross(t_side, w).abs().atan2(dot(t_side, w));
    let depth = chord_depth(table, p, v, chord, phi0, phi1);
    Ok(SmoothBounce {
        s: s + table.arclength_of(phi1) - table.arclength_of(phi0),
        alpha: alpha1,
        chord,
        side: side1,
        depth,
        specular_defect: (alpha1 - angle_in).abs(),
    })
}

/// Largest distance to the boundary along the chord, by golden-section search.
fn chord_depth(table: &SmoothTable2D, p: V2, v: V2, len: f64, phi0: f64, phi1: f64) -> f64 {
    let f =
        |t: f64| table.distance_to_boundary(add(p, scale(v, t)), phi0 + (phi1 - phi0) * t / len);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, len);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if b - a < 1e-14 * len {
            break;
        }
    }
    fc.max(fd)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseAngleSequence {
    /// Unwrapped arclength positions, starting with `s0`.
    pub positions: Vec<f64>,
    /// Base angle leaving each position.
    pub alphas: Vec<f64>,
    /// Chord leaving each position (one fewer than positions).
    pub chords: Vec<f64>,
    /// Depth of each chord.
    pub depths: Vec<f64>,
    pub max_specular_defect: f64,
}

impl BaseAngleSequence {
    pub fn max_depth(&self) -> f64 {
        self.depths.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_increment(&self) -> f64 {
        self.alphas
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    }

    /// Arclength travelled along the boundary.
    pub fn arc_covered(&self) -> f64 {
        (self.positions.last().unwrap() - self.positions[0]).abs()
    }
}

/// Iterates [`smooth_bounce`] `n` times, travelling with increasing arclength.
pub fn base_angle_run(
    table: &SmoothTable2D,
    s0: f64,
    alpha0: f64,
    n: usize,
) -> Result<BaseAngleSequence, SmoothError> {
    run_until(table, s0, alpha0, |seq| seq.chords.len() >= n)
}

fn run_until(
    table: &SmoothTable2D,
    s0: f64,
    alpha0: f64,
    mut done: impl FnMut(&BaseAngleSequence) -> bool,
) -> Result<BaseAngleSequence, SmoothError> {
    let mut seq = BaseAngleSequence {
        positions: vec![s0],
        alphas: vec![alpha0],
        chords: Vec::new(),
        depths: Vec::new(),
        max_specular_defect: 0.0,
    };
    let mut side = 1.0;
    while !done(&seq) {
        let b = smooth_bounce(
            table,
            *seq.positions.last().unwrap(),
            *seq.alphas.last().unwrap(),
            side,
        )?;
        side = b.side;
        seq.positions.push(b.s);
        seq.alphas.push(b.alpha);
        seq.chords.push(b.chord);
        seq.depths.push(b.depth);
        seq.max_specular_defect = seq.max_specular_defect.max(b.specular_defect);
    }
    Ok(seq)
}

/// Least-squares slope of `log y` against `log x`; `None` if any `y` is not
/// positive or fewer than two points are given.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() || y.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Some(sxy / sxx)
}

/// Per-run statistics of a law check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawRun {
    pub alpha0: f64,
    pub bounces: usize,
    pub min_chord_over_alpha: f64,
    pub max_increment: f64,
    /// Largest `|alpha_{i+1} - alpha_i| / alpha_i^2`.
    pub max_growth: f64,
    pub max_depth: f64,
    pub max_alpha: f64,
    pub max_specular_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub runs: Vec<LawRun>,
    /// Lower bound on chord length over base angle.
    pub c_chord: f64,
    /// Upper bound on per-bounce angle increment over squared base angle.
    pub c_growth: f64,
    /// Upper bound on distance to the boundary over squared initial angle.
    pub c_neighborhood: f64,
    /// Slope of max increment against `alpha0`; `None` when every increment
    /// vanishes (the circle).
    pub increment_slope: Option<f64>,
    pub neighborhood_slope: Option<f64>,
    /// Largest increment seen anywhere.
    pub max_increment: f64,
    /// Some chord went deeper than `10 c_neighborhood alpha0^2`.
    pub escaped: bool,
    pub max_specular_defect: f64,
}

/// Increments below this are treated as exact zeros when fitting slopes.
pub const ZERO_INCREMENT: f64 = 1e-12;

fn law_run(table: &SmoothTable2D, alpha0: f64, laps: f64) -> Result<LawRun, SmoothError> {
    let target = laps * table.perimeter();
    let seq = run_until(table, 0.0, alpha0, |s| s.arc_covered() >= target)?;
    let mut min_ratio = f64::INFINITY;
    let mut growth: f64 = 0.0;
    for i in 0..seq.chords.len() {
        let a = seq.alphas[i];
        min_ratio = min_ratio.min(seq.chords[i] / a);
        growth = growth.max((seq.alphas[i + 1] - a).abs() / (a * a));
    }
    Ok(LawRun {
        alpha0,
        bounces: seq.chords.len(),
        min_chord_over_alpha: min_ratio,
        max_increment: seq.max_increment(),
        max_growth: growth,
        max_depth: seq.max_depth(),
        max_alpha: seq.alphas.iter().copied().fold(0.0, f64::max),
        max_specular_defect: seq.max_specular_defect,
    })
}

/// Runs each `alpha0` of the grid for `laps` trips around the boundary and
/// fits the three base-angle laws.
pub fn verify_base_angle_laws(
    table: &SmoothTable2D,
    grid: &[f64],
    laps: f64,
) -> Result<LawReport, SmoothError> {
    let runs = map_slice(grid, |&alpha0| law_run(table, alpha0, laps))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let alphas: Vec<f64> = runs.iter().map(|r| r.alpha0).collect();
    let incs: Vec<f64> = runs.iter().map(|r| r.max_increment).collect();
    let depths: Vec<f64> = runs.iter().map(|r| r.max_depth).collect();
    let fold_max = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    let c_chord = runs
        .iter()
        .map(|r| r.min_chord_over_alpha)
        .fold(f64::INFINITY, f64::min);
    let c_growth = fold_max(&mut runs.iter().map(|r| r.max_growth));
    let c_neighborhood = fold_max(&mut runs.iter().map(|r| r.max_depth / (r.alpha0 * r.alpha0)));
    let max_increment = fold_max(&mut incs.iter().copied());
    let increment_slope = if max_increment <= ZERO_INCREMENT {
        None
    } else {
        loglog_slope(&alphas, &incs)
    };
    let escaped = runs
        .iter()
        .any(|r| r.max_depth > 10.0 * c_neighborhood * r.alpha0 * r.alpha0);
    let max_specular_defect = fold_max(&mut runs.iter().map(|r| r.max_specular_defect));
    Ok(LawReport {
        runs,
        c_chord,
        c_growth,
        c_neighborhood,
        increment_slope,
        neighborhood_slope: loglog_slope(&alphas, &depths),
        max_increment,
        escaped,
        max_specular_defect,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub alpha0: f64,
    pub bounces: usize,
    /// Largest distance between the trajectory and the boundary.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub s0: f64,
    pub arc_length: f64,
    pub rows: Vec<ConvergenceRow>,
    pub slope: Option<f64>,
}

/// For each launch angle, follows the trajectory from `s0` until it has
/// advanced `arc_length` along the boundary and records how far it strayed
/// from the boundary arc.
pub fn boundary_convergence_experiment(
    table: &SmoothTable2D,
    s0: f64,
    arc_length: f64,
    grid: &[f64],
) -> Result<ConvergenceReport, SmoothError> {
    let rows = map_slice(grid, |&alpha0| {
        let seq = run_until(table, s0, alpha0, |s| s.arc_covered() >= arc_length)?;
        // The final chord may overshoot; only count chords starting inside
        // the arc.
        let deviation = seq
            .depths
            .iter()
            .zip(&seq.positions)
            .filter(|(_, &p)| p - s0 < arc_length)
            .map(|(d, _)| *d)
            .fold(0.0, f64::max);
        Ok(ConvergenceRow {
            alpha0,
            bounces: seq.chords.len(),
            deviation,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>, SmoothError>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.alpha0).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.deviation).collect();
    Ok(ConvergenceReport {
        s0,
        arc_length,
        slope: loglog_slope(&xs, &ys),
        rows,
    })
}
