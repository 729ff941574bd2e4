//! Corner limits of a planar wedge.
//!
//! A trajectory travelling parallel to the bisector of a wedge of opening
//! angle `alpha` towards its apex bounces a bounded number of times and leaves
//! again. As the offset from the bisector tends to zero from either side the
//! outgoing direction converges, and the two one-sided limits are mirror
//! images. They agree exactly when `alpha = pi/k`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Gaps at or below this value count as continuous.
pub const EPS_GAP: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CornerError {
    #[error("opening angle {0} is not in (0, pi)")]
    InvalidAngle(f64),
    #[error("offset 0 is the corner shot itself")]
    ZeroOffset,
    #[error("offset {0} starts outside the wedge")]
    StartOutside(f64),
    #[error("horizon must be positive and finite")]
    InvalidHorizon,
}

/// Face against which `beta` is measured on the positive-offset side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WedgeFace {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WedgeLimitReport {
    pub alpha: f64,
    /// Minimal integer with `(1/2 + m) alpha - pi >= 0`.
    pub m: u32,
    pub beta: f64,
    pub gap: f64,
    pub continuous: bool,
    /// Outgoing direction angle (from the outward bisector) for offsets `> 0`.
    pub limit_above: f64,
    /// Same for offsets `< 0`; the mirror image of `limit_above`.
    pub limit_below: f64,
    pub beta_face: WedgeFace,
}

fn check_alpha(alpha: f64) -> Result<(), CornerError> {
    if alpha.is_finite() && alpha > 0.0 && alpha < PI {
        Ok(())
    } else {
        Err(CornerError::InvalidAngle(alpha))
    }
}

/// Closed-form corner limits for a wedge of opening `alpha`.
pub fn limit_reflection(alpha: f64) -> Result<WedgeLimitReport, CornerError> {
    check_alpha(alpha)?;
    let x = PI / alpha - 0.5;
    let r = x.round();
    // Snap to the lower bin at exact boundaries so that beta = 0, not alpha.
    let m = if (x - r).abs() <= 1e-12 * x.max(1.0) {
        r
    } else {
        x.ceil()
    };
    let beta = ((0.5 + m) * alpha - PI).clamp(0.0, alpha);
    let m = m as u32;
    let limit_above = if m.is_multiple_of(2) {
        alpha / 2.0 - beta
    } else {
        beta - alpha / 2.0
    };
    let gap = (alpha - 2.0 * beta).abs();
    Ok(WedgeLimitReport {
        alpha,
        m,
        beta,
        gap,
        continuous: gap <= EPS_GAP,
        limit_above,
        limit_below: -limit_above,
        beta_face: if m.is_multiple_of(2) {
            WedgeFace::Upper
        } else {
            WedgeFace::Lower
        },
    })
}

/// Reports for `n` evenly spaced angles in `[lo, hi]`, computed in parallel.
pub fn sweep(lo: f64, hi: f64, n: usize) -> Result<Vec<WedgeLimitReport>, CornerError> {
    let step = if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    };
    crate::par::map_range(n, |i| limit_reflection(lo + step * i as f64))
        .into_iter()
        .collect()
}

type V2 = [f64; 2];

fn dot(a: V2, b: V2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: V2, b: V2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn unit(angle: f64) -> V2 {
    [angle.cos(), angle.sin()]
}

/// Linear map `x -> a x + b` in the plane, stored column-major.
#[derive(Debug, Clone, Copy)]
struct Affine2 {
    a: [f64; 4],
    b: V2,
}

impl Affine2 {
    fn identity() -> Self {
        Self {
            a: [1.0, 0.0, 0.0, 1.0],
            b: [0.0, 0.0],
        }
    }

    fn linear(&self, v: V2) -> V2 {
        [
            self.a[0] * v[0] + self.a[2] * v[1],
            self.a[1] * v[0] + self.a[3] * v[1],
        ]
    }

    fn apply(&self, v: V2) -> V2 {
        let l = self.linear(v);
        [l[0] + self.b[0], l[1] + self.b[1]]
    }

    /// Reflection across the line through `p` with unit direction `u`.
    fn reflection(p: V2, u: V2) -> Self {
        let a = [
            2.0 * u[0] * u[0] - 1.0,
            2.0 * u[0] * u[1],
            2.0 * u[0] * u[1],
            2.0 * u[1] * u[1] - 1.0,
        ];
        let r = Self { a, b: [0.0, 0.0] };
        let rp = r.linear(p);
        Self {
            a,
            b: [p[0] - rp[0], p[1] - rp[1]],
        }
    }

    /// `self` after `other`.
    fn compose(&self, other: &Self) -> Self {
        let c0 = self.linear([other.a[0], other.a[1]]);
        let c1 = self.linear([other.a[2], other.a[3]]);
        Self {
            a: [c0[0], c0[1], c1[0], c1[1]],
            b: self.apply(other.b),
        }
    }
}

/// A wedge placed anywhere in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wedge {
    pub apex: V2,
    /// Direction angle of the bisector, pointing into the wedge.
    pub bisector: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WedgeRun {
    /// Outgoing direction in the wedge's own frame.
    pub direction: V2,
    /// Angle of `direction` measured from the outward bisector.
    pub angle: f64,
    pub bounces: usize,
    /// Final position in the wedge's own frame.
    pub end: V2,
    /// Mirror rays of the unfolded fan that were crossed, as direction angles.
    pub fan: Vec<f64>,
}

impl Wedge {
    pub fn standard(alpha: f64) -> Self {
        Self {
            apex: [0.0, 0.0],
            bisector: 0.0,
            alpha,
        }
    }

    fn to_world(&self) -> Affine2 {
        let (s, c) = self.bisector.sin_cos();
        Affine2 {
            a: [c, s, -s, c],
            b: self.apex,
        }
    }

    /// Runs the bisector-parallel trajectory at signed `offset`, starting one
    /// unit from the apex, by unfolding into mirror copies of the wedge.
    pub fn unfold(&self, offset: f64, horizon: f64) -> Result<WedgeRun, CornerError> {
        check_alpha(self.alpha)?;
        if offset == 0.0 {
            return Err(CornerError::ZeroOffset);
        }
        if !offset.is_finite() || offset.abs() >= (self.alpha / 2.0).tan() {
            return Err(CornerError::StartOutside(offset));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(CornerError::InvalidHorizon);
        }
        let frame = self.to_world();
        let start = frame.apply([1.0, offset]);
        let dir = frame.linear([-1.0, 0.0]);
        let side = offset.signum();
        // Unfolded space -> wedge, in world coordinates.
        let mut fold = Affine2::identity();
        let mut bounces = 0;
        let mut fan = Vec::new();
        loop {
            let k = bounces as f64;
            let local = side * (2.0 * k + 1.0) * self.alpha / 2.0;
            if local.abs() >= PI {
                break;
            }
            let ray = unit(self.bisector + local);
            // Intersection of start + t dir with the ray apex + s ray.
            let denom = cross(dir, ray);
            if denom == 0.0 {
                break;
            }
            let w = [self.apex[0] - start[0], self.apex[1] - start[1]];
            let t = cross(w, ray) / denom;
            let s = cross(w, dir) / denom;
            if !(t > 0.0 && t <= horizon && s > 0.0) {
                break;
            }
            fold = fold.compose(&Affine2::reflection(self.apex, ray));
            fan.push(local);
            bounces += 1;
        }
        let end_world = fold.apply([start[0] + horizon * dir[0], start[1] + horizon * dir[1]]);
        let out_world = fold.linear(dir);
        let inv = frame_inverse(&frame);
        let direction = inv.linear(out_world);
        let end = inv.apply(end_world);
        Ok(WedgeRun {
            direction,
            angle: direction[1].atan2(direction[0]),
            bounces,
            end,
            fan,
        })
    }

    /// Unsigned angle between the outgoing directions for `+offset` and
    /// `-offset`.
    pub fn gap(&self, offset: f64, horizon: f64) -> Result<f64, CornerError> {
        let a = self.unfold(offset.abs(), horizon)?;
        let b = self.unfold(-offset.abs(), horizon)?;
        Ok(cross(a.direction, b.direction)
            .atan2(dot(a.direction, b.direction))
            .abs())
    }
}

fn frame_inverse(f: &Affine2) -> Affine2 {
    // Rotations are orthogonal: the inverse is the transpose.
    let a = [f.a[0], f.a[2], f.a[1], f.a[3]];
    let r = Affine2 { a, b: [0.0, 0.0] };
    let rb = r.linear(f.b);
    Affine2 {
        a,
        b: [-rb[0], -rb[1]],
    }
}

/// [`Wedge::unfold`] on the standard wedge with apex at the origin and
/// bisector along the positive x axis.
pub fn unfold_wedge(alpha: f64, offset: f64, horizon: f64) -> Result<WedgeRun, CornerError> {
    Wedge::standard(alpha).unfold(offset, horizon)
}
