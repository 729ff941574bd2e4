//! Billiard trajectories on polyhedral tables.
//!
//! Two independent integrators are provided:
//! - [`simulate`] moves a point and reflects its direction at each bounce;
//! - [`simulate_unfolded`] follows one straight line through iterated mirror
//!   copies of the table and folds it back.
//!
//! Away from corners both produce the same event structure. At a corner the
//! continuation is not unique; [`CornerPolicy`] makes the choice explicit.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alcove;
use crate::polytope::{reflect, Location, Point, Polytope, PolytopeError};

/// Minimum advance along a ray before a new constraint may be hit.
pub const EPS_STEP: f64 = 1e-12;
/// Hits with `|<dir, n>|` below this are treated as sliding along the facet.
pub const EPS_TANGENT: f64 = 1e-10;
/// Events up to this far past the horizon are still recorded.
pub const EPS_HORIZON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("no constraint is ever hit; the table is corrupt")]
    NoProgress,
    #[error("initial direction leaves the tangent cone")]
    DegenerateStart,
    #[error("corner continuation is ambiguous at t = {time} (active facets {active:?})")]
    CornerAmbiguous { time: f64, active: Vec<usize> },
    #[error("bounce budget {budget} exceeded at t = {time}")]
    BounceBudgetExceeded { budget: usize, time: f64 },
    #[error("table is not an alcove")]
    NotAnAlcove,
    #[error("horizon must be positive and finite")]
    InvalidHorizon,
    #[error("direction must be a nonzero finite vector")]
    InvalidDirection,
}

/// Continuation rule at points where two or more facets are hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CornerPolicy {
    /// Refuse to continue.
    Strict,
    /// Send the trajectory straight back (`-incoming`), polar on any cone.
    PointReflect,
    /// Fold the straight continuation through the local reflection group;
    /// only legal on alcoves.
    FoldGroup,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryState {
    pub point: Point,
    pub direction: Point,
    pub time: f64,
}

impl TrajectoryState {
    /// State at time zero; `direction` is normalised.
    pub fn new(point: Point, direction: Point) -> Result<Self, DynamicsError> {
        let len = direction.norm();
        if !len.is_finite() || len == 0.0 {
            return Err(DynamicsError::InvalidDirection);
        }
        Ok(Self {
            point,
            direction: direction / len,
            time: 0.0,
        })
    }

    pub fn from_slices(point: &[f64], direction: &[f64]) -> Result<Self, DynamicsError> {
        Self::new(
            DVector::from_column_slice(point),
            DVector::from_column_slice(direction),
        )
    }

    /// Same point, opposite direction.
    pub fn reversed(&self) -> Self {
        Self {
            point: self.point.clone(),
            direction: -&self.direction,
            time: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BounceKind {
    Facet,
    Corner,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BounceEvent {
    pub time: f64,
    pub point: Point,
    pub incoming: Point,
    pub outgoing: Point,
    pub active: Vec<usize>,
    pub kind: BounceKind,
}

impl BounceEvent {
    pub(crate) fn new(
        time: f64,
        point: Point,
        incoming: Point,
        outgoing: Point,
        active: Vec<usize>,
    ) -> Self {
        let kind = if active.len() >= 2 {
            BounceKind::Corner
        } else {
            BounceKind::Facet
        };
        Self {
            time,
            point,
            incoming,
            outgoing,
            active,
            kind,
        }
    }
}

/// Unit-speed trajectory: start state, time-ordered bounces, final state.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub start: TrajectoryState,
    pub events: Vec<BounceEvent>,
    pub horizon: f64,
    pub end: TrajectoryState,
}

impl Trajectory {
    pub fn bounce_count(&self) -> usize {
        self.events.len()
    }

    /// Active sets of all bounces, in order.
    pub fn facet_sequence(&self) -> Vec<Vec<usize>> {
        self.events.iter().map(|e| e.active.clone()).collect()
    }

    /// Position at time `t`, clamped to `[start.time, horizon]`.
    pub fn position_at(&self, t: f64) -> Point {
        let t = t.clamp(self.start.time, self.horizon);
        let idx = self.events.partition_point(|e| e.time <= t);
        if idx == 0 {
            &self.start.point + &self.start.direction * (t - self.start.time)
        } else {
            let e = &self.events[idx - 1];
            &e.point + &e.outgoing * (t - e.time)
        }
    }

    /// Sum of the Euclidean lengths of the straight pieces.
    pub fn path_length(&self) -> f64 {
        let mut len = 0.0;
        let mut prev = &self.start.point;
        for e in &self.events {
            len += (&e.point - prev).norm();
            prev = &e.point;
        }
        len + (&self.end.point - prev).norm()
    }

    /// Breakpoints of the piecewise-linear parametrisation.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut t = vec![self.start.time];
        t.extend(self.events.iter().map(|e| e.time));
        t.push(self.horizon);
        t
    }

    /// `sup_t |self(t) - other(t)|` over the common horizon.
    ///
    /// Both paths are piecewise linear, so the distance is convex between
    /// consecutive breakpoints and the supremum is attained at one of them.
    pub fn sup_distance(&self, other: &Trajectory) -> f64 {
        let horizon = self.horizon.min(other.horizon);
        let mut times = self.breakpoints();
        times.extend(other.breakpoints());
        times
            .into_iter()
            .filter(|&t| t <= horizon)
            .chain(std::iter::once(horizon))
            .map(|t| (self.position_at(t) - other.position_at(t)).norm())
            .fold(0.0, f64::max)
    }
}

/// Where a ray first meets a new constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryHit {
    pub point: Point,
    pub distance: f64,
    pub active: Vec<usize>,
}

/// Default bounce budget: ten times a linear bound in the horizon.
pub fn bounce_budget(table: &Polytope, horizon: f64) -> usize {
    (10.0 * (horizon + 1.0) * table.halfspaces().len() as f64).ceil() as usize
}

pub(crate) fn check_state(table: &Polytope, s: &TrajectoryState) -> Result<(), DynamicsError> {
    if s.direction.len() != table.dim() {
        return Err(PolytopeError::DimensionMismatch {
            expected: table.dim(),
            found: s.direction.len(),
        }
        .into());
    }
    match table.contains(&s.point)? {
        Location::Outside => Err(PolytopeError::PointOutside.into()),
        Location::Interior => Ok(()),
        Location::Boundary(active) => {
            let hs = table.halfspaces();
            if active
                .iter()
                .any(|&i| hs[i].normal.dot(&s.direction) > EPS_TANGENT)
            {
                Err(DynamicsError::DegenerateStart)
            } else {
                Ok(())
            }
        }
    }
}

/// First boundary point reached from `s` along its direction.
pub fn advance_to_boundary(
    table: &Polytope,
    s: &TrajectoryState,
) -> Result<BoundaryHit, DynamicsError> {
    check_state(table, s)?;
    let mut best = f64::INFINITY;
    for h in table.halfspaces() {
        let rate = h.normal.dot(&s.direction);
        if rate <= EPS_TANGENT {
            continue;
        }
        let t = -h.violation(&s.point) / rate;
        if t > EPS_STEP && t < best {
            best = t;
        }
    }
    if !best.is_finite() {
        return Err(DynamicsError::NoProgress);
    }
    let point = &s.point + &s.direction * best;
    let active = table.active_set(&point);
    Ok(BoundaryHit {
        point,
        distance: best,
        active,
    })
}

/// Outgoing direction for a trajectory arriving at a boundary point.
///
/// A single transversally hit facet gives the specular reflection. Anything
/// else is a corner and is resolved by `policy`.
pub fn reflect_at(
    table: &Polytope,
    time: f64,
    incoming: &Point,
    active: &[usize],
    policy: CornerPolicy,
) -> Result<Point, DynamicsError> {
    let hs = table.halfspaces();
    let hit: Vec<usize> = active
        .iter()
        .copied()
        .filter(|&i| hs[i].normal.dot(incoming) > EPS_TANGENT)
        .collect();
    if hit.is_empty() {
        return Ok(incoming.clone());
    }
    if hit.len() == 1 {
        let out = reflect(incoming, &hs[hit[0]]);
        if active
            .iter()
            .all(|&i| hs[i].normal.dot(&out) <= EPS_TANGENT)
        {
            return Ok(out);
        }
    }
    match policy {
        CornerPolicy::Strict => Err(DynamicsError::CornerAmbiguous {
            time,
            active: active.to_vec(),
        }),
        CornerPolicy::PointReflect => Ok(-incoming),
        CornerPolicy::FoldGroup => alcove::fold_direction(table, active, incoming)
            .map(|(dir, _)| dir)
            .map_err(|_| DynamicsError::NotAnAlcove),
    }
}

pub(crate) fn check_horizon(horizon: f64) -> Result<(), DynamicsError> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(DynamicsError::InvalidHorizon)
    }
}

/// Direct simulation by specular reflection up to time `horizon`.
pub fn simulate(
    table: &Polytope,
    start: &TrajectoryState,
    horizon: f64,
    policy: CornerPolicy,
) -> Result<Trajectory, DynamicsError> {
    check_horizon(horizon)?;
    check_state(table, start)?;
    if policy == CornerPolicy::FoldGroup
        && !alcove::check_alcove(table, alcove::EPS_ANGLE).is_alcove
    {
        return Err(DynamicsError::NotAnAlcove);
    }
    let budget = bounce_budget(table, horizon);
    let mut state = TrajectoryState {
        time: 0.0,
        ..start.clone()
    };
    let mut events = Vec::new();
    loop {
        let hit = advance_to_boundary(table, &state)?;
        let t_hit = state.time + hit.distance;
        if t_hit > horizon + EPS_HORIZON {
            let point = &state.point + &state.direction * (horizon - state.time);
            let end = TrajectoryState {
                point,
                direction: state.direction,
                time: horizon,
            };
            return Ok(Trajectory {
                start: start.clone(),
                events,
                horizon,
                end,
            });
        }
        let outgoing = reflect_at(table, t_hit, &state.direction, &hit.active, policy)?;
        events.push(BounceEvent::new(
            t_hit,
            hit.point.clone(),
            state.direction.clone(),
            outgoing.clone(),
            hit.active,
        ));
        if events.len() > budget {
            return Err(DynamicsError::BounceBudgetExceeded {
                budget,
                time: t_hit,
            });
        }
        state = TrajectoryState {
            point: hit.point,
            direction: outgoing,
            time: t_hit,
        };
        if t_hit >= horizon {
            let end = TrajectoryState {
                time: horizon,
                ..state
            };
            return Ok(Trajectory {
                start: start.clone(),
                events,
                horizon,
                end,
            });
        }
    }
}

/// Isometry `x -> linear * x + shift` from unfolded space to the table.
#[derive(Debug, Clone)]
pub(crate) struct Isometry {
    pub linear: DMatrix<f64>,
    pub shift: Point,
}

impl Isometry {
    pub fn identity(dim: usize) -> Self {
        Self {
            linear: DMatrix::identity(dim, dim),
            shift: DVector::zeros(dim),
        }
    }

    pub fn apply(&self, x: &Point) -> Point {
        &self.linear * x + &self.shift
    }

    /// Post-composes with the reflection in the hyperplane `<n, y> = c`.
    pub fn then_reflect(&mut self, normal: &Point, offset: f64) {
        let dim = normal.len();
        let r = DMatrix::identity(dim, dim) - normal * normal.transpose() * 2.0;
        self.linear = &r * &self.linear;
        self.shift = &r * &self.shift + normal * (2.0 * offset);
    }
}

/// Exit parameter of the line `x0 + t d` (mapped by `g`) from the table,
/// strictly after `t_from`.
pub(crate) fn line_exit(
    table: &Polytope,
    g: &Isometry,
    x0: &Point,
    d: &Point,
    t_from: f64,
) -> Option<f64> {
    let base = g.apply(x0);
    let dir = &g.linear * d;
    let mut best = f64::INFINITY;
    for h in table.halfspaces() {
        let rate = h.normal.dot(&dir);
        if rate <= EPS_TANGENT {
            continue;
        }
        let t = -h.violation(&base) / rate;
        if t > t_from + EPS_STEP && t < best {
            best = t;
        }
    }
    best.is_finite().then_some(best)
}

/// Simulation by unfolding: a single straight line through mirror copies of
/// the table, mapped back by the accumulated reflections.
///
/// Corners are not resolved here; a genuine corner hit yields
/// [`DynamicsError::CornerAmbiguous`].
pub fn simulate_unfolded(
    table: &Polytope,
    start: &TrajectoryState,
    horizon: f64,
) -> Result<Trajectory, DynamicsError> {
    check_horizon(horizon)?;
    check_state(table, start)?;
    let budget = bounce_budget(table, horizon);
    let hs = table.halfspaces();
    let x0 = &start.point;
    let d = &start.direction;
    let mut g = Isometry::identity(table.dim());
    let mut t = 0.0;
    let mut events = Vec::new();
    loop {
        let t_hit = line_exit(table, &g, x0, d, t).ok_or(DynamicsError::NoProgress)?;
        if t_hit > horizon + EPS_HORIZON {
            let end = TrajectoryState {
                point: g.apply(&(x0 + d * horizon)),
                direction: &g.linear * d,
                time: horizon,
            };
            return Ok(Trajectory {
                start: start.clone(),
                events,
                horizon,
                end,
            });
        }
        let point = g.apply(&(x0 + d * t_hit));
        let incoming = &g.linear * d;
        let active = table.active_set(&point);
        let crossed: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&i| hs[i].normal.dot(&incoming) > EPS_TANGENT)
            .collect();
        if crossed.len() != 1 {
            return Err(DynamicsError::CornerAmbiguous {
                time: t_hit,
                active,
            });
        }
        let facet = &hs[crossed[0]];
        g.then_reflect(&facet.normal, facet.offset);
        let outgoing = &g.linear * d;
        if active
            .iter()
            .any(|&i| hs[i].normal.dot(&outgoing) > EPS_TANGENT)
        {
            return Err(DynamicsError::CornerAmbiguous {
                time: t_hit,
                active,
            });
        }
        events.push(BounceEvent::new(t_hit, point, incoming, outgoing, active));
        if events.len() > budget {
            return Err(DynamicsError::BounceBudgetExceeded {
                budget,
                time: t_hit,
            });
        }
        t = t_hit;
        if t_hit >= horizon {
            let end = TrajectoryState {
                point: g.apply(&(x0 + d * horizon)),
                direction: &g.linear * d,
                time: horizon,
            };
            return Ok(Trajectory {
                start: start.clone(),
                events,
                horizon,
                end,
            });
        }
    }
}
