//! Convex polytopes given by half-spaces and vertices, their tangent and
//! normal cones, and the polar-pair test that encodes the reflection law at
//! arbitrary boundary points.
//!
//! Conventions
//! - A half-space is `<normal, x> <= offset` with `normal` of unit length.
//! - A polytope stores both representations plus facet/vertex incidence. For
//!   `dim <= 3` missing vertex data is derived by brute-force enumeration over
//!   `dim`-subsets of half-spaces; higher dimensions must supply it (simplices
//!   excepted, see [`Polytope::simplex`]).
//! - Redundant half-spaces are rejected, never silently dropped.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::linalg;

/// Points and vectors of the ambient Euclidean space.
pub type Point = DVector<f64>;

/// Tightness tolerance for constraints.
pub const EPS_ACTIVE: f64 = 1e-9;
/// Tolerance of the nonnegative-combination test in [`Polytope::is_polar`].
pub const EPS_POLAR: f64 = 1e-9;

/// Tolerances carried by a polytope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub active: f64,
    pub polar: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            active: EPS_ACTIVE,
            polar: EPS_POLAR,
        }
    }
}

impl Tolerances {
    pub fn uniform(eps: f64) -> Self {
        Self {
            active: eps,
            polar: eps,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolytopeError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("half-space {0} has a zero normal")]
    ZeroNormal(usize),
    #[error("polytope needs at least one half-space and one vertex")]
    Empty,
    #[error("vertex {vertex} violates half-space {halfspace} by {violation:e}")]
    VertexOutside {
        vertex: usize,
        halfspace: usize,
        violation: f64,
    },
    #[error("point {0} is not a vertex (tight constraints do not pin it down)")]
    NotAVertex(usize),
    #[error("vertices {0} and {1} coincide")]
    DuplicateVertex(usize, usize),
    #[error("half-space {0} is redundant")]
    RedundantHalfSpace(usize),
    #[error("facet {0} vertex set does not span a hyperplane")]
    DegenerateFacet(usize),
    #[error("facet/vertex incidence of half-space {0} disagrees with the geometry")]
    IncidenceMismatch(usize),
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("dimension {0} requires explicit vertices and facet incidence")]
    NeedsVertexData(usize),
    #[error("polygon vertices must be convex and counter-clockwise")]
    NotConvexPolygon,
    #[error("point lies outside the polytope")]
    PointOutside,
    #[error("direction leaves the tangent cone")]
    DirectionOutsideCone,
}

/// Closed half-space `<normal, x> <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: Point,
    pub offset: f64,
}

impl HalfSpace {
    /// Builds a half-space, rescaling `normal` to unit length.
    pub fn new(normal: Point, offset: f64) -> Result<Self, PolytopeError> {
        if !offset.is_finite() || normal.iter().any(|c| !c.is_finite()) {
            return Err(PolytopeError::NonFinite);
        }
        let len = normal.norm();
        if len == 0.0 {
            return Err(PolytopeError::ZeroNormal(0));
        }
        Ok(Self {
            normal: normal / len,
            offset: offset / len,
        })
    }

    pub fn from_slice(normal: &[f64], offset: f64) -> Result<Self, PolytopeError> {
        Self::new(DVector::from_column_slice(normal), offset)
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `<normal, x> - offset`; positive outside.
    pub fn violation(&self, x: &Point) -> f64 {
        self.normal.dot(x) - self.offset
    }

    /// Mirror image of a point across the bounding hyperplane.
    pub fn reflect_point(&self, x: &Point) -> Point {
        x - &self.normal * (2.0 * self.violation(x))
    }
}

/// Reflects a vector across the hyperplane orthogonal to `h.normal`.
pub fn reflect(v: &Point, h: &HalfSpace) -> Point {
    v - &h.normal * (2.0 * v.dot(&h.normal))
}

/// Position of a point relative to a polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Interior,
    /// Indices of the constraints that are tight at the point.
    Boundary(Vec<usize>),
    Outside,
}

/// `T_pK = { u : <n_i, u> <= 0 for all active i }`.
#[derive(Debug, Clone)]
pub struct TangentCone {
    pub base: Point,
    pub active: Vec<usize>,
    pub normals: Vec<Point>,
}

impl TangentCone {
    pub fn is_full_space(&self) -> bool {
        self.active.is_empty()
    }

    /// Whether `u` points into the body, up to `eps`.
    pub fn contains(&self, u: &Point, eps: f64) -> bool {
        self.normals.iter().all(|n| n.dot(u) <= eps)
    }

    pub fn normal_cone(&self) -> NormalCone {
        NormalCone {
            base: self.base.clone(),
            generators: self.normals.clone(),
        }
    }
}

/// Nonnegative span of the outward normals of the active constraints.
#[derive(Debug, Clone)]
pub struct NormalCone {
    pub base: Point,
    pub generators: Vec<Point>,
}

impl NormalCone {
    /// Residual of the best nonnegative combination of the generators
    /// approximating `w`.
    pub fn membership_residual(&self, w: &Point) -> f64 {
        if self.generators.is_empty() {
            return w.norm();
        }
        let a = DMatrix::from_columns(&self.generators);
        linalg::nnls(&a, w).residual
    }

    pub fn contains(&self, w: &Point, eps: f64) -> bool {
        self.membership_residual(w) <= eps
    }
}

/// Bounded convex polytope with both representations and incidence.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
    vertices: Vec<Point>,
    facet_vertices: Vec<Vec<usize>>,
    tol: Tolerances,
}

impl Polytope {
    /// Builds a polytope from complete data and validates it.
    pub fn new(
        halfspaces: Vec<HalfSpace>,
        vertices: Vec<Point>,
        facet_vertices: Vec<Vec<usize>>,
    ) -> Result<Self, PolytopeError> {
        Self::with_tolerances(halfspaces, vertices, facet_vertices, Tolerances::default())
    }

    pub fn with_tolerances(
        halfspaces: Vec<HalfSpace>,
        vertices: Vec<Point>,
        facet_vertices: Vec<Vec<usize>>,
        tol: Tolerances,
    ) -> Result<Self, PolytopeError> {
        let dim = halfspaces.first().ok_or(PolytopeError::Empty)?.dim();
        let p = Self {
            dim,
            halfspaces,
            vertices,
            facet_vertices,
            tol,
        };
        p.validate()?;
        Ok(p)
    }

    /// Derives vertices and incidence from half-spaces (`dim <= 3`).
    pub fn from_halfspaces(halfspaces: Vec<HalfSpace>) -> Result<Self, PolytopeError> {
        Self::from_halfspaces_with(halfspaces, Tolerances::default())
    }

    pub fn from_halfspaces_with(
        halfspaces: Vec<HalfSpace>,
        tol: Tolerances,
    ) -> Result<Self, PolytopeError> {
        let dim = halfspaces.first().ok_or(PolytopeError::Empty)?.dim();
        if dim > 3 {
            return Err(PolytopeError::NeedsVertexData(dim));
        }
        check_dims(&halfspaces, dim)?;
        let vertices = enumerate_vertices(&halfspaces, dim, tol.active);
        let facet_vertices = incidence(&halfspaces, &vertices, tol.active);
        Self::with_tolerances(halfspaces, vertices, facet_vertices, tol)
    }

    /// Simplex from exactly `dim + 1` half-spaces, any dimension.
    pub fn simplex(halfspaces: Vec<HalfSpace>) -> Result<Self, PolytopeError> {
        let dim = halfspaces.first().ok_or(PolytopeError::Empty)?.dim();
        check_dims(&halfspaces, dim)?;
        if halfspaces.len() != dim + 1 {
            return Err(PolytopeError::NeedsVertexData(dim));
        }
        let mut vertices = Vec::with_capacity(dim + 1);
        for skip in 0..=dim {
            let rows: Vec<&HalfSpace> = halfspaces
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, h)| h)
                .collect();
            let a = DMatrix::from_fn(dim, dim, |r, c| rows[r].normal[c]);
            let b = DVector::from_fn(dim, |r, _| rows[r].offset);
            let x = linalg::solve_square(&a, &b).ok_or(PolytopeError::Unbounded)?;
            vertices.push(x);
        }
        // Vertex `skip` lies on every facet except `skip`.
        let facet_vertices = (0..=dim)
            .map(|f| (0..=dim).filter(|&v| v != f).collect())
            .collect();
        Self::new(halfspaces, vertices, facet_vertices)
    }

    /// Convex polygon from counter-clockwise vertices.
    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Self, PolytopeError> {
        let n = vertices.len();
        if n < 3 {
            return Err(PolytopeError::NotConvexPolygon);
        }
        let mut halfspaces = Vec::with_capacity(n);
        let mut facet_vertices = Vec::with_capacity(n);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let turn = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if turn <= 0.0 {
                return Err(PolytopeError::NotConvexPolygon);
            }
            let normal = DVector::from_vec(vec![b[1] - a[1], a[0] - b[0]]);
            let offset = normal[0] * a[0] + normal[1] * a[1];
            halfspaces.push(HalfSpace::new(normal, offset)?);
            facet_vertices.push(vec![i, (i + 1) % n]);
        }
        let verts = vertices
            .iter()
            .map(|v| DVector::from_column_slice(v))
            .collect();
        Self::new(halfspaces, verts, facet_vertices)
    }

    /// Axis-aligned box `[0, l_1] x ... x [0, l_n]`.
    pub fn cuboid(lengths: &[f64]) -> Result<Self, PolytopeError> {
        let dim = lengths.len();
        let mut halfspaces = Vec::with_capacity(2 * dim);
        for (k, &l) in lengths.iter().enumerate() {
            let mut e = DVector::zeros(dim);
            e[k] = 1.0;
            halfspaces.push(HalfSpace::new(-e.clone(), 0.0)?);
            halfspaces.push(HalfSpace::new(e, l)?);
        }
        let vertices: Vec<Point> = (0..1usize << dim)
            .map(|mask| {
                DVector::from_fn(
                    dim,
                    |k, _| if mask >> k & 1 == 1 { lengths[k] } else { 0.0 },
                )
            })
            .collect();
        let facet_vertices = (0..2 * dim)
            .map(|f| {
                let k = f / 2;
                let upper = f % 2 == 1;
                (0..vertices.len())
                    .filter(|&m| (m >> k & 1 == 1) == upper)
                    .collect()
            })
            .collect();
        Self::new(halfspaces, vertices, facet_vertices)
    }

    /// Cartesian product `self x other`.
    pub fn product(&self, other: &Polytope) -> Result<Self, PolytopeError> {
        let a = self.dim;
        let dim = a + other.dim;
        let pad = |n: &Point, before: usize| {
            DVector::from_fn(dim, |k, _| {
                if k >= before && k < before + n.len() {
                    n[k - before]
                } else {
                    0.0
                }
            })
        };
        let mut halfspaces: Vec<HalfSpace> = self
            .halfspaces
            .iter()
            .map(|h| HalfSpace::new(pad(&h.normal, 0), h.offset))
            .collect::<Result<_, _>>()?;
        for h in &other.halfspaces {
            halfspaces.push(HalfSpace::new(pad(&h.normal, a), h.offset)?);
        }
        let nq = other.vertices.len();
        let mut vertices = Vec::with_capacity(self.vertices.len() * nq);
        for u in &self.vertices {
            for w in &other.vertices {
                vertices.push(DVector::from_fn(
                    dim,
                    |k, _| if k < a { u[k] } else { w[k - a] },
                ));
            }
        }
        let mut facet_vertices: Vec<Vec<usize>> = self
            .facet_vertices
            .iter()
            .map(|fv| {
                fv.iter()
                    .flat_map(|&iu| (0..nq).map(move |iw| iu * nq + iw))
                    .collect()
            })
            .collect();
        for fv in &other.facet_vertices {
            facet_vertices.push(
                (0..self.vertices.len())
                    .flat_map(|iu| fv.iter().map(move |&iw| iu * nq + iw))
                    .collect(),
            );
        }
        Self::with_tolerances(halfspaces, vertices, facet_vertices, self.tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facet_vertices(&self) -> &[Vec<usize>] {
        &self.facet_vertices
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn set_tolerances(&mut self, tol: Tolerances) {
        self.tol = tol;
    }

    pub fn centroid(&self) -> Point {
        let mut c = DVector::zeros(self.dim);
        for v in &self.vertices {
            c += v;
        }
        c / self.vertices.len() as f64
    }

    /// Vertices shared by two facets.
    pub fn common_vertices(&self, i: usize, j: usize) -> Vec<usize> {
        self.facet_vertices[i]
            .iter()
            .copied()
            .filter(|v| self.facet_vertices[j].contains(v))
            .collect()
    }

    /// Vertex pairs spanning an edge: the facets through both vertices share
    /// no other vertex.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let nv = self.vertices.len();
        let through: Vec<Vec<usize>> = (0..nv)
            .map(|v| {
                (0..self.facet_vertices.len())
                    .filter(|&f| self.facet_vertices[f].contains(&v))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        for u in 0..nv {
            for v in u + 1..nv {
                let common: Vec<usize> = through[u]
                    .iter()
                    .copied()
                    .filter(|f| through[v].contains(f))
                    .collect();
                if common.len() + 1 < self.dim {
                    continue;
                }
                let shared = (0..nv)
                    .filter(|w| common.iter().all(|f| through[*w].contains(f)))
                    .count();
                if shared == 2 {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Whether facets `i` and `j` meet in a face of codimension two.
    pub fn facets_adjacent(&self, i: usize, j: usize) -> bool {
        if i == j || self.dim < 2 {
            return false;
        }
        let common = self.common_vertices(i, j);
        if common.len() < self.dim - 1 {
            return false;
        }
        let pts: Vec<&Point> = common.iter().map(|&v| &self.vertices[v]).collect();
        linalg::affine_rank(&pts, 1e-9) == self.dim - 2
    }

    fn check_point(&self, x: &Point) -> Result<(), PolytopeError> {
        if x.len() != self.dim {
            return Err(PolytopeError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Constraints tight at `x` within the active tolerance.
    pub fn active_set(&self, x: &Point) -> Vec<usize> {
        self.halfspaces
            .iter()
            .enumerate()
            .filter(|(_, h)| h.violation(x).abs() <= self.tol.active)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn contains(&self, x: &Point) -> Result<Location, PolytopeError> {
        self.check_point(x)?;
        let mut active = Vec::new();
        for (i, h) in self.halfspaces.iter().enumerate() {
            let v = h.violation(x);
            if v > self.tol.active {
                return Ok(Location::Outside);
            }
            if v.abs() <= self.tol.active {
                active.push(i);
            }
        }
        Ok(if active.is_empty() {
            Location::Interior
        } else {
            Location::Boundary(active)
        })
    }

    pub fn tangent_cone(&self, p: &Point) -> Result<TangentCone, PolytopeError> {
        let active = match self.contains(p)? {
            Location::Outside => return Err(PolytopeError::PointOutside),
            Location::Interior => Vec::new(),
            Location::Boundary(a) => a,
        };
        let normals = active
            .iter()
            .map(|&i| self.halfspaces[i].normal.clone())
            .collect();
        Ok(TangentCone {
            base: p.clone(),
            active,
            normals,
        })
    }

    pub fn normal_cone(&self, p: &Point) -> Result<NormalCone, PolytopeError> {
        Ok(self.tangent_cone(p)?.normal_cone())
    }

    /// Whether unit vectors `u, v` of the tangent cone at `p` are polar,
    /// i.e. `-(u + v)` is a nonnegative combination of active normals.
    pub fn is_polar(&self, p: &Point, u: &Point, v: &Point) -> Result<bool, PolytopeError> {
        self.check_point(u)?;
        self.check_point(v)?;
        let cone = self.tangent_cone(p)?;
        if !cone.contains(u, self.tol.polar) || !cone.contains(v, self.tol.polar) {
            return Err(PolytopeError::DirectionOutsideCone);
        }
        let w = -(u + v);
        Ok(cone.normal_cone().contains(&w, self.tol.polar))
    }

    fn validate(&self) -> Result<(), PolytopeError> {
        let dim = self.dim;
        let eps = self.tol.active;
        check_dims(&self.halfspaces, dim)?;
        for (i, h) in self.halfspaces.iter().enumerate() {
            if (h.normal.norm() - 1.0).abs() > 1e-12 {
                return Err(PolytopeError::ZeroNormal(i));
            }
        }
        if self.vertices.is_empty() {
            return Err(PolytopeError::Empty);
        }
        if self.facet_vertices.len() != self.halfspaces.len() {
            return Err(PolytopeError::IncidenceMismatch(self.facet_vertices.len()));
        }
        for v in &self.vertices {
            if v.len() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(PolytopeError::NonFinite);
            }
        }
        for (vi, v) in self.vertices.iter().enumerate() {
            for (hi, h) in self.halfspaces.iter().enumerate() {
                let viol = h.violation(v);
                if viol > eps {
                    return Err(PolytopeError::VertexOutside {
                        vertex: vi,
                        halfspace: hi,
                        violation: viol,
                    });
                }
            }
            let tight: Vec<Point> = self
                .halfspaces
                .iter()
                .filter(|h| h.violation(v).abs() <= eps)
                .map(|h| h.normal.clone())
                .collect();
            let rank = if tight.is_empty() {
                0
            } else {
                linalg::rank(&DMatrix::from_columns(&tight), 1e-9)
            };
            if rank < dim {
                return Err(PolytopeError::NotAVertex(vi));
            }
            for (wi, w) in self.vertices.iter().enumerate().skip(vi + 1) {
                if (v - w).norm() <= eps {
                    return Err(PolytopeError::DuplicateVertex(vi, wi));
                }
            }
        }
        for i in 0..self.halfspaces.len() {
            for j in i + 1..self.halfspaces.len() {
                if self.halfspaces[i].normal.dot(&self.halfspaces[j].normal) > 1.0 - 1e-12 {
                    return Err(PolytopeError::RedundantHalfSpace(j));
                }
            }
        }
        for (fi, (h, listed)) in self.halfspaces.iter().zip(&self.facet_vertices).enumerate() {
            let mut tight: Vec<usize> = self
                .vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| h.violation(v).abs() <= eps)
                .map(|(i, _)| i)
                .collect();
            let mut listed = listed.clone();
            listed.sort_unstable();
            listed.dedup();
            tight.sort_unstable();
            if listed != tight {
                return Err(PolytopeError::IncidenceMismatch(fi));
            }
            if tight.len() < dim {
                return Err(PolytopeError::RedundantHalfSpace(fi));
            }
            let pts: Vec<&Point> = tight.iter().map(|&v| &self.vertices[v]).collect();
            if linalg::affine_rank(&pts, 1e-9) != dim - 1 {
                return Err(PolytopeError::DegenerateFacet(fi));
            }
        }
        if !recession_cone_trivial(&self.halfspaces, dim, eps) {
            return Err(PolytopeError::Unbounded);
        }
        Ok(())
    }
}

fn check_dims(halfspaces: &[HalfSpace], dim: usize) -> Result<(), PolytopeError> {
    if dim == 0 {
        return Err(PolytopeError::Empty);
    }
    for (i, h) in halfspaces.iter().enumerate() {
        if h.dim() != dim {
            return Err(PolytopeError::DimensionMismatch {
                expected: dim,
                found: h.dim(),
            });
        }
        if h.normal.norm() == 0.0 {
            return Err(PolytopeError::ZeroNormal(i));
        }
    }
    Ok(())
}

/// Feasible intersection points of every `dim`-subset of hyperplanes.
fn enumerate_vertices(halfspaces: &[HalfSpace], dim: usize, eps: f64) -> Vec<Point> {
    let mut vertices: Vec<Point> = Vec::new();
    for subset in combinations(halfspaces.len(), dim) {
        let a = DMatrix::from_fn(dim, dim, |r, c| halfspaces[subset[r]].normal[c]);
        let b = DVector::from_fn(dim, |r, _| halfspaces[subset[r]].offset);
        let Some(x) = linalg::solve_square(&a, &b) else {
            continue;
        };
        if halfspaces.iter().any(|h| h.violation(&x) > eps) {
            continue;
        }
        if vertices.iter().all(|v| (v - &x).norm() > eps) {
            vertices.push(x);
        }
    }
    vertices
}

fn incidence(halfspaces: &[HalfSpace], vertices: &[Point], eps: f64) -> Vec<Vec<usize>> {
    halfspaces
        .iter()
        .map(|h| {
            vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| h.violation(v).abs() <= eps)
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

/// True when no nonzero `u` satisfies `<n_i, u> <= 0` for all `i`.
///
/// For a pointed cone it suffices to test candidate extreme rays, each cut
/// out by `dim - 1` independent constraints.
fn recession_cone_trivial(halfspaces: &[HalfSpace], dim: usize, eps: f64) -> bool {
    let k = dim - 1;
    for subset in combinations(halfspaces.len(), k) {
        let ray = if k == 0 {
            DVector::from_element(1, 1.0)
        } else {
            let m = DMatrix::from_fn(k, dim, |r, c| halfspaces[subset[r]].normal[c]);
            match linalg::null_vector(&m) {
                Some(r) => r,
                None => continue,
            }
        };
        for sign in [1.0, -1.0] {
            let r = &ray * sign;
            if halfspaces.iter().all(|h| h.normal.dot(&r) <= eps) {
                return false;
            }
        }
    }
    true
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
