//! Alcoves: polytopes whose dihedral angles are all of the form `pi/m`.
//!
//! Such a polytope is a fundamental domain of the affine reflection group
//! generated by its facet reflections. This module decides the property,
//! extracts the Coxeter diagram, matches its components against the catalogue
//! of irreducible affine diagrams, and realises the continuous billiard flow
//! on an alcove by folding straight lines of the ambient space.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{
    bounce_budget, check_horizon, check_state, line_exit, BounceEvent, DynamicsError, Isometry,
    Trajectory, TrajectoryState, EPS_HORIZON, EPS_TANGENT,
};
use crate::polytope::{HalfSpace, Point, Polytope, PolytopeError};

/// Tolerance when binning a dihedral angle to `pi/m`.
pub const EPS_ANGLE: f64 = 1e-9;
/// Largest `m` considered when binning.
pub const M_MAX: u32 = 64;
/// Reflection budget of [`fold_direction`].
const DIRECTION_WORD_BUDGET: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlcoveError {
    #[error("folding did not terminate within {0} reflections")]
    WordBudgetExceeded(usize),
    #[error("diagram component {0:?} matches no affine Coxeter diagram")]
    UnknownComponent(Vec<usize>),
    #[error("table is not an alcove")]
    NotAnAlcove,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Interior dihedral angles between adjacent facets.
#[derive(Debug, Clone, PartialEq)]
pub struct DihedralAngleMatrix {
    angles: Vec<Vec<Option<f64>>>,
}

impl DihedralAngleMatrix {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.angles[i][j].is_some()
    }

    pub fn angle(&self, i: usize, j: usize) -> Option<f64> {
        self.angles[i][j]
    }

    /// All adjacent pairs `(i, j, angle)` with `i < j`.
    pub fn pairs(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if let Some(a) = self.angles[i][j] {
                    out.push((i, j, a));
                }
            }
        }
        out
    }
}

pub fn dihedral_angles(table: &Polytope) -> DihedralAngleMatrix {
    let hs = table.halfspaces();
    let n = hs.len();
    let mut angles = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if table.facets_adjacent(i, j) {
                let c = hs[i].normal.dot(&hs[j].normal).clamp(-1.0, 1.0);
                let a = PI - c.acos();
                angles[i][j] = Some(a);
                angles[j][i] = Some(a);
            }
        }
    }
    DihedralAngleMatrix { angles }
}

/// Coxeter label of a diagram edge; pairs at angle `pi/2` carry no edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeLabel {
    Finite(u32),
    /// Parallel facets.
    Infinite,
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Finite(m) => write!(f, "{m}"),
            EdgeLabel::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterEdge {
    pub i: usize,
    pub j: usize,
    pub label: EdgeLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterDiagram {
    pub nodes: usize,
    pub edges: Vec<CoxeterEdge>,
    /// Connected components, each sorted, ordered by smallest node.
    pub components: Vec<Vec<usize>>,
}

impl CoxeterDiagram {
    pub fn new(nodes: usize, mut edges: Vec<CoxeterEdge>) -> Self {
        for e in &mut edges {
            if e.i > e.j {
                std::mem::swap(&mut e.i, &mut e.j);
            }
        }
        edges.sort_by_key(|e| (e.i, e.j));
        let components = connected_components(nodes, &edges);
        Self {
            nodes,
            edges,
            components,
        }
    }

    fn label_matrix(&self) -> Vec<Vec<Option<EdgeLabel>>> {
        let mut m = vec![vec![None; self.nodes]; self.nodes];
        for e in &self.edges {
            m[e.i][e.j] = Some(e.label);
            m[e.j][e.i] = Some(e.label);
        }
        m
    }
}

fn connected_components(nodes: usize, edges: &[CoxeterEdge]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for e in edges {
        let (a, b) = (find(&mut parent, e.i), find(&mut parent, e.j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut root_index = vec![usize::MAX; nodes];
    for v in 0..nodes {
        let r = find(&mut parent, v);
        if root_index[r] == usize::MAX {
            root_index[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[root_index[r]].push(v);
    }
    comps
}

/// Adjacent facet pair whose angle is not `pi/m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleFailure {
    pub i: usize,
    pub j: usize,
    pub angle: f64,
    pub nearest_m: u32,
    pub nearest_angle: f64,
}

/// Angle that falls within `10 * eps` of two different bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinWarning {
    pub i: usize,
    pub j: usize,
    pub angle: f64,
    pub bins: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlcoveVerdict {
    pub is_alcove: bool,
    pub diagram: Option<CoxeterDiagram>,
    pub failures: Vec<AngleFailure>,
    pub warnings: Vec<BinWarning>,
}

/// Decides the alcove property from dihedral angles.
pub fn check_alcove(table: &Polytope, eps_angle: f64) -> AlcoveVerdict {
    let dihedral = dihedral_angles(table);
    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    let mut edges = Vec::new();
    for (i, j, angle) in dihedral.pairs() {
        let close: Vec<u32> = (2..=M_MAX)
            .filter(|&m| (angle - PI / m as f64).abs() <= 10.0 * eps_angle)
            .collect();
        if close.len() >= 2 {
            warnings.push(BinWarning {
                i,
                j,
                angle,
                bins: close,
            });
        }
        let m = ((PI / angle).round() as u32).clamp(2, M_MAX);
        let binned = PI / m as f64;
        if (angle - binned).abs() <= eps_angle {
            if m >= 3 {
                edges.push(CoxeterEdge {
                    i,
                    j,
                    label: EdgeLabel::Finite(m),
                });
            }
        } else {
            failures.push(AngleFailure {
                i,
                j,
                angle,
                nearest_m: m,
                nearest_angle: binned,
            });
        }
    }
    let hs = table.halfspaces();
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            if !dihedral.adjacent(i, j) && hs[i].normal.dot(&hs[j].normal) <= -1.0 + eps_angle {
                edges.push(CoxeterEdge {
                    i,
                    j,
                    label: EdgeLabel::Infinite,
                });
            }
        }
    }
    let is_alcove = failures.is_empty();
    AlcoveVerdict {
        is_alcove,
        diagram: is_alcove.then(|| CoxeterDiagram::new(hs.len(), edges)),
        failures,
        warnings,
    }
}

/// Irreducible affine Coxeter types; the payload is the rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AffineType {
    /// `n >= 1`; `A(1)` is the interval.
    A(usize),
    /// `n >= 3`.
    B(usize),
    /// `n >= 2`; `C(2)` is also known as affine `BC_2`.
    C(usize),
    /// `n >= 4`.
    D(usize),
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl fmt::Display for AffineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AffineType::A(n) => write!(f, "A{n}~"),
            AffineType::B(n) => write!(f, "B{n}~"),
            AffineType::C(n) => write!(f, "C{n}~"),
            AffineType::D(n) => write!(f, "D{n}~"),
            AffineType::E6 => write!(f, "E6~"),
            AffineType::E7 => write!(f, "E7~"),
            AffineType::E8 => write!(f, "E8~"),
            AffineType::F4 => write!(f, "F4~"),
            AffineType::G2 => write!(f, "G2~"),
        }
    }
}

impl AffineType {
    pub fn rank(self) -> usize {
        match self {
            AffineType::A(n) | AffineType::B(n) | AffineType::C(n) | AffineType::D(n) => n,
            AffineType::E6 => 6,
            AffineType::E7 => 7,
            AffineType::E8 => 8,
            AffineType::F4 => 4,
            AffineType::G2 => 2,
        }
    }

    pub fn is_valid(self) -> bool {
        match self {
            AffineType::A(n) => n >= 1,
            AffineType::B(n) => n >= 3,
            AffineType::C(n) => n >= 2,
            AffineType::D(n) => n >= 4,
            _ => true,
        }
    }

    /// Every valid type whose diagram has `nodes` nodes.
    pub fn with_nodes(nodes: usize) -> Vec<AffineType> {
        if nodes < 2 {
            return Vec::new();
        }
        let n = nodes - 1;
        let mut out: Vec<AffineType> = [
            AffineType::A(n),
            AffineType::B(n),
            AffineType::C(n),
            AffineType::D(n),
        ]
        .into_iter()
        .filter(|t| t.is_valid())
        .collect();
        out.extend(
            [
                AffineType::E6,
                AffineType::E7,
                AffineType::E8,
                AffineType::F4,
                AffineType::G2,
            ]
            .into_iter()
            .filter(|t| t.rank() == n),
        );
        out
    }

    /// Catalogue diagram on nodes `0..=rank`.
    pub fn diagram(self) -> CoxeterDiagram {
        let n = self.rank();
        let e = |i: usize, j: usize, m: u32| CoxeterEdge {
            i,
            j,
            label: EdgeLabel::Finite(m),
        };
        let chain = |from: usize, to: usize| (from..to).map(move |i| e(i, i + 1, 3));
        let edges: Vec<CoxeterEdge> = match self {
            AffineType::A(1) => vec![CoxeterEdge {
                i: 0,
                j: 1,
                label: EdgeLabel::Infinite,
            }],
            AffineType::A(_) => (0..=n).map(|i| e(i, (i + 1) % (n + 1), 3)).collect(),
            AffineType::B(_) => {
                let mut v = vec![e(0, 2, 3), e(1, 2, 3)];
                v.extend(chain(2, n - 1));
                v.push(e(n - 1, n, 4));
                v
            }
            AffineType::C(_) => {
                let mut v = vec![e(0, 1, 4)];
                v.extend(chain(1, n - 1));
                v.push(e(n - 1, n, 4));
                v
            }
            AffineType::D(_) => {
                let mut v = vec![e(0, 2, 3), e(1, 2, 3)];
                v.extend(chain(2, n - 2));
                v.push(e(n - 2, n - 1, 3));
                v.push(e(n - 2, n, 3));
                v
            }
            AffineType::E6 => vec![
                e(0, 1, 3),
                e(1, 2, 3),
                e(0, 3, 3),
                e(3, 4, 3),
                e(0, 5, 3),
                e(5, 6, 3),
            ],
            AffineType::E7 => {
                let mut v: Vec<_> = chain(0, 6).collect();
                v.push(e(3, 7, 3));
                v
            }
            AffineType::E8 => {
                let mut v: Vec<_> = chain(0, 7).collect();
                v.push(e(2, 8, 3));
                v
            }
            AffineType::F4 => vec![e(0, 1, 3), e(1, 2, 3), e(2, 3, 4), e(3, 4, 3)],
            AffineType::G2 => vec![e(0, 1, 3), e(1, 2, 6)],
        };
        CoxeterDiagram::new(n + 1, edges)
    }

    /// Gram matrix `-cos(pi/m_ij)` of the outward facet normals.
    pub fn gram_matrix(self) -> DMatrix<f64> {
        let d = self.diagram();
        let labels = d.label_matrix();
        DMatrix::from_fn(d.nodes, d.nodes, |i, j| {
            if i == j {
                1.0
            } else {
                match labels[i][j] {
                    None => 0.0,
                    Some(EdgeLabel::Infinite) => -1.0,
                    Some(EdgeLabel::Finite(m)) => -(PI / m as f64).cos(),
                }
            }
        })
    }
}

/// Joins type labels as `"A1~ x A1~"`.
pub fn type_string(types: &[AffineType]) -> String {
    types
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(" x ")
}

/// Matches every connected component against the affine catalogue.
pub fn classify(diagram: &CoxeterDiagram) -> Result<Vec<AffineType>, AlcoveError> {
    let labels = diagram.label_matrix();
    diagram
        .components
        .iter()
        .map(|comp| {
            AffineType::with_nodes(comp.len())
                .into_iter()
                .find(|t| {
                    let cat = t.diagram();
                    isomorphic(comp, &labels, &cat.label_matrix())
                })
                .ok_or_else(|| AlcoveError::UnknownComponent(comp.clone()))
        })
        .collect()
}

/// Label-preserving graph isomorphism by backtracking.
fn isomorphic(
    comp: &[usize],
    labels: &[Vec<Option<EdgeLabel>>],
    target: &[Vec<Option<EdgeLabel>>],
) -> bool {
    let n = comp.len();
    if target.len() != n {
        return false;
    }
    let degree = |row: &[Option<EdgeLabel>], nodes: &mut dyn Iterator<Item = usize>| {
        nodes.filter(|&k| row[k].is_some()).count()
    };
    let src_deg: Vec<usize> = comp
        .iter()
        .map(|&a| degree(&labels[a], &mut comp.iter().copied()))
        .collect();
    let dst_deg: Vec<usize> = (0..n).map(|b| degree(&target[b], &mut (0..n))).collect();
    let mut assignment = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn search(
        k: usize,
        comp: &[usize],
        labels: &[Vec<Option<EdgeLabel>>],
        target: &[Vec<Option<EdgeLabel>>],
        src_deg: &[usize],
        dst_deg: &[usize],
        assignment: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if k == comp.len() {
            return true;
        }
        for cand in 0..comp.len() {
            if used[cand] || src_deg[k] != dst_deg[cand] {
                continue;
            }
            let consistent =
                (0..k).all(|prev| labels[comp[k]][comp[prev]] == target[cand][assignment[prev]]);
            if !consistent {
                continue;
            }
            assignment[k] = cand;
            used[cand] = true;
            if search(
                k + 1,
                comp,
                labels,
                target,
                src_deg,
                dst_deg,
                assignment,
                used,
            ) {
                return true;
            }
            used[cand] = false;
        }
        false
    }

    search(
        0,
        comp,
        labels,
        target,
        &src_deg,
        &dst_deg,
        &mut assignment,
        &mut used,
    )
}

/// A simplex realising the affine type, built from its Gram matrix.
pub fn standard_alcove(t: AffineType) -> Result<Polytope, AlcoveError> {
    let gram = t.gram_matrix();
    let nodes = gram.nrows();
    let rank = t.rank();
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..nodes).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let halfspaces = (0..nodes)
        .map(|i| {
            let normal = DVector::from_fn(rank, |k, _| {
                let col = order[k];
                eig.eigenvectors[(i, col)] * eig.eigenvalues[col].max(0.0).sqrt()
            });
            HalfSpace::new(normal, 1.0)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Polytope::simplex(halfspaces)?)
}

/// Product of standard alcoves, one factor per type.
pub fn standard_product_alcove(types: &[AffineType]) -> Result<Polytope, AlcoveError> {
    let (first, rest) = types.split_first().ok_or(AlcoveError::NotAnAlcove)?;
    let mut p = standard_alcove(*first)?;
    for t in rest {
        p = p.product(&standard_alcove(*t)?)?;
    }
    Ok(p)
}

/// Folds `x` into the table by reflecting across the most violated facet
/// until no facet is violated. Returns the folded point and the facet word.
pub fn fold_point(
    table: &Polytope,
    x: &Point,
    max_words: usize,
) -> Result<(Point, Vec<usize>), AlcoveError> {
    if x.len() != table.dim() {
        return Err(PolytopeError::DimensionMismatch {
            expected: table.dim(),
            found: x.len(),
        }
        .into());
    }
    let eps = table.tolerances().active;
    let hs = table.halfspaces();
    let mut y = x.clone();
    let mut word = Vec::new();
    loop {
        let (idx, worst) = hs
            .iter()
            .enumerate()
            .map(|(i, h)| (i, h.violation(&y)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("polytope has facets");
        if worst <= eps {
            return Ok((y, word));
        }
        if word.len() >= max_words {
            return Err(AlcoveError::WordBudgetExceeded(max_words));
        }
        y = hs[idx].reflect_point(&y);
        word.push(idx);
    }
}

/// Folds a direction at a boundary point into the tangent cone by reflecting
/// across the most violated active facet.
pub fn fold_direction(
    table: &Polytope,
    active: &[usize],
    u: &Point,
) -> Result<(Point, Vec<usize>), AlcoveError> {
    let hs = table.halfspaces();
    let mut dir = u.clone();
    let mut word = Vec::new();
    loop {
        let worst = active
            .iter()
            .map(|&i| (i, hs[i].normal.dot(&dir)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match worst {
            Some((i, rate)) if rate > EPS_TANGENT => {
                if word.len() >= DIRECTION_WORD_BUDGET {
                    return Err(AlcoveError::WordBudgetExceeded(DIRECTION_WORD_BUDGET));
                }
                dir = crate::polytope::reflect(&dir, &hs[i]);
                word.push(i);
            }
            _ => return Ok((dir, word)),
        }
    }
}

/// Continuous billiard flow on an alcove: the image of the straight line
/// `t -> start.point + t * start.direction` under the folding map.
pub fn folded_flow(
    table: &Polytope,
    start: &TrajectoryState,
    horizon: f64,
) -> Result<Trajectory, DynamicsError> {
    check_horizon(horizon)?;
    check_state(table, start)?;
    if !check_alcove(table, EPS_ANGLE).is_alcove {
        return Err(DynamicsError::NotAnAlcove);
    }
    let x0 = &start.point;
    let d = &start.direction;
    let mut g = Isometry::identity(table.dim());
    let budget = bounce_budget(table, horizon);
    let mut events = Vec::new();
    let mut t = 0.0;
    loop {
        let t_hit = line_exit(table, &g, x0, d, t).ok_or(DynamicsError::NoProgress)?;
        if t_hit > horizon + EPS_HORIZON {
            break;
        }
        let point = g.apply(&(x0 + d * t_hit));
        let incoming = &g.linear * d;
        let active = table.active_set(&point);
        fold_isometry(table, &mut g, d, &active)?;
        let outgoing = &g.linear * d;
        events.push(BounceEvent::new(t_hit, point, incoming, outgoing, active));
        if events.len() > budget {
            return Err(DynamicsError::BounceBudgetExceeded {
                budget,
                time: t_hit,
            });
        }
        t = t_hit;
        if t_hit >= horizon {
            break;
        }
    }
    let end = TrajectoryState {
        point: g.apply(&(x0 + d * horizon)),
        direction: &g.linear * d,
        time: horizon,
    };
    Ok(Trajectory {
        start: start.clone(),
        events,
        horizon,
        end,
    })
}

fn fold_isometry(
    table: &Polytope,
    g: &mut Isometry,
    d: &Point,
    active: &[usize],
) -> Result<(), DynamicsError> {
    let hs = table.halfspaces();
    for _ in 0..DIRECTION_WORD_BUDGET {
        let dir = &g.linear * d;
        let worst = active
            .iter()
            .map(|&i| (i, hs[i].normal.dot(&dir)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match worst {
            Some((i, rate)) if rate > EPS_TANGENT => g.then_reflect(&hs[i].normal, hs[i].offset),
            _ => return Ok(()),
        }
    }
    Err(DynamicsError::NotAnAlcove)
}
