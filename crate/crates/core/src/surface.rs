//! Intrinsic geometry of boundaries of convex 3-polytopes.
//!
//! Cone angles, discrete curvature, orbifold and disphenoid tests, and
//! geodesics traced by unfolding faces along crossed edges.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{Rotation3, Unit, Vector2, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hull::convex_hull;
use crate::linalg::affine_rank;
use crate::polytope::{Point, Polytope};

/// Tolerance for coordinates of unfolded crossings.
pub const EPS_CROSSING: f64 = 1e-10;
/// A geodesic passes straight through a vertex only if its cone angle is
/// within this distance of `pi`.
pub const EPS_CONE_PI: f64 = 1e-9;

type V3 = Vector3<f64>;
type V2 = Vector2<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("edge ({0}, {1}) does not have exactly two faces")]
    OpenSurface(usize, usize),
    #[error("faces are not consistently oriented at edge ({0}, {1})")]
    Orientation(usize, usize),
    #[error("Euler characteristic is {0}, expected 2")]
    EulerCharacteristic(i64),
    #[error("face {0} is degenerate, non-planar or not convex")]
    BadFace(usize),
    #[error("vertex index {0} out of range")]
    VertexIndex(usize),
    #[error("vertex {0} has no incident face")]
    IsolatedVertex(usize),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("the surface geodesic runs into vertex {vertex} at length {length}")]
    VertexHit { vertex: usize, length: f64 },
    #[error("tetrahedron is degenerate")]
    Degenerate,
    #[error("triangle ({0}, {1}, {2}) is not acute")]
    NotAcute(f64, f64, f64),
    #[error("polytope must be 3-dimensional")]
    NotThreeDimensional,
    #[error("start point or direction is not in face {0}")]
    BadStart(usize),
    #[error("point cloud is degenerate")]
    DegenerateCloud,
    #[error("polytope of dimension {0} has no codimension-two boundary faces")]
    DimensionTooLow(usize),
    #[error("polytope has no vertex description")]
    NoVertices,
    #[error("face {0:?} does not sit in exactly two ridges of facet {1}")]
    BadLink(Vec<usize>, usize),
}

/// Closed polyhedral surface with convex planar faces, oriented outward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMesh", into = "RawMesh")]
pub struct SurfaceMesh {
    vertices: Vec<[f64; 3]>,
    faces: Vec<Vec<usize>>,
    /// Directed edge `(a, b)` to the face containing it in that order.
    #[serde(skip)]
    edge_face: HashMap<(usize, usize), usize>,
}

#[derive(Serialize, Deserialize)]
struct RawMesh {
    vertices: Vec<[f64; 3]>,
    faces: Vec<Vec<usize>>,
}

impl TryFrom<RawMesh> for SurfaceMesh {
    type Error = SurfaceError;
    fn try_from(r: RawMesh) -> Result<Self, Self::Error> {
        SurfaceMesh::new(r.vertices, r.faces)
    }
}

impl From<SurfaceMesh> for RawMesh {
    fn from(m: SurfaceMesh) -> Self {
        RawMesh {
            vertices: m.vertices,
            faces: m.faces,
        }
    }
}

fn v3(p: &[f64; 3]) -> V3 {
    V3::new(p[0], p[1], p[2])
}

impl SurfaceMesh {
    /// Validates a mesh; faces must be listed counterclockwise seen from outside.
    pub fn new(vertices: Vec<[f64; 3]>, faces: Vec<Vec<usize>>) -> Result<Self, SurfaceError> {
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(SurfaceError::NonFinite);
        }
        let mut edge_face = HashMap::new();
        let mut used = vec![false; vertices.len()];
        for (fi, f) in faces.iter().enumerate() {
            if f.len() < 3 {
                return Err(SurfaceError::BadFace(fi));
            }
            for k in 0..f.len() {
                let (a, b) = (f[k], f[(k + 1) % f.len()]);
                if a >= vertices.len() {
                    return Err(SurfaceError::VertexIndex(a));
                }
                used[a] = true;
                if edge_face.insert((a, b), fi).is_some() {
                    return Err(SurfaceError::Orientation(a.min(b), a.max(b)));
                }
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(SurfaceError::IsolatedVertex(v));
        }
        for &(a, b) in edge_face.keys() {
            if !edge_face.contains_key(&(b, a)) {
                return Err(SurfaceError::OpenSurface(a.min(b), a.max(b)));
            }
        }
        let v = vertices.len() as i64;
        let e = edge_face.len() as i64 / 2;
        let chi = v - e + faces.len() as i64;
        if chi != 2 {
            return Err(SurfaceError::EulerCharacteristic(chi));
        }
        let mesh = Self {
            vertices,
            faces,
            edge_face,
        };
        for fi in 0..mesh.faces.len() {
            mesh.check_face(fi)?;
        }
        Ok(mesh)
    }

    fn check_face(&self, fi: usize) -> Result<(), SurfaceError> {
        let f = &self.faces[fi];
        let n = self.face_normal(fi);
        let scale = f
            .iter()
            .map(|&i| (self.point(i) - self.point(f[0])).norm())
            .fold(0.0, f64::max);
        if !n.iter().all(|c| c.is_finite()) || scale == 0.0 {
            return Err(SurfaceError::BadFace(fi));
        }
        let p0 = self.point(f[0]);
        for k in 0..f.len() {
            let a = self.point(f[k]);
            let b = self.point(f[(k + 1) % f.len()]);
            let c = self.point(f[(k + 2) % f.len()]);
            if n.dot(&(a - p0)).abs() > 1e-9 * scale || (b - a).cross(&(c - b)).dot(&n) <= 0.0 {
                return Err(SurfaceError::BadFace(fi));
            }
        }
        Ok(())
    }

    /// Boundary of a 3-polytope with its facets as faces.
    pub fn from_polytope(p: &Polytope) -> Result<Self, SurfaceError> {
        if p.dim() != 3 {
            return Err(SurfaceError::NotThreeDimensional);
        }
        let vertices: Vec<[f64; 3]> = p.vertices().iter().map(|v| [v[0], v[1], v[2]]).collect();
        let faces = p
            .facet_vertices()
            .iter()
            .zip(p.halfspaces())
            .map(|(idx, h)| {
                let n = V3::new(h.normal[0], h.normal[1], h.normal[2]);
                let c = idx.iter().map(|&i| v3(&vertices[i])).sum::<V3>() / idx.len() as f64;
                let u = (v3(&vertices[idx[0]]) - c).normalize();
                let w = n.cross(&u);
                let mut ordered = idx.clone();
                ordered.sort_by(|&i, &j| {
                    let a = v3(&vertices[i]) - c;
                    let b = v3(&vertices[j]) - c;
                    a.dot(&w)
                        .atan2(a.dot(&u))
                        .total_cmp(&b.dot(&w).atan2(b.dot(&u)))
                });
                ordered
            })
            .collect();
        Self::new(vertices, faces)
    }

    /// Boundary of the convex hull of a point cloud, triangulated.
    pub fn hull(points: &[[f64; 3]]) -> Result<Self, SurfaceError> {
        let tris = convex_hull(points).ok_or(SurfaceError::DegenerateCloud)?;
        let mut index = HashMap::new();
        let mut vertices = Vec::new();
        let faces = tris
            .iter()
            .map(|t| {
                t.iter()
                    .map(|&i| {
                        *index.entry(i).or_insert_with(|| {
                            vertices.push(points[i]);
                            vertices.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        Self::new(vertices, faces)
    }

    /// Tetrahedron on four points, oriented automatically.
    pub fn tetrahedron(p: &[[f64; 3]; 4]) -> Result<Self, SurfaceError> {
        let a = v3(&p[0]);
        let vol = (v3(&p[1]) - a)
            .cross(&(v3(&p[2]) - a))
            .dot(&(v3(&p[3]) - a));
        let scale = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| (v3(&p[i]) - v3(&p[j])).norm())
            .fold(0.0, f64::max);
        if !(vol.abs() > 1e-12 * scale.powi(3)) {
            return Err(SurfaceError::Degenerate);
        }
        let faces = if vol > 0.0 {
            vec![vec![0, 2, 1], vec![0, 1, 3], vec![0, 3, 2], vec![1, 2, 3]]
        } else {
            vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]]
        };
        Self::new(p.to_vec(), faces)
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn edge_count(&self) -> usize {
        self.edge_face.len() / 2
    }

    fn point(&self, i: usize) -> V3 {
        v3(&self.vertices[i])
    }

    /// Unit outward normal (Newell's method).
    pub fn face_normal(&self, fi: usize) -> V3 {
        let f = &self.faces[fi];
        let mut n = V3::zeros();
        for k in 0..f.len() {
            let a = self.point(f[k]);
            let b = self.point(f[(k + 1) % f.len()]);
            n += V3::new(
                (a.y - b.y) * (a.z + b.z),
                (a.z - b.z) * (a.x + b.x),
                (a.x - b.x) * (a.y + b.y),
            );
        }
        n.normalize()
    }

    /// Face on the other side of the directed edge `(a, b)` of some face.
    fn neighbour(&self, a: usize, b: usize) -> usize {
        self.edge_face[&(b, a)]
    }

    /// Interior angle of face `fi` at its `k`-th corner.
    fn face_angle(&self, fi: usize, k: usize) -> f64 {
        let f = &self.faces[fi];
        let n = f.len();
        let p = self.point(f[k]);
        let a = self.point(f[(k + n - 1) % n]) - p;
        let b = self.point(f[(k + 1) % n]) - p;
        a.cross(&b).norm().atan2(a.dot(&b))
    }

    /// Degree of every vertex in the edge graph.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for &(a, _) in self.edge_face.keys() {
            d[a] += 1;
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexReport {
    pub vertex: usize,
    pub cone_angle: f64,
    pub curvature: f64,
    /// `n` with `cone_angle` equal to `2 pi / n`, if any.
    pub orbifold_order: Option<u32>,
}

fn orbifold_order(cone: f64, eps: f64) -> Option<u32> {
    let n = (2.0 * PI / cone).round();
    (n >= 2.0 && n.is_finite() && (cone - 2.0 * PI / n).abs() <= eps).then_some(n as u32)
}

pub fn cone_angles(mesh: &SurfaceMesh) -> Vec<VertexReport> {
    cone_angles_with(mesh, EPS_CONE_PI)
}

pub fn cone_angles_with(mesh: &SurfaceMesh, eps: f64) -> Vec<VertexReport> {
    let mut sums = vec![0.0; mesh.vertices.len()];
    for (fi, f) in mesh.faces.iter().enumerate() {
        for (k, &v) in f.iter().enumerate() {
            sums[v] += mesh.face_angle(fi, k);
        }
    }
    sums.into_iter()
        .enumerate()
        .map(|(vertex, cone_angle)| VertexReport {
            vertex,
            cone_angle,
            curvature: 2.0 * PI - cone_angle,
            orbifold_order: orbifold_order(cone_angle, eps),
        })
        .collect()
}

/// Total curvature; equals `4 pi` on every convex polyhedral sphere.
pub fn gauss_bonnet_total(mesh: &SurfaceMesh) -> f64 {
    cone_angles(mesh).iter().map(|r| r.curvature).sum()
}

/// Cone angle of the boundary of a polytope around one of its faces of
/// dimension `n - 3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCone {
    pub vertices: Vec<usize>,
    pub facets: Vec<usize>,
    pub cone_angle: f64,
    pub orbifold_order: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConeReport {
    pub dim: usize,
    pub cones: Vec<BoundaryCone>,
    /// Indices into `cones` whose angle is not `2 pi / n`.
    pub failing: Vec<usize>,
}

/// Cone angles of the boundary of `p` along its codimension-two singular
/// set, the faces of dimension `dim - 3`. For `dim = 3` these are the vertex
/// cone angles of the surface. In higher dimensions the boundary is never an
/// orbifold, and the report lists the faces where it fails.
pub fn boundary_cone_angles(p: &Polytope, eps: f64) -> Result<BoundaryConeReport, SurfaceError> {
    let n = p.dim();
    if n < 3 {
        return Err(SurfaceError::DimensionTooLow(n));
    }
    if p.vertices().is_empty() {
        return Err(SurfaceError::NoVertices);
    }
    let nf = p.halfspaces().len();
    let fv = p.facet_vertices();
    let adjacent: Vec<Vec<bool>> = (0..nf)
        .map(|i| (0..nf).map(|j| p.facets_adjacent(i, j)).collect())
        .collect();
    let meet = |fs: &[usize]| -> Vec<usize> {
        fv[fs[0]]
            .iter()
            .copied()
            .filter(|v| fs[1..].iter().all(|&f| fv[f].contains(v)))
            .collect()
    };
    let rank = |vs: &[usize]| {
        let pts: Vec<&Point> = vs.iter().map(|&v| &p.vertices()[v]).collect();
        affine_rank(&pts, 1e-9)
    };

    // Every (n-3)-face lies in some triple of pairwise adjacent facets.
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for i in 0..nf {
        for j in i + 1..nf {
            if !adjacent[i][j] {
                continue;
            }
            for k in j + 1..nf {
                if !(adjacent[i][k] && adjacent[j][k]) {
                    continue;
                }
                let mut vs = meet(&[i, j, k]);
                vs.sort_unstable();
                if vs.len() >= n - 2 && rank(&vs) == n - 3 && !faces.contains(&vs) {
                    faces.push(vs);
                }
            }
        }
    }
    faces.sort();

    let mut cones = Vec::with_capacity(faces.len());
    for vs in faces {
        let facets: Vec<usize> = (0..nf)
            .filter(|&f| vs.iter().all(|v| fv[f].contains(v)))
            .collect();
        let mut cone = 0.0;
        for &f in &facets {
            // Ridges of facet f through the face, as distinct vertex sets.
            let nfv = &p.halfspaces()[f].normal;
            let mut ridges: Vec<(Vec<usize>, usize)> = Vec::new();
            for &g in &facets {
                if adjacent[f][g] {
                    let r = meet(&[f, g]);
                    if !ridges.iter().any(|(q, _)| *q == r) {
                        ridges.push((r, g));
                    }
                }
            }
            if ridges.len() != 2 {
                return Err(SurfaceError::BadLink(vs.clone(), f));
            }
            let inner = |g: usize| {
                let m = &p.halfspaces()[g].normal;
                let q = m - nfv * m.dot(nfv);
                q.normalize()
            };
            let (a, b) = (inner(ridges[0].1), inner(ridges[1].1));
            cone += PI - a.dot(&b).clamp(-1.0, 1.0).acos();
        }
        cones.push(BoundaryCone {
            vertices: vs,
            facets,
            cone_angle: cone,
            orbifold_order: orbifold_order(cone, eps),
        });
    }
    let failing = (0..cones.len())
        .filter(|&i| cones[i].orbifold_order.is_none())
        .collect();
    Ok(BoundaryConeReport {
        dim: n,
        cones,
        failing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum OrbifoldVerdict {
    Yes {
        orders: Vec<u32>,
        /// `sum 1/n_i - (k - 2)`; zero by Gauss-Bonnet.
        identity_residual: f64,
    },
    No {
        failing: Vec<usize>,
    },
}

impl OrbifoldVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, OrbifoldVerdict::Yes { .. })
    }
}

/// Whether every cone angle is `2 pi / n` for an integer `n >= 2`.
pub fn is_orbifold_boundary(mesh: &SurfaceMesh, eps: f64) -> OrbifoldVerdict {
    let reports = cone_angles_with(mesh, eps);
    let failing: Vec<usize> = reports
        .iter()
        .filter(|r| r.orbifold_order.is_none())
        .map(|r| r.vertex)
        .collect();
    if !failing.is_empty() {
        return OrbifoldVerdict::No { failing };
    }
    let orders: Vec<u32> = reports.iter().map(|r| r.orbifold_order.unwrap()).collect();
    let k = orders.len() as f64;
    let identity_residual = orders.iter().map(|&n| 1.0 / n as f64).sum::<f64>() - (k - 2.0);
    // Gauss-Bonnet forces the identity; a violation means the tolerance is
    // too loose for this mesh.
    if identity_residual.abs() > k * eps.max(1e-12) {
        return OrbifoldVerdict::No {
            failing: (0..orders.len()).collect(),
        };
    }
    OrbifoldVerdict::Yes {
        orders,
        identity_residual,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisphenoidReport {
    pub is_disphenoid: bool,
    /// Lengths of the opposite edge pairs (01, 23), (02, 13), (03, 12).
    pub pairs: [(f64, f64); 3],
}

/// Whether opposite edges of a tetrahedron have equal length, within `eps`
/// relative to the longest edge.
pub fn is_disphenoid(tetra: &[[f64; 3]; 4], eps: f64) -> Result<DisphenoidReport, SurfaceError> {
    SurfaceMesh::tetrahedron(tetra)?;
    let d = |i: usize, j: usize| (v3(&tetra[i]) - v3(&tetra[j])).norm();
    let pairs = [(d(0, 1), d(2, 3)), (d(0, 2), d(1, 3)), (d(0, 3), d(1, 2))];
    let scale = pairs.iter().map(|p| p.0.max(p.1)).fold(1.0, f64::max);
    Ok(DisphenoidReport {
        is_disphenoid: pairs.iter().all(|(a, b)| (a - b).abs() <= eps * scale),
        pairs,
    })
}

/// Tetrahedron with opposite edge lengths `a`, `b`, `c`; every face is
/// congruent to the acute triangle with sides `a`, `b`, `c`.
pub fn make_disphenoid(a: f64, b: f64, c: f64) -> Result<[[f64; 3]; 4], SurfaceError> {
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let x2 = (b2 + c2 - a2) / 2.0;
    let y2 = (a2 + c2 - b2) / 2.0;
    let z2 = (a2 + b2 - c2) / 2.0;
    if !(a > 0.0 && b > 0.0 && c > 0.0 && x2 > 0.0 && y2 > 0.0 && z2 > 0.0) {
        return Err(SurfaceError::NotAcute(a, b, c));
    }
    let (x, y, z) = (x2.sqrt(), y2.sqrt(), z2.sqrt());
    Ok([[0.0, 0.0, 0.0], [x, y, 0.0], [x, 0.0, z], [0.0, y, z]])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangulationReport {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    /// `2V' <= E' + 3` for every disk obtained by removing a vertex star.
    pub holds_2v_le_e_plus_3_on_disks: bool,
    pub f_le_v: bool,
    pub trivalent: bool,
    /// Every cone angle at most `pi`, `F = V`, and trivalent.
    pub orbifold_equality: bool,
}

/// The disk inequality `2V <= E + 3`.
pub fn disk_bound_holds(v: usize, e: usize) -> bool {
    2 * v <= e + 3
}

/// Fans every face from its lowest-index vertex and counts the result.
pub fn triangulate_check(mesh: &SurfaceMesh) -> TriangulationReport {
    let v = mesh.vertices.len();
    let f: usize = mesh.faces.iter().map(|face| face.len() - 2).sum();
    let mut degree = mesh.degrees();
    for face in &mesh.faces {
        let n = face.len();
        let root = (0..n).min_by_key(|&k| face[k]).unwrap();
        // Diagonals from the root to every non-adjacent corner.
        for k in 2..n - 1 {
            degree[face[root]] += 1;
            degree[face[(root + k) % n]] += 1;
        }
    }
    let e = degree.iter().sum::<usize>() / 2;
    let disks = degree.iter().all(|&d| disk_bound_holds(v - 1, e - d));
    let trivalent = degree.iter().all(|&d| d == 3);
    let flat_enough = cone_angles(mesh)
        .iter()
        .all(|r| r.cone_angle <= PI + EPS_CONE_PI);
    TriangulationReport {
        v,
        e,
        f,
        holds_2v_le_e_plus_3_on_disks: disks,
        f_le_v: f <= v,
        trivalent,
        orbifold_equality: flat_enough && f == v && trivalent,
    }
}

/// Start of a surface geodesic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicStart {
    pub face: usize,
    pub point: [f64; 3],
    /// Direction in the plane of `face`; normalised when tracing.
    pub direction: [f64; 3],
}

impl GeodesicStart {
    /// Start at barycentric coordinates over the face's corners.
    pub fn from_barycentric(
        mesh: &SurfaceMesh,
        face: usize,
        weights: &[f64],
        direction: [f64; 3],
    ) -> Result<Self, SurfaceError> {
        let f = mesh.faces.get(face).ok_or(SurfaceError::BadStart(face))?;
        let total: f64 = weights.iter().sum();
        if weights.len() != f.len() || weights.iter().any(|&w| w < 0.0) || total <= 0.0 {
            return Err(SurfaceError::BadStart(face));
        }
        let p = f
            .iter()
            .zip(weights)
            .map(|(&i, &w)| mesh.point(i) * (w / total))
            .sum::<V3>();
        Ok(Self {
            face,
            point: [p.x, p.y, p.z],
            direction,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CrossingKind {
    Edge {
        a: usize,
        b: usize,
    },
    /// Straight passage through a vertex of cone angle `pi`.
    Vertex {
        v: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub kind: CrossingKind,
    pub from_face: usize,
    pub to_face: usize,
    /// Arclength at the crossing.
    pub t: f64,
    pub point: [f64; 3],
    /// Crossing in the unfolded plane; the geodesic runs along the x axis.
    pub unfolded: [f64; 2],
    /// Rotation angle of the unfolding at this crossing.
    pub rotation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGeodesic {
    pub start: GeodesicStart,
    pub crossings: Vec<Crossing>,
    pub length: f64,
    pub end_face: usize,
    pub end_point: [f64; 3],
    pub end_direction: [f64; 3],
}

/// Isometric image of a face in the unfolding plane.
struct FlatFace {
    face: usize,
    corners: Vec<V2>,
}

/// Traces the geodesic from `start` for arclength `horizon`.
pub fn trace_surface_geodesic(
    mesh: &SurfaceMesh,
    start: &GeodesicStart,
    horizon: f64,
) -> Result<SurfaceGeodesic, SurfaceError> {
    let fi = start.face;
    let face = mesh.faces.get(fi).ok_or(SurfaceError::BadStart(fi))?;
    let n = mesh.face_normal(fi);
    let p0 = v3(&start.point);
    let d0 = v3(&start.direction);
    let scale = face
        .iter()
        .map(|&i| (mesh.point(i) - p0).norm())
        .fold(1.0, f64::max);
    if d0.norm() == 0.0
        || !d0.iter().all(|c| c.is_finite())
        || !horizon.is_finite()
        || horizon < 0.0
        || d0.normalize().dot(&n).abs() > 1e-9
        || n.dot(&(p0 - mesh.point(face[0]))).abs() > 1e-9 * scale
    {
        return Err(SurfaceError::BadStart(fi));
    }
    let ex = d0.normalize();
    let ey = n.cross(&ex);
    let corners: Vec<V2> = face
        .iter()
        .map(|&i| {
            let r = mesh.point(i) - p0;
            V2::new(r.dot(&ex), r.dot(&ey))
        })
        .collect();
    // The start must lie in the closed face.
    for k in 0..corners.len() {
        let a = corners[k];
        let b = corners[(k + 1) % corners.len()];
        if cross2(b - a, -a) < -1e-9 * scale * (b - a).norm() {
            return Err(SurfaceError::BadStart(fi));
        }
    }
    let cones = cone_angles(mesh);
    let mut flat = FlatFace { face: fi, corners };
    let mut t = 0.0;
    let mut crossings = Vec::new();
    let mut last_vertex: Option<usize> = None;
    loop {
        let exit = flat_exit(mesh, &flat, t, last_vertex);
        let Some(exit) = exit else {
            break;
        };
        if exit.t > horizon {
            break;
        }
        let from = flat.face;
        let fpts = &mesh.faces[from];
        match exit.vertex {
            Some(k) => {
                let v = fpts[k];
                if (cones[v].cone_angle - PI).abs() > EPS_CONE_PI {
                    return Err(SurfaceError::VertexHit {
                        vertex: v,
                        length: exit.t,
                    });
                }
                let c = flat.corners[k];
                for q in &mut flat.corners {
                    *q = c * 2.0 - *q;
                }
                crossings.push(Crossing {
                    kind: CrossingKind::Vertex { v },
                    from_face: from,
                    to_face: from,
                    t: exit.t,
                    point: to_arr(mesh.point(v)),
                    unfolded: [c.x, c.y],
                    rotation: PI,
                });
                last_vertex = Some(v);
            }
            None => {
                let k = exit.edge;
                let m = fpts.len();
                let (a, b) = (fpts[k], fpts[(k + 1) % m]);
                let (a2, b2) = (flat.corners[k], flat.corners[(k + 1) % m]);
                let next = mesh.neighbour(a, b);
                let point3 = mesh.point(a) + (mesh.point(b) - mesh.point(a)) * exit.s;
                let rotation = mesh.face_normal(from).angle(&mesh.face_normal(next));
                flat = unfold_across(mesh, next, a, b, a2, b2);
                crossings.push(Crossing {
                    kind: CrossingKind::Edge { a, b },
                    from_face: from,
                    to_face: next,
                    t: exit.t,
                    point: to_arr(point3),
                    unfolded: [exit.t, 0.0],
                    rotation,
                });
                last_vertex = None;
            }
        }
        t = exit.t;
    }
    let (end_point, end_direction) = locate(mesh, &flat, horizon);
    Ok(SurfaceGeodesic {
        start: start.clone(),
        crossings,
        length: horizon,
        end_face: flat.face,
        end_point: to_arr(end_point),
        end_direction: to_arr(end_direction),
    })
}

fn to_arr(v: V3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn cross2(a: V2, b: V2) -> f64 {
    a.x * b.y - a.y * b.x
}

struct Exit {
    t: f64,
    /// Corner index of the exit edge's first endpoint.
    edge: usize,
    /// Fraction along the edge.
    s: f64,
    /// Corner index if the exit is through a corner.
    vertex: Option<usize>,
}

/// Where the x axis leaves the flat face beyond `t_from`.
fn flat_exit(
    mesh: &SurfaceMesh,
    flat: &FlatFace,
    t_from: f64,
    skip: Option<usize>,
) -> Option<Exit> {
    let c = &flat.corners;
    let m = c.len();
    let ids = &mesh.faces[flat.face];
    let mut best: Option<Exit> = None;
    for k in 0..m {
        let (p, q) = (c[k], c[(k + 1) % m]);
        // The axis leaves a counterclockwise polygon through an upward edge.
        if q.y <= p.y || p.y > EPS_CROSSING || q.y < -EPS_CROSSING {
            continue;
        }
        let s = (p.y / (p.y - q.y)).clamp(0.0, 1.0);
        let x = p.x + (q.x - p.x) * s;
        if x <= t_from + EPS_CROSSING {
            continue;
        }
        if best.as_ref().is_none_or(|b| x < b.t) {
            let len = (q - p).norm();
            let vertex = if p.y.abs() <= EPS_CROSSING || s * len <= EPS_CROSSING {
                Some(k)
            } else if q.y.abs() <= EPS_CROSSING || (1.0 - s) * len <= EPS_CROSSING {
                Some((k + 1) % m)
            } else {
                None
            };
            let vertex = vertex.filter(|&v| Some(ids[v]) != skip);
            best = Some(Exit {
                t: x,
                edge: k,
                s,
                vertex,
            });
        }
    }
    best
}

/// Flat image of face `next`, glued to the current image along edge `(a, b)`.
fn unfold_across(mesh: &SurfaceMesh, next: usize, a: usize, b: usize, a2: V2, b2: V2) -> FlatFace {
    let (pa, pb) = (mesh.point(a), mesh.point(b));
    let e3 = (pb - pa).normalize();
    let n_next = mesh.face_normal(next);
    // In the next face the edge runs b -> a counterclockwise, so its interior
    // lies to the left of b -> a, that is along n x (a - b).
    let f3 = n_next.cross(&(-e3));
    let e2 = (b2 - a2).normalize();
    let f2 = V2::new(e2.y, -e2.x);
    let corners = mesh.faces[next]
        .iter()
        .map(|&i| {
            if i == a {
                a2
            } else if i == b {
                b2
            } else {
                let r = mesh.point(i) - pa;
                a2 + e2 * r.dot(&e3) + f2 * r.dot(&f3)
            }
        })
        .collect();
    FlatFace {
        face: next,
        corners,
    }
}

/// 3-space position and direction at arclength `t` on the x axis of `flat`.
fn locate(mesh: &SurfaceMesh, flat: &FlatFace, t: f64) -> (V3, V3) {
    let ids = &mesh.faces[flat.face];
    let (i0, i1) = (0, 1);
    let p0 = mesh.point(ids[i0]);
    let e3 = (mesh.point(ids[i1]) - p0).normalize();
    let f3 = mesh.face_normal(flat.face).cross(&e3);
    let e2 = (flat.corners[i1] - flat.corners[i0]).normalize();
    let f2 = V2::new(-e2.y, e2.x);
    let to3 =
        |q: V2| p0 + e3 * (q - flat.corners[i0]).dot(&e2) + f3 * (q - flat.corners[i0]).dot(&f2);
    let p = to3(V2::new(t, 0.0));
    let d = to3(V2::new(t + 1.0, 0.0)) - p;
    (p, d.normalize())
}

/// Straightness defects of a traced geodesic, computed independently of the
/// tracer from its 3-space crossing points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StraightnessResidual {
    /// Largest jump of the edge-tangential velocity component across an edge.
    pub tangential: f64,
    /// Largest distance of a hinge-unfolded crossing point from the initial line.
    pub collinearity: f64,
}

pub fn straightness_residual(mesh: &SurfaceMesh, g: &SurfaceGeodesic) -> StraightnessResidual {
    let mut pts: Vec<V3> = vec![v3(&g.start.point)];
    pts.extend(g.crossings.iter().map(|c| v3(&c.point)));
    pts.push(v3(&g.end_point));
    let dir = |i: usize| {
        let d: V3 = pts[i + 1] - pts[i];
        d.try_normalize(0.0)
    };
    let mut tangential: f64 = 0.0;
    for (i, c) in g.crossings.iter().enumerate() {
        if let CrossingKind::Edge { a, b } = c.kind {
            if let (Some(din), Some(dout)) = (dir(i), dir(i + 1)) {
                let e = (mesh.point(b) - mesh.point(a)).normalize();
                tangential = tangential.max((din.dot(&e) - dout.dot(&e)).abs());
            }
        }
    }
    // Rigid motion taking the current face into the start face's plane.
    let mut rot = Rotation3::identity();
    let mut shift = V3::zeros();
    let map = |r: &Rotation3<f64>, s: &V3, p: V3| r * p + s;
    let origin = pts[0];
    let line = v3(&g.start.direction).normalize();
    let mut collinearity: f64 = 0.0;
    let mut face = g.start.face;
    for (i, c) in g.crossings.iter().enumerate() {
        let here = map(&rot, &shift, pts[i + 1]);
        let r = here - origin;
        collinearity = collinearity.max((r - line * r.dot(&line)).norm());
        match c.kind {
            CrossingKind::Edge { a, b } => {
                let pa = mesh.point(a);
                let axis = Unit::new_normalize(mesh.point(b) - pa);
                let n_from = mesh.face_normal(face);
                let n_to = mesh.face_normal(c.to_face);
                let angle = n_to.cross(&n_from).dot(&axis).atan2(n_to.dot(&n_from));
                let hinge = Rotation3::from_axis_angle(&axis, angle);
                // p -> rot * (pa + hinge (p - pa)) + shift
                shift = rot * (pa - hinge * pa) + shift;
                rot *= hinge;
            }
            CrossingKind::Vertex { v } => {
                let pv = mesh.point(v);
                let axis = Unit::new_normalize(mesh.face_normal(face));
                let half = Rotation3::from_axis_angle(&axis, PI);
                shift = rot * (pv - half * pv) + shift;
                rot *= half;
            }
        }
        face = c.to_face;
    }
    let r = map(&rot, &shift, *pts.last().unwrap()) - origin;
    collinearity = collinearity.max((r - line * r.dot(&line)).norm());
    StraightnessResidual {
        tangential,
        collinearity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> SurfaceMesh {
        SurfaceMesh::from_polytope(&Polytope::cuboid(&[1.0, 1.0, 1.0]).unwrap()).unwrap()
    }

    fn regular_tetra() -> SurfaceMesh {
        SurfaceMesh::tetrahedron(&[
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn cube_cone_angles() {
        let m = cube();
        assert_eq!(m.faces().len(), 6);
        for r in cone_angles(&m) {
            assert!((r.cone_angle - 1.5 * PI).abs() < 1e-12);
            assert!((r.curvature - 0.5 * PI).abs() < 1e-12);
            assert_eq!(r.orbifold_order, None);
        }
        assert!((gauss_bonnet_total(&m) - 4.0 * PI).abs() < 1e-12);
        assert!(!is_orbifold_boundary(&m, 1e-9).is_yes());
    }

    #[test]
    fn tetrahedron_is_orbifold() {
        let m = regular_tetra();
        for r in cone_angles(&m) {
            assert!((r.cone_angle - PI).abs() < 1e-12);
        }
        match is_orbifold_boundary(&m, 1e-9) {
            OrbifoldVerdict::Yes { orders, .. } => assert_eq!(orders, vec![2, 2, 2, 2]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn disphenoid_construction() {
        let t = make_disphenoid(4.0, 5.0, 6.0).unwrap();
        assert!((t[1][0].powi(2) - 22.5).abs() < 1e-12);
        assert!((t[1][1].powi(2) - 13.5).abs() < 1e-12);
        assert!((t[2][2].powi(2) - 2.5).abs() < 1e-12);
        let rep = is_disphenoid(&t, 1e-9).unwrap();
        assert!(rep.is_disphenoid);
        let mut lens: Vec<f64> = rep.pairs.iter().map(|p| p.0).collect();
        lens.sort_by(f64::total_cmp);
        for (l, e) in lens.iter().zip([4.0, 5.0, 6.0]) {
            assert!((l - e).abs() < 1e-12);
        }
        let m = SurfaceMesh::tetrahedron(&t).unwrap();
        assert!(cone_angles(&m)
            .iter()
            .all(|r| (r.cone_angle - PI).abs() < 1e-9));
        assert_eq!(
            make_disphenoid(3.0, 4.0, 5.0),
            Err(SurfaceError::NotAcute(3.0, 4.0, 5.0))
        );
    }

    #[test]
    fn perturbed_tetrahedron_is_not_disphenoid() {
        let mut t = [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ];
        assert!(is_disphenoid(&t, 1e-9).unwrap().is_disphenoid);
        t[0][0] += 0.1;
        assert!(!is_disphenoid(&t, 1e-9).unwrap().is_disphenoid);
        let m = SurfaceMesh::tetrahedron(&t).unwrap();
        assert!(cone_angles(&m)
            .iter()
            .any(|r| (r.cone_angle - PI).abs() > 1e-6));
        let flat = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
        ];
        assert_eq!(
            is_disphenoid(&flat, 1e-9).unwrap_err(),
            SurfaceError::Degenerate
        );
    }

    #[test]
    fn triangulation_counts() {
        let t = triangulate_check(&regular_tetra());
        assert_eq!((t.v, t.e, t.f), (4, 6, 4));
        assert!(t.f_le_v && t.trivalent && t.orbifold_equality);
        let c = triangulate_check(&cube());
        assert_eq!((c.v, c.e, c.f), (8, 18, 12));
        assert!(!c.f_le_v && !c.orbifold_equality);
        assert!(c.holds_2v_le_e_plus_3_on_disks);
        assert!(disk_bound_holds(3, 3));
    }

    #[test]
    fn cube_band_geodesic_closes() {
        let m = cube();
        // Bottom face z = 0 of the unit cube.
        let bottom = (0..6)
            .find(|&f| (m.face_normal(f) - V3::new(0.0, 0.0, -1.0)).norm() < 1e-12)
            .unwrap();
        let start = GeodesicStart {
            face: bottom,
            point: [0.5, 0.5, 0.0],
            direction: [1.0, 0.0, 0.0],
        };
        let g = trace_surface_geodesic(&m, &start, 4.0).unwrap();
        assert_eq!(g.crossings.len(), 4);
        assert_eq!(g.end_face, bottom);
        assert!((v3(&g.end_point) - V3::new(0.5, 0.5, 0.0)).norm() < 1e-12);
        assert!((v3(&g.end_direction) - V3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
        let res = straightness_residual(&m, &g);
        assert!(res.tangential < 1e-12 && res.collinearity < 1e-12);
    }

    #[test]
    fn cube_vertex_hit() {
        let m = cube();
        let bottom = (0..6)
            .find(|&f| (m.face_normal(f) - V3::new(0.0, 0.0, -1.0)).norm() < 1e-12)
            .unwrap();
        let start = GeodesicStart {
            face: bottom,
            point: [0.5, 0.5, 0.0],
            direction: [1.0, 1.0, 0.0],
        };
        assert!(matches!(
            trace_surface_geodesic(&m, &start, 2.0),
            Err(SurfaceError::VertexHit { .. })
        ));
    }

    #[test]
    fn tetrahedron_generic_geodesic_is_straight() {
        let m = regular_tetra();
        let f = 0;
        let ids = &m.faces()[f];
        let e = m.point(ids[1]) - m.point(ids[0]);
        let w = m.face_normal(f).cross(&e);
        let d = e * 0.8123 + w * 0.3377;
        let start = GeodesicStart::from_barycentric(&m, f, &[0.31, 0.29, 0.4], to_arr(d)).unwrap();
        let g = trace_surface_geodesic(&m, &start, 50.0).unwrap();
        assert!(g.crossings.len() > 10);
        let res = straightness_residual(&m, &g);
        assert!(res.tangential < 1e-10, "{res:?}");
        assert!(res.collinearity < 1e-10 * 50.0, "{res:?}");
    }

    #[test]
    fn disphenoid_vertex_passage_reverses() {
        let t = make_disphenoid(4.0, 5.0, 6.0).unwrap();
        let m = SurfaceMesh::tetrahedron(&t).unwrap();
        let f = 0;
        let ids = m.faces()[f].clone();
        let c = (m.point(ids[0]) + m.point(ids[1]) + m.point(ids[2])) / 3.0;
        let d = m.point(ids[0]) - c;
        let start = GeodesicStart {
            face: f,
            point: to_arr(c),
            direction: to_arr(d),
        };
        let len = d.norm();
        let g = trace_surface_geodesic(&m, &start, 2.0 * len).unwrap();
        assert_eq!(g.crossings.len(), 1);
        assert!(matches!(g.crossings[0].kind, CrossingKind::Vertex { .. }));
        assert!((v3(&g.end_point) - c).norm() < 1e-9);
        assert!((v3(&g.end_direction) + d.normalize()).norm() < 1e-9);
        let res = straightness_residual(&m, &g);
        assert!(res.collinearity < 1e-9, "{res:?}");
    }

    #[test]
    fn mesh_validation() {
        let open = SurfaceMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![vec![0, 1, 2]],
        );
        assert!(matches!(open, Err(SurfaceError::OpenSurface(..))));
    }
}
