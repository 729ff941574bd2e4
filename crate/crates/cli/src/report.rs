//! Machine-readable results, one variant per command.

use billiards_core::alcove::{AffineType, AlcoveVerdict};
use billiards_core::corner::WedgeLimitReport;
use billiards_core::dynamics::{BounceKind, CornerPolicy};
use billiards_core::smooth::{ConvergenceReport, LawReport, SmoothShape};
use billiards_core::surface::{
    BoundaryConeReport, DisphenoidReport, OrbifoldVerdict, StraightnessResidual,
    TriangulationReport, VertexReport,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunReport {
    Simulate(SimulateReport),
    CheckAlcove(AlcoveReport),
    Corner(CornerReport),
    Surface(SurfaceReport),
    Smooth(SmoothReport),
    Tables(TablesReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub time: f64,
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub time: f64,
    pub point: Vec<f64>,
    pub outgoing: Vec<f64>,
    pub active: Vec<usize>,
    pub kind: BounceKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub table: String,
    pub dim: usize,
    pub policy: CornerPolicy,
    pub unfolded: bool,
    pub horizon: f64,
    pub bounces: usize,
    pub start: StateRecord,
    pub end: StateRecord,
    pub events: Vec<EventRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlcoveReport {
    pub table: String,
    pub eps_angle: f64,
    #[serde(flatten)]
    pub verdict: AlcoveVerdict,
    /// Affine type such as `A1~ x A1~`, for alcoves.
    pub types: Option<String>,
    pub components: Option<Vec<AffineType>>,
}

/// Numerical unfolding at a small offset, next to the closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldingCheck {
    pub offset: f64,
    pub horizon: f64,
    pub angle_above: f64,
    pub angle_below: f64,
    pub bounces_above: usize,
    pub bounces_below: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerReport {
    pub reports: Vec<WedgeLimitReport>,
    pub unfolding: Option<UnfoldingCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub cones: Vec<VertexReport>,
    pub total_curvature: f64,
    pub orbifold: OrbifoldVerdict,
    pub triangulation: TriangulationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSummary {
    pub face: usize,
    pub point: [f64; 3],
    pub direction: [f64; 3],
    pub length: f64,
    pub crossings: usize,
    pub end_face: usize,
    pub end_point: [f64; 3],
    pub residual: StraightnessResidual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub mesh: String,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub report: Option<SurfaceSummary>,
    pub geodesic: Option<GeodesicSummary>,
    pub disphenoid: Option<DisphenoidReport>,
    /// Boundary cone angles of a polytope of dimension four or more.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryConeReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothReport {
    pub table: String,
    pub shape: SmoothShape,
    pub perimeter: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub laws: Option<LawReport>,
    pub convergence: Option<ConvergenceReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesReport {
    pub polytopes: Vec<String>,
    pub smooth: Vec<String>,
    pub written: Vec<String>,
}
