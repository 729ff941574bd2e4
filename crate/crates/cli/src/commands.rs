//! Subcommands. Each returns a report plus optional CSV and SVG side outputs.

use std::path::PathBuf;

use billiards_core::alcove::{check_alcove, classify, type_string, EPS_ANGLE};
use billiards_core::corner::{limit_reflection, sweep, unfold_wedge};
use billiards_core::dynamics::{
    simulate, simulate_unfolded, CornerPolicy, Trajectory, TrajectoryState,
};
use billiards_core::smooth::{boundary_convergence_experiment, verify_base_angle_laws};
use billiards_core::surface::{
    boundary_cone_angles, cone_angles_with, gauss_bonnet_total, is_disphenoid,
    is_orbifold_boundary, straightness_residual, trace_surface_geodesic, triangulate_check,
    CrossingKind, GeodesicStart, SurfaceMesh, EPS_CONE_PI,
};
use billiards_core::{tables, Point, Polytope, Tolerances};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DVector, Vector3};

use crate::error::CliError;
use crate::format::{csv_table, num, trajectory_header, trajectory_row};
use crate::input::{eps_override, parse_angle, resolve_table, PolytopeFile, TableFile};
use crate::report::*;
use crate::svg;

#[derive(Debug, Parser)]
#[command(
    name = "billiards",
    version,
    about = "Billiards in polytopes, alcoves, and smooth tables"
)]
pub struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a trajectory in a polytope table.
    Simulate(SimulateArgs),
    /// Decide whether a polytope is an alcove and name its affine type.
    CheckAlcove(TableArg),
    /// One-sided corner limits of a wedge, or a sweep over opening angles.
    Corner(CornerArgs),
    /// Cone angles, geodesics, and the disphenoid test on a closed surface.
    Surface(SurfaceArgs),
    /// Base-angle laws and boundary convergence on a smooth planar table.
    Smooth(SmoothArgs),
    /// List bundled tables, optionally writing them as JSON files.
    Tables(TablesArgs),
}

#[derive(Debug, Args)]
pub struct TableArg {
    /// Table file, or the name of a bundled table.
    pub table: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    #[value(alias = "strict")]
    Strict,
    #[value(alias = "pointreflect")]
    PointReflect,
    #[value(alias = "foldgroup")]
    FoldGroup,
}

impl From<Policy> for CornerPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Strict => CornerPolicy::Strict,
            Policy::PointReflect => CornerPolicy::PointReflect,
            Policy::FoldGroup => CornerPolicy::FoldGroup,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub table: String,
    /// Start point, comma separated; defaults to the centroid.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub start: Option<Vec<f64>>,
    /// Initial direction, comma separated; normalised.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub dir: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10.0)]
    pub horizon: f64,
    #[arg(long, value_enum, default_value = "point-reflect")]
    pub policy: Policy,
    /// Simulate by unfolding instead of direct reflection.
    #[arg(long)]
    pub unfold: bool,
    /// Trajectory CSV with columns t,x1..xn,event.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Table and path as SVG; planar tables only.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CornerArgs {
    /// Opening angle: radians, or forms like `pi/3` and `2pi/5`.
    #[arg(required_unless_present = "sweep", value_parser = parse_angle)]
    pub alpha: Option<f64>,
    /// Sweep `n` evenly spaced angles in `[lo, hi]`.
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "N"], conflicts_with = "alpha")]
    pub sweep: Option<Vec<String>>,
    /// Offset of the numerical check from the bisector.
    #[arg(long, default_value_t = 1e-9)]
    pub offset: f64,
    /// Sweep table (alpha,m,beta,gap,continuous) as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Unfolded fan of mirror copies as SVG.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    /// Surface file, or a 3-dimensional polytope.
    pub mesh: String,
    /// Cone angles, total curvature, orbifold verdict, and counts.
    #[arg(long)]
    pub report: bool,
    /// Trace a geodesic; crossings go to `--csv`.
    #[arg(long)]
    pub geodesic: bool,
    /// Opposite-edge test on a tetrahedron.
    #[arg(long)]
    pub disphenoid: bool,
    #[arg(long, default_value_t = 0)]
    pub face: usize,
    /// Barycentric start weights over the face corners.
    #[arg(long, value_delimiter = ',')]
    pub bary: Option<Vec<f64>>,
    /// Start direction, as an angle from the face's first edge.
    #[arg(long, default_value = "0.7", value_parser = parse_angle, allow_negative_numbers = true)]
    pub angle: f64,
    #[arg(long, default_value_t = 20.0)]
    pub length: f64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SmoothArgs {
    pub table: String,
    #[arg(long)]
    pub laws: bool,
    #[arg(long)]
    pub converge: bool,
    /// Launch angles.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.04,0.02,0.01,0.005,0.0025"
    )]
    pub grid: Vec<f64>,
    /// Trips around the boundary for `--laws`.
    #[arg(long, default_value_t = 1.0)]
    pub laps: f64,
    /// Start arclength for `--converge`.
    #[arg(long, default_value_t = 0.0)]
    pub s0: f64,
    /// Boundary arclength for `--converge`; defaults to one perimeter.
    #[arg(long)]
    pub arc: Option<f64>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Directory to write every bundled table into.
    #[arg(long)]
    pub write: Option<PathBuf>,
}

/// A report plus the side files requested on the command line.
#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub csv: Option<(PathBuf, String)>,
    pub svg: Option<(PathBuf, String)>,
}

impl Outcome {
    fn report(report: RunReport) -> Self {
        Self {
            report,
            csv: None,
            svg: None,
        }
    }
}

pub fn run(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Simulate(a) => cmd_simulate(a),
        Command::CheckAlcove(a) => {
            cmd_check_alcove(&a.table).map(|r| Outcome::report(RunReport::CheckAlcove(r)))
        }
        Command::Corner(a) => cmd_corner(a),
        Command::Surface(a) => cmd_surface(a),
        Command::Smooth(a) => cmd_smooth(a),
        Command::Tables(a) => cmd_tables(a),
    }
}

fn tolerances() -> Result<Tolerances, CliError> {
    Ok(eps_override()?.map(Tolerances::uniform).unwrap_or_default())
}

fn vec_of(p: &Point) -> Vec<f64> {
    p.as_slice().to_vec()
}

fn default_direction(dim: usize) -> Point {
    DVector::from_fn(dim, |i, _| 1.0 / ((i + 1) as f64).sqrt()).normalize()
}

fn event_label(kind: billiards_core::dynamics::BounceKind, active: &[usize]) -> String {
    let ids: Vec<String> = active.iter().map(|i| i.to_string()).collect();
    match kind {
        billiards_core::dynamics::BounceKind::Facet => format!("facet:{}", ids.join("+")),
        billiards_core::dynamics::BounceKind::Corner => format!("corner:{}", ids.join("+")),
    }
}

pub fn trajectory_csv(t: &Trajectory) -> String {
    let dim = t.start.point.len();
    let mut rows = vec![trajectory_row(
        0.0,
        t.start.point.as_slice(),
        "start".into(),
    )];
    for e in &t.events {
        rows.push(trajectory_row(
            e.time,
            e.point.as_slice(),
            event_label(e.kind, &e.active),
        ));
    }
    rows.push(trajectory_row(
        t.horizon,
        t.end.point.as_slice(),
        "end".into(),
    ));
    csv_table(&trajectory_header(dim), &rows)
}

pub fn simulate_report(
    name: &str,
    table: &Polytope,
    t: &Trajectory,
    policy: CornerPolicy,
    unfolded: bool,
) -> SimulateReport {
    SimulateReport {
        table: name.to_string(),
        dim: table.dim(),
        policy,
        unfolded,
        horizon: t.horizon,
        bounces: t.bounce_count(),
        start: StateRecord {
            time: 0.0,
            point: vec_of(&t.start.point),
            direction: vec_of(&t.start.direction),
        },
        end: StateRecord {
            time: t.end.time,
            point: vec_of(&t.end.point),
            direction: vec_of(&t.end.direction),
        },
        events: t
            .events
            .iter()
            .map(|e| EventRecord {
                time: e.time,
                point: vec_of(&e.point),
                outgoing: vec_of(&e.outgoing),
                active: e.active.clone(),
                kind: e.kind,
            })
            .collect(),
    }
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<Outcome, CliError> {
    let (name, file) = resolve_table(&a.table)?;
    let table = file.polytope(tolerances()?)?;
    let dim = table.dim();
    if a.svg.is_some() && dim != 2 {
        return Err(CliError::input(format!(
            "SVG output needs a planar table; this one has dimension {dim}"
        )));
    }
    let point = match &a.start {
        Some(v) if v.len() == dim => DVector::from_column_slice(v),
        Some(v) => {
            return Err(CliError::input(format!(
                "--start has {} coordinates, table has dimension {dim}",
                v.len()
            )))
        }
        None => table.centroid(),
    };
    let dir = match &a.dir {
        Some(v) if v.len() == dim => DVector::from_column_slice(v),
        Some(v) => {
            return Err(CliError::input(format!(
                "--dir has {} coordinates, table has dimension {dim}",
                v.len()
            )))
        }
        None => default_direction(dim),
    };
    let start = TrajectoryState::new(point, dir)?;
    let policy: CornerPolicy = a.policy.into();
    let traj = if a.unfold {
        simulate_unfolded(&table, &start, a.horizon)?
    } else {
        simulate(&table, &start, a.horizon, policy)?
    };
    let csv = a.csv.clone().map(|p| (p, trajectory_csv(&traj)));
    let svg = a.svg.clone().map(|p| {
        let poly: Vec<[f64; 2]> = table.vertices().iter().map(|v| [v[0], v[1]]).collect();
        let mut path = vec![[traj.start.point[0], traj.start.point[1]]];
        path.extend(traj.events.iter().map(|e| [e.point[0], e.point[1]]));
        path.push([traj.end.point[0], traj.end.point[1]]);
        (p, svg::table_with_path(&poly, &path))
    });
    Ok(Outcome {
        report: RunReport::Simulate(simulate_report(&name, &table, &traj, policy, a.unfold)),
        csv,
        svg,
    })
}

/// Alcove verdict for a polytope already in memory.
pub fn check_alcove_table(
    name: &str,
    table: &Polytope,
    eps_angle: f64,
) -> Result<AlcoveReport, CliError> {
    let verdict = check_alcove(table, eps_angle);
    let components = match (&verdict.diagram, verdict.is_alcove) {
        (Some(d), true) => Some(classify(d)?),
        _ => None,
    };
    Ok(AlcoveReport {
        table: name.to_string(),
        eps_angle,
        types: components.as_deref().map(type_string),
        components,
        verdict,
    })
}

pub fn cmd_check_alcove(table: &str) -> Result<AlcoveReport, CliError> {
    let eps = eps_override()?;
    let (name, file) = resolve_table(table)?;
    let p = file.polytope(eps.map(Tolerances::uniform).unwrap_or_default())?;
    let report = check_alcove_table(&name, &p, eps.unwrap_or(EPS_ANGLE))?;
    for f in &report.verdict.failures {
        eprintln!(
            "facets {} and {}: angle {:.12} is not pi/m (nearest pi/{} = {:.12})",
            f.i, f.j, f.angle, f.nearest_m, f.nearest_angle
        );
    }
    Ok(report)
}

fn parse_sweep(v: &[String]) -> Result<(f64, f64, usize), CliError> {
    let lo = parse_angle(&v[0]).map_err(CliError::Input)?;
    let hi = parse_angle(&v[1]).map_err(CliError::Input)?;
    let n = v[2].parse::<usize>().map_err(|_| {
        CliError::input(format!("sweep count `{}` is not a positive integer", v[2]))
    })?;
    if n == 0 || !(lo < hi) {
        return Err(CliError::input("sweep needs lo < hi and n >= 1"));
    }
    Ok((lo, hi, n))
}

pub fn cmd_corner(a: &CornerArgs) -> Result<Outcome, CliError> {
    const HORIZON: f64 = 3.0;
    let (reports, unfolding) = match (&a.sweep, a.alpha) {
        (Some(s), _) => {
            let (lo, hi, n) = parse_sweep(s)?;
            (sweep(lo, hi, n)?, None)
        }
        (None, Some(alpha)) => {
            let up = unfold_wedge(alpha, a.offset.abs(), HORIZON)?;
            let down = unfold_wedge(alpha, -a.offset.abs(), HORIZON)?;
            let check = UnfoldingCheck {
                offset: a.offset.abs(),
                horizon: HORIZON,
                angle_above: up.angle,
                angle_below: down.angle,
                bounces_above: up.bounces,
                bounces_below: down.bounces,
                gap: (up.angle - down.angle).abs(),
            };
            (vec![limit_reflection(alpha)?], Some(check))
        }
        (None, None) => return Err(CliError::input("give an angle or --sweep LO HI N")),
    };
    let csv = a.csv.clone().map(|p| {
        let header: Vec<String> = ["alpha", "m", "beta", "gap", "continuous"]
            .map(String::from)
            .to_vec();
        let rows: Vec<Vec<String>> = reports
            .iter()
            .map(|r| {
                vec![
                    num(r.alpha),
                    r.m.to_string(),
                    num(r.beta),
                    num(r.gap),
                    r.continuous.to_string(),
                ]
            })
            .collect();
        (p, csv_table(&header, &rows))
    });
    let svg = match (&a.svg, a.alpha) {
        (Some(p), Some(alpha)) => {
            // Offsets visible at figure scale.
            let off = 0.15 * (alpha / 2.0).tan();
            Some((p.clone(), svg::wedge_fan(alpha, &[(off, 2.0), (-off, 2.0)])))
        }
        (Some(_), None) => return Err(CliError::input("--svg needs a single angle, not a sweep")),
        _ => None,
    };
    Ok(Outcome {
        report: RunReport::Corner(CornerReport { reports, unfolding }),
        csv,
        svg,
    })
}

fn tetra_points(mesh: &SurfaceMesh) -> Result<[[f64; 3]; 4], CliError> {
    <[[f64; 3]; 4]>::try_from(mesh.vertices()).map_err(|_| {
        CliError::input(format!(
            "the disphenoid test needs a tetrahedron, got {} vertices",
            mesh.vertices().len()
        ))
    })
}

pub fn cmd_surface(a: &SurfaceArgs) -> Result<Outcome, CliError> {
    let eps = eps_override()?;
    let (name, file) = resolve_table(&a.mesh)?;
    let tol = eps.map(Tolerances::uniform).unwrap_or_default();
    let eps_cone = eps.unwrap_or(EPS_CONE_PI);
    if let TableFile::Polytope(pf) = &file {
        if pf.dim >= 4 {
            return boundary_surface(a, name, &pf.to_polytope(tol)?, eps_cone);
        }
    }
    let mesh = file.mesh(tol)?;
    // With no mode flag, the report is the default.
    let want_report = a.report || !(a.geodesic || a.disphenoid);
    let report = want_report.then(|| SurfaceSummary {
        cones: cone_angles_with(&mesh, eps_cone),
        total_curvature: gauss_bonnet_total(&mesh),
        orbifold: is_orbifold_boundary(&mesh, eps_cone),
        triangulation: triangulate_check(&mesh),
    });
    let disphenoid = if a.disphenoid {
        Some(is_disphenoid(&tetra_points(&mesh)?, eps.unwrap_or(1e-9))?)
    } else {
        None
    };
    let mut csv = None;
    let geodesic = if a.geodesic {
        let f = mesh
            .faces()
            .get(a.face)
            .ok_or_else(|| CliError::input(format!("face {} does not exist", a.face)))?;
        let weights = a.bary.clone().unwrap_or_else(|| vec![1.0; f.len()]);
        let p = |i: usize| Vector3::from(mesh.vertices()[i]);
        let e = (p(f[1]) - p(f[0])).normalize();
        let n = mesh.face_normal(a.face);
        let d = e * a.angle.cos() + n.cross(&e) * a.angle.sin();
        let start = GeodesicStart::from_barycentric(&mesh, a.face, &weights, [d.x, d.y, d.z])?;
        let g = trace_surface_geodesic(&mesh, &start, a.length)?;
        let residual = straightness_residual(&mesh, &g);
        if let Some(path) = &a.csv {
            let mut rows = vec![trajectory_row(
                0.0,
                &start.point,
                format!("start:face{}", a.face),
            )];
            for c in &g.crossings {
                let label = match c.kind {
                    CrossingKind::Edge { a, b } => format!("edge:{a}-{b}"),
                    CrossingKind::Vertex { v } => format!("vertex:{v}"),
                };
                rows.push(trajectory_row(c.t, &c.point, label));
            }
            rows.push(trajectory_row(
                g.length,
                &g.end_point,
                format!("end:face{}", g.end_face),
            ));
            csv = Some((path.clone(), csv_table(&trajectory_header(3), &rows)));
        }
        Some(GeodesicSummary {
            face: a.face,
            point: start.point,
            direction: start.direction,
            length: g.length,
            crossings: g.crossings.len(),
            end_face: g.end_face,
            end_point: g.end_point,
            residual,
        })
    } else {
        None
    };
    Ok(Outcome {
        report: RunReport::Surface(SurfaceReport {
            mesh: name,
            vertices: mesh.vertices().len(),
            edges: mesh.edge_count(),
            faces: mesh.faces().len(),
            report,
            geodesic,
            disphenoid,
            boundary: None,
        }),
        csv,
        svg: None,
    })
}

/// Boundary of a polytope of dimension four or more: only the cone-angle
/// report is available.
fn boundary_surface(
    a: &SurfaceArgs,
    name: String,
    p: &Polytope,
    eps: f64,
) -> Result<Outcome, CliError> {
    if a.geodesic || a.disphenoid {
        return Err(CliError::input(format!(
            "--geodesic and --disphenoid need a 3-dimensional table, {name} has dimension {}",
            p.dim()
        )));
    }
    let boundary = boundary_cone_angles(p, eps)?;
    let csv = a.csv.as_ref().map(|path| {
        let rows: Vec<Vec<String>> = boundary
            .cones
            .iter()
            .map(|c| {
                vec![
                    join(&c.vertices),
                    join(&c.facets),
                    num(c.cone_angle),
                    c.orbifold_order.map(|k| k.to_string()).unwrap_or_default(),
                ]
            })
            .collect();
        (
            path.clone(),
            csv_table(
                &["vertices", "facets", "cone_angle", "order"].map(String::from),
                &rows,
            ),
        )
    });
    Ok(Outcome {
        report: RunReport::Surface(SurfaceReport {
            mesh: name,
            vertices: p.vertices().len(),
            edges: p.edges().len(),
            faces: p.halfspaces().len(),
            report: None,
            geodesic: None,
            disphenoid: None,
            boundary: Some(boundary),
        }),
        csv,
        svg: None,
    })
}

fn join(ix: &[usize]) -> String {
    ix.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn cmd_smooth(a: &SmoothArgs) -> Result<Outcome, CliError> {
    let (name, file) = resolve_table(&a.table)?;
    let table = file.smooth()?;
    if a.grid
        .iter()
        .any(|&x| !(x > 0.0 && x <= std::f64::consts::FRAC_PI_2))
    {
        return Err(CliError::input("grid angles must lie in (0, pi/2]"));
    }
    let want_laws = a.laws || !a.converge;
    let laws = if want_laws {
        Some(verify_base_angle_laws(&table, &a.grid, a.laps)?)
    } else {
        None
    };
    let convergence = if a.converge {
        let arc = a.arc.unwrap_or(table.perimeter());
        Some(boundary_convergence_experiment(&table, a.s0, arc, &a.grid)?)
    } else {
        None
    };
    let csv = a.csv.clone().map(|p| {
        let (header, rows): (Vec<&str>, Vec<Vec<String>>) = if let Some(c) = &convergence {
            (
                vec!["alpha0", "bounces", "deviation"],
                c.rows
                    .iter()
                    .map(|r| vec![num(r.alpha0), r.bounces.to_string(), num(r.deviation)])
                    .collect(),
            )
        } else {
            let l = laws.as_ref().expect("laws computed when not converging");
            (
                vec![
                    "alpha0",
                    "bounces",
                    "min_chord_over_alpha",
                    "max_increment",
                    "max_depth",
                ],
                l.runs
                    .iter()
                    .map(|r| {
                        vec![
                            num(r.alpha0),
                            r.bounces.to_string(),
                            num(r.min_chord_over_alpha),
                            num(r.max_increment),
                            num(r.max_depth),
                        ]
                    })
                    .collect(),
            )
        };
        let header: Vec<String> = header.into_iter().map(String::from).collect();
        (p, csv_table(&header, &rows))
    });
    Ok(Outcome {
        report: RunReport::Smooth(SmoothReport {
            table: name,
            shape: table.shape(),
            perimeter: table.perimeter(),
            k_min: table.k_min(),
            k_max: table.k_max(),
            laws,
            convergence,
        }),
        csv,
        svg: None,
    })
}

pub fn cmd_tables(a: &TablesArgs) -> Result<Outcome, CliError> {
    let mut written = Vec::new();
    if let Some(dir) = &a.write {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        let mut files: Vec<(String, TableFile)> = Vec::new();
        for name in tables::POLYTOPES {
            let p = tables::polytope(name).expect("listed name");
            files.push((
                name.to_string(),
                TableFile::Polytope(PolytopeFile::from_polytope(&p)),
            ));
        }
        for name in tables::SMOOTH {
            files.push((
                name.to_string(),
                TableFile::Smooth {
                    smooth2d: tables::smooth_shape(name).expect("listed name"),
                },
            ));
        }
        let tetra = SurfaceMesh::tetrahedron(&tables::REGULAR_TETRAHEDRON)?;
        files.push((
            "tetra_regular_surface".into(),
            TableFile::Surface { surface: tetra },
        ));
        for (name, file) in files {
            let path = dir.join(format!("{name}.json"));
            std::fs::write(&path, crate::format::to_json(&file)).map_err(|source| {
                CliError::Io {
                    path: path.clone(),
                    source,
                }
            })?;
            written.push(path.display().to_string());
        }
    }
    Ok(Outcome::report(RunReport::Tables(TablesReport {
        polytopes: tables::POLYTOPES.map(String::from).to_vec(),
        smooth: tables::SMOOTH.map(String::from).to_vec(),
        written,
    })))
}
