//! Table files, bundled tables, and small argument parsers.

use std::f64::consts::PI;
use std::path::Path;

use billiards_core::smooth::{SmoothShape, SmoothTable2D};
use billiards_core::surface::SurfaceMesh;
use billiards_core::{tables, HalfSpace, Point, Polytope, Tolerances};
use nalgebra::DVector;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfSpaceFile {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// H-representation with optional vertex data; `<x, normal> <= offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeFile {
    pub dim: usize,
    pub halfspaces: Vec<HalfSpaceFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facet_vertices: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceFile {
    surface: SurfaceMesh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SmoothFile {
    smooth2d: SmoothShape,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TableFile {
    Polytope(PolytopeFile),
    Surface { surface: SurfaceMesh },
    Smooth { smooth2d: SmoothShape },
}

impl<'de> Deserialize<'de> for TableFile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        let obj = v
            .as_object()
            .ok_or_else(|| D::Error::custom("table file must be a JSON object"))?;
        if obj.contains_key("surface") {
            let f: SurfaceFile = serde_json::from_value(v).map_err(D::Error::custom)?;
            Ok(TableFile::Surface { surface: f.surface })
        } else if obj.contains_key("smooth2d") {
            let f: SmoothFile = serde_json::from_value(v).map_err(D::Error::custom)?;
            Ok(TableFile::Smooth {
                smooth2d: f.smooth2d,
            })
        } else {
            serde_json::from_value(v)
                .map(TableFile::Polytope)
                .map_err(D::Error::custom)
        }
    }
}

impl PolytopeFile {
    pub fn from_polytope(p: &Polytope) -> Self {
        Self {
            dim: p.dim(),
            halfspaces: p
                .halfspaces()
                .iter()
                .map(|h| HalfSpaceFile {
                    normal: h.normal.as_slice().to_vec(),
                    offset: h.offset,
                })
                .collect(),
            vertices: Some(p.vertices().iter().map(|v| v.as_slice().to_vec()).collect()),
            facet_vertices: Some(p.facet_vertices().to_vec()),
        }
    }

    /// Builds and validates the polytope; normals are normalised here.
    pub fn to_polytope(&self, tol: Tolerances) -> Result<Polytope, CliError> {
        let mut hs = Vec::with_capacity(self.halfspaces.len());
        for (i, h) in self.halfspaces.iter().enumerate() {
            if h.normal.len() != self.dim {
                return Err(CliError::input(format!(
                    "halfspace {i}: normal has {} entries, dim is {}",
                    h.normal.len(),
                    self.dim
                )));
            }
            hs.push(HalfSpace::from_slice(&h.normal, h.offset)?);
        }
        let p = match (&self.vertices, &self.facet_vertices) {
            (Some(v), Some(f)) => {
                let verts: Vec<Point> = v.iter().map(|x| DVector::from_column_slice(x)).collect();
                if let Some(bad) = v.iter().position(|x| x.len() != self.dim) {
                    return Err(CliError::input(format!("vertex {bad} has wrong dimension")));
                }
                Polytope::with_tolerances(hs, verts, f.clone(), tol)?
            }
            (None, None) if hs.len() == self.dim + 1 && self.dim > 3 => {
                let mut p = Polytope::simplex(hs)?;
                p.set_tolerances(tol);
                p
            }
            (None, None) => Polytope::from_halfspaces_with(hs, tol)?,
            _ => {
                return Err(CliError::input(
                    "vertices and facet_vertices must be given together",
                ))
            }
        };
        Ok(p)
    }
}

impl TableFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TableFile::Polytope(_) => "polytope",
            TableFile::Surface { .. } => "surface",
            TableFile::Smooth { .. } => "smooth2d",
        }
    }

    pub fn polytope(&self, tol: Tolerances) -> Result<Polytope, CliError> {
        match self {
            TableFile::Polytope(p) => p.to_polytope(tol),
            other => Err(CliError::input(format!(
                "expected a polytope table, found a {} table",
                other.kind()
            ))),
        }
    }

    /// Surface tables directly, or the boundary of a 3-dimensional polytope.
    pub fn mesh(&self, tol: Tolerances) -> Result<SurfaceMesh, CliError> {
        match self {
            TableFile::Surface { surface } => Ok(surface.clone()),
            TableFile::Polytope(p) if p.dim == 3 => {
                Ok(SurfaceMesh::from_polytope(&p.to_polytope(tol)?)?)
            }
            other => Err(CliError::input(format!(
                "expected a surface or a 3-dimensional polytope, found a {} table",
                other.kind()
            ))),
        }
    }

    pub fn smooth(&self) -> Result<SmoothTable2D, CliError> {
        match self {
            TableFile::Smooth { smooth2d } => Ok(SmoothTable2D::new(*smooth2d)?),
            other => Err(CliError::input(format!(
                "expected a smooth2d table, found a {} table",
                other.kind()
            ))),
        }
    }
}

/// Bundled table by name.
pub fn bundled(name: &str) -> Option<TableFile> {
    if let Some(p) = tables::polytope(name) {
        return Some(TableFile::Polytope(PolytopeFile::from_polytope(&p)));
    }
    tables::smooth_shape(name).map(|s| TableFile::Smooth { smooth2d: s })
}

/// A path to a table file, or else the name of a bundled table.
pub fn resolve_table(arg: &str) -> Result<(String, TableFile), CliError> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let table = TableFile::parse(&text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| arg.to_string());
        return Ok((name, table));
    }
    bundled(arg).map(|t| (arg.to_string(), t)).ok_or_else(|| {
        CliError::input(format!(
            "{arg}: no such file and no bundled table of that name (try `billiards tables`)"
        ))
    })
}

/// Reads `BILLIARDS_EPS`, if set.
pub fn eps_override() -> Result<Option<f64>, CliError> {
    match std::env::var("BILLIARDS_EPS") {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(Some(v)),
            _ => Err(CliError::input(format!(
                "BILLIARDS_EPS={s} is not a positive number"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Angle in radians: a plain number, or `pi`, `pi/3`, `2pi/5`, `3*pi/7`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s
        .trim()
        .to_ascii_lowercase()
        .replace('π', "pi")
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let bad = || format!("cannot read `{s}` as an angle");
    let (sign, t) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.to_string()),
        None => (1.0, t),
    };
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let c = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>().map_err(|_| bad())?
    };
    Ok(sign * c * PI / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/3").unwrap(), PI / 3.0);
        assert_eq!(parse_angle("2pi/5").unwrap(), 2.0 * PI / 5.0);
        assert_eq!(parse_angle("2 * pi / 5").unwrap(), 2.0 * PI / 5.0);
        assert_eq!(parse_angle("π/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("-3pi/4").unwrap(), -0.75 * PI);
        assert!(parse_angle("tau/3").is_err());
        assert!(parse_angle("pi/x").is_err());
    }

    #[test]
    fn table_files_round_trip() {
        for name in tables::POLYTOPES.iter().chain(&tables::SMOOTH) {
            let t = bundled(name).unwrap();
            let text = serde_json::to_string(&t).unwrap();
            assert_eq!(TableFile::parse(&text).unwrap(), t, "{name}");
        }
    }

    #[test]
    fn normals_are_normalised_on_load() {
        let text = r#"{"dim": 2, "halfspaces": [
            {"normal": [-3, 0], "offset": 0}, {"normal": [0, -2], "offset": 0},
            {"normal": [5, 5], "offset": 5}]}"#;
        let p = TableFile::parse(text)
            .unwrap()
            .polytope(Tolerances::default())
            .unwrap();
        assert!((p.halfspaces()[2].normal.norm() - 1.0).abs() < 1e-15);
        assert!((p.halfspaces()[2].offset - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.vertices().len(), 3);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(TableFile::parse("[1, 2]").is_err());
        assert!(TableFile::parse(r#"{"dim": 2}"#).is_err());
        assert!(TableFile::parse(r#"{"dim": 2, "halfspaces": [], "colour": 1}"#).is_err());
        assert!(TableFile::parse(r#"{"smooth2d": {"kind": "square"}}"#).is_err());
        let short = r#"{"dim": 3, "halfspaces": [{"normal": [1, 0], "offset": 1}]}"#;
        assert!(TableFile::parse(short)
            .unwrap()
            .polytope(Tolerances::default())
            .is_err());
    }

    #[test]
    fn meshes_from_files() {
        let cube = bundled("cube")
            .unwrap()
            .mesh(Tolerances::default())
            .unwrap();
        assert_eq!(cube.vertices().len(), 8);
        let text = r#"{"surface": {"vertices": [[1,1,1],[1,-1,-1],[-1,1,-1],[-1,-1,1]],
            "faces": [[0,1,2],[0,3,1],[0,2,3],[1,3,2]]}}"#;
        let t = TableFile::parse(text).unwrap();
        assert_eq!(t.kind(), "surface");
        assert!(t.mesh(Tolerances::default()).is_ok());
        assert!(bundled("square")
            .unwrap()
            .mesh(Tolerances::default())
            .is_err());
        assert!(bundled("circle").unwrap().smooth().is_ok());
    }
}
