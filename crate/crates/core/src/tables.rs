//! Library of named example tables.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::alcove::{standard_alcove, AffineType};
use crate::polytope::{HalfSpace, Polytope, PolytopeError};
use crate::smooth::{SmoothShape, SmoothTable2D};
use crate::surface::{make_disphenoid, SurfaceError, SurfaceMesh};

/// Triangle with interior angles `a` at (0,0) and `b` at (1,0), above the x axis.
pub fn triangle(a: f64, b: f64) -> Result<Polytope, PolytopeError> {
    let c = PI - a - b;
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(PolytopeError::Empty);
    }
    let ac = b.sin() / c.sin();
    Polytope::polygon(&[[0.0, 0.0], [1.0, 0.0], [ac * a.cos(), ac * a.sin()]])
}

pub fn square() -> Polytope {
    Polytope::cuboid(&[1.0, 1.0]).expect("unit square")
}

pub fn rectangle() -> Polytope {
    Polytope::cuboid(&[2.0, 1.0]).expect("rectangle")
}

pub fn triangle_a2() -> Polytope {
    triangle(PI / 3.0, PI / 3.0).expect("equilateral triangle")
}

/// The (pi/2, pi/4, pi/4) triangle.
pub fn triangle_c2() -> Polytope {
    triangle(PI / 2.0, PI / 4.0).expect("right isosceles triangle")
}

/// The (pi/2, pi/3, pi/6) triangle.
pub fn triangle_g2() -> Polytope {
    triangle(PI / 2.0, PI / 3.0).expect("30-60-90 triangle")
}

/// A triangle none of whose angles is `pi/m`.
pub fn triangle_generic() -> Polytope {
    triangle(0.9, 0.9).expect("generic triangle")
}

/// Isosceles triangle with apex angle `2 pi / 5` at the origin-side vertex (0,0).
pub fn triangle_two_fifths() -> Polytope {
    triangle(2.0 * PI / 5.0, 3.0 * PI / 10.0).expect("2pi/5 triangle")
}

pub fn simplex_a3() -> Polytope {
    standard_alcove(AffineType::A(3)).expect("affine A3 alcove")
}

pub fn cube() -> Polytope {
    Polytope::cuboid(&[1.0, 1.0, 1.0]).expect("unit cube")
}

/// Polytope spanned by four affinely independent points.
pub fn tetrahedron(v: &[[f64; 3]; 4]) -> Result<Polytope, PolytopeError> {
    let pts: Vec<DVector<f64>> = v.iter().map(|p| DVector::from_column_slice(p)).collect();
    let mut hs = Vec::with_capacity(4);
    for skip in 0..4 {
        let f: Vec<&DVector<f64>> = (0..4).filter(|&i| i != skip).map(|i| &pts[i]).collect();
        let a = (f[1] - f[0]).fixed_rows::<3>(0).into_owned();
        let b = (f[2] - f[0]).fixed_rows::<3>(0).into_owned();
        let mut n = DVector::from_column_slice(a.cross(&b).as_slice());
        if n.dot(&(&pts[skip] - f[0])) > 0.0 {
            n = -n;
        }
        let c = n.dot(f[0]);
        hs.push(HalfSpace::new(n, c).map_err(|_| PolytopeError::ZeroNormal(hs.len()))?);
    }
    // Facet k avoids vertex k.
    Polytope::simplex(hs)
}

pub const REGULAR_TETRAHEDRON: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
];

pub fn regular_tetrahedron() -> Polytope {
    tetrahedron(&REGULAR_TETRAHEDRON).expect("regular tetrahedron")
}

pub fn disphenoid_456() -> Polytope {
    tetrahedron(&make_disphenoid(4.0, 5.0, 6.0).expect("acute")).expect("disphenoid")
}

pub fn tesseract() -> Polytope {
    Polytope::cuboid(&[1.0; 4]).expect("unit 4-cube")
}

/// Regular 4-simplex centred at the origin with inradius 1.
pub fn regular_simplex_4() -> Polytope {
    // e_1..e_4 and c(1,1,1,1) are the vertices of a regular simplex; their
    // directions from the centroid are the facet normals of its dual.
    let c = (1.0 - 5f64.sqrt()) / 4.0;
    let mut pts: Vec<DVector<f64>> = (0..4)
        .map(|k| DVector::from_fn(4, |i, _| if i == k { 1.0 } else { 0.0 }))
        .collect();
    pts.push(DVector::from_element(4, c));
    let centroid = pts.iter().sum::<DVector<f64>>() / 5.0;
    let hs = pts
        .iter()
        .map(|q| {
            let n = q - &centroid;
            let l = n.norm();
            HalfSpace::new(n, l).expect("nonzero normal")
        })
        .collect();
    Polytope::simplex(hs).expect("regular 4-simplex")
}

/// Names accepted by [`polytope`].
pub const POLYTOPES: [&str; 13] = [
    "square",
    "rectangle",
    "triangle_A2",
    "triangle_C2",
    "triangle_G2",
    "triangle_generic",
    "triangle_2pi5",
    "simplex_A3",
    "cube",
    "tetra_regular",
    "disphenoid_456",
    "tesseract",
    "simplex_4",
];

pub fn polytope(name: &str) -> Option<Polytope> {
    Some(match name {
        "square" => square(),
        "rectangle" => rectangle(),
        "triangle_A2" => triangle_a2(),
        "triangle_C2" => triangle_c2(),
        "triangle_G2" => triangle_g2(),
        "triangle_generic" => triangle_generic(),
        "triangle_2pi5" => triangle_two_fifths(),
        "simplex_A3" => simplex_a3(),
        "cube" => cube(),
        "tetra_regular" => regular_tetrahedron(),
        "disphenoid_456" => disphenoid_456(),
        "tesseract" => tesseract(),
        "simplex_4" => regular_simplex_4(),
        _ => return None,
    })
}

pub fn mesh(name: &str) -> Option<Result<SurfaceMesh, SurfaceError>> {
    let p = polytope(name)?;
    (p.dim() == 3).then(|| SurfaceMesh::from_polytope(&p))
}

pub const SMOOTH: [&str; 3] = ["circle", "ellipse", "perturbed"];

pub fn smooth_shape(name: &str) -> Option<SmoothShape> {
    Some(match name {
        "circle" => SmoothShape::Circle { radius: 1.0 },
        "ellipse" => SmoothShape::Ellipse { a: 2.0, b: 1.0 },
        "perturbed" => SmoothShape::Perturbed {
            delta: 0.05,
            lobes: 3,
        },
        _ => return None,
    })
}

pub fn smooth(name: &str) -> Option<SmoothTable2D> {
    smooth_shape(name).map(|s| SmoothTable2D::new(s).expect("bundled smooth table"))
}
