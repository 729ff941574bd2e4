mod common;

use billiards_core::alcove::{
    check_alcove, classify, fold_point, folded_flow, type_string, AffineType, EPS_ANGLE,
};
use billiards_core::dynamics::TrajectoryState;
use billiards_core::{tables, HalfSpace, Point, Polytope};
use common::*;
use nalgebra::DVector;

/// Alcove `{<a_i, x> >= 0, <theta, x> <= 1}` of a root system given in
/// ambient coordinates, expressed in an orthonormal basis of the root span.
fn alcove_from_roots(simple: &[Vec<f64>], theta: &[f64]) -> Polytope {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for a in simple {
        let mut v = DVector::from_column_slice(a);
        for b in &basis {
            v -= b * b.dot(&v);
        }
        basis.push(v.normalize());
    }
    let coords = |a: &[f64]| {
        let a = DVector::from_column_slice(a);
        DVector::from_iterator(basis.len(), basis.iter().map(|b| b.dot(&a)))
    };
    let mut hs: Vec<HalfSpace> = simple
        .iter()
        .map(|a| HalfSpace::new(-coords(a), 0.0).unwrap())
        .collect();
    hs.push(HalfSpace::new(coords(theta), 1.0).unwrap());
    Polytope::simplex(hs).unwrap()
}

fn e(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn comb(n: usize, terms: &[(usize, f64)]) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for &(i, c) in terms {
        v[i] += c;
    }
    v
}

fn chain(n: usize, len: usize) -> Vec<Vec<f64>> {
    (0..len)
        .map(|i| comb(n, &[(i, 1.0), (i + 1, -1.0)]))
        .collect()
}

#[test]
fn root_system_alcoves_classify() {
    let mut cases: Vec<(Vec<Vec<f64>>, Vec<f64>, AffineType)> = Vec::new();
    for n in 1..=4 {
        cases.push((
            chain(n + 1, n),
            comb(n + 1, &[(0, 1.0), (n, -1.0)]),
            AffineType::A(n),
        ));
    }
    for n in 3..=4 {
        let mut s = chain(n, n - 1);
        s.push(e(n, n - 1));
        cases.push((s, comb(n, &[(0, 1.0), (1, 1.0)]), AffineType::B(n)));
    }
    for n in 2..=4 {
        let mut s = chain(n, n - 1);
        s.push(comb(n, &[(n - 1, 2.0)]));
        cases.push((s, comb(n, &[(0, 2.0)]), AffineType::C(n)));
    }
    let mut d4 = chain(4, 3);
    d4.push(comb(4, &[(2, 1.0), (3, 1.0)]));
    cases.push((d4, comb(4, &[(0, 1.0), (1, 1.0)]), AffineType::D(4)));
    let f4 = vec![
        comb(4, &[(1, 1.0), (2, -1.0)]),
        comb(4, &[(2, 1.0), (3, -1.0)]),
        e(4, 3),
        comb(4, &[(0, 0.5), (1, -0.5), (2, -0.5), (3, -0.5)]),
    ];
    cases.push((f4, comb(4, &[(0, 1.0), (1, 1.0)]), AffineType::F4));
    let g2 = vec![
        comb(3, &[(0, 1.0), (1, -1.0)]),
        comb(3, &[(0, -2.0), (1, 1.0), (2, 1.0)]),
    ];
    cases.push((
        g2,
        comb(3, &[(0, -1.0), (1, -1.0), (2, 2.0)]),
        AffineType::G2,
    ));

    for (simple, theta, expected) in cases {
        let p = alcove_from_roots(&simple, &theta);
        let v = check_alcove(&p, EPS_ANGLE);
        assert!(v.is_alcove, "{expected}: {:?}", v.failures);
        assert_eq!(
            classify(v.diagram.as_ref().unwrap()).unwrap(),
            vec![expected]
        );
    }
}

#[test]
fn classification_examples() {
    let cases = [
        (tables::rectangle(), "A1~ x A1~"),
        (tables::square(), "A1~ x A1~"),
        (tables::triangle_a2(), "A2~"),
        (tables::triangle_c2(), "C2~"),
        (tables::triangle_g2(), "G2~"),
    ];
    for (p, ty) in cases {
        let v = check_alcove(&p, EPS_ANGLE);
        assert_eq!(
            type_string(&classify(v.diagram.as_ref().unwrap()).unwrap()),
            ty
        );
    }
}

/// All images of `x` under words of length at most `len` in the facet
/// reflections.
fn orbit(p: &Polytope, x: &Point, len: usize) -> Vec<Point> {
    let mut layer = vec![x.clone()];
    let mut all = layer.clone();
    for _ in 0..len {
        let next: Vec<Point> = layer
            .iter()
            .flat_map(|y| p.halfspaces().iter().map(move |h| h.reflect_point(y)))
            .collect();
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

#[test]
fn triangle_fold_matches_orbit_enumeration() {
    let tri = tables::triangle_a2();
    let c = tri.centroid();
    for v in tri.vertices() {
        let out = (v - &c).normalize();
        for scale in [0.4, 0.8, 1.2] {
            let x = v + &out * scale;
            let (y, _) = fold_point(&tri, &x, 1000).unwrap();
            let inside: Vec<Point> = orbit(&tri, &x, 6)
                .into_iter()
                .filter(|q| tri.halfspaces().iter().all(|h| h.violation(q) <= 1e-9))
                .collect();
            assert!(!inside.is_empty());
            for q in inside {
                assert!((&q - &y).norm() < 1e-9, "{q} vs {y}");
            }
        }
    }
}

#[test]
fn fold_point_examples() {
    let unit = Polytope::cuboid(&[1.0]).unwrap();
    let (y, _) = fold_point(&unit, &DVector::from_vec(vec![2.3]), 100).unwrap();
    assert!((y[0] - 0.3).abs() < 1e-12);
    let sq = tables::square();
    let (y, _) = fold_point(&sq, &DVector::from_vec(vec![2.3, -0.4]), 100).unwrap();
    assert!((y - DVector::from_vec(vec![0.3, 0.4])).norm() < 1e-12);
}

/// Sup distance between the folded flows from `base +- offset * perp`.
fn two_sided_gap(p: &Polytope, base: &Point, dir: &Point, perp: &Point, offset: f64) -> f64 {
    let a = TrajectoryState::new(base + perp * offset, dir.clone()).unwrap();
    let b = TrajectoryState::new(base - perp * offset, dir.clone()).unwrap();
    let ta = folded_flow(p, &a, 10.0).unwrap();
    let tb = folded_flow(p, &b, 10.0).unwrap();
    ta.sup_distance(&tb)
}

#[test]
fn corner_approaches_converge_on_alcoves() {
    let tables = [
        tables::square(),
        tables::rectangle(),
        tables::triangle_a2(),
        tables::triangle_c2(),
        tables::triangle_g2(),
        tables::simplex_a3(),
    ];
    let mut r = rng(5);
    for p in &tables {
        let c = p.centroid();
        let mut targets: Vec<Point> = p.vertices().to_vec();
        if p.dim() == 3 {
            // Midpoints of edges: codimension-two corners.
            for i in 0..p.vertices().len() {
                for j in i + 1..p.vertices().len() {
                    targets.push((&p.vertices()[i] + &p.vertices()[j]) / 2.0);
                }
            }
        }
        for t in targets {
            let dir = (&t - &c).normalize();
            let mut perp = random_unit(&mut r, p.dim());
            perp -= &dir * dir.dot(&perp);
            let perp = perp.normalize();
            let gaps: Vec<f64> = [1e-3, 1e-5, 1e-8]
                .iter()
                .map(|&o| two_sided_gap(p, &c, &dir, &perp, o))
                .collect();
            assert!(gaps[2] < 1e-6, "{gaps:?}");
            assert!(gaps[2] <= gaps[0], "{gaps:?}");
            // The corner shot itself is the common limit.
            let exact = folded_flow(
                p,
                &TrajectoryState::new(c.clone(), dir.clone()).unwrap(),
                10.0,
            )
            .unwrap();
            let near = folded_flow(
                p,
                &TrajectoryState::new(&c + &perp * 1e-8, dir.clone()).unwrap(),
                10.0,
            )
            .unwrap();
            assert!(exact.sup_distance(&near) < 1e-6);
        }
    }
}

#[test]
fn equilateral_vertex_shot_returns() {
    let tri = tables::triangle_a2();
    let c = tri.centroid();
    let v = &tri.vertices()[2];
    let dir = (v - &c).normalize();
    let d = (v - &c).norm();
    let t = folded_flow(
        &tri,
        &TrajectoryState::new(c.clone(), dir.clone()).unwrap(),
        2.0 * d,
    )
    .unwrap();
    assert!((&t.end.point - &c).norm() < 1e-12);
    assert!((&t.end.direction + &dir).norm() < 1e-12);
}
