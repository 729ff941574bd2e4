//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use billiards_cli::commands::{check_alcove_table, cmd_check_alcove};
use billiards_core::alcove::{fold_point, folded_flow, EPS_ANGLE};
use billiards_core::corner::{limit_reflection, sweep, Wedge, EPS_GAP};
use billiards_core::dynamics::{
    simulate, simulate_unfolded, CornerPolicy, Trajectory, TrajectoryState,
};
use billiards_core::smooth::{
    base_angle_run, boundary_convergence_experiment, verify_base_angle_laws, SmoothTable2D,
    ZERO_INCREMENT,
};
use billiards_core::surface::{
    cone_angles, gauss_bonnet_total, is_disphenoid, is_orbifold_boundary, make_disphenoid,
    straightness_residual, trace_surface_geodesic, triangulate_check, GeodesicStart, SurfaceError,
    SurfaceMesh,
};
use billiards_core::{reflect, tables, HalfSpace, Point, Polytope};
use nalgebra::{DVector, Rotation3, Unit, Vector3};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRng, TestRunner};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GRID: [f64; 5] = [0.04, 0.02, 0.01, 0.005, 0.0025];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_unit(r: &mut impl Rng, dim: usize) -> Point {
    loop {
        let v = DVector::from_fn(dim, |_, _| r.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

fn random_polygon(r: &mut impl Rng) -> Polytope {
    loop {
        let n = r.gen_range(3..=7);
        let mut a: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..2.0 * PI)).collect();
        a.sort_by(f64::total_cmp);
        let ok = (0..n).all(|i| {
            let next = if i + 1 < n { a[i + 1] } else { a[0] + 2.0 * PI };
            next - a[i] > 0.2 && next - a[i] < PI - 0.2
        });
        if !ok {
            continue;
        }
        let pts: Vec<[f64; 2]> = a.iter().map(|t| [t.cos(), t.sin()]).collect();
        if let Ok(p) = Polytope::polygon(&pts) {
            return p;
        }
    }
}

fn random_tetra_points(r: &mut impl Rng) -> [[f64; 3]; 4] {
    loop {
        let mut p = [[0.0f64; 3]; 4];
        for c in p.iter_mut().flatten() {
            *c = r.gen_range(-1.0..1.0);
        }
        if volume(&p) > 0.05 {
            return p;
        }
    }
}

fn volume(p: &[[f64; 3]; 4]) -> f64 {
    let v = |i: usize| Vector3::from(p[i]);
    (v(1) - v(0))
        .cross(&(v(2) - v(0)))
        .dot(&(v(3) - v(0)))
        .abs()
}

fn random_interior(p: &Polytope, r: &mut impl Rng) -> Point {
    let w: Vec<f64> = p
        .vertices()
        .iter()
        .map(|_| r.gen_range(0.05..1.0))
        .collect();
    let total: f64 = w.iter().sum();
    p.vertices()
        .iter()
        .zip(&w)
        .fold(DVector::zeros(p.dim()), |acc, (v, wi)| {
            acc + v * (wi / total)
        })
}

fn is_regular(p: &Polytope, t: &Trajectory, margin: f64) -> bool {
    t.events.iter().all(|e| {
        e.active.len() == 1
            && p.halfspaces()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != e.active[0])
                .all(|(_, h)| -h.violation(&e.point) > margin)
    })
}

/// Random similarity image of a planar point set.
fn place(r: &mut impl Rng, pts: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let th: f64 = r.gen_range(0.0..2.0 * PI);
    let s: f64 = r.gen_range(0.5..3.0);
    let (dx, dy) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
    pts.iter()
        .map(|p| {
            [
                s * (th.cos() * p[0] - th.sin() * p[1]) + dx,
                s * (th.sin() * p[0] + th.cos() * p[1]) + dy,
            ]
        })
        .collect()
}

fn triangle_points(a: f64, b: f64) -> [[f64; 2]; 3] {
    let c = PI - a - b;
    let ac = b.sin() / c.sin();
    [[0.0, 0.0], [1.0, 0.0], [ac * a.cos(), ac * a.sin()]]
}

/// Angle-triple oracle: the three alcove triangles, up to order.
fn alcove_triangle(angles: [f64; 3]) -> Option<&'static str> {
    let mut s = angles;
    s.sort_by(f64::total_cmp);
    let known = [
        ([PI / 3.0, PI / 3.0, PI / 3.0], "A2~"),
        ([PI / 4.0, PI / 4.0, PI / 2.0], "C2~"),
        ([PI / 6.0, PI / 3.0, PI / 2.0], "G2~"),
    ];
    known
        .iter()
        .find(|(k, _)| k.iter().zip(&s).all(|(x, y)| (x - y).abs() < 1e-12))
        .map(|(_, n)| *n)
}

fn c1() -> Result<String, String> {
    let mut r = rng(101);
    let mut accepted = 0;
    for i in 0..10_000 {
        let a = r.gen_range(0.02..PI - 0.06);
        let b = r.gen_range(0.02..PI - a - 0.02);
        let p =
            Polytope::polygon(&place(&mut r, &triangle_points(a, b))).map_err(|e| e.to_string())?;
        let rep = check_alcove_table("random", &p, EPS_ANGLE).map_err(|e| e.to_string())?;
        let oracle = alcove_triangle([a, b, PI - a - b]);
        if rep.verdict.is_alcove != oracle.is_some() {
            return Err(format!("random triangle {i} ({a}, {b}) misclassified"));
        }
        accepted += rep.verdict.is_alcove as usize;
    }
    // Exact alcove triangles in random position, and 1e-7 perturbations of them.
    let exact = [
        (PI / 3.0, PI / 3.0, "A2~"),
        (PI / 2.0, PI / 4.0, "C2~"),
        (PI / 2.0, PI / 3.0, "G2~"),
        (PI / 6.0, PI / 2.0, "G2~"),
    ];
    for k in 0..400 {
        let (a, b, ty) = exact[k % exact.len()];
        let p =
            Polytope::polygon(&place(&mut r, &triangle_points(a, b))).map_err(|e| e.to_string())?;
        let rep = check_alcove_table("exact", &p, EPS_ANGLE).map_err(|e| e.to_string())?;
        if rep.types.as_deref() != Some(ty) {
            return Err(format!(
                "alcove triangle ({a}, {b}) classified as {:?}",
                rep.types
            ));
        }
        let q = Polytope::polygon(&place(&mut r, &triangle_points(a + 1e-7, b)))
            .map_err(|e| e.to_string())?;
        if check_alcove_table("perturbed", &q, EPS_ANGLE)
            .map_err(|e| e.to_string())?
            .verdict
            .is_alcove
        {
            return Err(format!("perturbed ({a}, {b}) accepted"));
        }
    }
    let bundled = [
        ("rectangle", Some("A1~ x A1~")),
        ("square", Some("A1~ x A1~")),
        ("triangle_A2", Some("A2~")),
        ("triangle_C2", Some("C2~")),
        ("triangle_G2", Some("G2~")),
        ("triangle_generic", None),
        ("triangle_2pi5", None),
    ];
    for (name, ty) in bundled {
        let rep = cmd_check_alcove(name).map_err(|e| e.to_string())?;
        if rep.verdict.is_alcove != ty.is_some() || rep.types.as_deref() != ty {
            return Err(format!("{name}: {:?}", rep.types));
        }
    }
    Ok(format!("10000 random triangles, {accepted} accepted (0 false positives); 400 exact alcoves typed, 400 perturbed rejected; bundled tables correct"))
}

fn c2() -> Result<String, String> {
    let offsets = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
    let names = [
        "square",
        "rectangle",
        "triangle_A2",
        "triangle_C2",
        "triangle_G2",
        "simplex_A3",
    ];
    let mut r = rng(102);
    let mut worst_final: f64 = 0.0;
    let mut sequences = 0;
    for name in names {
        let p = tables::polytope(name).unwrap();
        let c = p.centroid();
        let mut targets: Vec<Point> = p.vertices().to_vec();
        if p.dim() == 3 {
            for i in 0..p.vertices().len() {
                for j in i + 1..p.vertices().len() {
                    targets.push((&p.vertices()[i] + &p.vertices()[j]) / 2.0);
                }
            }
        }
        for t in &targets {
            let dir = (t - &c).normalize();
            for _ in 0..2 {
                let mut perp = random_unit(&mut r, p.dim());
                perp -= &dir * dir.dot(&perp);
                let perp = perp.normalize();
                let flow = |x: Point| {
                    folded_flow(&p, &TrajectoryState::new(x, dir.clone()).unwrap(), 10.0)
                        .map_err(|e| e.to_string())
                };
                let gaps = offsets
                    .iter()
                    .map(|&o| Ok(flow(&c + &perp * o)?.sup_distance(&flow(&c - &perp * o)?)))
                    .collect::<Result<Vec<f64>, String>>()?;
                let last = *gaps.last().unwrap();
                if !(last < 1e-6 && last <= gaps[0]) {
                    return Err(format!("{name}: gaps {gaps:?}"));
                }
                worst_final = worst_final.max(last);
                sequences += 1;
            }
        }
    }
    Ok(format!("{sequences} two-sided sequences on 6 alcoves; worst sup distance at offset 1e-8: {worst_final:.2e}"))
}

/// Outgoing direction angle, from the outward bisector, after a shot at the
/// 2pi/5 corner of the bundled triangle.
fn two_fifths_exit(offset: f64) -> Result<f64, String> {
    let p = tables::triangle_two_fifths();
    let bis = PI / 5.0;
    let (s, c) = bis.sin_cos();
    let start = [0.5 * c - offset * s, 0.5 * s + offset * c];
    let st = TrajectoryState::from_slices(&start, &[-c, -s]).map_err(|e| e.to_string())?;
    let t = simulate(&p, &st, 0.8, CornerPolicy::Strict).map_err(|e| e.to_string())?;
    let d = &t.end.direction;
    Ok((d[1] * c - d[0] * s).atan2(d[0] * c + d[1] * s))
}

fn c3() -> Result<String, String> {
    let alpha = 2.0 * PI / 5.0;
    let rep = limit_reflection(alpha).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for off in [1e-4, 1e-6, 1e-8] {
        let above = two_fifths_exit(off)?;
        let below = two_fifths_exit(-off)?;
        let err = ((above - below).abs() - rep.gap).abs();
        if err >= 1e-6 || (above - rep.limit_above).abs() >= 1e-6 {
            return Err(format!(
                "offset {off}: limits {above}, {below}; predicted gap {}",
                rep.gap
            ));
        }
        worst = worst.max(err);
    }
    for k in 2..=20 {
        let base = PI / k as f64;
        let at = limit_reflection(base).map_err(|e| e.to_string())?;
        if !(at.continuous && at.gap <= EPS_GAP) {
            return Err(format!("gap {} at pi/{k}", at.gap));
        }
        for h in [1e-3, -1e-3] {
            let near = limit_reflection(base + h).map_err(|e| e.to_string())?;
            // Inside the bin of pi/k the gap is exactly linear: 2 k |h|.
            let expected = 2.0 * k as f64 * h.abs();
            let numeric = Wedge::standard(base + h)
                .gap(1e-9, 3.0)
                .map_err(|e| e.to_string())?;
            if near.continuous
                || (near.gap - expected).abs() > 1e-9
                || (numeric - expected).abs() > 1e-9
            {
                return Err(format!(
                    "pi/{k} {h:+}: gap {} (unfolded {numeric}), expected {expected}",
                    near.gap
                ));
            }
        }
    }
    // No other zeros: a small gap forces alpha close to some pi/k.
    let reports = sweep(0.15, 3.1, 100_000).map_err(|e| e.to_string())?;
    for rep in &reports {
        if rep.gap < 1e-4 {
            let k = (PI / rep.alpha).round();
            if (rep.alpha - PI / k).abs() > 1e-4 {
                return Err(format!(
                    "spurious near-zero gap {} at {}",
                    rep.gap, rep.alpha
                ));
            }
        }
    }
    Ok(format!(
        "2pi/5 gap {:.12} matched within {worst:.1e}; zeros exactly at pi/k for k = 2..20; 1e5-point sweep clean",
        rep.gap
    ))
}

fn regular_tables(r: &mut impl Rng, i: usize) -> Polytope {
    match i % 4 {
        0 => random_polygon(r),
        1 => tables::tetrahedron(&random_tetra_points(r)).unwrap(),
        2 => tables::polytope(tables::POLYTOPES[(i / 4) % tables::POLYTOPES.len()]).unwrap(),
        _ => Polytope::polygon(&triangle_points(
            r.gen_range(0.3..1.4),
            r.gen_range(0.3..1.4),
        ))
        .unwrap(),
    }
}

fn c4() -> Result<String, String> {
    let mut r = rng(104);
    let (mut runs, mut skipped, mut bounces) = (0, 0, 0);
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while runs < 1000 {
        let p = regular_tables(&mut r, i);
        i += 1;
        let st = TrajectoryState::new(random_interior(&p, &mut r), random_unit(&mut r, p.dim()))
            .unwrap();
        let direct = simulate(&p, &st, 100.0, CornerPolicy::Strict);
        let Ok(direct) = direct else {
            skipped += 1;
            continue;
        };
        if !is_regular(&p, &direct, 1e-6) {
            skipped += 1;
            continue;
        }
        let unf = simulate_unfolded(&p, &st, 100.0).map_err(|e| format!("run {runs}: {e}"))?;
        if direct.facet_sequence() != unf.facet_sequence() {
            return Err(format!("run {runs}: bounce sequences differ"));
        }
        let mut err = (&direct.end.point - &unf.end.point).norm();
        for (a, b) in direct.events.iter().zip(&unf.events) {
            err = err.max((&a.point - &b.point).norm());
        }
        if err >= 1e-8 {
            return Err(format!("run {runs}: points differ by {err:.2e}"));
        }
        worst = worst.max(err);
        bounces += direct.bounce_count();
        runs += 1;
    }
    Ok(format!("1000 regular runs ({bounces} bounces, {skipped} irregular draws skipped); worst point error {worst:.2e}"))
}

fn c5() -> Result<String, String> {
    let mut r = rng(105);
    let mut worst: f64 = 0.0;
    let mut max_cone: f64 = 0.0;
    for _ in 0..100 {
        let n = r.gen_range(10..=200);
        let pts: Vec<[f64; 3]> = (0..n)
            .map(|_| {
                let v = random_unit(&mut r, 3);
                let s = r.gen_range(0.8..1.0);
                [s * v[0], s * v[1], s * v[2]]
            })
            .collect();
        let mesh = SurfaceMesh::hull(&pts).map_err(|e| e.to_string())?;
        let err = (gauss_bonnet_total(&mesh) - 4.0 * PI).abs();
        if err >= 1e-8 {
            return Err(format!("total curvature off by {err:.2e}"));
        }
        for v in cone_angles(&mesh) {
            if v.cone_angle >= 2.0 * PI {
                return Err(format!(
                    "cone angle {} at vertex {}",
                    v.cone_angle, v.vertex
                ));
            }
            max_cone = max_cone.max(v.cone_angle);
        }
        worst = worst.max(err);
    }
    Ok(format!(
        "100 hulls; worst |total - 4pi| = {worst:.2e}; smallest 2pi - cone angle {:.2e}",
        2.0 * PI - max_cone
    ))
}

fn moved(r: &mut impl Rng, t: [[f64; 3]; 4]) -> [[f64; 3]; 4] {
    let axis = random_unit(r, 3);
    let rot = Rotation3::from_axis_angle(
        &Unit::new_normalize(Vector3::new(axis[0], axis[1], axis[2])),
        r.gen_range(0.0..6.0),
    );
    let shift = Vector3::new(
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
    );
    t.map(|p| {
        let q = rot * Vector3::from(p) + shift;
        [q.x, q.y, q.z]
    })
}

fn c6() -> Result<String, String> {
    let mut r = rng(106);
    let mut inputs: Vec<([[f64; 3]; 4], bool)> = (0..1000)
        .map(|_| (random_tetra_points(&mut r), false))
        .collect();
    while inputs.len() < 2000 {
        let (a, b, c) = (
            r.gen_range(0.5..3.0),
            r.gen_range(0.5..3.0),
            r.gen_range(0.5..3.0),
        );
        if let Ok(t) = make_disphenoid(a, b, c) {
            let t = moved(&mut r, t);
            if volume(&t) > 1e-2 {
                inputs.push((t, true));
            }
        }
    }
    let mut yes = 0;
    for (i, (t, made)) in inputs.iter().enumerate() {
        let d = is_disphenoid(t, 1e-9)
            .map_err(|e| e.to_string())?
            .is_disphenoid;
        let mesh = SurfaceMesh::tetrahedron(t).map_err(|e| e.to_string())?;
        let orb = is_orbifold_boundary(&mesh, 1e-9).is_yes();
        let tri = triangulate_check(&mesh);
        if d != orb || d != tri.orbifold_equality || (*made && !d) {
            return Err(format!(
                "input {i}: disphenoid {d}, orbifold {orb}, equality flag {}",
                tri.orbifold_equality
            ));
        }
        if tri.f != tri.v || !tri.trivalent {
            return Err(format!(
                "input {i}: F = {}, V = {}, trivalent {}",
                tri.f, tri.v, tri.trivalent
            ));
        }
        yes += d as usize;
    }
    Ok(format!(
        "2000 tetrahedra: {yes} disphenoids (all 1000 constructed ones); orbifold verdict and equality flag agree on every input"
    ))
}

fn c7() -> Result<String, String> {
    let circle = SmoothTable2D::circle(1.0).map_err(|e| e.to_string())?;
    let mut grid = GRID.to_vec();
    grid.push(0.01);
    let cr = boundary_convergence_experiment(&circle, 0.0, PI, &grid).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for row in &cr.rows {
        let err = (row.deviation - (1.0 - row.alpha0.cos())).abs();
        if err >= 1e-10 {
            return Err(format!(
                "circle alpha0 {}: deviation {} vs {}",
                row.alpha0,
                row.deviation,
                1.0 - row.alpha0.cos()
            ));
        }
        worst = worst.max(err);
    }
    let ellipse = SmoothTable2D::ellipse(2.0, 1.0).map_err(|e| e.to_string())?;
    let er = boundary_convergence_experiment(&ellipse, 0.0, ellipse.perimeter(), &GRID)
        .map_err(|e| e.to_string())?;
    let slope = er.slope.ok_or("no slope")?;
    if !(1.8..=2.2).contains(&slope) {
        return Err(format!("ellipse slope {slope}"));
    }
    let mut ratio: f64 = 0.0;
    for &a0 in &GRID {
        let seq = base_angle_run(&ellipse, 0.0, a0, 500).map_err(|e| e.to_string())?;
        let max_a = seq.alphas.iter().copied().fold(0.0, f64::max);
        if seq.alphas.iter().any(|&a| a <= 0.0)
            || max_a >= 3.0 * a0
            || seq.max_depth() >= 5.0 * a0 * a0
        {
            return Err(format!(
                "alpha0 {a0}: escaped (max alpha {max_a}, depth {})",
                seq.max_depth()
            ));
        }
        ratio = ratio.max(max_a / a0);
    }
    Ok(format!(
        "circle deviation = 1 - cos(alpha0) within {worst:.1e}; ellipse slope {slope:.4}; 500-bounce runs keep alpha < {ratio:.3} alpha0"
    ))
}

fn c8() -> Result<String, String> {
    let mut parts = Vec::new();
    for (name, table) in [
        ("circle", SmoothTable2D::circle(1.0)),
        ("ellipse", SmoothTable2D::ellipse(2.0, 1.0)),
        ("perturbed", SmoothTable2D::perturbed(0.05)),
    ] {
        let table = table.map_err(|e| e.to_string())?;
        let rep = verify_base_angle_laws(&table, &GRID, 1.0).map_err(|e| e.to_string())?;
        if !(rep.c_chord > 0.0) || rep.escaped {
            return Err(format!(
                "{name}: c_chord {}, escaped {}",
                rep.c_chord, rep.escaped
            ));
        }
        let inc = match rep.increment_slope {
            Some(s) if (1.8..=2.2).contains(&s) => format!("slope {s:.4}"),
            Some(s) => return Err(format!("{name}: increment slope {s}")),
            // Constant base angle: every increment vanishes.
            None if rep.max_increment <= ZERO_INCREMENT => {
                format!("increments all <= {:.0e}", ZERO_INCREMENT)
            }
            None => return Err(format!("{name}: no slope fitted")),
        };
        parts.push(format!("{name}: {inc}, c_chord {:.3}", rep.c_chord));
    }
    Ok(parts.join("; "))
}

fn runner(seed: u8) -> TestRunner {
    let config = Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(
        config.clone(),
        TestRng::from_seed(config.rng_algorithm, &[seed; 32]),
    )
}

fn c9() -> Result<String, String> {
    // Reflection is an involution.
    runner(1)
        .run(
            &(2usize..=5).prop_flat_map(|d| {
                (
                    prop::collection::vec(-1.0f64..1.0, d),
                    prop::collection::vec(-5.0f64..5.0, d),
                    -3.0f64..3.0,
                )
            }),
            |(n, v, c)| {
                prop_assume!(n.iter().map(|x| x * x).sum::<f64>() > 1e-2);
                let h = HalfSpace::from_slice(&n, c).unwrap();
                let v = DVector::from_vec(v);
                prop_assert!((reflect(&reflect(&v, &h), &h) - &v).norm() < 1e-12);
                let x = h.reflect_point(&h.reflect_point(&v));
                prop_assert!((x - &v).norm() < 1e-12);
                Ok(())
            },
        )
        .map_err(|e| format!("reflect involution: {e}"))?;

    // Polarity is symmetric, and specular pairs are polar.
    let tables: Vec<Polytope> = [
        "square",
        "triangle_generic",
        "triangle_G2",
        "cube",
        "tetra_regular",
        "simplex_A3",
    ]
    .iter()
    .map(|n| tables::polytope(n).unwrap())
    .collect();
    runner(2)
        .run(&(0..tables.len(), any::<u64>()), |(ti, seed)| {
            let p = &tables[ti];
            let mut r = rng(seed);
            let dim = p.dim();
            // A boundary point: a vertex, or a point on a facet.
            let x = if r.gen_bool(0.3) {
                p.vertices()[r.gen_range(0..p.vertices().len())].clone()
            } else {
                let f = &p.facet_vertices()[r.gen_range(0..p.halfspaces().len())];
                let w: Vec<f64> = f.iter().map(|_| r.gen_range(0.1..1.0)).collect();
                let total: f64 = w.iter().sum();
                f.iter().zip(&w).fold(DVector::zeros(dim), |a, (&i, wi)| {
                    a + &p.vertices()[i] * (wi / total)
                })
            };
            let cone = p.tangent_cone(&x).unwrap();
            let mut draw = || loop {
                let u = random_unit(&mut r, dim);
                if cone.contains(&u, 0.0) {
                    return u;
                }
            };
            let (u, v) = (draw(), draw());
            prop_assert_eq!(
                p.is_polar(&x, &u, &v).unwrap(),
                p.is_polar(&x, &v, &u).unwrap()
            );
            let active = p.active_set(&x);
            if active.len() == 1 {
                let h = &p.halfspaces()[active[0]];
                let out = reflect(&(-&u), h);
                prop_assert!(p.is_polar(&x, &u, &out).unwrap());
                prop_assert!(p.is_polar(&x, &out, &u).unwrap());
            }
            Ok(())
        })
        .map_err(|e| format!("polar symmetry: {e}"))?;

    // Folding is idempotent and lands in the alcove.
    let alcoves: Vec<Polytope> = [
        "square",
        "triangle_A2",
        "triangle_C2",
        "triangle_G2",
        "simplex_A3",
    ]
    .iter()
    .map(|n| tables::polytope(n).unwrap())
    .collect();
    runner(3)
        .run(
            &(0..alcoves.len(), prop::collection::vec(-5.0f64..5.0, 3)),
            |(ai, coords)| {
                let p = &alcoves[ai];
                let x = DVector::from_column_slice(&coords[..p.dim()]);
                let (y, _) = fold_point(p, &x, 10_000).unwrap();
                prop_assert!(p.halfspaces().iter().all(|h| h.violation(&y) <= 1e-9));
                let (z, word) = fold_point(p, &y, 10_000).unwrap();
                prop_assert!((z - &y).norm() < 1e-12);
                prop_assert!(word.is_empty());
                Ok(())
            },
        )
        .map_err(|e| format!("fold idempotence: {e}"))?;

    // Geodesics unfold to straight lines.
    let mut r = rng(109);
    let mut traced = 0;
    let mut worst: f64 = 0.0;
    let mut vertex_hits = 0;
    while traced < 1000 {
        let pts = if traced % 2 == 0 {
            random_tetra_points(&mut r)
        } else {
            let Ok(t) = make_disphenoid(
                r.gen_range(1.0..2.0),
                r.gen_range(1.0..2.0),
                r.gen_range(1.0..2.0),
            ) else {
                continue;
            };
            moved(&mut r, t)
        };
        let Ok(mesh) = SurfaceMesh::tetrahedron(&pts) else {
            continue;
        };
        let f = r.gen_range(0..4);
        let ids = mesh.faces()[f].clone();
        let w: Vec<f64> = ids.iter().map(|_| r.gen_range(0.1..1.0)).collect();
        let e = Vector3::from(mesh.vertices()[ids[1]]) - Vector3::from(mesh.vertices()[ids[0]]);
        let n = mesh.face_normal(f);
        let th: f64 = r.gen_range(0.0..2.0 * PI);
        let d = e.normalize() * th.cos() + n.cross(&e).normalize() * th.sin();
        let start = GeodesicStart::from_barycentric(&mesh, f, &w, [d.x, d.y, d.z]).unwrap();
        match trace_surface_geodesic(&mesh, &start, 30.0) {
            Ok(g) => {
                let res = straightness_residual(&mesh, &g);
                let m = res.collinearity.max(res.tangential);
                if m > 1e-10 {
                    return Err(format!("geodesic residual {m:.2e}"));
                }
                worst = worst.max(m);
                traced += 1;
            }
            Err(SurfaceError::VertexHit { .. }) => vertex_hits += 1,
            Err(e) => return Err(e.to_string()),
        }
    }

    // Time reversal of regular trajectories.
    let mut reversed = 0;
    let mut rev_worst: f64 = 0.0;
    let mut i = 0;
    while reversed < 1000 {
        let p = regular_tables(&mut r, i);
        i += 1;
        let st = TrajectoryState::new(random_interior(&p, &mut r), random_unit(&mut r, p.dim()))
            .unwrap();
        let horizon = r.gen_range(1.0..30.0);
        let Ok(fwd) = simulate(&p, &st, horizon, CornerPolicy::Strict) else {
            continue;
        };
        if !is_regular(&p, &fwd, 1e-6) {
            continue;
        }
        let back = simulate(&p, &fwd.end.reversed(), horizon, CornerPolicy::Strict)
            .map_err(|e| e.to_string())?;
        let err = (&back.end.point - &st.point)
            .norm()
            .max((&back.end.direction + &st.direction).norm());
        if err > 1e-8 {
            return Err(format!("time reversal off by {err:.2e}"));
        }
        rev_worst = rev_worst.max(err);
        reversed += 1;
    }
    Ok(format!(
        "1000 cases each: reflect involution, polar symmetry, fold idempotence; geodesic residual <= {worst:.1e} ({vertex_hits} vertex hits redrawn); time reversal within {rev_worst:.1e}"
    ))
}

type Check = fn() -> Result<String, String>;

fn main() {
    std::env::remove_var("BILLIARDS_EPS");
    let criteria: [(u32, &str, f64, Check); 9] = [
        (1, "2D alcove classification", 5.0, c1),
        (2, "corner approaches converge on alcoves", 10.0, c2),
        (3, "2pi/5 corner gap and zeros at pi/k", 5.0, c3),
        (4, "unfolding equivalence", 30.0, c4),
        (5, "Gauss-Bonnet on convex hulls", 10.0, c5),
        (6, "disphenoid equivalences", 10.0, c6),
        (7, "boundary convergence on smooth tables", 60.0, c7),
        (8, "base-angle laws", 60.0, c8),
        (9, "property suites", 30.0, c9),
    ];
    let mut failed = 0;
    for (id, title, budget, f) in criteria {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        let (ok, detail) = match result {
            Ok(d) if secs < budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget} s budget")),
            Err(e) => (false, e),
        };
        failed += !ok as usize;
        println!(
            "{} criterion {id}: {title} [{secs:.2} s / {budget} s] {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
