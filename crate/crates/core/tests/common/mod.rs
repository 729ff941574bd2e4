#![allow(dead_code)]

use billiards_core::dynamics::Trajectory;
use billiards_core::{Point, Polytope};
use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut impl Rng, dim: usize) -> Point {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Convex polygon with vertices on the unit circle at sorted random angles.
pub fn random_polygon(rng: &mut impl Rng) -> Polytope {
    loop {
        let n = rng.gen_range(3..=7);
        let mut a: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        a.sort_by(f64::total_cmp);
        let gaps_ok = (0..n).all(|i| {
            let next = if i + 1 < n {
                a[i + 1]
            } else {
                a[0] + std::f64::consts::TAU
            };
            let gap = next - a[i];
            gap > 0.2 && gap < std::f64::consts::PI - 0.2
        });
        if !gaps_ok {
            continue;
        }
        let pts: Vec<[f64; 2]> = a.iter().map(|t| [t.cos(), t.sin()]).collect();
        if let Ok(p) = Polytope::polygon(&pts) {
            return p;
        }
    }
}

pub fn random_tetra_points(rng: &mut impl Rng) -> [[f64; 3]; 4] {
    loop {
        let mut p = [[0.0f64; 3]; 4];
        for q in &mut p {
            for c in q.iter_mut() {
                *c = rng.gen_range(-1.0..1.0);
            }
        }
        let v = |i: usize| nalgebra::Vector3::from(p[i]);
        let vol = (v(1) - v(0))
            .cross(&(v(2) - v(0)))
            .dot(&(v(3) - v(0)))
            .abs();
        if vol > 0.05 {
            return p;
        }
    }
}

pub fn random_tetra(rng: &mut impl Rng) -> Polytope {
    billiards_core::tables::tetrahedron(&random_tetra_points(rng)).unwrap()
}

/// Strict convex combination of the vertices.
pub fn random_interior(p: &Polytope, rng: &mut impl Rng) -> Point {
    let w: Vec<f64> = p
        .vertices()
        .iter()
        .map(|_| rng.gen_range(0.05..1.0))
        .collect();
    let total: f64 = w.iter().sum();
    p.vertices()
        .iter()
        .zip(&w)
        .map(|(v, wi)| v * (wi / total))
        .fold(DVector::zeros(p.dim()), |a, b| a + b)
}

/// Every bounce hits exactly one facet and stays `margin` away from all others.
pub fn is_regular(p: &Polytope, t: &Trajectory, margin: f64) -> bool {
    t.events.iter().all(|e| {
        e.active.len() == 1
            && p.halfspaces()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != e.active[0])
                .all(|(_, h)| -h.violation(&e.point) > margin)
    })
}
