mod common;

use std::f64::consts::PI;

use billiards_core::corner::{limit_reflection, unfold_wedge, Wedge};
use billiards_core::dynamics::{simulate, CornerPolicy, TrajectoryState};
use billiards_core::Polytope;
use common::rng;
use rand::Rng;

/// Long isosceles triangle standing in for the wedge near its apex.
fn wedge_triangle(alpha: f64) -> Polytope {
    let len = 3.0 / (alpha / 2.0).cos() + 1.0;
    let (s, c) = (alpha / 2.0).sin_cos();
    Polytope::polygon(&[[0.0, 0.0], [len * c, -len * s], [len * c, len * s]]).unwrap()
}

/// Outgoing angle and bounce count of the direct simulation.
fn direct(alpha: f64, offset: f64) -> (f64, usize) {
    let p = wedge_triangle(alpha);
    let s = TrajectoryState::from_slices(&[1.0, offset], &[-1.0, 0.0]).unwrap();
    let t = simulate(&p, &s, 2.0, CornerPolicy::Strict).unwrap();
    let d = &t.end.direction;
    (d[1].atan2(d[0]), t.bounce_count())
}

fn near_bin_boundary(alpha: f64, margin: f64) -> bool {
    let x = PI / alpha - 0.5;
    (x - x.round()).abs() * alpha * alpha / PI < margin
}

#[test]
fn unfolding_agrees_with_direct_bounces() {
    let mut r = rng(21);
    let mut checked = 0;
    while checked < 500 {
        let alpha: f64 = r.gen_range(0.1..PI - 0.1);
        if near_bin_boundary(alpha, 1e-3) {
            continue;
        }
        for off in [1e-4, -1e-4] {
            let (angle, bounces) = direct(alpha, off);
            let run = unfold_wedge(alpha, off, 2.0).unwrap();
            assert_eq!(run.bounces, bounces, "alpha {alpha}");
            assert!(
                (run.angle - angle).abs() < 1e-9,
                "alpha {alpha}: {} vs {angle}",
                run.angle
            );
        }
        checked += 1;
    }
}

#[test]
fn formula_matches_unfolding() {
    let mut r = rng(22);
    let mut checked = 0;
    while checked < 10_000 {
        let alpha: f64 = r.gen_range(0.05..PI - 0.05);
        if near_bin_boundary(alpha, 1e-4) {
            continue;
        }
        let rep = limit_reflection(alpha).unwrap();
        let up = unfold_wedge(alpha, 1e-9, 3.0).unwrap();
        let down = unfold_wedge(alpha, -1e-9, 3.0).unwrap();
        assert!((up.angle - rep.limit_above).abs() < 1e-6, "{alpha}");
        assert!((down.angle - rep.limit_below).abs() < 1e-6, "{alpha}");
        assert_eq!(up.bounces as u32, rep.m);
        checked += 1;
    }
}

#[test]
fn gap_vanishes_exactly_at_pi_over_k() {
    for k in 2..=20 {
        let base = PI / k as f64;
        for (d, zero) in [(0.0, true), (1e-3, false), (-1e-3, false)] {
            let alpha = base + d;
            let rep = limit_reflection(alpha).unwrap();
            assert_eq!(rep.continuous, zero, "k {k} d {d}");
            let g = Wedge::standard(alpha).gap(1e-9, 3.0).unwrap();
            assert!(
                (g - rep.gap).abs() < 1e-9,
                "k {k} d {d}: {g} vs {}",
                rep.gap
            );
            let ceil = (PI / alpha).ceil() as usize;
            let n = unfold_wedge(alpha, 1e-9, 3.0).unwrap().bounces;
            assert!(n + 1 >= ceil && n <= ceil + 1, "k {k} d {d}: {n} bounces");
        }
    }
}

#[test]
fn two_fifths_pi_corner_in_a_triangle() {
    let alpha = 2.0 * PI / 5.0;
    let (above, _) = direct(alpha, 1e-6);
    let (below, _) = direct(alpha, -1e-6);
    let gap = (above - below).abs();
    assert!((gap - limit_reflection(alpha).unwrap().gap).abs() < 1e-6);
}
