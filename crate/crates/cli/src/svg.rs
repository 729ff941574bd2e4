//! Minimal SVG figures for planar tables.

use std::f64::consts::PI;
use std::fmt::Write;

const SIZE: f64 = 480.0;

struct Frame {
    min: [f64; 2],
    scale: f64,
}

impl Frame {
    fn fit(points: &[[f64; 2]]) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let pad = 0.05 * span;
        Self {
            min: [lo[0] - pad, lo[1] - pad],
            scale: SIZE / (span + 2.0 * pad),
        }
    }

    /// Screen coordinates with y pointing up.
    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            (p[0] - self.min[0]) * self.scale,
            SIZE - (p[1] - self.min[1]) * self.scale,
        )
    }

    fn points(&self, ps: &[[f64; 2]]) -> String {
        ps.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Vertices of a convex polygon in counterclockwise order.
pub fn order_polygon(vertices: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let n = vertices.len() as f64;
    let c = vertices
        .iter()
        .fold([0.0, 0.0], |a, v| [a[0] + v[0] / n, a[1] + v[1] / n]);
    let mut v = vertices.to_vec();
    v.sort_by(|a, b| {
        let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
        let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
        ta.total_cmp(&tb)
    });
    v
}

/// Polygonal table with a trajectory drawn over it.
pub fn table_with_path(polygon: &[[f64; 2]], path: &[[f64; 2]]) -> String {
    let poly = order_polygon(polygon);
    let frame = Frame::fit(&poly);
    let mut s = header();
    let _ = writeln!(
        s,
        "<polygon points=\"{}\" fill=\"#f4f1e8\" stroke=\"black\" stroke-width=\"2\"/>",
        frame.points(&poly)
    );
    let _ = writeln!(
        s,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#b03030\" stroke-width=\"1\"/>",
        frame.points(path)
    );
    if let Some(&p) = path.first() {
        let (x, y) = frame.map(p);
        let _ = writeln!(
            s,
            "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"#2050b0\"/>"
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Mirror copies of the wedge of opening `alpha` around its apex, with the
/// straight unfolded paths for each `(offset, length)`.
pub fn wedge_fan(alpha: f64, paths: &[(f64, f64)]) -> String {
    let reach = 1.3;
    let mut rays = vec![0.0];
    let mut k = 0.0;
    loop {
        let a = (2.0 * k + 1.0) * alpha / 2.0;
        if a >= PI {
            break;
        }
        rays.push(a);
        rays.push(-a);
        k += 1.0;
    }
    let mut corners = vec![[reach, reach], [-reach, -reach]];
    corners.extend(rays.iter().map(|&a| [reach * a.cos(), reach * a.sin()]));
    let frame = Frame::fit(&corners);
    let mut s = header();
    let o = frame.map([0.0, 0.0]);
    // The table itself, shaded, then the mirror lines of the fan.
    let wedge = [
        [0.0, 0.0],
        [reach * (alpha / 2.0).cos(), reach * (alpha / 2.0).sin()],
        [reach, 0.0],
        [reach * (alpha / 2.0).cos(), -reach * (alpha / 2.0).sin()],
    ];
    let _ = writeln!(
        s,
        "<polygon points=\"{}\" fill=\"#f4f1e8\"/>",
        frame.points(&wedge)
    );
    for &a in &rays[1..] {
        let (x, y) = frame.map([reach * a.cos(), reach * a.sin()]);
        let _ = writeln!(
            s,
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{x:.3}\" y2=\"{y:.3}\" stroke=\"black\" stroke-width=\"1\"/>",
            o.0, o.1
        );
    }
    let colours = ["#b03030", "#2050b0", "#208040", "#806020"];
    for (i, &(offset, length)) in paths.iter().enumerate() {
        let line = [[1.0, offset], [1.0 - length, offset]];
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            frame.points(&line),
            colours[i % colours.len()]
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_is_ordered_counterclockwise() {
        let v = order_polygon(&[[1.0, 1.0], [0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(v, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    }

    #[test]
    fn figures_are_well_formed() {
        let s = table_with_path(
            &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            &[[0.2, 0.2], [0.5, 0.5]],
        );
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        let fan = wedge_fan(2.0 * PI / 5.0, &[(0.01, 2.0), (-0.01, 2.0)]);
        // Rays at +-alpha/2 and +-3 alpha/2, plus two paths.
        assert_eq!(fan.matches("<line").count(), 4);
        assert_eq!(fan.matches("<polyline").count(), 2);
    }
}
