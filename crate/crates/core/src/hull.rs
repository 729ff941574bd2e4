//! Incremental convex hull of a point cloud in 3-space.

use std::collections::HashMap;

use nalgebra::Vector3;

/// Outward-oriented triangles of the hull of `points`, indexed into `points`.
///
/// Returns `None` when the points are (nearly) coplanar.
pub fn convex_hull(points: &[[f64; 3]]) -> Option<Vec<[usize; 3]>> {
    let p: Vec<Vector3<f64>> = points.iter().map(|q| Vector3::from(*q)).collect();
    if p.len() < 4 {
        return None;
    }
    let scale = p.iter().map(|q| q.norm()).fold(1.0, f64::max);
    let eps = 1e-12 * scale * scale * scale;

    let [a, b, c, d] = initial_simplex(&p, eps)?;
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let interior = (p[a] + p[b] + p[c] + p[d]) / 4.0;
    for f in [[a, b, c], [a, b, d], [a, c, d], [b, c, d]] {
        faces.push(orient(&p, f, &interior));
    }

    for i in 0..p.len() {
        if [a, b, c, d].contains(&i) {
            continue;
        }
        let visible: Vec<bool> = faces.iter().map(|f| volume(&p, f, &p[i]) > eps).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        // Horizon: directed edges of visible faces whose twin is not visible.
        let mut edge_owner: HashMap<(usize, usize), bool> = HashMap::new();
        for (f, &vis) in faces.iter().zip(&visible) {
            for k in 0..3 {
                edge_owner.insert((f[k], f[(k + 1) % 3]), vis);
            }
        }
        let mut next = Vec::with_capacity(faces.len() + 4);
        for (f, &vis) in faces.iter().zip(&visible) {
            if !vis {
                next.push(*f);
                continue;
            }
            for k in 0..3 {
                let (u, v) = (f[k], f[(k + 1) % 3]);
                if edge_owner.get(&(v, u)) == Some(&false) {
                    next.push([u, v, i]);
                }
            }
        }
        faces = next;
    }
    Some(faces)
}

fn volume(p: &[Vector3<f64>], f: &[usize; 3], q: &Vector3<f64>) -> f64 {
    (p[f[1]] - p[f[0]])
        .cross(&(p[f[2]] - p[f[0]]))
        .dot(&(q - p[f[0]]))
}

fn orient(p: &[Vector3<f64>], f: [usize; 3], interior: &Vector3<f64>) -> [usize; 3] {
    if volume(p, &f, interior) > 0.0 {
        [f[0], f[2], f[1]]
    } else {
        f
    }
}

fn initial_simplex(p: &[Vector3<f64>], eps: f64) -> Option<[usize; 4]> {
    let a = 0;
    let b = (1..p.len()).max_by(|&i, &j| (p[i] - p[a]).norm().total_cmp(&(p[j] - p[a]).norm()))?;
    let ab = p[b] - p[a];
    let c = (0..p.len()).max_by(|&i, &j| {
        ab.cross(&(p[i] - p[a]))
            .norm()
            .total_cmp(&ab.cross(&(p[j] - p[a])).norm())
    })?;
    let n = ab.cross(&(p[c] - p[a]));
    let d = (0..p.len()).max_by(|&i, &j| {
        n.dot(&(p[i] - p[a]))
            .abs()
            .total_cmp(&n.dot(&(p[j] - p[a])).abs())
    })?;
    if n.dot(&(p[d] - p[a])).abs() <= eps {
        return None;
    }
    Some([a, b, c, d])
}
