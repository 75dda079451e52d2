//! Planar geometry by brute force: gift-wrapping hulls, point-to-polygon
//! distances, dense grid samples, and grid searches for directed distances
//! and the kappa-form.

pub type P = [f64; 2];

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: P, b: P) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: P, b: P) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: P) -> f64 {
    dot(a, a).sqrt()
}

/// Gift-wrapping (Jarvis march) hull, counter-clockwise, without collinear
/// points. Degenerate inputs give one or two points.
pub fn hull(points: &[P]) -> Vec<P> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| norm(sub(*a, *b)) < 1e-15);
    if pts.len() < 3 {
        return pts;
    }
    let start = 0;
    let mut out = vec![];
    let mut cur = start;
    loop {
        out.push(pts[cur]);
        let mut cand = if cur == 0 { 1 } else { 0 };
        for i in 0..pts.len() {
            if i == cur {
                continue;
            }
            let c = cross(sub(pts[cand], pts[cur]), sub(pts[i], pts[cur]));
            let farther = norm(sub(pts[i], pts[cur])) > norm(sub(pts[cand], pts[cur]));
            // keep every point on the left of cur -> cand; on ties the farthest
            if c < -1e-14 || (c.abs() <= 1e-14 && farther) {
                cand = i;
            }
        }
        cur = cand;
        if cur == start || out.len() > pts.len() {
            break;
        }
    }
    if out.len() == 2 || (out.len() > 2 && polygon_area(&out).abs() < 1e-15) {
        let a = out[0];
        let b = *out
            .iter()
            .max_by(|p, q| norm(sub(**p, a)).total_cmp(&norm(sub(**q, a))))
            .unwrap();
        return vec![a, b];
    }
    out
}

pub fn polygon_area(h: &[P]) -> f64 {
    let n = h.len();
    (0..n).map(|i| cross(h[i], h[(i + 1) % n])).sum::<f64>() / 2.0
}

pub fn segment_distance(p: P, a: P, b: P) -> f64 {
    let ab = sub(b, a);
    let l2 = dot(ab, ab);
    if l2 == 0.0 {
        return norm(sub(p, a));
    }
    let t = (dot(sub(p, a), ab) / l2).clamp(0.0, 1.0);
    norm(sub(p, [a[0] + t * ab[0], a[1] + t * ab[1]]))
}

/// Inside test for a counter-clockwise hull (with `tol` slack).
pub fn inside(h: &[P], p: P, tol: f64) -> bool {
    match h.len() {
        1 => norm(sub(p, h[0])) <= tol,
        2 => segment_distance(p, h[0], h[1]) <= tol,
        n => (0..n).all(|i| {
            let a = h[i];
            let b = h[(i + 1) % n];
            cross(sub(b, a), sub(p, a)) / norm(sub(b, a)) >= -tol
        }),
    }
}

/// Euclidean distance from `p` to the hull `h`.
pub fn distance(h: &[P], p: P) -> f64 {
    if h.len() >= 3 && inside(h, p, 0.0) {
        return 0.0;
    }
    if h.len() == 1 {
        return norm(sub(p, h[0]));
    }
    (0..h.len())
        .map(|i| segment_distance(p, h[i], h[(i + 1) % h.len()]))
        .fold(f64::INFINITY, f64::min)
}

/// Points along the boundary of a hull at spacing at most `step`,
/// including every vertex.
pub fn boundary_samples(h: &[P], step: f64) -> Vec<P> {
    if h.len() == 1 {
        return h.to_vec();
    }
    let edges = if h.len() == 2 { 1 } else { h.len() };
    let mut out = vec![];
    for i in 0..edges {
        let a = h[i];
        let b = h[(i + 1) % h.len()];
        let n = (norm(sub(b, a)) / step).ceil().max(1.0) as usize;
        for k in 0..n {
            let t = k as f64 / n as f64;
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    if h.len() == 2 {
        out.push(h[1]);
    }
    out
}

/// Grid points of spacing `step` inside the hull, plus its boundary samples.
pub fn dense_samples(h: &[P], step: f64) -> Vec<P> {
    let mut out = boundary_samples(h, step);
    if h.len() < 3 {
        return out;
    }
    let lo = [
        h.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        h.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min),
    ];
    let hi = [
        h.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max),
        h.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max),
    ];
    let nx = ((hi[0] - lo[0]) / step).ceil() as usize;
    let ny = ((hi[1] - lo[1]) / step).ceil() as usize;
    for i in 0..=nx {
        for j in 0..=ny {
            let p = [lo[0] + i as f64 * step, lo[1] + j as f64 * step];
            if inside(h, p, 0.0) {
                out.push(p);
            }
        }
    }
    out
}

/// Directed distance `sup_{a in A} dist(a, B)` over a dense grid of `A`.
pub fn directed_grid(a: &[P], b: &[P], step: f64) -> f64 {
    let ha = hull(a);
    let hb = hull(b);
    dense_samples(&ha, step)
        .into_iter()
        .map(|p| distance(&hb, p))
        .fold(0.0, f64::max)
}

/// Hausdorff-sum distance `sup_A dist(., B) + sup_B dist(., A)` by grid.
pub fn hausdorff_sum_grid(a: &[P], b: &[P], step: f64) -> f64 {
    directed_grid(a, b, step) + directed_grid(b, a, step)
}

/// `min_{p in grid(h)} |x - p|` over a dense grid of the hull of `poly`.
pub fn grid_distance(poly: &[P], x: P, step: f64) -> f64 {
    dense_samples(&hull(poly), step)
        .into_iter()
        .map(|p| norm(sub(x, p)))
        .fold(f64::INFINITY, f64::min)
}

/// Grid search for `inf_{a in A, b in B} |<b - y, a - x>|`.
///
/// The map is continuous on the connected set `A x B`, so its image is an
/// interval; the interval is already swept out by boundary pairs (for fixed
/// `a` the map is linear in `b` and vice versa). The search samples both
/// boundaries at `step`, returns 0 when the sampled values change sign and
/// the smallest sampled magnitude otherwise.
pub fn kappa_form_grid(x: P, a: &[P], y: P, b: &[P], step: f64) -> f64 {
    let sa = boundary_samples(&hull(a), step);
    let sb = boundary_samples(&hull(b), step);
    let (mut lo, mut hi, mut best) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
    for pa in &sa {
        let u = sub(*pa, x);
        for pb in &sb {
            let v = dot(u, sub(*pb, y));
            lo = lo.min(v);
            hi = hi.max(v);
            best = best.min(v.abs());
        }
    }
    if lo <= 0.0 && hi >= 0.0 {
        0.0
    } else {
        best
    }
}

/// Absolute polar `{z : |<v, z>| <= 1 for all v}` of a planar polygon with
/// the origin in its interior, by enumerating intersections of pairs of
/// bounding lines and keeping the feasible ones.
pub fn polar_by_halfspaces(vertices: &[P]) -> Vec<P> {
    let mut rows: Vec<P> = vec![];
    for v in vertices {
        rows.push(*v);
        rows.push([-v[0], -v[1]]);
    }
    let mut feasible = vec![];
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let det = cross(rows[i], rows[j]);
            if det.abs() < 1e-12 {
                continue;
            }
            // solve rows[i].z = 1, rows[j].z = 1
            let z = [(rows[j][1] - rows[i][1]) / det, (rows[i][0] - rows[j][0]) / det];
            if rows.iter().all(|r| dot(*r, z) <= 1.0 + 1e-9) {
                feasible.push(z);
            }
        }
    }
    hull(&feasible)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square_with_noise_points() {
        let h = hull(&[[0.0, 0.0], [1.0, 1.0], [0.5, 0.5], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0]]);
        assert_eq!(h.len(), 4);
        assert!(polygon_area(&h) > 0.0);
        assert!((polygon_area(&h) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_hulls() {
        assert_eq!(hull(&[[1.0, 1.0], [1.0, 1.0]]), vec![[1.0, 1.0]]);
        let h = hull(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.0]]);
        assert_eq!(h.len(), 2);
    }

    #[test]
    fn distance_to_triangle() {
        let h = hull(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!((distance(&h, [2.0, 2.0]) - 1.5 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(distance(&h, [0.1, 0.1]), 0.0);
    }

    #[test]
    fn polar_of_square_is_diamond() {
        let p = polar_by_halfspaces(&[[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]);
        assert_eq!(p.len(), 4);
        assert!((polygon_area(&p) - 2.0).abs() < 1e-12);
    }
}
