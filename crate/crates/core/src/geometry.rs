//! Low-level convex geometry on raw coordinate slices: the minimum-norm point
//! of a polytope (Wolfe's active-set method), planar convex hulls, vertex
//! pruning and the planar Minkowski sum.

use nalgebra::{DMatrix, DVector};

use crate::vector::Vector;

/// Result of a minimum-norm-point query: the point of the hull closest to
/// the origin and its Euclidean norm.
#[derive(Clone, Debug)]
pub struct MinNorm {
    pub point: Vec<f64>,
    pub norm: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes ||p_0 + sum beta_i (p_i - p_0)|| and returns the affine
/// coefficients alpha (summing to one).
fn affine_minimizer(points: &[&[f64]]) -> Vec<f64> {
    let k = points.len();
    if k == 1 {
        return vec![1.0];
    }
    let d = points[0].len();
    let p0 = points[0];
    let m = DMatrix::from_fn(d, k - 1, |r, c| points[c + 1][r] - p0[r]);
    let rhs = DVector::from_fn(d, |r, _| -p0[r]);
    let svd = m.svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let beta = match svd.solve(&rhs, 1e-12 * smax.max(f64::MIN_POSITIVE)) {
        Ok(b) => b,
        Err(_) => DVector::zeros(k - 1),
    };
    let mut alpha = Vec::with_capacity(k);
    alpha.push(1.0 - beta.iter().sum::<f64>());
    alpha.extend(beta.iter());
    alpha
}

fn combine(points: &[Vector], idx: &[usize], lam: &[f64]) -> Vec<f64> {
    let d = points[idx[0]].dim();
    let mut x = vec![0.0; d];
    for (&i, &l) in idx.iter().zip(lam) {
        for (xr, pr) in x.iter_mut().zip(points[i].iter()) {
            *xr += l * pr;
        }
    }
    x
}

/// Point of `conv(points)` of least Euclidean norm.
///
/// Wolfe's algorithm: maintain a corral of affinely independent vertices
/// whose affine minimizer lies in their relative interior; add the vertex
/// most violating the optimality condition `<x, p> >= ||x||^2`, then shrink
/// the corral by line search until the affine minimizer is a convex
/// combination again. Terminates in finitely many steps.
pub fn min_norm_point(points: &[Vector]) -> MinNorm {
    assert!(!points.is_empty(), "min_norm_point needs at least one point");
    let scale = points
        .iter()
        .map(|p| p.dot(p))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let start = (0..points.len())
        .min_by(|&a, &b| points[a].dot(&points[a]).total_cmp(&points[b].dot(&points[b])))
        .unwrap();
    let mut corral = vec![start];
    let mut lam = vec![1.0];
    let mut x = points[start].as_slice().to_vec();

    let max_major = 50 * points.len() + 100;
    for _ in 0..max_major {
        let xx = dot(&x, &x);
        let (j, xpj) = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, dot(&x, p.as_slice())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xx - xpj <= 1e-13 * scale || corral.contains(&j) {
            break;
        }
        corral.push(j);
        lam.push(0.0);

        loop {
            let refs: Vec<&[f64]> = corral.iter().map(|&i| points[i].as_slice()).collect();
            let alpha = affine_minimizer(&refs);
            if alpha.iter().all(|&a| a > 1e-14) {
                lam = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (&a, &l) in alpha.iter().zip(&lam) {
                if a <= 1e-14 && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lam.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            let mut keep_c = Vec::with_capacity(corral.len());
            let mut keep_l = Vec::with_capacity(corral.len());
            for (&c, &l) in corral.iter().zip(&lam) {
                if l > 1e-14 {
                    keep_c.push(c);
                    keep_l.push(l);
                }
            }
            if keep_c.is_empty() {
                // cannot happen in exact arithmetic; restart from the best vertex
                keep_c.push(j);
                keep_l.push(1.0);
            }
            let total: f64 = keep_l.iter().sum();
            keep_l.iter_mut().for_each(|l| *l /= total);
            corral = keep_c;
            lam = keep_l;
        }
        let nx = combine(points, &corral, &lam);
        if dot(&nx, &nx) > xx * (1.0 + 1e-15) + 1e-300 {
            // no progress: numerical stall
            break;
        }
        x = nx;
    }
    let norm = dot(&x, &x).sqrt();
    MinNorm { point: x, norm }
}

/// Euclidean distance from `x` to `conv(vertices)`.
pub fn distance_to_hull(x: &Vector, vertices: &[Vector]) -> f64 {
    let shifted: Vec<Vector> = vertices.iter().map(|v| v - x).collect();
    min_norm_point(&shifted).norm
}

/// Nearest point of `conv(vertices)` to `x`.
pub fn project_to_hull(x: &Vector, vertices: &[Vector]) -> Vector {
    let shifted: Vec<Vector> = vertices.iter().map(|v| v - x).collect();
    let p = min_norm_point(&shifted).point;
    x + &Vector::new(p)
}

pub(crate) type P2 = [f64; 2];

fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist2(a: P2, b: P2) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Counter-clockwise convex hull (Andrew's monotone chain). Vertices closer
/// than `eps` to the chord of their neighbours are dropped.
pub(crate) fn hull_2d(points: &[P2], eps: f64) -> Vec<P2> {
    let mut pts: Vec<P2> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| dist2(*a, *b) <= eps.max(0.0));
    if pts.len() <= 2 {
        return pts;
    }
    let keep = |h: &Vec<P2>, p: P2| {
        let n = h.len();
        let (o, a) = (h[n - 2], h[n - 1]);
        let base = dist2(o, p);
        cross(o, a, p) > eps * base
    };
    let mut lower: Vec<P2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && !keep(&lower, p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<P2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && !keep(&upper, p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && dist2(lower[0], lower[1]) <= eps {
        lower.pop();
    }
    lower
}

/// Minkowski sum of two convex polygons given in counter-clockwise order.
pub(crate) fn minkowski_2d(p: &[P2], q: &[P2], eps: f64) -> Vec<P2> {
    if p.len() < 3 || q.len() < 3 {
        let sums: Vec<P2> = p
            .iter()
            .flat_map(|a| q.iter().map(move |b| [a[0] + b[0], a[1] + b[1]]))
            .collect();
        return hull_2d(&sums, eps);
    }
    let lowest = |v: &[P2]| {
        (0..v.len())
            .min_by(|&i, &j| v[i][1].total_cmp(&v[j][1]).then(v[i][0].total_cmp(&v[j][0])))
            .unwrap()
    };
    let rot = |v: &[P2]| {
        let s = lowest(v);
        let mut r: Vec<P2> = v[s..].iter().chain(&v[..s]).copied().collect();
        r.push(r[0]);
        r.push(r[1]);
        r
    };
    let (pp, qq) = (rot(p), rot(q));
    let (n, m) = (p.len(), q.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut out = Vec::with_capacity(n + m);
    while i < n || j < m {
        out.push([pp[i][0] + qq[j][0], pp[i][1] + qq[j][1]]);
        let ep = [pp[i + 1][0] - pp[i][0], pp[i + 1][1] - pp[i][1]];
        let eq = [qq[j + 1][0] - qq[j][0], qq[j + 1][1] - qq[j][1]];
        let c = ep[0] * eq[1] - ep[1] * eq[0];
        if c >= 0.0 && i < n {
            i += 1;
        }
        if c <= 0.0 && j < m {
            j += 1;
        }
    }
    hull_2d(&out, eps)
}

pub(crate) fn to_p2(v: &Vector) -> P2 {
    [v[0], v[1]]
}

pub(crate) fn from_p2(p: P2) -> Vector {
    Vector::from(p)
}

/// Removes vertices that lie within `eps` of the convex hull of the others.
/// In the plane the result is in counter-clockwise order.
pub fn prune_vertices(points: &[Vector], eps: f64) -> Vec<Vector> {
    if points.is_empty() {
        return Vec::new();
    }
    let d = points[0].dim();
    match d {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            if hi - lo <= eps {
                vec![Vector::from([lo])]
            } else {
                vec![Vector::from([lo]), Vector::from([hi])]
            }
        }
        2 => {
            let p2: Vec<P2> = points.iter().map(to_p2).collect();
            hull_2d(&p2, eps).into_iter().map(from_p2).collect()
        }
        _ => {
            let mut pts: Vec<Vector> = Vec::with_capacity(points.len());
            for p in points {
                if !pts.iter().any(|q| q.distance(p) <= eps.max(0.0)) {
                    pts.push(p.clone());
                }
            }
            let mut i = 0;
            while i < pts.len() && pts.len() > 1 {
                let others: Vec<Vector> = pts
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, q)| q.clone())
                    .collect();
                if distance_to_hull(&pts[i], &others) <= eps {
                    pts.remove(i);
                } else {
                    i += 1;
                }
            }
            pts
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec())
    }

    #[test]
    fn min_norm_point_of_a_segment() {
        let pts = [v(&[1.0, -1.0]), v(&[1.0, 1.0])];
        let m = min_norm_point(&pts);
        assert!((m.norm - 1.0).abs() < 1e-15);
        assert!(m.point[1].abs() < 1e-15);
    }

    #[test]
    fn min_norm_point_inside_is_origin() {
        let pts = [
            v(&[-1.0, -1.0, -1.0]),
            v(&[3.0, 0.0, 0.0]),
            v(&[0.0, 3.0, 0.0]),
            v(&[0.0, 0.0, 3.0]),
        ];
        assert!(min_norm_point(&pts).norm < 1e-14);
    }

    #[test]
    fn min_norm_point_with_repeated_and_collinear_vertices() {
        let pts = [
            v(&[2.0, 1.0]),
            v(&[2.0, 1.0]),
            v(&[2.0, 2.0]),
            v(&[2.0, 3.0]),
            v(&[4.0, 1.0]),
        ];
        let m = min_norm_point(&pts);
        assert!((m.norm - 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn distance_to_triangle_matches_face_projection() {
        let tri = [v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let d = distance_to_hull(&v(&[2.0, 2.0]), &tri);
        assert!((d - 3.0 / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn hull_drops_interior_and_collinear_points() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0], [1.0, 1.0]];
        let h = hull_2d(&pts, 1e-12);
        assert_eq!(h, vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]);
    }

    #[test]
    fn minkowski_of_squares() {
        let sq = hull_2d(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 0.0);
        let s = minkowski_2d(&sq, &sq, 1e-12);
        assert_eq!(s, vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]);
    }

    #[test]
    fn minkowski_merge_agrees_with_pairwise_hull() {
        let a = hull_2d(&[[0.0, 0.0], [2.0, 0.3], [1.5, 1.7], [-0.4, 1.1], [0.3, 2.2]], 0.0);
        let b = hull_2d(&[[0.1, -0.2], [0.9, 0.4], [0.2, 0.8]], 0.0);
        let merged = minkowski_2d(&a, &b, 1e-12);
        let sums: Vec<P2> = a
            .iter()
            .flat_map(|p| b.iter().map(move |q| [p[0] + q[0], p[1] + q[1]]))
            .collect();
        let direct = hull_2d(&sums, 1e-12);
        assert_eq!(merged.len(), direct.len());
        for (m, d) in merged.iter().zip(&direct) {
            assert!(dist2(*m, *d) < 1e-12);
        }
    }

    #[test]
    fn prune_in_three_dimensions() {
        let mut pts = vec![];
        for &x in &[0.0, 1.0] {
            for &y in &[0.0, 1.0] {
                for &z in &[0.0, 1.0] {
                    pts.push(v(&[x, y, z]));
                }
            }
        }
        pts.push(v(&[0.5, 0.5, 0.5]));
        pts.push(v(&[0.5, 0.0, 0.0]));
        assert_eq!(prune_vertices(&pts, 1e-9).len(), 8);
    }
}
