//! The Euclidean point-to-set kappa-norm and the set operations built on it.

use serde::{Deserialize, Serialize};

use crate::error::{KappaError, Result};
use crate::geometry::{self, hull_2d, minkowski_2d, prune_vertices, to_p2};
use crate::sets::{sphere_points, ClosedSet};
use crate::value::KappaValue;
use crate::vector::{orthonormalize, reject, NormKind, Vector};

/// Boundary points used to dilate a polytope by a Euclidean ball.
pub const BALL_DILATION_POINTS: usize = 64;

/// `rho(x, C) = inf_{y in C} ||x - y||`, measured in the ball's own norm for
/// `Ball` and in the Euclidean norm otherwise. `+inf` for the empty set.
pub fn rho(x: &Vector, c: &ClosedSet) -> Result<KappaValue> {
    c.validate_dim(x.dim())?;
    Ok(KappaValue::new(rho_unchecked(x, c)))
}

pub(crate) fn rho_unchecked(x: &Vector, c: &ClosedSet) -> f64 {
    match c {
        ClosedSet::Ball { center, radius, norm } => ((x - center).norm_with(*norm) - radius).max(0.0),
        ClosedSet::Polytope { vertices } => polytope_distance(x, vertices),
        ClosedSet::Subspace { basis, offset } => reject(&(x - offset), basis).norm(),
        ClosedSet::Cylinder { base, directions } => {
            let xp = reject(x, directions);
            match base.as_ref() {
                ClosedSet::Ball { center, radius, .. } => {
                    ((&xp - &reject(center, directions)).norm() - radius).max(0.0)
                }
                ClosedSet::Polytope { vertices } => {
                    let vp: Vec<Vector> = vertices.iter().map(|v| reject(v, directions)).collect();
                    polytope_distance(&xp, &vp)
                }
                _ => unreachable!("validated cylinder base"),
            }
        }
        ClosedSet::Union { parts } => parts.iter().map(|p| rho_unchecked(x, p)).fold(f64::INFINITY, f64::min),
        ClosedSet::Empty => f64::INFINITY,
    }
}

fn polytope_distance(x: &Vector, vertices: &[Vector]) -> f64 {
    if x.dim() == 1 {
        let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let hi = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
        return (lo - x[0]).max(x[0] - hi).max(0.0);
    }
    if vertices.len() == 1 {
        return x.distance(&vertices[0]);
    }
    geometry::distance_to_hull(x, vertices)
}

/// How a supremum was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SupMethod {
    Exact,
    /// Maximum over a finite sample of the source set. Every point of the
    /// source lies within `resolution` of a sample, so for a 1-Lipschitz
    /// `rho` the true supremum exceeds the value by at most `resolution`.
    Sampled {
        resolution: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub value: KappaValue,
    pub method: SupMethod,
}

impl SupEstimate {
    fn exact(v: f64) -> Self {
        SupEstimate {
            value: KappaValue::new(v),
            method: SupMethod::Exact,
        }
    }
}

/// Directed distance `sup_{x in A} rho(x, B)`.
pub fn rho_bar(a: &ClosedSet, b: &ClosedSet) -> Result<KappaValue> {
    rho_bar_estimate(a, b).map(|e| e.value)
}

/// [`rho_bar`] together with the method used.
///
/// Exact when the source has a finite vertex description and the target is
/// convex (the maximum of a convex function over a polytope sits at a
/// vertex), for Euclidean balls against norm balls, flats and cylinders with
/// a Euclidean ball base, for unions as sources, and for unbounded sources.
/// Otherwise the source is sampled and the resolution reported.
pub fn rho_bar_estimate(a: &ClosedSet, b: &ClosedSet) -> Result<SupEstimate> {
    let da = a.validate()?;
    let db = b.validate()?;
    if let (Some(p), Some(q)) = (da, db) {
        if p != q {
            return Err(KappaError::DimensionMismatch { expected: p, found: q });
        }
    }
    if a.is_empty() {
        return Err(KappaError::EmptySet("the supremum over an empty source is undefined"));
    }
    sup_rho(a, b)
}

fn sup_rho(a: &ClosedSet, b: &ClosedSet) -> Result<SupEstimate> {
    if b.is_empty() {
        return Ok(SupEstimate::exact(f64::INFINITY));
    }
    if let ClosedSet::Union { parts } = a {
        let mut best = SupEstimate::exact(0.0);
        for p in parts.iter().filter(|p| !p.is_empty()) {
            let e = sup_rho(p, b)?;
            best.value = best.value.max(e.value);
            best.method = merge_methods(best.method, e.method);
        }
        return Ok(best);
    }
    if !a.is_bounded() {
        return sup_unbounded(a, b);
    }
    if let ClosedSet::Cylinder { base, .. } = a {
        return sup_rho(base, b);
    }
    if b.is_convex() {
        if let Some(vs) = a.as_polytope_exact() {
            let v = vs.iter().map(|v| rho_unchecked(v, b)).fold(0.0, f64::max);
            return Ok(SupEstimate::exact(v));
        }
        if let ClosedSet::Ball {
            center: ca,
            radius: ra,
            norm: NormKind::L2,
        } = a
        {
            if let Some(v) = sup_ball(ca, *ra, b) {
                return Ok(SupEstimate::exact(v));
            }
        }
    }
    Ok(sup_sampled(a, b))
}

fn merge_methods(x: SupMethod, y: SupMethod) -> SupMethod {
    match (x, y) {
        (SupMethod::Exact, SupMethod::Exact) => SupMethod::Exact,
        (SupMethod::Sampled { resolution: r }, SupMethod::Exact)
        | (SupMethod::Exact, SupMethod::Sampled { resolution: r }) => SupMethod::Sampled { resolution: r },
        (SupMethod::Sampled { resolution: r }, SupMethod::Sampled { resolution: s }) => {
            SupMethod::Sampled { resolution: r.max(s) }
        }
    }
}

/// An unbounded source is a flat or a cylinder; rho(., B) is constant along
/// its directions exactly when they lie in the lineality space of B, and
/// unbounded otherwise.
fn sup_unbounded(a: &ClosedSet, b: &ClosedSet) -> Result<SupEstimate> {
    if matches!(b, ClosedSet::Union { .. }) {
        return Err(KappaError::Unsupported(
            "directed distance from an unbounded set to a union".into(),
        ));
    }
    let lin_b = b.lineality();
    let inside = a.lineality().iter().all(|d| reject(d, &lin_b).norm() <= 1e-9);
    if !inside {
        return Ok(SupEstimate::exact(f64::INFINITY));
    }
    match a {
        ClosedSet::Subspace { offset, .. } => Ok(SupEstimate::exact(rho_unchecked(offset, b))),
        ClosedSet::Cylinder { base, .. } => sup_rho(base, b),
        _ => unreachable!("only flats and cylinders are unbounded"),
    }
}

/// Closed forms for a Euclidean ball source against convex targets whose
/// distance function is a norm of an affine image.
fn sup_ball(ca: &Vector, ra: f64, b: &ClosedSet) -> Option<f64> {
    let d = ca.dim();
    match b {
        ClosedSet::Ball { center, radius, norm } => {
            let delta = ca - center;
            let far = match norm {
                NormKind::L2 => delta.norm() + ra,
                NormKind::LInf => delta.iter().map(|c| c.abs() + ra).fold(0.0, f64::max),
                NormKind::L1 => delta.norm_with(NormKind::L1) + ra * (d as f64).sqrt(),
            };
            Some((far - radius).max(0.0))
        }
        ClosedSet::Subspace { basis, offset } => {
            if basis.len() == d {
                return Some(0.0);
            }
            Some(reject(&(ca - offset), basis).norm() + ra)
        }
        ClosedSet::Cylinder { base, directions } => match base.as_ref() {
            ClosedSet::Ball { center, radius, .. } => {
                if directions.len() == d {
                    return Some(0.0);
                }
                Some((reject(&(ca - center), directions).norm() + ra - radius).max(0.0))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Sampled supremum. For a convex target only the boundary of a Euclidean
/// ball needs sampling (the maximum of a convex function sits on extreme
/// points); in the plane the best sample is refined by golden-section
/// search over the angle. Nonconvex targets also get an interior grid.
fn sup_sampled(a: &ClosedSet, b: &ClosedSet) -> SupEstimate {
    let d = a.dim().expect("nonempty source");
    let f = |x: &Vector| rho_unchecked(x, b);
    let mut best = 0.0f64;
    let mut resolution = 0.0f64;

    if let ClosedSet::Ball { center, radius, .. } = a {
        let m = if d == 2 { 4096 } else { 20_000 };
        let pts = sphere_points(d, m);
        let mut arg = 0;
        for (k, u) in pts.iter().enumerate() {
            let v = f(&center.axpy(*radius, u));
            if v > best {
                best = v;
                arg = k;
            }
        }
        if d == 2 {
            let step = std::f64::consts::TAU / m as f64;
            let theta0 = step * arg as f64;
            let g = |t: f64| f(&center.axpy(*radius, &Vector::from([t.cos(), t.sin()])));
            let (t, v) = golden_max(g, theta0 - step, theta0 + step, 1e-12);
            let _ = t;
            best = best.max(v);
            // any remaining error comes from a second local maximum missed
            // between samples
            resolution = radius * step;
        } else {
            resolution = radius * (4.0 * std::f64::consts::PI / m as f64).sqrt() * 2.0;
        }
        if b.is_convex() {
            return SupEstimate {
                value: KappaValue::new(best),
                method: SupMethod::Sampled { resolution },
            };
        }
    }

    let (lo, hi) = bounding_box(a);
    let per_axis = match d {
        1 => 100_000,
        2 => 400,
        3 => 50,
        _ => (100_000f64.powf(1.0 / d as f64)).floor().max(2.0) as usize,
    };
    let steps: Vec<f64> = (0..d).map(|i| (hi[i] - lo[i]) / per_axis as f64).collect();
    let mut idx = vec![0usize; d];
    loop {
        let x = Vector::new((0..d).map(|i| lo[i] + steps[i] * idx[i] as f64).collect());
        if a.contains(&x, 1e-12) {
            best = best.max(f(&x));
        }
        let mut k = 0;
        while k < d {
            idx[k] += 1;
            if idx[k] <= per_axis {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    if let Some(vs) = a.as_polytope_exact() {
        for v in &vs {
            best = best.max(f(v));
        }
        // edges between every vertex pair cover the boundary of a planar
        // polygon and of a segment
        let h = steps.iter().cloned().fold(0.0, f64::max).max(1e-300);
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let n = ((vs[i].distance(&vs[j]) / h).ceil() as usize).min(10_000);
                for k in 1..n {
                    let t = k as f64 / n as f64;
                    best = best.max(f(&vs[i].scale(1.0 - t).axpy(t, &vs[j])));
                }
            }
        }
    }
    let diag = steps.iter().map(|s| s * s).sum::<f64>().sqrt();
    resolution = resolution.max(diag);
    SupEstimate {
        value: KappaValue::new(best),
        method: SupMethod::Sampled { resolution },
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t).max(fc).max(fd))
}

fn bounding_box(a: &ClosedSet) -> (Vec<f64>, Vec<f64>) {
    match a {
        ClosedSet::Ball { center, radius, .. } => (
            center.iter().map(|c| c - radius).collect(),
            center.iter().map(|c| c + radius).collect(),
        ),
        _ => {
            let vs = a.as_polytope_exact().expect("bounded convex source");
            let d = vs[0].dim();
            let lo = (0..d)
                .map(|i| vs.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min))
                .collect();
            let hi = (0..d)
                .map(|i| vs.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            (lo, hi)
        }
    }
}

/// `D(A, B) = rho_bar(A, B) + rho_bar(B, A)`.
pub fn metric_d(a: &ClosedSet, b: &ClosedSet) -> Result<KappaValue> {
    metric_d_estimate(a, b).map(|e| e.value)
}

pub fn metric_d_estimate(a: &ClosedSet, b: &ClosedSet) -> Result<SupEstimate> {
    if b.is_empty() {
        return Err(KappaError::EmptySet("the metric D is defined on nonempty sets"));
    }
    let ab = rho_bar_estimate(a, b)?;
    let ba = rho_bar_estimate(b, a)?;
    let method = match (ab.method, ba.method) {
        (SupMethod::Sampled { resolution: r }, SupMethod::Sampled { resolution: s }) => {
            SupMethod::Sampled { resolution: r + s }
        }
        (x, y) => merge_methods(x, y),
    };
    Ok(SupEstimate {
        value: ab.value + ba.value,
        method,
    })
}

/// `lambda * A + shift`, for `lambda != 0`.
pub fn affine_transform(lambda: f64, shift: &Vector, a: &ClosedSet) -> Result<ClosedSet> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(KappaError::InvalidArgument(format!(
            "scaling factor must be finite and nonzero, got {lambda}"
        )));
    }
    if !shift.is_finite() {
        return Err(KappaError::InvalidArgument("shift must be finite".into()));
    }
    a.validate_dim(shift.dim())?;
    Ok(a.map_affine(lambda, shift))
}

fn prune_eps(points: &[Vector]) -> f64 {
    let scale = points.iter().flat_map(|p| p.iter()).fold(1.0f64, |m, c| m.max(c.abs()));
    1e-12 * scale
}

/// Convex hull of a vertex cloud, pruned of redundant vertices.
pub(crate) fn hull_polytope(points: Vec<Vector>) -> ClosedSet {
    let eps = prune_eps(&points);
    ClosedSet::Polytope {
        vertices: prune_vertices(&points, eps),
    }
}

fn sum_vertex_sets(p: &[Vector], q: &[Vector]) -> ClosedSet {
    let d = p[0].dim();
    if d == 2 && p.len() * q.len() > 4 {
        let eps = prune_eps(p).max(prune_eps(q));
        let hp = hull_2d(&p.iter().map(to_p2).collect::<Vec<_>>(), eps);
        let hq = hull_2d(&q.iter().map(to_p2).collect::<Vec<_>>(), eps);
        return ClosedSet::Polytope {
            vertices: minkowski_2d(&hp, &hq, 2.0 * eps)
                .into_iter()
                .map(geometry::from_p2)
                .collect(),
        };
    }
    let sums: Vec<Vector> = p.iter().flat_map(|a| q.iter().map(move |b| a + b)).collect();
    hull_polytope(sums)
}

/// Inner and outer polytopes bracketing `P + Ball(c, r)` for a Euclidean
/// ball in dimension at most two.
#[derive(Clone, Debug, PartialEq)]
pub struct DilationBracket {
    pub inner: ClosedSet,
    pub outer: ClosedSet,
}

/// Brackets `conv(vertices) + Ball(center, radius)` between the sums with
/// the `m`-gon inscribed in and circumscribed about the ball.
pub fn dilation_bracket(vertices: &[Vector], center: &Vector, radius: f64, m: usize) -> Result<DilationBracket> {
    let d = center.dim();
    if d > 2 {
        return Err(KappaError::Unsupported(
            "dilation brackets are available in dimension 1 and 2".into(),
        ));
    }
    if m < 3 {
        return Err(KappaError::InvalidArgument("dilation needs m >= 3".into()));
    }
    let ring = |scale: f64| -> Vec<Vector> {
        sphere_points(d, m)
            .into_iter()
            .map(|u| center.axpy(radius * scale, &u))
            .collect()
    };
    let outer_scale = if d == 2 {
        1.0 / (std::f64::consts::PI / m as f64).cos()
    } else {
        1.0
    };
    Ok(DilationBracket {
        inner: sum_vertex_sets(vertices, &ring(1.0)),
        outer: sum_vertex_sets(vertices, &ring(outer_scale)),
    })
}

/// Closure of the Minkowski sum of two convex sets.
///
/// Exact for sums of polytopes (and of L1/LInf balls, which are
/// polytopes), for balls of the same norm and for sums involving flats or
/// cylinders. A polytope plus a Euclidean ball is approximated from inside
/// by dilating with [`BALL_DILATION_POINTS`] boundary points of the ball;
/// see [`dilation_bracket`] for the matching outer polytope.
pub fn minkowski_sum_cl(a: &ClosedSet, b: &ClosedSet) -> Result<ClosedSet> {
    let da = a.validate()?;
    let db = b.validate()?;
    for s in [a, b] {
        match s {
            ClosedSet::Empty => return Err(KappaError::EmptySet("Minkowski sum operand")),
            ClosedSet::Union { .. } => return Err(KappaError::Unsupported("Minkowski sum of a union".into())),
            _ => {}
        }
    }
    let (da, db) = (da.unwrap(), db.unwrap());
    if da != db {
        return Err(KappaError::DimensionMismatch {
            expected: da,
            found: db,
        });
    }
    Ok(sum_convex(a, b))
}

fn single_point(s: &ClosedSet) -> Option<Vector> {
    match s.as_polytope_exact() {
        Some(v) if v.iter().all(|p| p == &v[0]) => Some(v[0].clone()),
        _ => None,
    }
}

/// Bounded convex set re-expressed as a polytope or Euclidean ball.
fn as_cylinder_base(s: &ClosedSet) -> ClosedSet {
    match s {
        ClosedSet::Ball { norm: NormKind::L2, .. } => s.clone(),
        _ => ClosedSet::Polytope {
            vertices: s.as_polytope_exact().expect("bounded convex"),
        },
    }
}

fn sum_convex(a: &ClosedSet, b: &ClosedSet) -> ClosedSet {
    if let Some(p) = single_point(b) {
        return a.map_affine(1.0, &p);
    }
    if let Some(p) = single_point(a) {
        return b.map_affine(1.0, &p);
    }
    match (a, b) {
        (ClosedSet::Subspace { basis: b1, offset: o1 }, ClosedSet::Subspace { basis: b2, offset: o2 }) => {
            let basis = join_directions(b1, b2);
            let offset = reject(&(o1 + o2), &basis);
            ClosedSet::Subspace { basis, offset }
        }
        (ClosedSet::Subspace { basis, offset }, other) | (other, ClosedSet::Subspace { basis, offset }) => {
            match other {
                ClosedSet::Cylinder { base, directions } => ClosedSet::Cylinder {
                    base: Box::new(base.map_affine(1.0, offset)),
                    directions: join_directions(directions, basis),
                },
                _ => ClosedSet::Cylinder {
                    base: Box::new(as_cylinder_base(other).map_affine(1.0, offset)),
                    directions: basis.clone(),
                },
            }
        }
        (
            ClosedSet::Cylinder {
                base: b1,
                directions: d1,
            },
            ClosedSet::Cylinder {
                base: b2,
                directions: d2,
            },
        ) => ClosedSet::Cylinder {
            base: Box::new(as_cylinder_base(&sum_convex(b1, b2))),
            directions: join_directions(d1, d2),
        },
        (ClosedSet::Cylinder { base, directions }, other) | (other, ClosedSet::Cylinder { base, directions }) => {
            ClosedSet::Cylinder {
                base: Box::new(as_cylinder_base(&sum_convex(base, other))),
                directions: directions.clone(),
            }
        }
        (
            ClosedSet::Ball {
                center: c1,
                radius: r1,
                norm: n1,
            },
            ClosedSet::Ball {
                center: c2,
                radius: r2,
                norm: n2,
            },
        ) if n1 == n2 => ClosedSet::Ball {
            center: c1 + c2,
            radius: r1 + r2,
            norm: *n1,
        },
        _ => match (a.as_polytope_exact(), b.as_polytope_exact()) {
            (Some(p), Some(q)) => sum_vertex_sets(&p, &q),
            (Some(p), None) | (None, Some(p)) => {
                let ball = if a.as_polytope_exact().is_none() { a } else { b };
                let ring = ball.to_polytope(BALL_DILATION_POINTS).expect("Euclidean ball");
                sum_vertex_sets(&p, &ring)
            }
            (None, None) => unreachable!("two Euclidean balls share a norm"),
        },
    }
}

fn join_directions(a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    let all: Vec<Vector> = a.iter().chain(b).cloned().collect();
    orthonormalize(&all, 1e-10)
}

/// Orthogonal-complement representative of `x + M` and its quotient norm
/// `rho(x, M)`, for a subspace `M` through the origin.
pub fn quotient_project(x: &Vector, m: &ClosedSet) -> Result<(Vector, KappaValue)> {
    let basis = origin_subspace(m)?;
    m.validate_dim(x.dim())?;
    let r = reject(x, basis);
    let n = r.norm();
    Ok((r, KappaValue::new(n)))
}

pub(crate) fn origin_subspace(m: &ClosedSet) -> Result<&[Vector]> {
    match m {
        ClosedSet::Subspace { basis, offset } => {
            if offset.norm() > 1e-12 {
                return Err(KappaError::InvalidArgument(
                    "subspace must pass through the origin".into(),
                ));
            }
            Ok(basis)
        }
        _ => Err(KappaError::InvalidArgument("expected a subspace".into())),
    }
}

/// `max_{1 <= n <= N} rho(x, Ball(0, 1/n))`, which approaches `||x||` from
/// below and is within `1/N` of it.
pub fn extend_to_singleton(x: &Vector, n: u64) -> Result<KappaValue> {
    if n == 0 {
        return Err(KappaError::InvalidArgument("N must be at least 1".into()));
    }
    if x.dim() == 0 || !x.is_finite() {
        return Err(KappaError::InvalidArgument("x must be a finite nonempty vector".into()));
    }
    let origin = Vector::zeros(x.dim());
    let mut best = 0.0f64;
    for k in 1..=n {
        let ball = ClosedSet::ball(origin.clone(), 1.0 / k as f64);
        best = best.max(rho_unchecked(x, &ball));
    }
    Ok(KappaValue::new(best))
}

/// Finite family of seminorms `p_i(x) = rho(x, M_i)` for subspaces `M_i`
/// through the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormFamily {
    subspaces: Vec<ClosedSet>,
}

impl SeminormFamily {
    pub fn new(subspaces: Vec<ClosedSet>) -> Result<Self> {
        let mut dim = None;
        for m in &subspaces {
            origin_subspace(m)?;
            let d = m.validate()?.expect("subspaces are nonempty");
            if *dim.get_or_insert(d) != d {
                return Err(KappaError::DimensionMismatch {
                    expected: dim.unwrap(),
                    found: d,
                });
            }
        }
        Ok(SeminormFamily { subspaces })
    }

    pub fn subspaces(&self) -> &[ClosedSet] {
        &self.subspaces
    }
}

/// `q(x) = max_i p_i(x)`; zero for the empty family.
pub fn seminorm_sup(family: &SeminormFamily, x: &Vector) -> Result<KappaValue> {
    let mut best = KappaValue::ZERO;
    for m in &family.subspaces {
        best = best.max(rho(x, m)?);
    }
    Ok(best)
}

/// Returns `C_sigma = Ball(0, eps/2)` and `D(cl(C_v + C_sigma), C_v)`, which
/// is below `eps`.
pub fn perturb_bound(cv: &ClosedSet, eps: f64) -> Result<(ClosedSet, KappaValue)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(KappaError::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let Some(d) = cv.validate()? else {
        return Err(KappaError::EmptySet("perturbation of an empty set"));
    };
    if !cv.is_convex() || cv.is_empty() {
        return Err(KappaError::InvalidArgument("C_v must be nonempty and convex".into()));
    }
    let sigma = ClosedSet::ball(Vector::zeros(d), eps / 2.0);
    let sum = minkowski_sum_cl(cv, &sigma)?;
    let dist = metric_d(&sum, cv)?;
    if dist.value() >= eps {
        return Err(KappaError::Internal(format!(
            "perturbation distance {} is not below eps = {eps}",
            dist.value()
        )));
    }
    Ok((sigma, dist))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v<const N: usize>(c: [f64; N]) -> Vector {
        Vector::from(c)
    }

    fn unit_square() -> ClosedSet {
        ClosedSet::boxed(&[0.0, 0.0], &[1.0, 1.0])
    }

    #[test]
    fn rho_spec_examples() {
        let ball = ClosedSet::ball([0.0, 0.0], 1.0);
        assert_eq!(rho(&v([2.0, 0.0]), &ball).unwrap().value(), 1.0);
        assert_eq!(rho(&v([0.5, 0.0]), &ball).unwrap().value(), 0.0);
        let line = ClosedSet::span(&[v([1.0, 0.0])], 2);
        assert_eq!(rho(&v([3.0, 4.0]), &line).unwrap().value(), 4.0);
        let tri = ClosedSet::polytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let r = rho(&v([2.0, 2.0]), &tri).unwrap().value();
        assert!((r - 3.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rho_errors_and_empty() {
        let ball = ClosedSet::ball([0.0, 0.0], 1.0);
        assert!(matches!(
            rho(&v([1.0, 2.0, 3.0]), &ball),
            Err(KappaError::DimensionMismatch { .. })
        ));
        assert!(rho(&v([1.0]), &ClosedSet::Empty).unwrap().is_infinite());
        let skew = ClosedSet::Subspace {
            basis: vec![v([2.0, 0.0])],
            offset: v([0.0, 0.0]),
        };
        assert!(rho(&v([1.0, 1.0]), &skew).is_err());
    }

    #[test]
    fn rho_in_other_norms() {
        let l1 = ClosedSet::ball_with([0.0, 0.0], 1.0, NormKind::L1);
        assert_eq!(rho(&v([2.0, 1.0]), &l1).unwrap().value(), 2.0);
        let linf = ClosedSet::ball_with([0.0, 0.0], 1.0, NormKind::LInf);
        assert_eq!(rho(&v([2.0, 1.5]), &linf).unwrap().value(), 1.0);
    }

    #[test]
    fn rho_bar_spec_examples() {
        let b2 = ClosedSet::ball([0.0, 0.0], 2.0);
        let b1 = ClosedSet::ball([0.0, 0.0], 1.0);
        assert_eq!(rho_bar(&b2, &b1).unwrap().value(), 1.0);
        assert_eq!(rho_bar(&b1, &b2).unwrap().value(), 0.0);
        let right = ClosedSet::boxed(&[1.0, 0.0], &[2.0, 1.0]);
        assert_eq!(rho_bar(&unit_square(), &right).unwrap().value(), 1.0);
        assert!(matches!(rho_bar(&ClosedSet::Empty, &b1), Err(KappaError::EmptySet(_))));
        assert!(rho_bar(&b1, &ClosedSet::Empty).unwrap().is_infinite());
    }

    #[test]
    fn rho_bar_unbounded_sources() {
        let x_axis = ClosedSet::span(&[v([1.0, 0.0])], 2);
        let shifted = x_axis.map_affine(1.0, &v([0.0, 3.0]));
        assert_eq!(rho_bar(&shifted, &x_axis).unwrap().value(), 3.0);
        let y_axis = ClosedSet::span(&[v([0.0, 1.0])], 2);
        assert!(rho_bar(&x_axis, &y_axis).unwrap().is_infinite());
        assert!(rho_bar(&x_axis, &unit_square()).unwrap().is_infinite());
        assert_eq!(rho_bar(&unit_square(), &x_axis).unwrap().value(), 1.0);
    }

    #[test]
    fn rho_bar_ball_to_polytope_is_sampled_but_accurate() {
        let ball = ClosedSet::ball([2.0, 3.0], 0.5);
        let e = rho_bar_estimate(&ball, &unit_square()).unwrap();
        assert!(matches!(e.method, SupMethod::Sampled { .. }));
        // the farthest point continues the ray from the nearest corner
        let want = 5f64.sqrt() + 0.5;
        assert!((e.value.value() - want).abs() < 1e-9, "{} vs {want}", e.value.value());
    }

    #[test]
    fn rho_bar_ball_to_norm_balls() {
        let a = ClosedSet::ball([1.0, 2.0], 0.5);
        let linf = ClosedSet::ball_with([0.0, 0.0], 1.0, NormKind::LInf);
        assert!((rho_bar(&a, &linf).unwrap().value() - 1.5).abs() < 1e-15);
        let l1 = ClosedSet::ball_with([0.0, 0.0], 1.0, NormKind::L1);
        let want = 3.0 + 0.5 * 2f64.sqrt() - 1.0;
        assert!((rho_bar(&a, &l1).unwrap().value() - want).abs() < 1e-15);
    }

    #[test]
    fn metric_d_spec_examples() {
        assert_eq!(metric_d(&unit_square(), &unit_square()).unwrap().value(), 0.0);
        let shifted = affine_transform(1.0, &v([1.0, 0.0]), &unit_square()).unwrap();
        assert_eq!(metric_d(&unit_square(), &shifted).unwrap().value(), 2.0);
        let a3 = affine_transform(3.0, &v([0.0, 0.0]), &unit_square()).unwrap();
        let b3 = affine_transform(3.0, &v([0.0, 0.0]), &shifted).unwrap();
        assert_eq!(metric_d(&a3, &b3).unwrap().value(), 6.0);
        assert!(metric_d(&ClosedSet::Empty, &unit_square()).is_err());
        assert!(metric_d(&unit_square(), &ClosedSet::Empty).is_err());
    }

    #[test]
    fn minkowski_spec_examples() {
        let s = minkowski_sum_cl(&unit_square(), &unit_square()).unwrap();
        let want = ClosedSet::boxed(&[0.0, 0.0], &[2.0, 2.0]);
        assert_eq!(metric_d(&s, &want).unwrap().value(), 0.0);
        let ClosedSet::Polytope { vertices } = &s else { panic!() };
        assert_eq!(vertices.len(), 4);

        let zero = ClosedSet::point([0.0, 0.0]);
        assert_eq!(minkowski_sum_cl(&unit_square(), &zero).unwrap(), unit_square());

        let tri = ClosedSet::polytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let seg = ClosedSet::polytope([[0.0, 0.0], [0.0, 1.0]]);
        let s = minkowski_sum_cl(&tri, &seg).unwrap();
        let want = ClosedSet::polytope([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [1.0, 1.0]]);
        assert_eq!(metric_d(&s, &want).unwrap().value(), 0.0);
        let ClosedSet::Polytope { vertices } = &s else { panic!() };
        assert_eq!(vertices.len(), 4);
    }

    #[test]
    fn minkowski_balls_and_flats() {
        let s = minkowski_sum_cl(&ClosedSet::ball([1.0, 0.0], 1.0), &ClosedSet::ball([0.0, 1.0], 2.0)).unwrap();
        assert_eq!(s, ClosedSet::ball([1.0, 1.0], 3.0));
        let line = ClosedSet::span(&[v([1.0, 0.0])], 2);
        let strip = minkowski_sum_cl(&line, &unit_square()).unwrap();
        assert!(matches!(strip, ClosedSet::Cylinder { .. }));
        assert_eq!(rho(&v([100.0, 3.0]), &strip).unwrap().value(), 2.0);
        assert!(rho(&v([-7.0, 0.5]), &strip).unwrap().value() < 1e-15);
        let plane = minkowski_sum_cl(&line, &ClosedSet::span(&[v([1.0, 1.0])], 2)).unwrap();
        assert!(rho(&v([5.0, -9.0]), &plane).unwrap().value() < 1e-15);
        assert!(minkowski_sum_cl(&ClosedSet::Empty, &line).is_err());
        assert!(minkowski_sum_cl(&ClosedSet::union(vec![line.clone()]), &line).is_err());
    }

    #[test]
    fn dilation_bracket_contains_true_sum() {
        let b = dilation_bracket(&[v([0.0, 0.0]), v([1.0, 0.0]), v([0.0, 1.0])], &v([0.0, 0.0]), 0.1, 64).unwrap();
        let tri = ClosedSet::polytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let inner = rho_bar(&b.inner, &tri).unwrap().value();
        let outer = rho_bar(&b.outer, &tri).unwrap().value();
        assert!(inner <= 0.1 + 1e-12 && outer >= 0.1 - 1e-12);
        assert!(outer - inner < 0.1 * 2e-3);
    }

    #[test]
    fn affine_transform_spec_examples() {
        let o = v([0.0, 0.0]);
        assert_eq!(
            affine_transform(2.0, &o, &ClosedSet::ball([0.0, 0.0], 1.0)).unwrap(),
            ClosedSet::ball([0.0, 0.0], 2.0)
        );
        assert_eq!(
            affine_transform(1.0, &v([1.0, 1.0]), &unit_square()).unwrap(),
            ClosedSet::boxed(&[1.0, 1.0], &[2.0, 2.0])
        );
        assert_eq!(
            affine_transform(-1.0, &o, &ClosedSet::polytope([[1.0, 0.0], [2.0, 0.0]])).unwrap(),
            ClosedSet::polytope([[-1.0, -0.0], [-2.0, -0.0]])
        );
        assert!(affine_transform(0.0, &o, &unit_square()).is_err());
    }

    #[test]
    fn quotient_spec_examples() {
        let m = ClosedSet::span(&[v([1.0, 0.0])], 2);
        let (r, n) = quotient_project(&v([3.0, 4.0]), &m).unwrap();
        assert_eq!((r, n.value()), (v([0.0, 4.0]), 4.0));
        let (r, n) = quotient_project(&v([-2.0, 0.0]), &m).unwrap();
        assert_eq!(n.value(), 0.0);
        assert_eq!(r.norm(), 0.0);
        let zero = ClosedSet::span(&[], 2);
        let (r, n) = quotient_project(&v([3.0, 4.0]), &zero).unwrap();
        assert_eq!((r, n.value()), (v([3.0, 4.0]), 5.0));
        let shifted = m.map_affine(1.0, &v([0.0, 1.0]));
        assert!(quotient_project(&v([1.0, 1.0]), &shifted).is_err());
    }

    #[test]
    fn extend_to_singleton_spec_examples() {
        let r = extend_to_singleton(&v([3.0, 4.0]), 1000).unwrap().value();
        assert!((4.999..=5.0).contains(&r));
        assert_eq!(extend_to_singleton(&v([0.0, 0.0]), 7).unwrap().value(), 0.0);
        assert!((extend_to_singleton(&v([1.0, 0.0]), 10).unwrap().value() - 0.9).abs() < 1e-15);
        assert!(extend_to_singleton(&v([1.0]), 0).is_err());
    }

    #[test]
    fn seminorm_spec_examples() {
        let fam = SeminormFamily::new(vec![
            ClosedSet::span(&[v([0.0, 1.0])], 2),
            ClosedSet::span(&[v([1.0, 0.0])], 2),
        ])
        .unwrap();
        assert_eq!(seminorm_sup(&fam, &v([3.0, -4.0])).unwrap().value(), 4.0);
        let empty = SeminormFamily::new(vec![]).unwrap();
        assert_eq!(seminorm_sup(&empty, &v([3.0, -4.0])).unwrap().value(), 0.0);
        let m = ClosedSet::span(&[v([1.0, 1.0])], 2);
        let single = SeminormFamily::new(vec![m.clone()]).unwrap();
        let x = v([2.0, -1.0]);
        assert_eq!(seminorm_sup(&single, &x).unwrap(), rho(&x, &m).unwrap());
        assert!(SeminormFamily::new(vec![m.map_affine(1.0, &v([1.0, 0.0]))]).is_err());
    }

    #[test]
    fn perturb_bound_spec_examples() {
        let (sigma, d) = perturb_bound(&unit_square(), 0.2).unwrap();
        assert_eq!(sigma, ClosedSet::ball([0.0, 0.0], 0.1));
        assert!((d.value() - 0.1).abs() < 1e-12);
        let (_, d) = perturb_bound(&ClosedSet::ball([0.0, 0.0], 1.0), 0.2).unwrap();
        assert!((d.value() - 0.1).abs() < 1e-15);
        let sum = minkowski_sum_cl(&unit_square(), &sigma).unwrap();
        assert!(rho_bar(&unit_square(), &sum).unwrap().value() < 1e-12);
        assert!(perturb_bound(&unit_square(), 0.0).is_err());
        assert!(perturb_bound(&ClosedSet::Empty, 0.1).is_err());
    }
}
