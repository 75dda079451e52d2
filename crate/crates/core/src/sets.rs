use serde::{Deserialize, Serialize};

use crate::error::{KappaError, Result};
use crate::geometry::{self, hull_2d, to_p2};
use crate::vector::{orthonormalize, reject, NormKind, Vector};

/// Tolerance for the orthonormality of subspace bases.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

/// Absolute membership tolerance used throughout.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A closed subset of R^d.
///
/// `Cylinder` is the sum of a bounded convex base (a polytope or a Euclidean
/// ball) and the linear span of orthonormal `directions`; it is what a
/// Minkowski sum with a subspace produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields, try_from = "RawSet")]
pub enum ClosedSet {
    Ball {
        center: Vector,
        radius: f64,
        #[serde(default)]
        norm: NormKind,
    },
    Polytope {
        vertices: Vec<Vector>,
    },
    Subspace {
        basis: Vec<Vector>,
        offset: Vector,
    },
    Cylinder {
        base: Box<ClosedSet>,
        directions: Vec<Vector>,
    },
    Union {
        parts: Vec<ClosedSet>,
    },
    Empty,
}

/// Unvalidated wire form of [`ClosedSet`].
#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawSet {
    Ball {
        center: Vector,
        radius: f64,
        #[serde(default)]
        norm: NormKind,
    },
    Polytope {
        vertices: Vec<Vector>,
    },
    Subspace {
        basis: Vec<Vector>,
        offset: Vector,
    },
    Cylinder {
        base: Box<ClosedSet>,
        directions: Vec<Vector>,
    },
    Union {
        parts: Vec<ClosedSet>,
    },
    Empty,
}

impl TryFrom<RawSet> for ClosedSet {
    type Error = KappaError;

    fn try_from(raw: RawSet) -> Result<Self> {
        let set = match raw {
            RawSet::Ball { center, radius, norm } => ClosedSet::Ball { center, radius, norm },
            RawSet::Polytope { vertices } => ClosedSet::Polytope { vertices },
            RawSet::Subspace { basis, offset } => ClosedSet::Subspace { basis, offset },
            RawSet::Cylinder { base, directions } => ClosedSet::Cylinder { base, directions },
            RawSet::Union { parts } => ClosedSet::Union { parts },
            RawSet::Empty => ClosedSet::Empty,
        };
        set.validate()?;
        Ok(set)
    }
}

impl ClosedSet {
    /// Euclidean ball.
    pub fn ball(center: impl Into<Vector>, radius: f64) -> Self {
        ClosedSet::Ball {
            center: center.into(),
            radius,
            norm: NormKind::L2,
        }
    }

    pub fn ball_with(center: impl Into<Vector>, radius: f64, norm: NormKind) -> Self {
        ClosedSet::Ball {
            center: center.into(),
            radius,
            norm,
        }
    }

    pub fn polytope<V: Into<Vector>>(vertices: impl IntoIterator<Item = V>) -> Self {
        ClosedSet::Polytope {
            vertices: vertices.into_iter().map(Into::into).collect(),
        }
    }

    /// The singleton `{x}`.
    pub fn point(x: impl Into<Vector>) -> Self {
        ClosedSet::Polytope {
            vertices: vec![x.into()],
        }
    }

    /// Axis-aligned box `[lo_1, hi_1] x ... x [lo_d, hi_d]` as a polytope.
    pub fn boxed(lo: &[f64], hi: &[f64]) -> Self {
        assert_eq!(lo.len(), hi.len(), "box corners must have equal dimension");
        let d = lo.len();
        let vertices = (0..1usize << d)
            .map(|mask| Vector::new((0..d).map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] }).collect()))
            .collect();
        ClosedSet::Polytope { vertices }
    }

    /// Linear span of `basis` (orthonormalized) in R^dim.
    pub fn span(basis: &[Vector], dim: usize) -> Self {
        ClosedSet::Subspace {
            basis: orthonormalize(basis, 1e-10),
            offset: Vector::zeros(dim),
        }
    }

    pub fn union(parts: Vec<ClosedSet>) -> Self {
        ClosedSet::Union { parts }
    }

    /// Ambient dimension, or `None` for `Empty` (which fits every dimension).
    pub fn dim(&self) -> Option<usize> {
        match self {
            ClosedSet::Ball { center, .. } => Some(center.dim()),
            ClosedSet::Polytope { vertices } => vertices.first().map(Vector::dim),
            ClosedSet::Subspace { offset, .. } => Some(offset.dim()),
            ClosedSet::Cylinder { base, .. } => base.dim(),
            ClosedSet::Union { parts } => parts.iter().find_map(ClosedSet::dim),
            ClosedSet::Empty => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ClosedSet::Empty => true,
            ClosedSet::Union { parts } => parts.iter().all(ClosedSet::is_empty),
            _ => false,
        }
    }

    /// Checks the structural invariants; returns the ambient dimension.
    pub fn validate(&self) -> Result<Option<usize>> {
        let bad = |m: String| Err(KappaError::InvalidSet(m));
        match self {
            ClosedSet::Ball { center, radius, .. } => {
                if center.dim() == 0 || !center.is_finite() {
                    return bad("ball center must be a finite nonempty vector".into());
                }
                if !(radius.is_finite() && *radius >= 0.0) {
                    return bad(format!("ball radius {radius} must be finite and >= 0"));
                }
                Ok(Some(center.dim()))
            }
            ClosedSet::Polytope { vertices } => {
                let Some(first) = vertices.first() else {
                    return bad("polytope needs at least one vertex".into());
                };
                let d = first.dim();
                if d == 0 {
                    return bad("polytope vertices must be nonempty vectors".into());
                }
                for v in vertices {
                    v.check_dim(d)?;
                    if !v.is_finite() {
                        return bad("polytope vertex is not finite".into());
                    }
                }
                Ok(Some(d))
            }
            ClosedSet::Subspace { basis, offset } => {
                let d = offset.dim();
                if d == 0 || !offset.is_finite() {
                    return bad("subspace offset must be a finite nonempty vector".into());
                }
                check_orthonormal(basis, d)?;
                Ok(Some(d))
            }
            ClosedSet::Cylinder { base, directions } => {
                match base.as_ref() {
                    ClosedSet::Polytope { .. } | ClosedSet::Ball { norm: NormKind::L2, .. } => {}
                    _ => return bad("cylinder base must be a polytope or a Euclidean ball".into()),
                }
                let d = base.validate()?.expect("nonempty base");
                check_orthonormal(directions, d)?;
                Ok(Some(d))
            }
            ClosedSet::Union { parts } => {
                if parts.is_empty() {
                    return bad("union needs at least one part".into());
                }
                let mut dim = None;
                for p in parts {
                    if let Some(d) = p.validate()? {
                        match dim {
                            None => dim = Some(d),
                            Some(e) if e != d => return Err(KappaError::DimensionMismatch { expected: e, found: d }),
                            _ => {}
                        }
                    }
                }
                Ok(dim)
            }
            ClosedSet::Empty => Ok(None),
        }
    }

    /// Validates and checks the set lives in R^dim.
    pub fn validate_dim(&self, dim: usize) -> Result<()> {
        match self.validate()? {
            Some(d) if d != dim => Err(KappaError::DimensionMismatch {
                expected: dim,
                found: d,
            }),
            _ => Ok(()),
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            ClosedSet::Subspace { basis, .. } => basis.is_empty(),
            ClosedSet::Cylinder { directions, .. } => directions.is_empty(),
            ClosedSet::Union { parts } => parts.iter().all(ClosedSet::is_bounded),
            _ => true,
        }
    }

    /// True for the variants that are convex by construction. A union is
    /// reported convex only when it has a single part.
    pub fn is_convex(&self) -> bool {
        match self {
            ClosedSet::Union { parts } => parts.len() == 1 && parts[0].is_convex(),
            _ => true,
        }
    }

    /// Directions along which the set is invariant under translation.
    pub fn lineality(&self) -> Vec<Vector> {
        match self {
            ClosedSet::Subspace { basis, .. } => basis.clone(),
            ClosedSet::Cylinder { directions, .. } => directions.clone(),
            _ => Vec::new(),
        }
    }

    /// Finite vertex list whose convex hull equals the set, when one exists:
    /// polytopes, L1 and LInf balls, degenerate or one-dimensional Euclidean
    /// balls, and zero-dimensional flats.
    pub fn as_polytope_exact(&self) -> Option<Vec<Vector>> {
        match self {
            ClosedSet::Polytope { vertices } => Some(vertices.clone()),
            ClosedSet::Ball { center, radius, norm } => {
                let d = center.dim();
                if *radius == 0.0 {
                    return Some(vec![center.clone()]);
                }
                match norm {
                    NormKind::L2 if d == 1 => Some(vec![
                        center.axpy(-radius, &Vector::unit(1, 0)),
                        center.axpy(*radius, &Vector::unit(1, 0)),
                    ]),
                    NormKind::L2 => None,
                    NormKind::L1 => Some(
                        (0..d)
                            .flat_map(|i| {
                                let e = Vector::unit(d, i);
                                [center.axpy(*radius, &e), center.axpy(-radius, &e)]
                            })
                            .collect(),
                    ),
                    NormKind::LInf => Some(
                        (0..1usize << d)
                            .map(|mask| {
                                Vector::new(
                                    (0..d)
                                        .map(|i| center[i] + if mask >> i & 1 == 1 { *radius } else { -radius })
                                        .collect(),
                                )
                            })
                            .collect(),
                    ),
                }
            }
            ClosedSet::Subspace { basis, offset } if basis.is_empty() => Some(vec![offset.clone()]),
            ClosedSet::Cylinder { base, directions } if directions.is_empty() => base.as_polytope_exact(),
            _ => None,
        }
    }

    /// Polytope inscribed in a Euclidean ball (vertices on its boundary);
    /// `m` vertices in the plane. Other variants with an exact vertex
    /// description are returned unchanged.
    pub fn to_polytope(&self, m: usize) -> Result<Vec<Vector>> {
        if let Some(v) = self.as_polytope_exact() {
            return Ok(v);
        }
        match self {
            ClosedSet::Ball { center, radius, .. } => Ok(sphere_points(center.dim(), m)
                .into_iter()
                .map(|u| center.axpy(*radius, &u))
                .collect()),
            _ => Err(KappaError::Unsupported(
                "only bounded convex sets have a polytope representation".into(),
            )),
        }
    }

    /// Membership test at absolute tolerance `tol`.
    ///
    /// Planar and one-dimensional polytopes are tested against their facet
    /// inequalities; higher-dimensional polytopes and cylinders through the
    /// minimum-norm point.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        match self {
            ClosedSet::Ball { center, radius, norm } => (x - center).norm_with(*norm) <= radius + tol,
            ClosedSet::Polytope { vertices } => polytope_contains(vertices, x, tol),
            ClosedSet::Subspace { basis, offset } => reject(&(x - offset), basis).norm() <= tol,
            ClosedSet::Cylinder { base, directions } => {
                let xp = reject(x, directions);
                match base.as_ref() {
                    ClosedSet::Ball { center, radius, .. } => {
                        (&xp - &reject(center, directions)).norm() <= radius + tol
                    }
                    ClosedSet::Polytope { vertices } => {
                        let vp: Vec<Vector> = vertices.iter().map(|v| reject(v, directions)).collect();
                        geometry::distance_to_hull(&xp, &vp) <= tol
                    }
                    _ => false,
                }
            }
            ClosedSet::Union { parts } => parts.iter().any(|p| p.contains(x, tol)),
            ClosedSet::Empty => false,
        }
    }

    /// `lambda * self + shift`.
    pub fn map_affine(&self, lambda: f64, shift: &Vector) -> ClosedSet {
        let f = |v: &Vector| v.scale(lambda).axpy(1.0, shift);
        match self {
            ClosedSet::Ball { center, radius, norm } => ClosedSet::Ball {
                center: f(center),
                radius: radius * lambda.abs(),
                norm: *norm,
            },
            ClosedSet::Polytope { vertices } => ClosedSet::Polytope {
                vertices: vertices.iter().map(f).collect(),
            },
            ClosedSet::Subspace { basis, offset } => ClosedSet::Subspace {
                basis: basis.clone(),
                offset: f(offset),
            },
            ClosedSet::Cylinder { base, directions } => ClosedSet::Cylinder {
                base: Box::new(base.map_affine(lambda, shift)),
                directions: directions.clone(),
            },
            ClosedSet::Union { parts } => ClosedSet::Union {
                parts: parts.iter().map(|p| p.map_affine(lambda, shift)).collect(),
            },
            ClosedSet::Empty => ClosedSet::Empty,
        }
    }
}

fn check_orthonormal(basis: &[Vector], d: usize) -> Result<()> {
    for (i, b) in basis.iter().enumerate() {
        b.check_dim(d)?;
        for (j, c) in basis.iter().enumerate().skip(i) {
            let want = if i == j { 1.0 } else { 0.0 };
            let got = b.dot(c);
            if (got - want).abs() > ORTHONORMAL_TOL || got.is_nan() {
                return Err(KappaError::InvalidSet(format!(
                    "basis is not orthonormal: <b{i}, b{j}> = {got}"
                )));
            }
        }
    }
    Ok(())
}

fn polytope_contains(vertices: &[Vector], x: &Vector, tol: f64) -> bool {
    match x.dim() {
        1 => {
            let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            x[0] >= lo - tol && x[0] <= hi + tol
        }
        2 => {
            let pts: Vec<_> = vertices.iter().map(to_p2).collect();
            let h = hull_2d(&pts, 0.0);
            if h.len() < 3 {
                let hv: Vec<Vector> = h.into_iter().map(geometry::from_p2).collect();
                return geometry::distance_to_hull(x, &hv) <= tol;
            }
            let p = to_p2(x);
            (0..h.len()).all(|i| {
                let a = h[i];
                let b = h[(i + 1) % h.len()];
                let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                let cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
                cr / len >= -tol
            })
        }
        _ => geometry::distance_to_hull(x, vertices) <= tol,
    }
}

/// Deterministic points on the Euclidean unit sphere of R^d: both endpoints
/// for d = 1, the vertices of a regular `m`-gon for d = 2, and a spherical
/// Fibonacci lattice of `m` points (plus the coordinate poles) for d >= 3,
/// lifted to higher dimensions through the first three coordinates and the
/// signed axes.
pub fn sphere_points(d: usize, m: usize) -> Vec<Vector> {
    match d {
        1 => vec![Vector::from([-1.0]), Vector::from([1.0])],
        2 => (0..m)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / m as f64;
                Vector::from([a.cos(), a.sin()])
            })
            .collect(),
        _ => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            let mut out: Vec<Vector> = (0..m)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    let mut c = vec![0.0; d];
                    c[0] = r * a.cos();
                    c[1] = r * a.sin();
                    c[2] = z;
                    Vector::new(c)
                })
                .collect();
            for i in 0..d {
                out.push(Vector::unit(d, i));
                out.push(Vector::unit(d, i).scale(-1.0));
            }
            out
        }
    }
}
