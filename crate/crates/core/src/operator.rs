//! Conditional kappa-norm on invertible linear operators of R^d.
//!
//! `rho_L(A, S) = sup_{(x, E)} inf_{B in S, a in E} |(B - A)(x - a)| / rho(x, E)`
//! with the supremum taken over a finite [`ProbeFamily`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::axioms::SuiteConfig;
use crate::error::{KappaError, Result};
use crate::geometry::distance_to_hull;
use crate::kappa::rho_unchecked;
use crate::random;
use crate::report::{AxiomReport, Tally};
use crate::sets::ClosedSet;
use crate::value::KappaValue;
use crate::vector::{NormKind, Vector};

/// Determinant magnitude below which a matrix counts as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Inner sample size for operator balls.
pub const DEFAULT_BALL_SAMPLES: usize = 64;

/// Invertible square matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperator")]
pub struct Operator {
    matrix: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<RawOperator> for Operator {
    type Error = KappaError;

    fn try_from(raw: RawOperator) -> Result<Self> {
        Operator::new(raw.matrix)
    }
}

impl Operator {
    /// Checks shape, finiteness and `|det| > SINGULAR_TOL`.
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let d = matrix.len();
        if d == 0 {
            return Err(KappaError::InvalidArgument("operator must be at least 1x1".into()));
        }
        for row in &matrix {
            if row.len() != d {
                return Err(KappaError::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(KappaError::InvalidArgument("operator entries must be finite".into()));
            }
        }
        let det = to_dmatrix(&matrix).determinant();
        if det.abs() <= SINGULAR_TOL {
            return Err(KappaError::SingularOperator(det));
        }
        Ok(Operator { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Operator {
            matrix: (0..d)
                .map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        Ok(Vector::new(
            self.matrix
                .iter()
                .map(|r| r.iter().zip(x.iter()).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    pub fn determinant(&self) -> f64 {
        self.to_dmatrix().determinant()
    }

    /// Spectral condition number `s_max / s_min`.
    pub fn condition_number(&self) -> f64 {
        let s = self.to_dmatrix().singular_values();
        s.max() / s.min()
    }

    /// `self + other`, or an error when the sum is singular.
    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, s: f64) -> Result<Operator> {
        Operator::new(self.matrix.iter().map(|r| r.iter().map(|v| v * s).collect()).collect())
    }

    fn combine(&self, other: &Operator, s: f64) -> Result<Operator> {
        if other.dim() != self.dim() {
            return Err(KappaError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Operator::new(
            self.matrix
                .iter()
                .zip(&other.matrix)
                .map(|(r, q)| r.iter().zip(q).map(|(a, b)| a + s * b).collect())
                .collect(),
        )
    }

    pub(crate) fn to_dmatrix(&self) -> DMatrix<f64> {
        to_dmatrix(&self.matrix)
    }
}

fn to_dmatrix(m: &[Vec<f64>]) -> DMatrix<f64> {
    let d = m.len();
    DMatrix::from_fn(d, d, |i, j| m[i][j])
}

/// Set of operators: the second argument of `rho_L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum OperatorSet {
    Finite {
        ops: Vec<Operator>,
    },
    /// Operator-norm ball, represented by a seeded inner sample: the centre
    /// plus `samples - 1` invertible members.
    Ball {
        center: Operator,
        radius: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        seed: u64,
    },
    Empty,
}

fn default_samples() -> usize {
    DEFAULT_BALL_SAMPLES
}

impl OperatorSet {
    pub fn finite(ops: Vec<Operator>) -> Self {
        OperatorSet::Finite { ops }
    }

    pub fn ball(center: Operator, radius: f64) -> Self {
        OperatorSet::Ball {
            center,
            radius,
            samples: DEFAULT_BALL_SAMPLES,
            seed: 0,
        }
    }

    /// Dimension, or `None` for the empty set.
    pub fn validate(&self) -> Result<Option<usize>> {
        match self {
            OperatorSet::Finite { ops } => {
                let first = ops
                    .first()
                    .ok_or(KappaError::InvalidSet("a finite operator set must be nonempty".into()))?;
                for op in ops {
                    if op.dim() != first.dim() {
                        return Err(KappaError::DimensionMismatch {
                            expected: first.dim(),
                            found: op.dim(),
                        });
                    }
                }
                Ok(Some(first.dim()))
            }
            OperatorSet::Ball {
                center,
                radius,
                samples,
                ..
            } => {
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(KappaError::InvalidSet(format!("operator ball radius {radius}")));
                }
                if *samples == 0 {
                    return Err(KappaError::InvalidSet("operator ball needs at least one sample".into()));
                }
                Ok(Some(center.dim()))
            }
            OperatorSet::Empty => Ok(None),
        }
    }

    /// The finite list the infimum runs over.
    pub fn members(&self) -> Vec<Operator> {
        match self {
            OperatorSet::Finite { ops } => ops.clone(),
            OperatorSet::Ball {
                center,
                radius,
                samples,
                seed,
            } => ball_sample(center, *radius, *samples, *seed),
            OperatorSet::Empty => Vec::new(),
        }
    }
}

fn ball_sample(center: &Operator, radius: f64, m: usize, seed: u64) -> Vec<Operator> {
    let d = center.dim();
    let mut rng = random::rng(seed);
    let mut out = vec![center.clone()];
    let c = center.to_dmatrix();
    let mut attempts = 0;
    while out.len() < m && attempts < 100 * m && radius > 0.0 {
        attempts += 1;
        let u: DMatrix<f64> = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(&mut rng));
        let norm = u.singular_values().max();
        if norm < 1e-9 {
            continue;
        }
        let t: f64 = rng.random::<f64>().powf(1.0 / (d * d) as f64);
        let b = &c + u * (radius * t / norm);
        let rows = (0..d).map(|i| (0..d).map(|j| b[(i, j)]).collect()).collect();
        if let Ok(op) = Operator::new(rows) {
            out.push(op);
        }
    }
    out
}

/// One probe `(x, E)` of the supremum in `rho_L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpProbe {
    pub x: Vector,
    #[serde(rename = "E")]
    pub e: ClosedSet,
}

/// Probes with `E` bounded, balanced and with the origin in its interior:
/// an origin-centred ball of positive radius or a centrally symmetric
/// full-dimensional polytope.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeFamily {
    probes: Vec<OpProbe>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProbes {
    probes: Vec<OpProbe>,
}

impl<'de> Deserialize<'de> for ProbeFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ProbeFamily::new(RawProbes::deserialize(d)?.probes).map_err(serde::de::Error::custom)
    }
}

impl ProbeFamily {
    pub fn new(probes: Vec<OpProbe>) -> Result<Self> {
        let d = probes
            .first()
            .ok_or(KappaError::InvalidArgument("a probe family must be nonempty".into()))?
            .x
            .dim();
        for (i, p) in probes.iter().enumerate() {
            p.x.check_dim(d)?;
            p.e.validate_dim(d)?;
            check_probe_set(&p.e).map_err(|m| KappaError::InvalidArgument(format!("probe {i}: {m}")))?;
            let r = rho_unchecked(&p.x, &p.e);
            if !(r > 0.0) {
                return Err(KappaError::InvalidArgument(format!("probe {i}: x lies in E")));
            }
        }
        Ok(ProbeFamily { probes })
    }

    /// `n` seeded probes alternating Euclidean balls and symmetric polytopes.
    pub fn generate(seed: u64, d: usize, n: usize) -> Result<Self> {
        let mut rng = random::rng(seed);
        let mut probes = Vec::with_capacity(n);
        while probes.len() < n {
            let e = if probes.len() % 2 == 0 {
                ClosedSet::ball(Vector::zeros(d), rng.random_range(0.5..1.5))
            } else {
                let half: Vec<Vector> = (0..d + 1).map(|_| random::point(&mut rng, d, 1.5)).collect();
                let vertices = half.iter().flat_map(|v| [v.clone(), -v]).collect();
                ClosedSet::Polytope { vertices }
            };
            if check_probe_set(&e).is_err() {
                continue;
            }
            let x = random::point(&mut rng, d, 3.0);
            if rho_unchecked(&x, &e) > 0.1 {
                probes.push(OpProbe { x, e });
            }
        }
        ProbeFamily::new(probes)
    }

    pub fn probes(&self) -> &[OpProbe] {
        &self.probes
    }

    pub fn dim(&self) -> usize {
        self.probes[0].x.dim()
    }

    /// `max over probes of sup_{a in E} |x - a| / rho(x, E)`: a Lipschitz
    /// constant of `A -> rho_L(A, S)` in the spectral norm.
    pub fn lipschitz_modulus(&self) -> f64 {
        self.probes
            .iter()
            .map(|p| {
                let far = match p.e.as_polytope_exact() {
                    Some(vs) => vs.iter().map(|v| v.distance(&p.x)).fold(0.0, f64::max),
                    None => match &p.e {
                        ClosedSet::Ball { radius, .. } => p.x.norm() + radius,
                        _ => unreachable!("validated probe"),
                    },
                };
                far / rho_unchecked(&p.x, &p.e)
            })
            .fold(0.0, f64::max)
    }
}

fn check_probe_set(e: &ClosedSet) -> std::result::Result<(), String> {
    match e {
        ClosedSet::Ball { center, radius, .. } => {
            if center.norm() != 0.0 || *radius <= 0.0 {
                return Err("a ball E must be centred at the origin with positive radius".into());
            }
            Ok(())
        }
        ClosedSet::Polytope { vertices } => {
            let d = vertices[0].dim();
            let scale = vertices.iter().map(Vector::norm).fold(0.0, f64::max).max(1.0);
            if vertices.iter().any(|v| distance_to_hull(&-v, vertices) > 1e-9 * scale) {
                return Err("a polytope E must be centrally symmetric".into());
            }
            let m = DMatrix::from_fn(d, vertices.len(), |i, j| vertices[j][i]);
            if m.rank(1e-9 * scale) < d {
                return Err("a polytope E must be full-dimensional".into());
            }
            Ok(())
        }
        _ => Err("E must be an origin-centred ball or a symmetric polytope".into()),
    }
}

/// `inf_{a in E} |m (x - a)|`.
fn image_distance(m: &DMatrix<f64>, x: &Vector, e: &ClosedSet) -> f64 {
    let apply = |v: &Vector| Vector::new((m * DVector::from_column_slice(v.as_slice())).as_slice().to_vec());
    if let Some(vs) = e.as_polytope_exact() {
        let image: Vec<Vector> = vs.iter().map(apply).collect();
        return distance_to_hull(&apply(x), &image);
    }
    match e {
        ClosedSet::Ball {
            radius,
            norm: NormKind::L2,
            ..
        } => trust_region_distance(m, x, *radius),
        _ => unreachable!("validated probe"),
    }
}

/// `min |m (x - a)|` over `|a| <= r`. With `m^T m = Q diag(l) Q^T` and
/// `z = Q^T x`, the minimiser is `a_i = l_i z_i / (l_i + mu)`, with `mu = 0`
/// if that point is feasible and otherwise the root of `|a(mu)| = r`.
fn trust_region_distance(m: &DMatrix<f64>, x: &Vector, r: f64) -> f64 {
    let eig = SymmetricEigen::new(m.transpose() * m);
    let z = eig.eigenvectors.transpose() * DVector::from_column_slice(x.as_slice());
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l));
    let lam: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l <= 1e-14 * top { 0.0 } else { l })
        .collect();
    let at = |mu: f64| -> Vec<f64> {
        lam.iter()
            .zip(z.iter())
            .map(|(&l, &zi)| if l == 0.0 { 0.0 } else { l * zi / (l + mu) })
            .collect()
    };
    let len = |a: &[f64]| a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut a = at(0.0);
    if len(&a) > r {
        let g = lam
            .iter()
            .zip(z.iter())
            .map(|(l, zi)| (l * zi).powi(2))
            .sum::<f64>()
            .sqrt();
        let (mut lo, mut hi) = (0.0, g / r);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if len(&at(mid)) > r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        a = at(hi);
    }
    lam.iter()
        .zip(z.iter())
        .zip(&a)
        .map(|((l, zi), ai)| l * (zi - ai).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `rho_L(A, S)` over the probes in `p`, the infimum over `S` running over
/// [`OperatorSet::members`]. Exact per probe for finite `S`; for an operator
/// ball the inner sample gives an upper bound of each infimum.
#[allow(non_snake_case)]
pub fn rho_L_sampled(a: &Operator, s: &OperatorSet, p: &ProbeFamily) -> Result<KappaValue> {
    let d = a.dim();
    if p.dim() != d {
        return Err(KappaError::DimensionMismatch {
            expected: d,
            found: p.dim(),
        });
    }
    if let Some(sd) = s.validate()? {
        if sd != d {
            return Err(KappaError::DimensionMismatch { expected: d, found: sd });
        }
    }
    Ok(KappaValue::new(rho_l_unchecked(a, &s.members(), p)))
}

fn rho_l_unchecked(a: &Operator, members: &[Operator], p: &ProbeFamily) -> f64 {
    if members.is_empty() {
        return f64::INFINITY;
    }
    let am = a.to_dmatrix();
    let diffs: Vec<DMatrix<f64>> = members.iter().map(|b| b.to_dmatrix() - &am).collect();
    p.probes
        .iter()
        .map(|pr| {
            let denom = rho_unchecked(&pr.x, &pr.e);
            diffs
                .iter()
                .map(|m| image_distance(m, &pr.x, &pr.e))
                .fold(f64::INFINITY, f64::min)
                / denom
        })
        .fold(0.0, f64::max)
}

/// Values of `rho_L` with inner samples of size `m` and `2m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpBracket {
    #[serde(with = "crate::value::extended")]
    pub coarse: f64,
    #[serde(with = "crate::value::extended")]
    pub fine: f64,
}

/// Refinement bracket `m -> 2m` for operator balls; both values coincide
/// for finite sets.
#[allow(non_snake_case)]
pub fn rho_L_bracket(a: &Operator, s: &OperatorSet, p: &ProbeFamily) -> Result<OpBracket> {
    let coarse = rho_L_sampled(a, s, p)?.value();
    let fine = match s {
        OperatorSet::Ball {
            center,
            radius,
            samples,
            seed,
        } => rho_L_sampled(
            a,
            &OperatorSet::Ball {
                center: center.clone(),
                radius: *radius,
                samples: 2 * samples,
                seed: *seed,
            },
            p,
        )?
        .value(),
        _ => coarse,
    };
    Ok(OpBracket { coarse, fine })
}

/// Pass threshold of [`operator_axiom_suite`].
pub const OPERATOR_TOL: f64 = 1e-8;

/// Probes used by the operator suite.
pub const SUITE_PROBES: usize = 8;

/// Checks (N1 forward), (N2), (N3), (N5a), (N5b), (N6) and (N7) for
/// [`rho_L_sampled`] over a fixed seeded probe family, on finite operator
/// sets. Instances whose sums or scalings leave the invertible operators
/// are skipped and counted.
///
/// (N3) is the Lipschitz bound `|rho_L(A,S) - rho_L(A',S)| <= K |A - A'|`
/// with `K` from [`ProbeFamily::lipschitz_modulus`] and the spectral norm.
pub fn operator_axiom_suite(cfg: &SuiteConfig) -> AxiomReport {
    let d = cfg.dim;
    let mut rng = random::rng(cfg.seed);
    let probes = ProbeFamily::generate(cfg.seed ^ 0x5eed, d, SUITE_PROBES).expect("generated probes");
    let lip = probes.lipschitz_modulus();
    let eval = |a: &Operator, s: &[Operator]| rho_l_unchecked(a, s, &probes);

    let mut n1 = Tally::new("N1");
    let mut n2 = Tally::new("N2");
    let mut n3 = Tally::new("N3");
    let mut n5a = Tally::new("N5a");
    let mut n5b = Tally::new("N5b");
    let mut n6 = Tally::new("N6");
    let mut n7 = Tally::new("N7");

    for _ in 0..cfg.instances {
        let a = random_operator(&mut rng, d);
        let s = random_set(&mut rng, d);
        let base = eval(&a, &s);
        let show = || {
            format!(
                "A = {:?}, S = {:?}",
                a.matrix(),
                s.iter().map(Operator::matrix).collect::<Vec<_>>()
            )
        };

        let mut with_a = s.clone();
        with_a.push(a.clone());
        n1.record(eval(&a, &with_a), show);

        let extra = random_set(&mut rng, d);
        let mut bigger = s.clone();
        bigger.extend(extra);
        n2.record(eval(&a, &bigger) - base, show);

        let bump = random_operator(&mut rng, d).to_dmatrix() * rng.random_range(0.01..0.3);
        let moved = a.to_dmatrix() + &bump;
        match from_dmatrix(&moved) {
            Some(a2) => {
                let gap = (eval(&a2, &s) - base).abs();
                n3.record(gap - lip * bump.singular_values().max(), show);
            }
            None => n3.skip(),
        }

        let a2 = random_operator(&mut rng, d);
        let s2 = random_set(&mut rng, d);
        match (a.add(&a2), sum_set(&s, &s2)) {
            (Ok(sum_a), Some(sum_s)) => {
                let v = eval(&sum_a, &sum_s) - base - eval(&a2, &s2);
                n5a.record(v, || {
                    format!("{}, A2 = {:?}, S2 = {:?}", show(), a2.matrix(), mats(&s2))
                });
            }
            _ => n5a.skip(),
        }

        let t = random_set(&mut rng, d);
        let sup_t = t.iter().map(|c| eval(c, &s)).fold(0.0, f64::max);
        let v = base - eval(&a, &t) - sup_t;
        n5b.record(v, || format!("{}, T = {:?}", show(), mats(&t)));

        let lambda = rng.random_range(0.1..5.0) * if rng.random_bool(0.5) { -1.0 } else { 1.0 };
        let scaled: Option<Vec<Operator>> = s.iter().map(|b| b.scale(lambda).ok()).collect();
        match (a.scale(lambda), scaled) {
            (Ok(la), Some(ls)) => {
                let v = (eval(&la, &ls) - lambda.abs() * base).abs();
                n6.record(v, || format!("lambda = {lambda}, {}", show()));
            }
            _ => n6.skip(),
        }

        let c = random_operator(&mut rng, d);
        let shifted: Option<Vec<Operator>> = s.iter().map(|b| b.add(&c).ok()).collect();
        match (a.add(&c), shifted) {
            (Ok(ac), Some(sc)) => {
                let v = (eval(&ac, &sc) - base).abs();
                n7.record(v, || format!("{}, C = {:?}", show(), c.matrix()));
            }
            _ => n7.skip(),
        }
    }

    AxiomReport {
        suite: "operator".into(),
        seed: cfg.seed,
        dim: d,
        instances: cfg.instances,
        tolerance: OPERATOR_TOL,
        entries: [n1, n2, n3, n5a, n5b, n6, n7]
            .into_iter()
            .map(|t| t.finish(OPERATOR_TOL))
            .collect(),
    }
}

fn mats(s: &[Operator]) -> Vec<&[Vec<f64>]> {
    s.iter().map(Operator::matrix).collect()
}

fn from_dmatrix(m: &DMatrix<f64>) -> Option<Operator> {
    let d = m.nrows();
    Operator::new((0..d).map(|i| (0..d).map(|j| m[(i, j)]).collect()).collect()).ok()
}

/// `{B1 + B2}`, or `None` if some sum is singular.
fn sum_set(s1: &[Operator], s2: &[Operator]) -> Option<Vec<Operator>> {
    s1.iter()
        .flat_map(|b1| s2.iter().map(move |b2| b1.add(b2).ok()))
        .collect()
}

/// Random invertible operator with entries of moderate size.
pub(crate) fn random_operator<R: Rng>(rng: &mut R, d: usize) -> Operator {
    loop {
        if let Ok(op) = Operator::new(
            random::matrix(rng, d)
                .into_iter()
                .map(|r| r.iter().map(|v| 2.0 * v).collect())
                .collect(),
        ) {
            if op.condition_number() < 1e4 {
                return op;
            }
        }
    }
}

fn random_set<R: Rng>(rng: &mut R, d: usize) -> Vec<Operator> {
    let k = rng.random_range(1..=3);
    (0..k).map(|_| random_operator(rng, d)).collect()
}
