//! Picard iteration for `dx/dt = f(t, x)` and for the set equation
//! `A(t) = cl(A0 + int_0^t f(tau, A(tau)) dtau)`.
//!
//! The set equation is the Minkowski-integral fixed point, with
//! `f(tau, E) = {f(tau, x) : x in E}` and the integral of a set-valued map
//! taken over all integrable selections. For non-scalar dynamics this is
//! not the reachable set of the point equation started in `A0`: each time
//! slice contributes its whole image independently, so sets grow by the
//! support functions of `f(tau, A(tau))` rather than being transported.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{KappaError, Result};
use crate::geometry::prune_vertices;
use crate::kappa::{metric_d, minkowski_sum_cl, rho_unchecked};
use crate::random;
use crate::sets::ClosedSet;
use crate::vector::{NormKind, Vector};

/// Right-hand side `f(t, x)`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum VectorField {
    /// `L x + b`.
    Affine {
        #[serde(rename = "L")]
        l: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Vector>,
    },
    Builtin(Builtin),
    #[serde(skip)]
    Custom(FieldFn),
}

/// Shared closure behind [`VectorField::Custom`].
pub type FieldFn = Arc<dyn Fn(f64, &Vector) -> Vector + Send + Sync>;

/// Named fields available from scenario files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `f = 0`.
    Zero,
    /// `f(x) = x`.
    Identity,
    /// `f(x) = (-x2, x1)`.
    Rotation,
    /// `f(x) = (x1, x2 + x1^2)`.
    QuadraticShear,
    /// `f(x) = (x2, -sin x1)`.
    Pendulum,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorField::Affine { l, b } => f.debug_struct("Affine").field("l", l).field("b", b).finish(),
            VectorField::Builtin(name) => f.debug_tuple("Builtin").field(name).finish(),
            VectorField::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl VectorField {
    pub fn affine(l: Vec<Vec<f64>>, b: Option<Vector>) -> Self {
        VectorField::Affine { l, b }
    }

    pub fn custom(f: impl Fn(f64, &Vector) -> Vector + Send + Sync + 'static) -> Self {
        VectorField::Custom(Arc::new(f))
    }

    /// Checks that the field is defined on R^d.
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            VectorField::Affine { l, b } => {
                if l.len() != d {
                    return Err(KappaError::DimensionMismatch {
                        expected: d,
                        found: l.len(),
                    });
                }
                for row in l {
                    if row.len() != d {
                        return Err(KappaError::DimensionMismatch {
                            expected: d,
                            found: row.len(),
                        });
                    }
                    if row.iter().any(|v| !v.is_finite()) {
                        return Err(KappaError::InvalidArgument("field matrix must be finite".into()));
                    }
                }
                if let Some(b) = b {
                    b.check_dim(d)?;
                }
                Ok(())
            }
            VectorField::Builtin(Builtin::Zero | Builtin::Identity) => Ok(()),
            VectorField::Builtin(_) if d != 2 => Err(KappaError::DimensionMismatch { expected: 2, found: d }),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64, x: &Vector) -> Vector {
        match self {
            VectorField::Affine { l, b } => {
                let lx = Vector::new(
                    l.iter()
                        .map(|r| r.iter().zip(x.iter()).map(|(a, c)| a * c).sum())
                        .collect(),
                );
                match b {
                    Some(b) => lx.axpy(1.0, b),
                    None => lx,
                }
            }
            VectorField::Builtin(Builtin::Zero) => Vector::zeros(x.dim()),
            VectorField::Builtin(Builtin::Identity) => x.clone(),
            VectorField::Builtin(Builtin::Rotation) => Vector::from([-x[1], x[0]]),
            VectorField::Builtin(Builtin::QuadraticShear) => Vector::from([x[0], x[1] + x[0] * x[0]]),
            VectorField::Builtin(Builtin::Pendulum) => Vector::from([x[1], -x[0].sin()]),
            VectorField::Custom(f) => f(t, x),
        }
    }

    /// `(L, b)` when the field is affine and time-independent.
    pub fn as_affine(&self, d: usize) -> Option<(DMatrix<f64>, Vector)> {
        match self {
            VectorField::Affine { l, b } => Some((
                DMatrix::from_fn(d, d, |i, j| l[i][j]),
                b.clone().unwrap_or_else(|| Vector::zeros(d)),
            )),
            VectorField::Builtin(Builtin::Zero) => Some((DMatrix::zeros(d, d), Vector::zeros(d))),
            VectorField::Builtin(Builtin::Identity) => Some((DMatrix::identity(d, d), Vector::zeros(d))),
            VectorField::Builtin(Builtin::Rotation) => {
                Some((DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]), Vector::zeros(2)))
            }
            _ => None,
        }
    }
}

/// Quadrature for Minkowski integrals on a uniform grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    /// Weights `h` at `t_0 .. t_{n-1}`.
    Left,
    /// Weights `h/2, h, ..., h, h/2`.
    #[default]
    Trapezoid,
}

/// Step size, stopping rule and set-representation parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub h: f64,
    pub picard_tol: f64,
    pub max_picard_iters: usize,
    pub hull_prune_eps: f64,
    pub quadrature: Quadrature,
    /// Boundary vertices used when a Euclidean ball must become a polytope.
    pub ball_vertices: usize,
    /// Seed and count of the samples behind [`lipschitz_ratio`].
    pub lipschitz_seed: u64,
    pub lipschitz_samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            h: 1e-3,
            picard_tol: 1e-8,
            max_picard_iters: 200,
            hull_prune_eps: 1e-9,
            quadrature: Quadrature::Trapezoid,
            ball_vertices: 64,
            lipschitz_seed: 0,
            lipschitz_samples: 256,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(KappaError::InvalidArgument(format!("solver config: {what}")));
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad("h must be positive");
        }
        if !(self.picard_tol > 0.0) {
            return bad("picard_tol must be positive");
        }
        if self.max_picard_iters == 0 {
            return bad("max_picard_iters must be positive");
        }
        if !(self.hull_prune_eps >= 0.0) {
            return bad("hull_prune_eps must be nonnegative");
        }
        if self.ball_vertices < 3 {
            return bad("ball_vertices must be at least 3");
        }
        Ok(())
    }
}

/// Uniform time grid with `n` steps over `[t0, t1]`, the step no larger
/// than `h`.
fn grid(t0: f64, t1: f64, h: f64) -> Vec<f64> {
    let n = ((t1 - t0) / h - 1e-9).ceil().max(1.0) as usize;
    (0..=n).map(|k| t0 + (t1 - t0) * k as f64 / n as f64).collect()
}

/// Largest `rho(f(t,x), f(t,A)) / rho(x, A)` over seeded points `x` near
/// `A`: an empirical lower bound for the constant `C_A`.
pub fn lipschitz_ratio(f: &VectorField, a: &ClosedSet, t: f64, cfg: &SolverConfig) -> Result<f64> {
    let d = a
        .validate()?
        .ok_or(KappaError::EmptySet("Lipschitz ratio of the empty set"))?;
    f.validate(d)?;
    let image = set_image_with(f, t, a, cfg)?;
    let mut rng = random::rng(cfg.lipschitz_seed);
    let mut best: f64 = 0.0;
    for _ in 0..cfg.lipschitz_samples {
        let base = random::point_in(&mut rng, a);
        let x = base.axpy(
            rand::Rng::random_range(&mut rng, 0.05..2.0),
            &random::direction(&mut rng, d),
        );
        let r = rho_unchecked(&x, a);
        if r > 1e-9 {
            best = best.max(rho_unchecked(&f.eval(t, &x), &image) / r);
        }
    }
    Ok(best)
}

/// Constant used to size Picard segments: the sampled ratio, raised to the
/// spectral norm of `L` for affine fields (which bounds the true constant).
fn c_hat(f: &VectorField, sets: &[&ClosedSet], t: f64, cfg: &SolverConfig) -> Result<f64> {
    let mut c: f64 = 0.0;
    for s in sets {
        c = c.max(lipschitz_ratio(f, s, t, cfg)?);
        if let Some((l, _)) = f.as_affine(s.dim().unwrap_or(0)) {
            c = c.max(l.singular_values().max());
        }
    }
    Ok(c)
}

/// `f(t, A)` as a closed set, with the default configuration.
///
/// Affine fields map polytopes exactly (hull of mapped vertices) and send
/// Euclidean balls to balls when `L` is a scaled orthogonal matrix. Other
/// balls become inscribed polytopes first. For nonlinear fields the hull
/// of the mapped vertices is an approximation; see [`image_deficiency`].
pub fn set_image(f: &VectorField, t: f64, a: &ClosedSet) -> Result<ClosedSet> {
    let d = a.validate()?.ok_or(KappaError::EmptySet("image of the empty set"))?;
    f.validate(d)?;
    set_image_with(f, t, a, &SolverConfig::default())
}

fn set_image_with(f: &VectorField, t: f64, a: &ClosedSet, cfg: &SolverConfig) -> Result<ClosedSet> {
    let d = a.dim().ok_or(KappaError::EmptySet("image of the empty set"))?;
    if let (
        Some((l, _)),
        ClosedSet::Ball {
            center,
            radius,
            norm: NormKind::L2,
        },
    ) = (f.as_affine(d), a)
    {
        let gram = l.transpose() * &l;
        let s2 = gram[(0, 0)];
        if (&gram - DMatrix::identity(d, d) * s2).amax() <= 1e-12 * s2.max(1.0) {
            return Ok(ClosedSet::Ball {
                center: f.eval(t, center),
                radius: radius * s2.sqrt(),
                norm: NormKind::L2,
            });
        }
    }
    let vertices = match a {
        ClosedSet::Polytope { vertices } => vertices.clone(),
        ClosedSet::Ball { .. } => a.to_polytope(cfg.ball_vertices)?,
        _ => {
            return Err(KappaError::Unsupported(
                "set images are computed for polytopes and balls".into(),
            ))
        }
    };
    let mapped: Vec<Vector> = vertices.iter().map(|v| f.eval(t, v)).collect();
    Ok(ClosedSet::Polytope {
        vertices: prune_vertices(&mapped, cfg.hull_prune_eps),
    })
}

/// Largest distance from `f(t, x)` to the computed image, over seeded
/// points `x` of `A`: zero when the hull of mapped vertices contains the
/// true image on the sample.
pub fn image_deficiency(f: &VectorField, t: f64, a: &ClosedSet, samples: usize, seed: u64) -> Result<f64> {
    let image = set_image(f, t, a)?;
    let mut rng = random::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random::point_in(&mut rng, a);
        worst = worst.max(rho_unchecked(&f.eval(t, &x), &image));
    }
    Ok(worst)
}

/// Minkowski integral `int_{t1}^{t2} F(tau) dtau` as the weighted sum
/// `(+)_j w_j F(tau_j)` on a uniform grid with step at most `h`.
///
/// For convex `F(tau)` the weighted sum of scaled copies is itself convex,
/// so a constant `F` integrates to `(t2 - t1) F` exactly.
pub fn set_integral(
    f: impl Fn(f64) -> Result<ClosedSet>,
    t1: f64,
    t2: f64,
    h: f64,
    rule: Quadrature,
) -> Result<ClosedSet> {
    if !(t2 > t1) {
        return Err(KappaError::InvalidArgument("set integral needs t2 > t1".into()));
    }
    if !(h > 0.0) {
        return Err(KappaError::InvalidArgument("set integral needs h > 0".into()));
    }
    let ts = grid(t1, t2, h);
    let step = ts[1] - ts[0];
    let n = ts.len() - 1;
    let mut acc: Option<ClosedSet> = None;
    for (j, &tau) in ts.iter().enumerate() {
        let w = match rule {
            Quadrature::Left if j == n => continue,
            Quadrature::Left => step,
            Quadrature::Trapezoid if j == 0 || j == n => step / 2.0,
            Quadrature::Trapezoid => step,
        };
        let piece = f(tau)?;
        if !piece.is_convex() || matches!(piece, ClosedSet::Union { .. }) {
            return Err(KappaError::Unsupported("set integrals need convex integrands".into()));
        }
        let d = piece
            .validate()?
            .ok_or(KappaError::EmptySet("integrand of a set integral"))?;
        let scaled = piece.map_affine(w, &Vector::zeros(d));
        acc = Some(match acc {
            None => scaled,
            Some(s) => minkowski_sum_cl(&s, &scaled)?,
        });
    }
    Ok(acc.expect("grid has at least two nodes"))
}

/// Point trajectory on a time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vector>,
    /// Picard iterations summed over segments.
    pub iterations: usize,
    /// Largest final sup-node change over segments.
    pub residual: f64,
}

impl PointTrajectory {
    pub fn last(&self) -> &Vector {
        self.states.last().expect("nonempty trajectory")
    }
}

/// Solves `dx/dt = f(t, x)`, `x(0) = x0` on `[0, t_end]` by Picard
/// iteration `x_{k+1}(t) = x0 + int_0^t f(tau, x_k(tau)) dtau` with
/// trapezoid quadrature on the grid.
///
/// The interval is split into segments on which the iteration contracts
/// (length `0.5 / |L|` for affine fields); a segment that fails to converge
/// is halved, and the error reports the last residual once segments reach
/// a single step.
pub fn solve_point_ode(f: &VectorField, x0: &Vector, t_end: f64, cfg: &SolverConfig) -> Result<PointTrajectory> {
    cfg.validate()?;
    let d = x0.dim();
    f.validate(d)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(KappaError::InvalidArgument("t_end must be positive".into()));
    }
    let ts = grid(0.0, t_end, cfg.h);
    let lip = f.as_affine(d).map_or(1.0, |(l, _)| l.singular_values().max());
    let per_segment = if lip > 0.0 { 0.5 / lip } else { t_end };
    let mut nodes = ((per_segment / (ts[1] - ts[0])).floor() as usize).max(1);

    let mut states = vec![x0.clone()];
    let mut iterations = 0;
    let mut residual: f64 = 0.0;
    let mut start = 0;
    while start + 1 < ts.len() {
        let end = (start + nodes).min(ts.len() - 1);
        match picard_points(f, &ts[start..=end], &states[start], cfg) {
            Ok((seg, it, res)) => {
                states.extend(seg.into_iter().skip(1));
                iterations += it;
                residual = residual.max(res);
                start = end;
            }
            Err(_) if nodes > 1 => {
                nodes /= 2;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(PointTrajectory {
        times: ts,
        states,
        iterations,
        residual,
    })
}

fn picard_points(f: &VectorField, ts: &[f64], x0: &Vector, cfg: &SolverConfig) -> Result<(Vec<Vector>, usize, f64)> {
    let mut xs = vec![x0.clone(); ts.len()];
    let mut history = Vec::new();
    for it in 1..=cfg.max_picard_iters {
        let fs: Vec<Vector> = ts.iter().zip(&xs).map(|(&t, x)| f.eval(t, x)).collect();
        let mut next = Vec::with_capacity(xs.len());
        next.push(x0.clone());
        for k in 1..ts.len() {
            let h = ts[k] - ts[k - 1];
            let prev = &next[k - 1];
            next.push(prev.axpy(h / 2.0, &fs[k - 1]).axpy(h / 2.0, &fs[k]));
        }
        let change = next.iter().zip(&xs).map(|(a, b)| a.distance(b)).fold(0.0, f64::max);
        xs = next;
        history.push(change);
        if !change.is_finite() {
            break;
        }
        if change < cfg.picard_tol {
            return Ok((xs, it, change));
        }
    }
    Err(KappaError::NoConvergence {
        iterations: history.len(),
        residual: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

/// Closed sets on a strictly increasing time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetTrajectory {
    pub times: Vec<f64>,
    pub sets: Vec<ClosedSet>,
}

impl SetTrajectory {
    pub fn new(times: Vec<f64>, sets: Vec<ClosedSet>) -> Result<Self> {
        if times.len() != sets.len() || times.is_empty() {
            return Err(KappaError::InvalidArgument(
                "a trajectory needs one set per time".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(KappaError::InvalidArgument("trajectory times must increase".into()));
        }
        if sets.iter().any(ClosedSet::is_empty) {
            return Err(KappaError::EmptySet("trajectory node"));
        }
        Ok(SetTrajectory { times, sets })
    }

    pub fn constant(times: Vec<f64>, a: &ClosedSet) -> Self {
        let sets = vec![a.clone(); times.len()];
        SetTrajectory { times, sets }
    }

    pub fn last(&self) -> &ClosedSet {
        self.sets.last().expect("nonempty trajectory")
    }

    /// CSV with header `t,vertex_index,x1,..,xd`, one row per vertex per
    /// node; Euclidean balls are written as `ball_vertices`-gons.
    pub fn to_csv(&self, ball_vertices: usize) -> Result<String> {
        let d = self.sets[0].dim().unwrap_or(0);
        let mut out = String::from("t,vertex_index");
        for i in 1..=d {
            out.push_str(&format!(",x{i}"));
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.sets) {
            for (k, v) in s.to_polytope(ball_vertices)?.iter().enumerate() {
                out.push_str(&format!("{t},{k}"));
                for c in v.iter() {
                    out.push_str(&format!(",{c}"));
                }
                out.push('\n');
            }
        }
        Ok(out)
    }
}

/// One Picard map on the full grid of `traj`:
/// `t -> cl(A0 + int_{t_0}^t f(tau, traj(tau)) dtau)`.
pub fn picard_step_set(
    f: &VectorField,
    a0: &ClosedSet,
    traj: &SetTrajectory,
    cfg: &SolverConfig,
) -> Result<SetTrajectory> {
    let d = a0.validate()?.ok_or(KappaError::EmptySet("initial set"))?;
    f.validate(d)?;
    let images = traj
        .times
        .iter()
        .zip(&traj.sets)
        .map(|(&t, s)| set_image_with(f, t, s, cfg))
        .collect::<Result<Vec<_>>>()?;
    let o = Vector::zeros(d);
    let mut sets = Vec::with_capacity(images.len());
    sets.push(a0.clone());
    // running sum up to the previous node, full weight on interior nodes
    let mut acc = a0.clone();
    for k in 1..images.len() {
        let h = traj.times[k] - traj.times[k - 1];
        match cfg.quadrature {
            Quadrature::Left => {
                acc = minkowski_sum_cl(&acc, &images[k - 1].map_affine(h, &o))?;
                sets.push(acc.clone());
            }
            Quadrature::Trapezoid => {
                acc = minkowski_sum_cl(&acc, &images[k - 1].map_affine(h / 2.0, &o))?;
                sets.push(minkowski_sum_cl(&acc, &images[k].map_affine(h / 2.0, &o))?);
                acc = minkowski_sum_cl(&acc, &images[k].map_affine(h / 2.0, &o))?;
            }
        }
    }
    Ok(SetTrajectory {
        times: traj.times.clone(),
        sets,
    })
}

/// Starting trajectory of the set Picard iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialGuess {
    /// `A(t) = A0` everywhere.
    Constant,
    /// `A(t) = s A0` everywhere.
    Inflated(f64),
}

/// Diagnostics of one Picard segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub t_start: f64,
    pub t_end: f64,
    pub iterations: usize,
    /// Sup-node `metric_D` change after each iteration.
    pub residuals: Vec<f64>,
    pub contraction: Contraction,
}

/// Converged set trajectory with per-segment diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetSolution {
    pub trajectory: SetTrajectory,
    /// Constant used to size the segments so that `c_hat * length <= 1/2`.
    pub c_hat: f64,
    pub segments: Vec<SegmentReport>,
    /// Set when `f(t, 0) != 0`: the fixed-point hypothesis on invariant
    /// subspaces then fails for `{0}`, and the solution is still reported.
    pub hypothesis_warning: Option<String>,
}

/// Solves the set equation from the constant trajectory `A0`.
pub fn solve_set_ode(f: &VectorField, a0: &ClosedSet, t_end: f64, cfg: &SolverConfig) -> Result<SetSolution> {
    solve_set_ode_from(f, a0, t_end, cfg, InitialGuess::Constant)
}

/// Solves the set equation segment by segment: each segment of length
/// about `0.5 / c_hat` is iterated with [`picard_step_set`] until the
/// largest node change in `metric_D` drops below `picard_tol`, and its last
/// set starts the next segment.
pub fn solve_set_ode_from(
    f: &VectorField,
    a0: &ClosedSet,
    t_end: f64,
    cfg: &SolverConfig,
    guess: InitialGuess,
) -> Result<SetSolution> {
    cfg.validate()?;
    let d = a0.validate()?.ok_or(KappaError::EmptySet("initial set"))?;
    f.validate(d)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(KappaError::InvalidArgument("t_end must be positive".into()));
    }
    if !a0.is_bounded() || matches!(a0, ClosedSet::Union { .. }) {
        return Err(KappaError::Unsupported(
            "the set solver needs a bounded convex A0".into(),
        ));
    }
    let c = c_hat(f, &[a0], 0.0, cfg)?;
    if !c.is_finite() {
        return Err(KappaError::InvalidArgument(
            "the field has no finite Lipschitz estimate".into(),
        ));
    }
    let ts = grid(0.0, t_end, cfg.h);
    let dt = ts[1] - ts[0];
    let nodes = if c > 0.0 {
        ((0.5 / c / dt).floor() as usize).max(1)
    } else {
        ts.len() - 1
    };
    let zero = f.eval(0.0, &Vector::zeros(d));
    let hypothesis_warning = (zero.norm() > 0.0).then(|| format!("f(0, 0) = {zero:?} is nonzero"));

    let mut sets = vec![a0.clone()];
    let mut segments = Vec::new();
    let mut start = 0;
    while start + 1 < ts.len() {
        let end = (start + nodes).min(ts.len() - 1);
        let times = ts[start..=end].to_vec();
        let a_start = sets[start].clone();
        let first = match guess {
            InitialGuess::Constant => a_start.clone(),
            InitialGuess::Inflated(s) => a_start.map_affine(s, &Vector::zeros(d)),
        };
        let mut traj = SetTrajectory::constant(times.clone(), &first);
        let mut residuals = Vec::new();
        loop {
            let next = picard_step_set(f, &a_start, &traj, cfg)?;
            let mut change: f64 = 0.0;
            for (p, q) in next.sets.iter().zip(&traj.sets) {
                change = change.max(metric_d(p, q)?.value());
            }
            traj = next;
            residuals.push(change);
            if change < cfg.picard_tol {
                break;
            }
            if residuals.len() >= cfg.max_picard_iters || !change.is_finite() {
                return Err(KappaError::NoConvergence {
                    iterations: residuals.len(),
                    residual: change,
                    history: residuals,
                });
            }
        }
        let contraction = contraction_with(f, &a_start, traj.last(), times[0], *times.last().unwrap(), cfg, c)?;
        segments.push(SegmentReport {
            t_start: times[0],
            t_end: *times.last().unwrap(),
            iterations: residuals.len(),
            residuals,
            contraction,
        });
        sets.extend(traj.sets.into_iter().skip(1));
        start = end;
    }
    Ok(SetSolution {
        trajectory: SetTrajectory { times: ts, sets },
        c_hat: c,
        segments,
        hypothesis_warning,
    })
}

/// `metric_D` of the integrals of `f` over two constant set maps, relative
/// to `metric_D(A1, A2)`, next to the bound `c_hat (t2 - t1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contraction {
    pub ratio: f64,
    pub bound: f64,
}

/// Contraction of the integral map between `A1` and `A2` over `[t1, t2]`;
/// the ratio is 0 when `metric_D(A1, A2) = 0`.
pub fn contraction_check(
    f: &VectorField,
    a1: &ClosedSet,
    a2: &ClosedSet,
    t1: f64,
    t2: f64,
    cfg: &SolverConfig,
) -> Result<Contraction> {
    cfg.validate()?;
    let d = a1
        .validate()?
        .ok_or(KappaError::EmptySet("contraction check operand"))?;
    a2.validate_dim(d)?;
    f.validate(d)?;
    let c = c_hat(f, &[a1, a2], t1, cfg)?;
    contraction_with(f, a1, a2, t1, t2, cfg, c)
}

fn contraction_with(
    f: &VectorField,
    a1: &ClosedSet,
    a2: &ClosedSet,
    t1: f64,
    t2: f64,
    cfg: &SolverConfig,
    c: f64,
) -> Result<Contraction> {
    let bound = c * (t2 - t1);
    let base = metric_d(a1, a2)?.value();
    if base == 0.0 {
        return Ok(Contraction { ratio: 0.0, bound });
    }
    let i1 = set_integral(|t| set_image_with(f, t, a1, cfg), t1, t2, cfg.h, cfg.quadrature)?;
    let i2 = set_integral(|t| set_image_with(f, t, a2, cfg), t1, t2, cfg.h, cfg.quadrature)?;
    Ok(Contraction {
        ratio: metric_d(&i1, &i2)?.value() / base,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(a: f64, b: f64) -> VectorField {
        VectorField::affine(vec![vec![a, 0.0], vec![0.0, b]], None)
    }

    fn square(h: f64) -> ClosedSet {
        ClosedSet::boxed(&[-h, -h], &[h, h])
    }

    #[test]
    fn images() {
        let unit = ClosedSet::boxed(&[0.0, 0.0], &[1.0, 1.0]);
        let img = set_image(&diag(2.0, 3.0), 0.0, &unit).unwrap();
        assert!(
            metric_d(&img, &ClosedSet::boxed(&[0.0, 0.0], &[2.0, 3.0]))
                .unwrap()
                .value()
                < 1e-15
        );
        let id = set_image(&VectorField::Builtin(Builtin::Identity), 0.0, &unit).unwrap();
        assert_eq!(metric_d(&id, &unit).unwrap().value(), 0.0);
        let rot = set_image(
            &VectorField::Builtin(Builtin::Rotation),
            0.0,
            &ClosedSet::ball([1.0, 0.0], 1.0),
        )
        .unwrap();
        assert_eq!(rot, ClosedSet::ball([0.0, 1.0], 1.0));
        let shear = VectorField::Builtin(Builtin::QuadraticShear);
        assert!(image_deficiency(&shear, 0.0, &unit, 500, 1).unwrap() > 0.0);
        assert!(image_deficiency(&diag(2.0, 3.0), 0.0, &unit, 200, 1).unwrap() < 1e-12);
        assert!(set_image(&shear, 0.0, &ClosedSet::span(&[Vector::from([1.0, 0.0])], 2)).is_err());
    }

    #[test]
    fn lipschitz_ratio_examples() {
        let cfg = SolverConfig::default();
        let a = ClosedSet::boxed(&[-1.0, -0.5], &[1.0, 0.5]);
        let two = VectorField::affine(vec![vec![2.0, 0.0], vec![0.0, 2.0]], None);
        assert!((lipschitz_ratio(&two, &a, 0.0, &cfg).unwrap() - 2.0).abs() < 1e-12);
        let id = VectorField::Builtin(Builtin::Identity);
        assert!((lipschitz_ratio(&id, &a, 0.0, &cfg).unwrap() - 1.0).abs() < 1e-12);
        let rot = VectorField::Builtin(Builtin::Rotation);
        let r = lipschitz_ratio(&rot, &ClosedSet::ball([0.0, 0.0], 1.0), 0.0, &cfg).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integrals() {
        let unit = ClosedSet::boxed(&[0.0, 0.0], &[1.0, 1.0]);
        for rule in [Quadrature::Left, Quadrature::Trapezoid] {
            let s = set_integral(|_| Ok(unit.clone()), 0.0, 1.0, 0.01, rule).unwrap();
            assert!(metric_d(&s, &unit).unwrap().value() < 1e-12);
        }
        let pt = set_integral(
            |t| Ok(ClosedSet::point([t, 1.0])),
            0.0,
            2.0,
            0.01,
            Quadrature::Trapezoid,
        )
        .unwrap();
        let v = pt.as_polytope_exact().unwrap();
        assert!((v[0][0] - 2.0).abs() < 1e-12 && (v[0][1] - 2.0).abs() < 1e-12);
        let b = set_integral(
            |t| Ok(ClosedSet::ball([0.0, 0.0], t)),
            0.0,
            1.0,
            0.01,
            Quadrature::Trapezoid,
        )
        .unwrap();
        let ClosedSet::Ball { radius, .. } = b else { panic!() };
        assert!((radius - 0.5).abs() < 1e-12);
        let left = set_integral(|t| Ok(ClosedSet::ball([0.0, 0.0], t)), 0.0, 1.0, 0.01, Quadrature::Left).unwrap();
        let ClosedSet::Ball { radius, .. } = left else { panic!() };
        assert!((radius - 0.5).abs() < 1e-2);
        assert!(set_integral(|_| Ok(ClosedSet::Empty), 0.0, 1.0, 0.1, Quadrature::Left).is_err());
    }

    #[test]
    fn point_examples() {
        let cfg = SolverConfig::default();
        let grow = VectorField::affine(vec![vec![1.0]], None);
        let tr = solve_point_ode(&grow, &Vector::from([1.0]), 1.0, &cfg).unwrap();
        assert!((tr.last()[0] - std::f64::consts::E).abs() < 1e-6);
        let zero = VectorField::Builtin(Builtin::Zero);
        let tr = solve_point_ode(&zero, &Vector::from([3.0, -1.0]), 2.0, &cfg).unwrap();
        assert!(tr.states.iter().all(|s| s == &Vector::from([3.0, -1.0])));
        let rot = VectorField::Builtin(Builtin::Rotation);
        let tr = solve_point_ode(&rot, &Vector::from([1.0, 0.0]), std::f64::consts::FRAC_PI_2, &cfg).unwrap();
        assert!(tr.last().distance(&Vector::from([0.0, 1.0])) < 1e-6);
    }

    #[test]
    fn point_non_convergence_is_reported() {
        let cfg = SolverConfig {
            max_picard_iters: 2,
            h: 0.5,
            ..SolverConfig::default()
        };
        let f = VectorField::custom(|_, x| Vector::from([x[0] * x[0]]));
        let err = solve_point_ode(&f, &Vector::from([1.0]), 1.0, &cfg).unwrap_err();
        assert!(matches!(err, KappaError::NoConvergence { .. }));
    }

    #[test]
    fn picard_step_examples() {
        let cfg = SolverConfig::default();
        let a0 = square(1.0);
        let times: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
        let traj = SetTrajectory::constant(times, &a0);
        let zero = picard_step_set(&VectorField::Builtin(Builtin::Zero), &a0, &traj, &cfg).unwrap();
        assert!(zero.sets.iter().all(|s| metric_d(s, &a0).unwrap().value() == 0.0));
        let id = picard_step_set(&VectorField::Builtin(Builtin::Identity), &a0, &traj, &cfg).unwrap();
        assert!(metric_d(id.last(), &square(2.0)).unwrap().value() < 1e-12);
    }

    #[test]
    fn set_solver_examples() {
        let cfg = SolverConfig::default();
        let zero = solve_set_ode(&VectorField::Builtin(Builtin::Zero), &square(1.0), 1.0, &cfg).unwrap();
        assert!(zero
            .trajectory
            .sets
            .iter()
            .all(|s| metric_d(s, &square(1.0)).unwrap().value() == 0.0));
        let e = std::f64::consts::E;
        let sol = solve_set_ode(&diag(1.0, 2.0), &square(1.0), 1.0, &cfg).unwrap();
        let want = ClosedSet::boxed(&[-e, -e * e], &[e, e * e]);
        assert!(metric_d(sol.trajectory.last(), &want).unwrap().value() < 1e-2);
        for s in &sol.segments {
            assert!(s.contraction.ratio <= s.contraction.bound + 1e-6);
        }
        let ball = solve_set_ode(
            &VectorField::Builtin(Builtin::Identity),
            &ClosedSet::ball([0.0, 0.0], 1.0),
            1.0,
            &cfg,
        )
        .unwrap();
        assert!(
            metric_d(ball.trajectory.last(), &ClosedSet::ball([0.0, 0.0], e))
                .unwrap()
                .value()
                < 1e-2
        );
    }

    #[test]
    fn contraction_examples() {
        let cfg = SolverConfig::default();
        let two = VectorField::affine(vec![vec![2.0, 0.0], vec![0.0, 2.0]], None);
        let a1 = square(1.0);
        let a2 = ClosedSet::boxed(&[-0.5, -2.0], &[1.5, 1.0]);
        let c = contraction_check(&two, &a1, &a1, 0.0, 0.1, &cfg).unwrap();
        assert_eq!(c.ratio, 0.0);
        let c = contraction_check(&two, &a1, &a2, 0.0, 0.1, &cfg).unwrap();
        assert!((c.ratio - 0.2).abs() < 1e-12, "{c:?}");
        assert!(c.ratio <= c.bound + 1e-6);
    }

    #[test]
    fn field_json() {
        let f: VectorField = serde_json::from_str(r#"{"affine":{"L":[[0,-1],[1,0]],"b":[0,1]}}"#).unwrap();
        assert_eq!(f.eval(0.0, &Vector::from([1.0, 0.0])), Vector::from([0.0, 2.0]));
        let g: VectorField = serde_json::from_str(r#"{"builtin":"rotation"}"#).unwrap();
        assert_eq!(g.eval(0.0, &Vector::from([1.0, 0.0])), Vector::from([0.0, 1.0]));
        let csv = SetTrajectory::constant(vec![0.0, 0.5], &square(1.0)).to_csv(8).unwrap();
        assert!(csv.starts_with("t,vertex_index,x1,x2\n"));
        assert_eq!(csv.lines().count(), 9);
    }
}
