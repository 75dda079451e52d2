//! Point-to-set kappa-norms over R^d and the machinery built on them.
//!
//! - [`kappa`]: the Euclidean kappa-norm `rho(x, C)`, the directed distance
//!   `rho_bar`, the metric `D`, Minkowski sums and related set operations.
//! - [`axioms`]: seeded property suite for (N1)-(N8).
//! - [`dual`]: the kappa-form, polars, annihilators and sampled dual norms.
//! - [`operator`]: the conditional kappa-norm on invertible operators.
//! - [`flow`]: Picard solvers for point and set-valued ODEs.
//! - [`order`]: interval orders, monotone sup-norm projection and
//!   slope-constrained fits.
//! - [`geometry`]: minimum-norm points, planar hulls and Minkowski sums.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod axioms;
pub mod dual;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod kappa;
pub mod operator;
pub mod order;
pub mod random;
pub mod report;
pub mod sets;
pub mod value;
pub mod vector;

pub use axioms::{axiom_suite, Euclidean, KappaNorm, SuiteConfig};
pub use dual::{
    annihilator, dual_kappa_norm_sampled, duality_axiom_suite, equivalence_constants, equivalence_constants_with,
    kappa_form, polar, rho_tilde_sampled, EquivalenceReport, Probe, TestFamily,
};
pub use error::{KappaError, Result};
pub use flow::{
    contraction_check, image_deficiency, lipschitz_ratio, picard_step_set, set_image, set_integral, solve_point_ode,
    solve_set_ode, solve_set_ode_from, Builtin, Contraction, InitialGuess, PointTrajectory, Quadrature, SetSolution,
    SetTrajectory, SolverConfig, VectorField,
};
pub use kappa::{
    affine_transform, dilation_bracket, extend_to_singleton, metric_d, metric_d_estimate, minkowski_sum_cl,
    perturb_bound, quotient_project, rho, rho_bar, rho_bar_estimate, seminorm_sup, SeminormFamily, SupEstimate,
    SupMethod,
};
pub use operator::{
    operator_axiom_suite, rho_L_bracket, rho_L_sampled, OpBracket, OpProbe, Operator, OperatorSet, ProbeFamily,
};
pub use order::{
    build_constraint_set, check_interval_order, cone_feasibility, constrained_fit, find_representation,
    monotone_project_sup, verify_representation, ChainConstraint, ChainFamily, ConstraintSet, Feasibility, Fit,
    FunctionOnT, IntervalOrder, Projection, Representation, Verification,
};
pub use report::{AxiomEntry, AxiomReport};
pub use sets::ClosedSet;
pub use value::KappaValue;
pub use vector::{NormKind, Vector};
