//! Gibbs measures of the three-state SOS model on a Cayley tree.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the parameters, the recursion kernel `f`, the general
//!   boundary-law map `F` and the four-dimensional operator `W` together
//!   with its reduction to the invariant set `h1 = l1 = 0`.
//! * [`criticals`] is the closed-form algebra of the `b = 0` branch
//!   (`zeta`, `theta_c`, the tangency quadratic, `eta`, `c*`).
//! * [`solvers`] finds every fixed point of the reduced systems by a
//!   sign-change scan followed by bisection.
//! * [`classifier`] maps a parameter point to its solution-count regime.
//! * [`tree`] is exact enumeration on small balls of the tree, used as
//!   ground truth for the compatibility of finite-volume distributions.

pub mod classifier;
pub mod criticals;
pub mod error;
pub mod model;
pub mod solvers;
pub mod tree;

pub use classifier::{
    check_th1_condition, classify_point, count_n, count_n_with, family_tag, FamilyTag, Regime, RegimeReport,
    Th1Check,
};
pub use criticals::{
    c_star_bounds, discriminant, eta_values, quadratic_roots, theta_critical, zeta_of, CStar,
    CriticalSet, PrefactorConvention,
};
pub use error::{Result, SosError};
pub use model::{
    inflection_point, kernel_f, kernel_f_derivative, kernel_f_second, map_f, operator_w,
    reduced_rhs, BranchPattern, FieldVector, ModelParams, ReducedField,
};
pub use solvers::{
    bracketed_roots, g_derivative, g_of, phi_of, psi_derivative, psi_of, solve_b_nonzero,
    solve_b_zero, solve_non_ti, solve_periodic, solve_ti, HStarChoice, Root, RootFindConfig, RootTag,
    SolutionReport, Stability,
};
pub use tree::{
    assign_fields, build_tree, check_compatibility, exact_mu_n, hamiltonian, root_marginal,
    ExactDistribution, FieldAssignment, FiniteTree, Label, RootSplit,
};
