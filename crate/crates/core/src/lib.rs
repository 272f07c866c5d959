//! Symbolic-numeric variational calculus on jet bundles.
//!
//! The crate decides whether a system of ODEs/PDEs — given as a source form
//! in jet coordinates — is locally variational (generalized Helmholtz
//! conditions), constructs its Vainberg-Tonti Lagrangian, and produces the
//! canonical variational completion τ = E(λ_ε) − ε. A numeric oracle layer
//! evaluates the same operators by finite differences and quadrature, and a
//! set of general-relativity fixtures reproduces the classical Einstein and
//! electromagnetic energy-momentum results at desk scale.

pub mod expr;
pub mod gr;
pub mod jet;
pub mod numjet;
pub mod parse;
pub mod render;
pub mod report;
pub mod varcalc;

pub use expr::{rat, AtomDecl, Expr, ExprError, Factor, Monomial, Rat};
pub use jet::{FieldFamily, JetSpec, JetVar, MultiIndex, ParamDecl, SpecError, SpecRef};
pub use numjet::{
    eval, numeric_euler_lagrange, numeric_euler_lagrange_cfg, numeric_helmholtz, numeric_partial,
    numeric_total_derivative, numeric_vt_lagrangian, numeric_vt_quadrature, sample_jet_point,
    DensityFn, ElConfig, ElValues, FdConfig, GaussLegendre, HelmholtzValues, JetPoint, NumError,
    SourceDensity,
};
pub use varcalc::{
    canonical_completion, completion_via_helmholtz, euler_lagrange, helmholtz, reduce_order,
    vt_lagrangian, HelmholtzTensor, Lagrangian, SourceForm, VarCalcError,
};
