//! Dirac constraint analysis, reduced phase spaces, and canonical
//! quantization for two singular Lagrangian systems on a 4-dimensional
//! phase space.
//!
//! The crate is organized in layers:
//!
//! - [`chart`], [`poly`], [`rational`] — exact symbolic algebra over the
//!   canonical variables (q1, q2, p1, p2) with the radius parameter R, plus
//!   the canonical Poisson bracket;
//! - [`constraint`] — the constraint-consistency algorithm: secondary
//!   constraints, Lagrange multipliers, constraint matrix, classification,
//!   and Dirac brackets;
//! - [`model`] — the two model systems, their branch-resolved reduction to a
//!   2-dimensional phase space, reduced Hamiltonians, and exact solutions;
//! - [`dynamics`] — RK4 integration of the reduced flow and of the full-space
//!   Dirac-bracket flow, with conservation monitors and cross-validation;
//! - [`quantum`] — operator matrices in number and grid bases, the physical
//!   (positive) subspace projection, and spectra;
//! - [`verify`] — the end-to-end check suite used by the `verify` CLI
//!   subcommand and the acceptance test target.

pub mod chart;
pub mod constraint;
pub mod dynamics;
pub mod model;
pub mod poly;
pub mod quantum;
pub mod rational;
pub mod verify;

pub use chart::{CanonicalChart, Var};
pub use constraint::{
    dirac_bracket, invert_c_matrix, run_dirac_algorithm, vanishes_on_surface, Classification,
    Constraint, ConstraintChainReport, ConstraintMatrix, EngineError, Stage, SurfaceSampler,
    TotalHamiltonian,
};
pub use dynamics::{
    compare_flows, integrate_full, integrate_reduced, FullSpaceFlow, IntegratorConfig,
    TrajectoryRecord,
};
pub use model::{
    build_model, reduce, BranchChoice, ModelError, ModelId, ModelParams, PhasePoint2D,
    ReducedSystem, SingularLagrangianModel,
};
pub use poly::{Coeff, Monomial, Polynomial};
pub use quantum::{
    build_operators, commutator_defect, constraint_operator, grid_convergence_study,
    physical_spectrum, BasisSpec, OperatorMatrix, QuantError, QuantizationParams, SpectralReport,
};
pub use rational::{poisson_bracket, AlgebraError, PhasePoint4, RationalObservable};
