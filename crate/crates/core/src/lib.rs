//! Contour-integral solver for half-line boundary-value problems of
//! first-order linear constant-coefficient evolution systems
//! `Q_t + Lambda(-i d/dx) Q = 0`.
//!
//! The pipeline: symbol matrix and its characteristic polynomial; dispersion
//! branches and their branch points; dispersion-relation symmetries; spectral
//! transforms of initial and boundary data; the inaccessible region and its
//! boundary contour; elimination of unknown boundary transforms through the
//! global relations; and evaluation of the resulting contour-integral solution
//! representation, with independent finite-difference and image-extension
//! oracles for verification.

pub mod contour;
pub mod dispersion;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod polynomial;
pub mod quad;
pub mod solvers;
pub mod symbol;
pub mod symmetry;
pub mod transforms;

pub use contour::{
    boundary_path, decay_certificate, in_d_plus, shifted_path, CertificateReport, ContourPath,
    Region, Segment, Side,
};
pub use dispersion::{BranchPoint, BranchPointKind, BranchSet};
pub use error::{Result, UtmError};
pub use oracle::{fd_reference, images_reference, pde_residual, FDConfig};
pub use polynomial::{BivariatePoly, PolynomialScalar};
pub use quad::QuadValue;
pub use solvers::{
    build_global_relations, count_required_bcs, dalembert_eval, generic_solve, solve_fn_neumann,
    solve_kg_dirichlet, solve_wave_family, BVProblem, BcReport, BoundaryKind, BoundarySpec,
    ComponentBcInfo, DalembertKind, GlobalRelationRow, GlobalRelationSystem, Grid, PointResult,
    RowValidity, SolutionField, TruncationMode,
};
pub use symbol::{Diagonalizer, PolynomialMatrix, SystemKind, XOperator};
pub use symmetry::{Symmetry, SymmetryForm, SymmetrySet};
pub use transforms::{
    half_line_ft, inverse_contour, time_transform, DecayBound, DomainTag, HalfLineFunction,
    PolyExpTerm, SpectralFunction, TimeHint, TimeSignal,
};
