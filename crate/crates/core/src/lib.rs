//! Numerical laboratory for the principal eigenvalue of coupled bulk-surface
//! cooperative systems.
//!
//! The object of study is the eigenvalue `λ_{c_i,c_b}(Ω)` of the system
//!
//! ```text
//!   -Δu = (λ - c_i) u        in Ω,
//!   -Δ_Σ v = (λ + c_b - 1) v + u   on Σ = ∂Ω,
//!   ∂_ν u + u = v            on Σ,
//! ```
//!
//! equivalently the minimum of the Rayleigh quotient
//!
//! ```text
//!   ( ∫_Ω |∇u|² + c_i ∫_Ω u² + ∫_Σ |∇_Σ v|² + ∫_Σ (u-v)² - c_b ∫_Σ v² )
//!   / ( ∫_Ω u² + ∫_Σ v² ).
//! ```
//!
//! The crate provides:
//! * [`radial`] — the principal eigencouple on balls via ODE shooting,
//! * [`hessian`] — the diagonalized second-order shape derivative at the ball,
//! * [`symmetrize`] — cap symmetrization on circles/disks and concentration
//!   comparison,
//! * [`disk`] — polar-grid Poisson and eigenvalue solvers on the unit disk,
//! * [`fem`] — a P1 finite-element solver with boundary Laplace-Beltrami
//!   coupling on polygonal and perturbed-disk domains,
//! * [`linalg`] — the shared sparse symmetric kernels.
//!
//! All types are immutable after construction and every operation is a pure
//! function of its inputs, so independent solves can run concurrently;
//! scans over parameter lists keep their input ordering.

pub mod disk;
pub mod fem;
pub mod hessian;
pub mod linalg;
pub mod radial;
pub mod rng;
pub mod symmetrize;

pub use disk::{CoupledSolveResult, DiskGrid, NormRecord, TalentiProblem, TalentiReport};
pub use fem::{CoupledOperator, Mesh, NonexistenceRow};
pub use hessian::{BallCoefficients, HessianRow, RegimeReport, RegimeVerdict};
pub use linalg::{EigenPair, SparseSym};
pub use radial::BallEigen;
pub use symmetrize::{CircleField, ComparisonReport, PolarField};
