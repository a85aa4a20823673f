//! Steady axisymmetric incompressible Navier-Stokes flow driven by a
//! rotating cylinder standing on a plane.
//!
//! The meridional half-plane `sigma <= r <= R`, `0 <= z <= L` is discretized
//! on a uniform staggered mesh; the coupled `(u, v, w, p)` equations are
//! solved by Newton's method from a time-marched initial guess.

pub mod bc;
pub mod diag;
pub mod driver;
pub mod error;
pub mod grid;
pub mod hopf;
pub mod linsolve;
pub mod march;
pub mod mms;
pub mod newton;
pub mod ops;
pub mod scalar;
pub mod stokes;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision instantiations of the generic types.
pub type DomainSpec = grid::DomainSpec<f64>;
pub type StaggeredGrid = grid::StaggeredGrid<f64>;
pub type RotationProfile = bc::RotationProfile<f64>;
pub type BoundarySpec = bc::BoundarySpec<f64>;
pub type BoundaryValues = bc::BoundaryValues<f64>;
pub type FieldSet = ops::FieldSet<f64>;
pub type PhysParams = ops::PhysParams<f64>;
pub type SparseSystem = linsolve::SparseSystem<f64>;
pub type HopfParams = hopf::HopfParams<f64>;
pub type SwirlStokesProblem = stokes::SwirlStokesProblem<f64>;
pub type StokesSolution = stokes::StokesSolution<f64>;
pub type NewtonConfig = newton::NewtonConfig<f64>;
pub type SteadySolution = newton::SteadySolution<f64>;
pub type MarchConfig = march::MarchConfig<f64>;
pub type SolveConfig = driver::SolveConfig<f64>;
pub type CaseSolution = driver::CaseSolution<f64>;
pub type DiagnosticsReport = diag::DiagnosticsReport<f64>;
pub type ManufacturedCase = mms::ManufacturedCase<f64>;
