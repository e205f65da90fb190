//! Numerics for the particle in a box under canonical and affine
//! quantization.
//!
//! * [`piecewise`]: weak derivatives of piecewise-smooth functions, showing
//!   that the zero-extended canonical eigenfunctions have Dirac deltas in
//!   their second derivative.
//! * [`analytic_box`]: closed-form canonical spectrum.
//! * [`potentials`]: the affine box, half-harmonic oscillator and anti-box
//!   potentials with their inverse-square wall data.
//! * [`rayleigh_ritz`] and [`shooting`]: two independent solvers for the
//!   affine box spectrum, which has no closed form.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod analytic_box;
pub mod eigen;
pub mod error;
pub mod piecewise;
pub mod potentials;
pub mod quadrature;
pub mod rayleigh_ritz;
pub mod shooting;
pub mod stats;

pub use analytic_box::{BoxGeometry, CqLevel, TrigKind, TrigMode};
pub use eigen::{GeneralizedEigProblem, GeneralizedEigen};
pub use error::{BracketSide, Error, Result};
pub use piecewise::{DeltaTerm, Piece, PiecewiseSmooth, Side, WeakDerivative};
pub use potentials::{ModelSpec, Potential, SingularEndpoint};
pub use quadrature::{PolyFamily, QuadratureRule};
pub use rayleigh_ritz::{BasisSpec, ConvergenceTable, LevelDiagnostics, Parity, SpectrumResult};

pub use shooting::{MatchResult, Shooter, ShootingGrid};
