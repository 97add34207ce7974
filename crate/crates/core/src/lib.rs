//! Radial self-similar solutions of `β(w)_t = Δw`, `β(r) = 2r - r⁺`.
//!
//! Profiles `w(x,t) = (-t)^{α/2} f(|x|/√(-t))` are built by shooting from the
//! origin and from infinity; matching the two gives the eigen-homogeneities
//! `α^±_k`. Independent oracles (weighted Sturm-Liouville eigenvalues, the
//! Appell transform, a finite-difference PDE run) check the results.

pub mod appell;
pub mod error;
pub mod exponents;
pub mod heat_polynomial;
pub mod ode;
pub mod pde_verify;
pub mod profile_ode;
pub mod quadrature;
pub mod report;
pub mod roots;
pub mod shooting;
pub mod spectral;
pub mod verify;

pub mod cli;

pub use error::{Error, Result};

pub use profile_ode::{Branch, ProblemParams, SelfSimilarProfile, Sign, SolverSettings, TailClass, TailKind};
pub use exponents::{ExponentRecord, ExponentTable};
pub use shooting::{InfinityShot, Side, ZeroMapSample};
