//! Spectra, effective couplings and gain/loss thresholds for tight-binding
//! lattices driven by a periodic or quasi-periodic potential gradient.
//!
//! The crate is organised bottom-up:
//!
//! - [`special`]: integer-order Bessel functions and Jacobi-Anger sums.
//! - [`lattice`]: the modulated lattice model, `f(z)`, `η(z)` and `H(z)`.
//! - [`floquet`]: high-frequency effective couplings (closed forms and a
//!   brute-force averaging oracle) and the effective Hamiltonian.
//! - [`spectra`]: dense complex eigensolver, closed-form dimer/trimer/ring
//!   spectra, reality classification and threshold search.
//! - [`propagation`]: exact `z`-dependent dynamics and monodromy spectra.
//! - [`scan`]: configuration parsing and scenario drivers with CSV output.

pub mod error;
pub mod floquet;
pub mod lattice;
pub mod matrix;
pub mod propagation;
pub mod scan;
pub mod special;
pub mod spectra;

pub use error::{Error, Result};
pub use floquet::{Beta, EffectiveCoupling, RationalBeta};
pub use lattice::{Boundary, LatticeSpec, ModulationSpec, ModulationTone};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use spectra::SpectrumResult;
