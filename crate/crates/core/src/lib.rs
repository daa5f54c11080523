//! Numerical harmonic analysis on periodic grids.
//!
//! The crate samples functions on the torus `[0, L)^d`, transforms them with
//! an exactly unitary discrete Fourier transform, and builds the classical
//! constructive objects on top: Fourier multipliers (Hilbert and Riesz
//! transforms, heat and wave propagators, Bochner–Riesz means), dyadic
//! Whitney and Calderón–Zygmund decompositions, Hardy–Littlewood and sharp
//! maximal functions, and numerical certificates for interpolation
//! inequalities. Every check produces a [`CheckReport`].

pub mod error;
pub mod fourier;
pub mod geometry;
pub mod grid;
pub mod interp;
pub mod io;
pub mod maximal;
pub mod operators;
pub mod pde;
pub mod report;
pub mod rng;
pub mod suite;

pub use error::{Error, Result};
pub use grid::{generate, AxisBox, GeneratorSpec, Grid, SampledField, Side};
pub use operators::Symbol;
pub use report::{CheckReport, GridMeta};
pub use suite::{Format, Parallelism, RunConfig, SuiteName, SuiteOutput};
pub use num_complex::Complex64;
