//! Finite groupoids with Haar weight systems, the correspondences between
//! them, and the verification machinery for the laws that structure obeys:
//! composition with its cocycle data, associators and unitors with exact
//! Radon–Nikodym witnesses, pentagon/triangle coherence, and the passage to
//! finite-dimensional Hilbert bimodules over convolution algebras.
//!
//! All groupoid- and measure-level arithmetic is exact rational; floating
//! point enters only in the Hilbert-module layer where square roots are
//! unavoidable, under an explicit tolerance.

pub mod action;
pub mod bispace;
pub mod cohomology;
pub mod error;
pub mod gen;
pub mod groupoid;
pub mod instance;
pub mod measures;
pub mod rat;
pub mod correspondence;
pub mod cstar;
pub mod report;

pub use error::{Error, Result};
pub use rat::Rat;
