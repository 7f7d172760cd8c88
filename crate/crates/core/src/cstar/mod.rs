//! Finite-dimensional Hilbert bimodules over convolution algebras and the
//! module-level images of composites and 2-arrows.
//!
//! Square roots of modular functions, cochains and derivatives force
//! floating point here; every identity in this layer is certified to an
//! absolute tolerance (default `1e-9`), while the layers below stay exact.

pub mod algebra;
pub mod functor;
pub mod linalg;
pub mod module;
pub mod tensor;

pub use algebra::ConvolutionAlgebra;
pub use functor::{
    check_functor_pentagon, check_identity_coherence, nat_transform, unitary_from_iso, ModuleMap,
    NatTransform,
};
pub use linalg::C;
pub use module::{build_module, HilbertBimodule};
pub use tensor::{interior_tensor, TensorModule};

/// Default absolute tolerance for the floating-point layer.
pub const DEFAULT_TOL: f64 = 1e-9;
