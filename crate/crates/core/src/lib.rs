//! Computations with nilpotent-parameter deformations of lattices in
//! SL(2,R) and of their automorphic forms.

pub mod algebra;
pub mod config;
pub mod eisenstein;
pub mod dims;
pub mod error;
pub mod forms;
pub mod io;
pub mod jet;
pub mod lattice;
pub mod linalg;
pub mod mobius;
pub mod oracle;
pub mod pipeline;
pub mod scalar;
pub mod sl2;
pub mod verify;

pub use algebra::{AlgebraKind, AlgebraSpec};
pub use error::{Error, Result};
pub use jet::Jet;
pub use scalar::{ComplexScalar, ExactComplex, Exponent, Rational, RealScalar, Scalar, Surd};
