//! Exact symbolic kernel for the oscillator string algebra `a[m]`, `H`, its
//! extension by the Yangian-style generators `b[m]`, and the Virasoro-like
//! bialgebra they generate.
//!
//! Everything is computed with exact rationals over finite mode windows:
//! PBW normal ordering ([`algebra`]), coproducts and Casimir brackets
//! ([`tensor`]), window-swept verification suites ([`checks`]), the linear
//! algebra behind the structure constants ([`derivation`]) and a small
//! presentation language ([`dsl`]).

pub mod algebra;
pub mod checks;
pub mod derivation;
pub mod dsl;
pub mod error;
pub mod rational;
pub mod tensor;

pub use algebra::{Algebra, Element, Generator, Grade, Kind, Monomial};
pub use checks::{CheckReport, Counterexample, Status};
pub use error::KernelError;
pub use rational::Q;
pub use tensor::{Tensor, TensorElement};
