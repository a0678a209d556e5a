//! Exact symbolic computation in the Hopf algebra of rooted trees.
//!
//! The commutative polynomial algebra on rooted trees carries a Hopf
//! structure whose coproduct enumerates admissible edge cuts. This crate
//! implements that structure over exact rational scalars, together with
//! the machinery built on top of it:
//!
//! - canonical rooted trees, forests, and cut enumeration ([`trees`]);
//! - the sparse algebra of forests and its tensor powers ([`algebra`]);
//! - coproduct, counit, antipode ([`hopf`]);
//! - the natural growth operation, growth chains, and the projection
//!   onto totally primitive elements ([`growth`]);
//! - ladder primitives and dimension tables for the graded pieces of the
//!   totally primitive subspace ([`primitives`]);
//! - the dual Lie algebra of tree vectors and the enveloping pairing
//!   ([`lie`]);
//! - finite dimensional comodules in triangular form: structure
//!   matrices, flags, reduced families, parabolic conjugation
//!   ([`comodule`]);
//! - the associated graded shuffle algebra, growth-chain endomorphisms,
//!   and the isomorphism onto the shuffle side ([`morphisms`]);
//! - a toy-model renormalization front end producing counterterm
//!   expressions ([`renorm`]).
//!
//! Everything is `no_std` + `alloc`; scalars are `BigRational`, so all
//! results are exact.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod comodule;
pub mod growth;
pub mod hopf;
pub mod lie;
mod linalg;
pub mod morphisms;
pub mod primitives;
pub mod renorm;
pub mod trees;

pub use algebra::{AlgebraElement, Rational, TensorElement};
pub use trees::{Forest, ParseError, RootedTree};
