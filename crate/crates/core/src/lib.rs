//! Exact algebra for ideal-related K-theory over finite T0-spaces.
//!
//! The crate is `no_std` and needs only `alloc`. It layers as follows:
//! [`intlin`] provides exact integer matrices and normal forms, [`fgab`]
//! builds finitely generated abelian groups on top, [`finspace`] models
//! finite T0-spaces, [`diagram`] holds six-term diagram modules and their
//! homomorphisms, and [`ckk`] computes the filtered K-theory of
//! Cuntz-Krieger algebras from block matrices.
#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod ckk;
pub mod diagram;
pub mod fgab;
pub mod finspace;
pub mod intlin;

pub use num_bigint::BigInt;
