//! Isotypical Fredholm criteria for operators invariant under a finite group.
//!
//! The crate decides α-ellipticity of Γ-invariant symbols on finite
//! stratified models of Γ-manifolds, computes the primitive spectrum of the
//! corresponding invariant symbol algebras, and corroborates the resulting
//! Fredholm verdicts numerically on truncated circle operators.
//!
//! Module map:
//!
//! - [`grp`]: finite groups, subgroups, character tables, matrix
//!   representations and isotypical projectors.
//! - [`rep`]: induced modules, Frobenius maps and the block analysis of
//!   `π_α` on induced endomorphism algebras.
//! - [`action`]: finite models of Γ-manifolds (stabilizers, orbit types,
//!   minimal isotropy, covector stabilizers).
//! - [`symbol`]: equivariant bundles, sampled symbols, and the α-ellipticity
//!   decision (two independent methods).
//! - [`spectrum`]: primitive spectrum of the finite invariant symbol algebra
//!   with its hull-kernel topology.
//! - [`fredholm`]: the circle-model numerical lab (truncation, isotypical
//!   compression, Fredholm probe, index, local invertibility).
//! - [`cli`]: configuration, builtin scenarios and report assembly.

pub mod action;
pub mod cli;
pub mod error;
pub mod fredholm;
pub mod grp;
pub mod linalg;
pub mod rep;
pub mod spectrum;
pub mod symbol;

pub use error::{Error, Result};
pub use grp::{CharacterTable, ClassFunction, FiniteGroup, MatrixRep, Permutation, Subgroup};
pub use linalg::{CMat, CVec, C64};
