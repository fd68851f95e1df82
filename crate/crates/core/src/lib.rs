//! Finite étale groupoids and their reduced C*-algebras.
//!
//! Everything here works at desk scale: groupoids are finite and discrete,
//! `C*_r(G)` is a finite-dimensional matrix algebra, and *-homomorphisms are
//! exchanged as dense matrices in the delta bases. The crate builds
//! diagonal-compatible *-homomorphisms from data `(F, Φ, c)`, recovers that
//! data from a given homomorphism matrix, and checks the semidirect-product
//! structure of the diagonal-preserving automorphism group.

pub mod algebra;
pub mod autgroup;
pub mod cli;
pub mod cocycle;
pub mod decomposition;
pub mod families;
pub mod group;
pub mod groupoid;
pub mod hom;
pub mod io;
pub mod phase;
pub mod report;
pub mod selftest;
pub mod semigroup;
pub mod slice;

pub use algebra::AlgebraElement;
pub use cocycle::Cocycle;
pub use decomposition::{DecompositionData, HomMatrix};
pub use groupoid::{Arrow, FiniteGroupoid, GroupoidTables, UnitSet};
pub use hom::GroupoidHom;
pub use phase::Phase;
pub use semigroup::Bisection;
