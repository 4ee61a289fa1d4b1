//! Workbench for constant-dimension subspace codes in PG(6,2) with
//! prescribed automorphism groups.
//!
//! The crate provides bit-packed GF(2) linear algebra, subspaces of
//! `F_2^n` as canonical objects, matrix groups and their orbits on
//! Grassmannians, normalizer and subgroup-ladder computations, the
//! Kramer-Mesner orbit-packing model, and an exact branch-and-bound
//! solver, together with the bundled reference groups and the 333-plane
//! witness code.

pub mod data;
pub mod error;
pub mod geometry;
pub mod gf2;
pub mod groups;
pub mod km;
pub mod normalizer;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
