//! Finite-dimensional operator-range calculus.
//!
//! `orcalc` implements the algebra of operator ranges and the projection
//! machinery built on top of it, for dense complex matrices:
//!
//! * canonical subspaces, pseudoinverses, square roots and polar
//!   decompositions under a single tolerance policy ([`numlin`]),
//! * sums and intersections of operator ranges, Douglas reduced solutions,
//!   minimal decompositions and de Branges complements ([`ranges`]),
//! * oblique projections with prescribed range and nullspace, possibly on a
//!   proper domain, their Γ-representations, block forms, Moore-Penrose
//!   inverses and optimal factorizations ([`proj`]),
//! * B-symmetric projections for a selfadjoint weight B: Grammian splits,
//!   symmetry predicates and constructions ([`weights`]),
//! * complementability predicates, Schur complements of selfadjoint
//!   matrices, the E₀ projection family, Riccati witnesses and the minus,
//!   left-minus and ≺ partial orders ([`schur`]),
//! * a batch front end with a small JSON matrix format ([`io`], [`cli`],
//!   [`lab`]).
//!
//! Everything is computed at a fixed working precision (complex `f64`) and
//! every rank or equality decision goes through one [`numlin::TolerancePolicy`]
//! so that range inclusions, intersections and projector comparisons stay
//! mutually consistent.

pub mod cli;
pub mod error;
pub mod io;
pub mod lab;
pub mod numlin;
pub mod proj;
pub mod ranges;
pub mod schur;
pub mod weights;

mod guide;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
