//! Discrete magnetic Schrödinger calculus on weighted graphs.
//!
//! A weighted magnetic graph carries positive vertex weights `w`, positive
//! edge conductances `a`, unit-modulus edge phases `σ` with `σ(-e) =
//! conj(σ(e))`, and a real potential `q`.  On finitely supported vertex
//! functions the crate provides:
//!
//! - the deformed difference `d_σ`, its adjoint divergence `δ_σ`, the
//!   magnetic Laplacian `Δ_σ = δ_σ d_σ`, and the Schrödinger operator
//!   `H = Δ_σ + q` ([`ops`]);
//! - numeric verifiers for the calculus' structural identities —
//!   adjointness, factorization, symmetry, nonnegativity of the energy
//!   form, the product rule, the domination inequality, ground-state
//!   energy identities, and cut-off energy bounds ([`verify`]);
//! - the intrinsic path metric built from edge lengths
//!   `sqrt(min(w)/a)`, with distance profiles and the two cut-off
//!   function families used by the energy estimates ([`metric`]);
//! - ball truncations of `H` with Dirichlet-style diagonals, their
//!   symmetrized representatives, and residual-verified smallest
//!   eigenvalues ([`ops`], [`eigen`]);
//! - diagnostics deciding which of three essential-self-adjointness
//!   criteria apply to a graph: uniform vertex weight with semibounded
//!   potential, vanishing degree–conductance growth ratio, or bounded
//!   degree with a complete metric ([`diagnostics`]);
//! - built-in graph families with closed-form exact attributes, JSON
//!   graph I/O, and deterministic CSV exports ([`family`], [`graph`],
//!   [`export`], [`exact`]).
//!
//! The binary crate `magschro` exposes the same functionality on the
//! command line.

pub mod diagnostics;
pub mod eigen;
pub mod error;
pub mod exact;
pub mod export;
pub mod family;
pub mod fields;
pub mod graph;
pub mod metric;
pub mod ops;
pub mod verify;

pub use error::{Error, Result};
pub use exact::ExactScalar;
pub use family::{FamilySpec, GraphSource, RandomParams};
pub use fields::{EdgeField, VertexField};
pub use graph::{Ball, EdgeData, EdgeId, HalfEdge, MagneticGraph, VertexId};
