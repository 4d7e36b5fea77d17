//! Command-line front end for the `magschro` library.
//!
//! Subcommands generate weighted magnetic graphs, verify the discrete
//! operator identities on them, assemble truncated matrices, compute
//! spectra and path metrics, and report which essential-self-adjointness
//! criteria apply. Results are emitted as deterministic JSON (or a derived
//! text rendering) stamped with the tool version, the graph hash, the seed,
//! and the tolerances in effect.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
