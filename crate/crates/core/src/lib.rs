//! Single-excitation dynamics and spatial-correlation analysis for spin
//! networks laid out on the D-Wave Chimera architecture.
//!
//! The crate is organised bottom-up:
//!
//! * [`topology`] builds Chimera graphs and the three 8-node test rings/loops.
//! * [`hamiltonian`] turns a network into a real symmetric coupling matrix,
//!   with constant or dipole-dipole (inverse cube) weights.
//! * [`dynamics`] evolves a single excitation exactly through the
//!   eigen-expansion of that matrix and samples node fidelities.
//! * [`analysis`] extracts fidelity peaks, edge similarities, Geary's C and
//!   per-position summaries.
//! * [`ingest`] loads per-qubit parameter datasets.
//! * [`output`] holds the deterministic float/CSV/JSON writers shared by the CLI.
//!
//! Hot loops (time-grid sampling, permutation nulls, experiment grids) run
//! through [`exec::Exec`], which uses rayon when the `parallel` feature is on
//! and falls back to a plain sequential loop otherwise. Both paths produce
//! bit-identical results.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod hamiltonian;
pub mod ingest;
pub mod output;
pub mod topology;

pub use error::{Error, Result};
