//! Driven-dissipative Kerr-cat qubit simulation.
//!
//! * [`operators`]: truncated Fock-space algebra, tensor products, partial traces.
//! * [`states`]: coherent and cat states, the logical cat basis, Bloch readout.
//! * [`dynamics`]: the Kerr-cat Hamiltonian and master-equation integration.
//! * [`collision`]: repeated interactions with streams of reservoir qubits.
//! * [`classifier`]: the steady-state sign decision over reservoir mixtures.
//! * [`config`], [`scenario`], [`plot`]: the file-driven runner behind `catline`.

pub mod classifier;
pub mod collision;
pub mod config;
pub mod dynamics;
pub mod error;
mod generator;
pub mod operators;
pub mod plot;
pub mod scenario;
pub mod states;

pub use error::{Error, Result};
