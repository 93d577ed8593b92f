//! Simulation library for number-phase (NP) lattice bosonic codes.
//!
//! The crate is organized bottom-up:
//!
//! * [`fock`]: truncated Fock-space states and operators, NP displacements,
//!   canonical phase measurement and quadrature Wigner data.
//! * [`codes`]: code parameters, codewords, logical operators, lattice
//!   geometry, interface gate, vortex relation and Knill-Laflamme matrices.
//! * [`noise`]: the loss + dephasing channel, its Kraus form and the NP
//!   expansions of the error operators.
//! * [`qec`]: the teleportation-based correction cycle and its logical
//!   channel.
//! * [`analytics`]: closed-form estimates and the break-even baseline.
//! * [`repeater`]: per-hop rates, key rates and code optimization.
//! * [`config`] and [`report`]: JSON run configuration and CSV emission used
//!   by the command-line harness.

pub mod analytics;
pub mod codes;
pub mod config;
pub mod error;
pub mod fock;
pub mod noise;
pub mod qec;
pub mod repeater;
pub mod report;

pub use error::{Error, Result};
pub use fock::C64;
