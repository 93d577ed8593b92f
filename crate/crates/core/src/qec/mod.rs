//! Teleportation-based error correction: parity readout, phase decoding,
//! logical recovery and the resulting logical channel.

mod config;
mod engine;
mod parity;
mod regions;

pub use config::{correctable_set, CorrectableRegion, CorrectableSet, ParityMode, QecConfig};
pub use engine::{
    channel_fidelity, teleport_qec, teleport_qec_ops, teleport_qec_with, BranchOperator, LogicalChannel, Pipeline,
    SyndromeOutcome,
};
pub use parity::{
    circuit_parity_kraus, controlled_phase, modular_parity_projectors, parity_circuit_validation, parity_sector, ParityKraus,
    MAX_TWO_MODE_DIM,
};
pub use regions::{decision_regions, m_window, Candidate, DecisionRegions, Label};
