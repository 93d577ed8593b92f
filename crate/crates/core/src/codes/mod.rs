//! Number-phase codes: parameters, codewords, logical operators and the
//! lattice picture.

mod codewords;
mod kl;
mod ops;
mod params;

pub use codewords::{build_codewords, code_metrics, holevo_phase_uncertainty, CodeMetrics, LogicalBasis};
pub use kl::{first_violating_shift, kl_matrix, KlMatrix};
pub use ops::{
    check_pauli_pair, interface_gate, lattice_points, logical_operators, pauli_x_vector, pauli_z_vector, vortex_check,
    vortex_sign, LatticePoint, LogicalOperators, PauliPair, VortexCheck,
};
pub(crate) use params::interface_angle;
pub use params::{AmplitudeSpec, CodeParams, Fraction, LatticeKind};
