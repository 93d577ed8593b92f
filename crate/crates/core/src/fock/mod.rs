//! Dense linear algebra on a truncated Fock space.
//!
//! States are amplitude vectors over `|0>, ..., |dim-1>` and operators are
//! dense `dim x dim` complex matrices. Number-phase (NP) displacements
//! combine a Fock ladder shift with a phase rotation and form a complete
//! operator basis, see [`np_displace`] and [`np_decompose`].

mod gaussian;
mod npvec;
mod operator;
mod phase;
mod state;
mod wigner;

pub use gaussian::{coherent_state, gaussian_state, gaussian_unitary};
pub use npvec::{np_decompose, np_displace, NpVector, NpWeights};
pub use operator::{ladder_operators, rotation, sigma, FockOperator, Ladder};
pub use phase::{phase_povm_weights, PhaseGrid, PhaseTransform};
pub use state::{auto_dim, tail_mass, FockState, TAIL_LEVELS, TAIL_TOLERANCE};
pub use wigner::wigner_xp;

pub use num_complex::Complex64 as C64;

/// Reduce an angle to `(-pi, pi]`.
pub fn wrap_pi(phi: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut x = phi.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    x
}

/// Reduce an angle to `[0, 2pi)`.
pub fn wrap_tau(phi: f64) -> f64 {
    use std::f64::consts::TAU;
    let x = phi.rem_euclid(TAU);
    if x >= TAU {
        0.0
    } else {
        x
    }
}
