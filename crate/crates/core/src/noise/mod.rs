//! Photon loss and dephasing: the exact channel, its Kraus form and the
//! number-phase expansions of the leading error operators.

mod channel;
mod expansion;
mod kraus;

pub use channel::{lindblad_channel, ChannelSectors, NoiseParams};
pub use expansion::{dephasing_expansion_residual, first_order_loss, loss_expansion_residual, loss_weight};
pub use kraus::{kraus_extract, noise_kraus, KrausSet, ShiftKraus, DEFAULT_KRAUS_TOL};
