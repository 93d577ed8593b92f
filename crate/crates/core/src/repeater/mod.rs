//! Repeater benchmark: per-hop rates, key rates and code optimization.

mod link;
mod optimize;
mod pauli;

pub use link::{
    accumulation_rate, code_columns, cycle_channel, effective_rates, hop_channel, line_key_fraction, skrpm,
    EffectiveRates, Exposure, RepeaterConfig, SweepRecord,
};
pub use optimize::{
    optimize_code, CodeFamily, FamilyAmplitude, GaussianSearch, NoiseSource, Objective, Optimized,
    OptimizerSettings, SearchSpace,
};
pub use pauli::{h2, key_fraction, pauli_twirl, twirl_process, PauliChannel};
