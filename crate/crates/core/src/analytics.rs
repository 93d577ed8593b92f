//! Closed-form estimates used to sanity-check the simulator.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default number of series terms in [`bitflip_estimate`].
pub const DEFAULT_SERIES_TERMS: u32 = 3;

/// Loss probability `Gamma = 1 - e^{-gamma t}`.
pub fn loss_probability(gamma_t: f64) -> f64 {
    -(-gamma_t).exp_m1()
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn series_term(x: f64, d_n: u32, l: u32) -> f64 {
    let k = (l * d_n) as u64;
    2.0 * (k as f64 * x.ln() - x - ln_factorial(k)).exp()
}

/// Dominant logical bit-flip rate `sum_{l=1}^{l_max} 2 x^{l d_N} e^{-x} / (l d_N)!`
/// with `x = nbar Gamma`.
pub fn bitflip_estimate(nbar: f64, gamma: f64, d_n: u32, l_max: u32) -> f64 {
    let x = nbar * gamma;
    if x <= 0.0 || d_n == 0 {
        return 0.0;
    }
    (1..=l_max).map(|l| series_term(x, d_n, l)).sum()
}

/// [`bitflip_estimate`] that also checks the first dropped term stays below
/// `1e-3` of the kept sum.
pub fn bitflip_estimate_checked(nbar: f64, gamma: f64, d_n: u32, l_max: u32) -> Result<f64> {
    if l_max == 0 {
        return Err(Error::InvalidParameter("series needs at least one term".into()));
    }
    let kept = bitflip_estimate(nbar, gamma, d_n, l_max);
    if kept == 0.0 {
        return Ok(0.0);
    }
    let x = nbar * gamma;
    if x >= d_n as f64 {
        log::warn!("n_bar Gamma = {x} is outside the series regime (d_N = {d_n})");
    }
    let dropped = series_term(x, d_n, l_max + 1);
    if dropped > 1e-3 * kept {
        return Err(Error::NumericalFailure(format!("series tail {dropped:.3e} is not negligible against {kept:.3e}")));
    }
    Ok(kept)
}

/// Dephasing floor `sqrt(8 pi s^2 kt) / pi^2 * exp(-pi^2 / (8 s^2 kt))`.
pub fn dephasing_lower_bound(s: u32, kappa_t: f64) -> Result<f64> {
    if !(kappa_t > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa_t = {kappa_t} must be > 0")));
    }
    let a = 8.0 * (s as f64).powi(2) * kappa_t;
    Ok((PI * a).sqrt() / (PI * PI) * (-PI * PI / a).exp())
}

/// Entanglement fidelity of the bare `|0>, |1>` encoding left idle under
/// loss and dephasing.
pub fn breakeven_baseline(gamma_t: f64, kappa_t: f64) -> f64 {
    let keep = 1.0 - loss_probability(gamma_t);
    0.25 * (1.0 + keep + 2.0 * keep.sqrt() * (-kappa_t / 2.0).exp())
}
