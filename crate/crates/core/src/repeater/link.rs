use crate::codes::{build_codewords, AmplitudeSpec, CodeParams};
use crate::error::{Error, Result};
use crate::noise::{noise_kraus, NoiseParams, DEFAULT_KRAUS_TOL};
use crate::qec::{channel_fidelity, teleport_qec, LogicalChannel, QecConfig};

use super::pauli::{key_fraction, pauli_twirl, PauliChannel};

/// One-way repeater line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeaterConfig {
    pub spacing_km: f64,
    pub attenuation_km: f64,
    /// Extra per-hop loss `epsilon` (coupling, detection).
    pub coupling_loss: f64,
    /// `h = Gamma_phi / Gamma`.
    pub dephasing_ratio: f64,
    pub cycle_time_us: f64,
    pub total_km: f64,
}

impl RepeaterConfig {
    pub const DEFAULT_ATTENUATION_KM: f64 = 20.0;

    pub fn new(spacing_km: f64, coupling_loss: f64, dephasing_ratio: f64, total_km: f64) -> Result<Self> {
        let cfg = Self {
            spacing_km,
            attenuation_km: Self::DEFAULT_ATTENUATION_KM,
            coupling_loss,
            dephasing_ratio,
            cycle_time_us: 1.0,
            total_km,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {v} must be finite and > 0")))
            }
        };
        positive("spacing_km", self.spacing_km)?;
        positive("attenuation_km", self.attenuation_km)?;
        positive("cycle_time_us", self.cycle_time_us)?;
        if !(0.0..1.0).contains(&self.coupling_loss) {
            return Err(Error::InvalidParameter(format!("coupling loss {} must lie in [0, 1)", self.coupling_loss)));
        }
        if !(0.0..1.0).contains(&self.dephasing_ratio) {
            return Err(Error::InvalidParameter(format!("dephasing ratio {} must lie in [0, 1)", self.dephasing_ratio)));
        }
        if !(self.total_km >= 0.0 && self.total_km.is_finite()) {
            return Err(Error::InvalidParameter(format!("total distance {} must be finite and >= 0", self.total_km)));
        }
        Ok(())
    }

    pub fn with_total(mut self, total_km: f64) -> Self {
        self.total_km = total_km;
        self
    }

    pub fn with_spacing(mut self, spacing_km: f64) -> Self {
        self.spacing_km = spacing_km;
        self
    }

    /// Dimensionless spacing `L0 = spacing / L_att`.
    pub fn l0(&self) -> f64 {
        self.spacing_km / self.attenuation_km
    }

    /// `round(total / spacing)`; zero only for a zero-length line.
    pub fn n_hops(&self) -> u64 {
        if self.total_km == 0.0 {
            return 0;
        }
        ((self.total_km / self.spacing_km).round() as u64).max(1)
    }
}

/// Per-hop error probabilities and the matching channel exposures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRates {
    pub gamma: f64,
    pub gamma_phi: f64,
    pub noise: NoiseParams,
}

/// `Gamma = 1 - e^{-L0} + eps`, `Gamma_phi = h Gamma`, `gamma t = -ln(1 - Gamma)`,
/// `kappa t = Gamma_phi`.
pub fn effective_rates(cfg: &RepeaterConfig) -> Result<EffectiveRates> {
    cfg.validate()?;
    let gamma = -(-cfg.l0()).exp_m1() + cfg.coupling_loss;
    if gamma >= 1.0 {
        return Err(Error::SpacingTooLarge { gamma });
    }
    let gamma_phi = cfg.dephasing_ratio * gamma;
    let noise = NoiseParams::new(-(-gamma).ln_1p(), gamma_phi)?;
    Ok(EffectiveRates { gamma, gamma_phi, noise })
}

/// Logical channel of one QEC cycle under fixed exposures.
pub fn cycle_channel(code: &CodeParams, noise: NoiseParams, qec: &QecConfig) -> Result<LogicalChannel> {
    let dim = build_codewords(code)?.dim();
    let kraus = noise_kraus(noise, dim, DEFAULT_KRAUS_TOL)?;
    teleport_qec(code, &kraus, qec)
}

/// Logical channel of one repeater hop.
pub fn hop_channel(code: &CodeParams, cfg: &RepeaterConfig, qec: &QecConfig) -> Result<LogicalChannel> {
    cycle_channel(code, effective_rates(cfg)?.noise, qec)
}

/// Error accumulation rate `tau = (1 - F) / L0`.
pub fn accumulation_rate(code: &CodeParams, cfg: &RepeaterConfig, qec: &QecConfig) -> Result<f64> {
    Ok((1.0 - channel_fidelity(&hop_channel(code, cfg, qec)?)) / cfg.l0())
}

/// Key fraction of the whole line built from identical twirled hops.
pub fn line_key_fraction(hop: &PauliChannel, cfg: &RepeaterConfig) -> f64 {
    key_fraction(&hop.repeated(cfg.n_hops()))
}

/// Secret key rate per mode over `cfg.total_km`.
pub fn skrpm(code: &CodeParams, cfg: &RepeaterConfig, qec: &QecConfig) -> Result<f64> {
    Ok(line_key_fraction(&pauli_twirl(&hop_channel(code, cfg, qec)?), cfg))
}

/// Where a code was evaluated: exposures plus the link geometry they came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exposure {
    pub noise: NoiseParams,
    /// Dimensionless spacing; for a bare noise channel this is `gamma t`.
    pub l0: f64,
    pub gamma: f64,
    pub gamma_phi: f64,
    pub spacing_km: f64,
    pub distance_km: f64,
    pub n_hops: u64,
}

impl Exposure {
    /// One repeater line.
    pub fn repeater(cfg: &RepeaterConfig) -> Result<Self> {
        let rates = effective_rates(cfg)?;
        Ok(Self {
            noise: rates.noise,
            l0: cfg.l0(),
            gamma: rates.gamma,
            gamma_phi: rates.gamma_phi,
            spacing_km: cfg.spacing_km,
            distance_km: cfg.total_km,
            n_hops: cfg.n_hops(),
        })
    }

    /// A single cycle of a fixed channel.
    pub fn fixed(noise: NoiseParams) -> Self {
        Self {
            noise,
            l0: noise.gamma_t,
            gamma: -(-noise.gamma_t).exp_m1(),
            gamma_phi: noise.kappa_t,
            spacing_km: 0.0,
            distance_km: 0.0,
            n_hops: 1,
        }
    }
}

/// Flat description of one evaluated code and link.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub code_type: String,
    pub s: u32,
    pub p: i64,
    pub q: i64,
    /// Coherent amplitude for Gaussian codes; `K` for binomial codes.
    pub alpha: f64,
    pub r: f64,
    pub nbar: f64,
    pub gamma_t: f64,
    pub kappa_t: f64,
    pub spacing_km: f64,
    pub distance_km: f64,
    pub l0: f64,
    pub gamma: f64,
    pub gamma_phi: f64,
    pub fidelity: f64,
    pub leakage: f64,
    pub tau: f64,
    pub skrpm: f64,
}

/// Family label and `(alpha, r)` columns of a code.
pub fn code_columns(code: &CodeParams) -> (String, f64, f64) {
    match code.amplitude {
        AmplitudeSpec::Binomial { k } => ("binomial".to_string(), k as f64, 0.0),
        AmplitudeSpec::Gaussian { alpha, r } => (code.kind_label().to_string(), alpha.re, r.re),
    }
}

impl SweepRecord {
    /// Record for a code whose per-hop logical channel is `lc`.
    pub fn new(code: &CodeParams, exposure: &Exposure, lc: &LogicalChannel) -> Self {
        let (code_type, alpha, r) = code_columns(code);
        let fidelity = channel_fidelity(lc);
        let key = key_fraction(&pauli_twirl(lc).repeated(exposure.n_hops));
        Self {
            code_type,
            s: code.s,
            p: code.f.p(),
            q: code.f.q(),
            alpha,
            r,
            nbar: code.nominal_nbar(),
            gamma_t: exposure.noise.gamma_t,
            kappa_t: exposure.noise.kappa_t,
            spacing_km: exposure.spacing_km,
            distance_km: exposure.distance_km,
            l0: exposure.l0,
            gamma: exposure.gamma,
            gamma_phi: exposure.gamma_phi,
            fidelity,
            leakage: lc.leakage,
            tau: if exposure.l0 > 0.0 { (1.0 - fidelity) / exposure.l0 } else { 0.0 },
            skrpm: key,
        }
    }

    /// Simulates one cycle of `code` under `exposure`.
    pub fn evaluate(code: &CodeParams, exposure: &Exposure, qec: &QecConfig) -> Result<Self> {
        let lc = cycle_channel(code, exposure.noise, qec)?;
        Ok(Self::new(code, exposure, &lc))
    }

    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}
