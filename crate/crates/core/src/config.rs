//! JSON run configuration shared by the command-line drivers.
//!
//! A config is validated in full before any simulation starts. Emitted CSV
//! files carry the canonical re-serialization of their config and its
//! SHA-256 in `#` header lines, so a run can be replayed from its output.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codes::{AmplitudeSpec, CodeParams, Fraction, LatticeKind};
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::qec::{ParityMode, QecConfig};
use crate::repeater::{Objective, RepeaterConfig};

/// Header line prefix carrying the config digest.
pub const HASH_PREFIX: &str = "# config_sha256=";
/// Header line prefix carrying the canonical config JSON.
pub const CONFIG_PREFIX: &str = "# config=";
/// Header line prefix carrying the run seed.
pub const SEED_PREFIX: &str = "# seed=";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeType {
    Binomial,
    Rnp,
    Onp,
    Dnp,
    Np,
}

impl CodeType {
    fn accepts(&self, kind: LatticeKind) -> bool {
        match self {
            CodeType::Binomial => true,
            CodeType::Rnp => kind == LatticeKind::Rectangular,
            CodeType::Onp => kind == LatticeKind::Oblique,
            CodeType::Dnp => kind == LatticeKind::Diamond,
            CodeType::Np => true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeBlock {
    #[serde(rename = "type")]
    pub code_type: CodeType,
    pub s: u32,
    #[serde(default)]
    pub p: i64,
    #[serde(default = "one")]
    pub q: i64,
    #[serde(default)]
    pub amplitude: AmplitudeBlock,
}

fn one() -> i64 {
    1
}

impl CodeBlock {
    /// Code with the block's own amplitude parameters.
    pub fn params(&self) -> Result<CodeParams> {
        let amp = match self.code_type {
            CodeType::Binomial => AmplitudeSpec::Binomial {
                k: self.amplitude.k.ok_or_else(|| cfg_err("binomial code needs amplitude.k"))?,
            },
            _ => AmplitudeSpec::gaussian_real(
                self.amplitude.alpha.ok_or_else(|| cfg_err("Gaussian code needs amplitude.alpha"))?,
                self.amplitude.r.unwrap_or(0.0),
            ),
        };
        self.with_amplitude(amp)
    }

    /// Same lattice with another amplitude family member.
    pub fn with_amplitude(&self, amp: AmplitudeSpec) -> Result<CodeParams> {
        let f = Fraction::new(self.p, self.q).map_err(as_config)?;
        CodeParams::new(self.s, f, amp).map_err(as_config)
    }

    pub fn fraction(&self) -> Result<Fraction> {
        Fraction::new(self.p, self.q).map_err(as_config)
    }

    fn validate(&self, needs_amplitude: bool) -> Result<()> {
        let f = self.fraction()?;
        let probe = CodeParams::new(self.s, f, AmplitudeSpec::Binomial { k: 2 }).map_err(as_config)?;
        if !self.code_type.accepts(probe.kind()) {
            return Err(cfg_err(format!(
                "code type {:?} does not match lattice s = {}, f = {f}",
                self.code_type, self.s
            )));
        }
        let a = &self.amplitude;
        match self.code_type {
            CodeType::Binomial => {
                if a.alpha.is_some() || a.r.is_some() {
                    return Err(cfg_err("binomial amplitude takes only k"));
                }
                if matches!(a.k, Some(k) if k < 1) {
                    return Err(cfg_err("binomial k must be >= 1"));
                }
                if needs_amplitude && a.k.is_none() {
                    return Err(cfg_err("binomial code needs amplitude.k"));
                }
            }
            _ => {
                if a.k.is_some() {
                    return Err(cfg_err("Gaussian amplitude takes alpha and r, not k"));
                }
                if let Some(alpha) = a.alpha {
                    finite_nonneg("amplitude.alpha", alpha)?;
                }
                if let Some(r) = a.r {
                    finite_nonneg("amplitude.r", r)?;
                }
                if needs_amplitude && a.alpha.is_none() {
                    return Err(cfg_err("Gaussian code needs amplitude.alpha"));
                }
            }
        }
        Ok(())
    }
}

/// Fock truncation: `"auto"` or `{"dim": N}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Truncation {
    #[default]
    Auto,
    Dim(usize),
}

/// A number or a list of numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    One(f64),
    Many(Vec<f64>),
}

impl Values {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Values::One(x) => vec![*x],
            Values::Many(v) => v.clone(),
        }
    }
}

impl Default for Values {
    fn default() -> Self {
        Values::One(0.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseBlock {
    #[serde(default)]
    pub gamma_t: Values,
    #[serde(default)]
    pub kappa_t: Values,
}

impl NoiseBlock {
    /// Every `(gamma_t, kappa_t)` combination, `gamma_t` outermost.
    pub fn points(&self) -> Result<Vec<NoiseParams>> {
        let mut out = Vec::new();
        for g in self.gamma_t.to_vec() {
            for k in self.kappa_t.to_vec() {
                out.push(NoiseParams::new(g, k).map_err(as_config)?);
            }
        }
        Ok(out)
    }
}

/// Parity readout: `"ideal"` or `{"circuit": {"alpha": a, "dim": n}}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ParityBlock {
    #[default]
    Ideal,
    Circuit {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QecBlock {
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<i64>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<i64>,
    #[serde(default = "default_phase_points")]
    pub phase_points: usize,
    #[serde(default)]
    pub parity_mode: ParityBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla: Option<CodeBlock>,
}

fn default_phase_points() -> usize {
    QecConfig::DEFAULT_PHASE_POINTS
}

impl Default for QecBlock {
    fn default() -> Self {
        Self { g: None, l: None, phase_points: default_phase_points(), parity_mode: ParityBlock::Ideal, ancilla: None }
    }
}

/// Sweep over code sizes: exactly one of `nbar` or `alpha`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nbar: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepeaterBlock {
    pub spacing_km: Values,
    #[serde(default = "default_attenuation")]
    pub attenuation_km: f64,
    pub eps: f64,
    pub h: f64,
    #[serde(default = "default_t0")]
    pub t0_us: f64,
    pub distances_km: Vec<f64>,
}

fn default_attenuation() -> f64 {
    RepeaterConfig::DEFAULT_ATTENUATION_KM
}

fn default_t0() -> f64 {
    1.0
}

impl RepeaterBlock {
    /// Line at `spacing` with the block's loss model and total `distance`.
    pub fn line(&self, spacing: f64, distance: f64) -> Result<RepeaterConfig> {
        let mut cfg = RepeaterConfig::new(spacing, self.eps, self.h, distance).map_err(as_config)?;
        cfg.attenuation_km = self.attenuation_km;
        cfg.cycle_time_us = self.t0_us;
        cfg.validate().map_err(as_config)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveName {
    Tau,
    Skrpm,
    Infidelity,
}

impl From<ObjectiveName> for Objective {
    fn from(o: ObjectiveName) -> Self {
        match o {
            ObjectiveName::Tau => Objective::Tau,
            ObjectiveName::Skrpm => Objective::Skrpm,
            ObjectiveName::Infidelity => Objective::Infidelity,
        }
    }
}

/// Optional amplitude optimization in place of the fixed amplitude.
///
/// With an `nbar` sweep only `r` is searched (`alpha` follows from `nbar`);
/// otherwise `(alpha, r)` is searched over `alpha_range x r_range`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeBlock {
    pub objective: ObjectiveName,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_r_range")]
    pub r_range: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_range: Option<[f64; 2]>,
}

fn default_budget() -> usize {
    30
}

fn default_restarts() -> usize {
    3
}

fn default_r_range() -> [f64; 2] {
    [-1.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub code: CodeBlock,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default)]
    pub noise: NoiseBlock,
    #[serde(default)]
    pub qec: QecBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeater: Option<RepeaterBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeBlock>,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn finite_nonneg(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(cfg_err(format!("{name} = {x} must be finite and >= 0")))
    }
}

impl RunConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Compact JSON with a fixed field order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of [`RunConfig::canonical_json`].
    pub fn sha256(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let sweep = self.sweep.as_ref();
        if let Some(sw) = sweep {
            match (&sw.nbar, &sw.alpha) {
                (Some(v), None) | (None, Some(v)) => {
                    if v.is_empty() {
                        return Err(cfg_err("sweep list is empty"));
                    }
                    for &x in v {
                        finite_nonneg("sweep value", x)?;
                    }
                }
                _ => return Err(cfg_err("sweep needs exactly one of nbar or alpha")),
            }
            if self.code.code_type == CodeType::Binomial && sw.alpha.is_some() {
                return Err(cfg_err("binomial codes sweep nbar, not alpha"));
            }
        }
        let optimizing = self.optimize.is_some() && self.code.code_type != CodeType::Binomial;
        self.code.validate(sweep.is_none() && !optimizing)?;
        if let Some(anc) = &self.qec.ancilla {
            anc.validate(true)?;
            if anc.s != self.code.s {
                return Err(cfg_err("ancilla code must share s with the data code"));
            }
        }
        self.noise.points()?;
        if self.qec.phase_points < 16 {
            return Err(cfg_err(format!("phase_points = {} is too small", self.qec.phase_points)));
        }
        if let ParityBlock::Circuit { alpha, .. } = self.qec.parity_mode {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(cfg_err(format!("circuit parity alpha = {alpha} must be > 0")));
            }
        }
        if let Some(rep) = &self.repeater {
            if rep.distances_km.is_empty() || rep.spacing_km.to_vec().is_empty() {
                return Err(cfg_err("repeater needs at least one spacing and one distance"));
            }
            for &sp in &rep.spacing_km.to_vec() {
                for &d in &rep.distances_km {
                    rep.line(sp, d)?;
                }
            }
        }
        if let Some(opt) = &self.optimize {
            if opt.budget < 10 {
                return Err(cfg_err(format!("optimize.budget = {} must be >= 10", opt.budget)));
            }
            if opt.restarts == 0 {
                return Err(cfg_err("optimize.restarts must be >= 1"));
            }
            let ranges = [Some((opt.r_range, f64::NEG_INFINITY)), opt.alpha_range.map(|a| (a, 0.0))];
            for ([lo, hi], floor) in ranges.into_iter().flatten() {
                if !(lo.is_finite() && hi.is_finite() && lo >= floor && lo <= hi) {
                    return Err(cfg_err(format!("bad optimize range [{lo}, {hi}]")));
                }
            }
            let q = &self.qec;
            if q.g.is_some() || q.l.is_some() || q.parity_mode != ParityBlock::Ideal || q.ancilla.is_some() {
                return Err(cfg_err("optimize runs use the loss-only window with ideal parity; drop the qec overrides"));
            }
            let nbar_sweep = sweep.is_some_and(|s| s.nbar.is_some());
            if optimizing && !nbar_sweep && opt.alpha_range.is_none() {
                return Err(cfg_err("optimize needs alpha_range unless sweeping nbar"));
            }
        }
        // every sweep point must describe a buildable code
        for code in self.code_points()? {
            self.qec_template(&code)?;
        }
        Ok(())
    }

    /// Codes named by the code block and sweep. With an `nbar` sweep and an
    /// optimize block, Gaussian points carry `r = 0` and serve as seeds.
    pub fn code_points(&self) -> Result<Vec<CodeParams>> {
        let c = &self.code;
        let r = c.amplitude.r.unwrap_or(0.0);
        let pts: Vec<CodeParams> = match &self.sweep {
            None if self.optimize.is_some() && c.code_type != CodeType::Binomial && c.amplitude.alpha.is_none() => {
                let [lo, hi] = self.optimize.as_ref().and_then(|o| o.alpha_range).unwrap_or([1.0, 1.0]);
                vec![c.with_amplitude(AmplitudeSpec::gaussian_real(0.5 * (lo + hi), r))?]
            }
            None => vec![c.params()?],
            Some(SweepBlock { nbar: Some(list), .. }) => list
                .iter()
                .map(|&nbar| match c.code_type {
                    CodeType::Binomial => {
                        let k = 2.0 * nbar / c.s as f64;
                        if (k - k.round()).abs() > 1e-9 || k.round() < 1.0 {
                            return Err(cfg_err(format!("binomial nbar = {nbar} needs 2 nbar / s to be a positive integer")));
                        }
                        c.with_amplitude(AmplitudeSpec::Binomial { k: k.round() as u32 })
                    }
                    _ => {
                        let per_mode = nbar / c.s as f64 - r.sinh().powi(2);
                        if per_mode < 0.0 {
                            return Err(cfg_err(format!("nbar = {nbar} is below the squeezing energy of r = {r}")));
                        }
                        c.with_amplitude(AmplitudeSpec::gaussian_real(per_mode.sqrt(), r))
                    }
                })
                .collect::<Result<_>>()?,
            Some(SweepBlock { alpha: Some(list), .. }) => list
                .iter()
                .map(|&alpha| c.with_amplitude(AmplitudeSpec::gaussian_real(alpha, r)))
                .collect::<Result<_>>()?,
            Some(_) => return Err(cfg_err("sweep needs exactly one of nbar or alpha")),
        };
        Ok(match self.truncation {
            Truncation::Auto => pts,
            Truncation::Dim(d) => pts.into_iter().map(|p| p.with_dim(d)).collect(),
        })
    }

    /// Correction settings for `code`; the window defaults to `G = 0`.
    pub fn qec_template(&self, code: &CodeParams) -> Result<QecConfig> {
        let q = &self.qec;
        let l = q.l.unwrap_or_else(|| code.d_n() - 1 - q.g.unwrap_or(0));
        let g = q.g.unwrap_or(code.d_n() - 1 - l);
        let mut cfg = QecConfig::for_code(code).with_window(g, l).with_phase_points(q.phase_points);
        if let ParityBlock::Circuit { alpha, dim } = q.parity_mode {
            cfg = cfg.with_parity(ParityMode::CircuitSim { alpha, dim });
        }
        if let Some(anc) = &q.ancilla {
            cfg = cfg.with_ancilla(anc.params()?);
        }
        cfg.validate(code).map_err(as_config)?;
        Ok(cfg)
    }
}

/// Config and seed recovered from the `#` header of an emitted CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedded {
    pub config: RunConfig,
    pub seed: Option<u64>,
}

/// Reads the embedded config from CSV header lines and checks its digest.
pub fn extract_embedded(csv: &str) -> Result<Embedded> {
    let mut hash = None;
    let mut json = None;
    let mut seed = None;
    for line in csv.lines().take_while(|l| l.starts_with('#')) {
        if let Some(h) = line.strip_prefix(HASH_PREFIX) {
            hash = Some(h.trim());
        } else if let Some(j) = line.strip_prefix(CONFIG_PREFIX) {
            json = Some(j);
        } else if let Some(s) = line.strip_prefix(SEED_PREFIX) {
            seed = Some(s.trim().parse::<u64>().map_err(|e| cfg_err(format!("bad seed line: {e}")))?);
        }
    }
    let json = json.ok_or_else(|| cfg_err("no embedded config line"))?;
    let config = RunConfig::from_json(json)?;
    if let Some(h) = hash {
        let actual = config.sha256();
        if h != actual {
            return Err(cfg_err(format!("config digest mismatch: header {h}, content {actual}")));
        }
    }
    Ok(Embedded { config, seed })
}
