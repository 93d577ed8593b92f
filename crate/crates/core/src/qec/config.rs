use std::f64::consts::PI;

use crate::codes::CodeParams;
use crate::error::{Error, Result};

/// How the modular number parity is read out.
#[derive(Debug, Clone, PartialEq)]
pub enum ParityMode {
    /// Ideal projectors `P_{s,k}`.
    IdealProjective,
    /// Coherent ancilla `|alpha>` behind a doubled controlled-phase gate,
    /// read out by binned canonical phase measurement.
    CircuitSim { alpha: f64, dim: Option<usize> },
}

/// Settings of one teleportation-based correction cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct QecConfig {
    /// Largest corrected photon gain.
    pub g: i64,
    /// Largest corrected photon loss.
    pub l: i64,
    pub phase_points: usize,
    /// Fresh code receiving the state; `None` reuses the data code.
    pub ancilla: Option<CodeParams>,
    pub parity: ParityMode,
    /// Test fixture: decode with the vortex orientation reversed.
    #[doc(hidden)]
    pub flip_vortex_sign: bool,
}

impl QecConfig {
    pub const DEFAULT_PHASE_POINTS: usize = 4096;

    /// Loss-only window `G = 0`, `L = d_N - 1`.
    pub fn for_code(code: &CodeParams) -> Self {
        Self {
            g: 0,
            l: code.d_n() - 1,
            phase_points: Self::DEFAULT_PHASE_POINTS,
            ancilla: None,
            parity: ParityMode::IdealProjective,
            flip_vortex_sign: false,
        }
    }

    pub fn with_window(mut self, g: i64, l: i64) -> Self {
        self.g = g;
        self.l = l;
        self
    }

    pub fn with_phase_points(mut self, n: usize) -> Self {
        self.phase_points = n;
        self
    }

    pub fn with_parity(mut self, parity: ParityMode) -> Self {
        self.parity = parity;
        self
    }

    pub fn with_ancilla(mut self, ancilla: CodeParams) -> Self {
        self.ancilla = Some(ancilla);
        self
    }

    pub fn validate(&self, code: &CodeParams) -> Result<()> {
        check_window(code, self.g, self.l)?;
        if self.phase_points < 16 {
            return Err(Error::InvalidParameter(format!("phase_points = {} is too small", self.phase_points)));
        }
        if let ParityMode::CircuitSim { alpha, .. } = self.parity {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidParameter(format!("parity ancilla amplitude {alpha} must be > 0")));
            }
        }
        Ok(())
    }
}

fn check_window(code: &CodeParams, g: i64, l: i64) -> Result<()> {
    let expected = code.d_n() - 1;
    if g < 0 || l < 0 || g + l != expected {
        return Err(Error::Window { sum: g + l, expected });
    }
    Ok(())
}

/// Errors `D(l, phi)` the code corrects: `-G <= l <= L`, `|phi| < pi/(2 d_N)`;
/// alternatively pure rotations with `|phi| < d_phi / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectableSet {
    pub l_min: i64,
    pub l_max: i64,
    pub phase_half_width: f64,
    pub rotation_half_width: f64,
}

/// One shift of a [`CorrectableSet`] with its open phase interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectableRegion {
    pub l: i64,
    pub phi_max: f64,
}

impl CorrectableSet {
    pub fn regions(&self) -> Vec<CorrectableRegion> {
        (self.l_min..=self.l_max).map(|l| CorrectableRegion { l, phi_max: self.phase_half_width }).collect()
    }

    pub fn contains(&self, l: i64, phi: f64) -> bool {
        (self.l_min..=self.l_max).contains(&l) && phi.abs() < self.phase_half_width
    }
}

pub fn correctable_set(code: &CodeParams, g: i64, l: i64) -> Result<CorrectableSet> {
    check_window(code, g, l)?;
    Ok(CorrectableSet {
        l_min: -g,
        l_max: l,
        phase_half_width: PI / (2.0 * code.d_n() as f64),
        rotation_half_width: code.d_phi() / 2.0,
    })
}
