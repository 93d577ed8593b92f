use nalgebra::DVector;

use super::C64;
use crate::error::{Error, Result};

/// Number of top Fock levels inspected by the truncation check.
pub const TAIL_LEVELS: usize = 5;

/// Largest probability mass tolerated in the top [`TAIL_LEVELS`] levels of a
/// physical state.
pub const TAIL_TOLERANCE: f64 = 1e-9;

/// Default truncation for a state with mean excitation `nbar`:
/// `nbar + 8 sqrt(nbar) + 20`.
pub fn auto_dim(nbar: f64) -> usize {
    let nbar = nbar.max(0.0);
    (nbar + 8.0 * nbar.sqrt() + 20.0).ceil() as usize
}

/// Probability mass in the top `TAIL_LEVELS` entries of `amps`.
pub fn tail_mass(amps: &[C64]) -> f64 {
    let start = amps.len().saturating_sub(TAIL_LEVELS);
    amps[start..].iter().map(|a| a.norm_sqr()).sum()
}

/// Pure state in a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amps: DVector<C64>,
}

impl FockState {
    pub fn from_amps(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDimension("state needs dim >= 1".into()));
        }
        Ok(Self { amps: DVector::from_vec(amps) })
    }

    pub fn from_vector(amps: DVector<C64>) -> Self {
        assert!(!amps.is_empty(), "empty Fock state");
        Self { amps }
    }

    /// Number state `|n>`.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::InvalidDimension(format!("|{n}> does not fit in dim {dim}")));
        }
        let mut amps = DVector::zeros(dim);
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn as_slice(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub fn into_vector(self) -> DVector<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.amps.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: n * n });
        }
        Ok(Self { amps: &self.amps / C64::new(n, 0.0) })
    }

    /// Fails unless `sum |a_n|^2 = 1` within `1e-10`.
    pub fn check_normalized(&self) -> Result<()> {
        let ns = self.norm_sqr();
        if (ns - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm_sqr: ns });
        }
        Ok(())
    }

    /// Fails when the top Fock levels carry more than `tolerance` mass.
    pub fn check_tail(&self, tolerance: f64) -> Result<()> {
        let tail = tail_mass(self.as_slice());
        if tail > tolerance {
            return Err(Error::TruncationInsufficient { tail, tolerance, dim: self.dim() });
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &FockState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn mean_number(&self) -> f64 {
        self.amps.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum()
    }

    /// Pads with zeros or drops the top levels.
    pub fn resized(&self, dim: usize) -> Self {
        let mut amps = DVector::zeros(dim);
        let keep = dim.min(self.dim());
        amps.rows_mut(0, keep).copy_from(&self.amps.rows(0, keep));
        Self { amps }
    }
}
