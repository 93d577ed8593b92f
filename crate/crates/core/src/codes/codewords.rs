use std::f64::consts::PI;

use super::params::{interface_angle, CodeParams};
use crate::error::{Error, Result};
use crate::fock::{FockState, C64, TAIL_LEVELS, TAIL_TOLERANCE};

/// Codewords of one NP code in a fixed truncation.
#[derive(Debug, Clone)]
pub struct LogicalBasis {
    params: CodeParams,
    dim: usize,
    theta: Vec<C64>,
    pub plus: FockState,
    pub minus: FockState,
    /// `(|+> + |->) / sqrt(2)`; unit norm only up to the finite-energy overlap.
    pub zero: FockState,
    /// `(|+> - |->) / sqrt(2)`.
    pub one: FockState,
}

impl LogicalBasis {
    /// Parameters with `dim` filled in.
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Amplitudes `theta_n` actually used (possibly cut at `dim`).
    pub fn theta(&self) -> &[C64] {
        &self.theta
    }

    /// Orthonormal encoding of computational state `mu`: the normalized
    /// even (`mu = 0`) or odd (`mu = 1`) part of `|+>`.
    pub fn encoded(&self, mu: usize) -> Result<FockState> {
        match mu {
            0 => self.zero.normalized(),
            1 => self.one.normalized(),
            _ => Err(Error::InvalidParameter(format!("logical index {mu} is not 0 or 1"))),
        }
    }

    /// `<+|->`.
    pub fn overlap(&self) -> C64 {
        self.plus.inner(&self.minus)
    }
}

/// `|+->_L = exp(-i f pi n^2 / (2 s^2)) sum_n (+-1)^n theta_n |s n>`.
pub fn build_codewords(params: &CodeParams) -> Result<LogicalBasis> {
    let s = params.s as usize;
    let mut theta = params.amplitude.amplitudes()?;
    if theta.len() < 2 {
        return Err(Error::InvalidParameter("a logical qubit needs at least two populated amplitudes".into()));
    }
    let top = s * (theta.len() - 1);
    let dim = match params.dim {
        None => top + 1 + 2 * s + 8,
        Some(dim) if dim > top => dim,
        Some(dim) => {
            let cut: f64 = theta.iter().enumerate().filter(|(n, _)| s * n + TAIL_LEVELS >= dim).map(|(_, z)| z.norm_sqr()).sum();
            if cut > TAIL_TOLERANCE {
                return Err(Error::TruncationInsufficient { tail: cut, tolerance: TAIL_TOLERANCE, dim });
            }
            theta.truncate(dim.div_ceil(s));
            let norm = theta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            theta.iter_mut().for_each(|z| *z /= norm);
            dim
        }
    };
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("codewords need dim >= 2, got {dim}")));
    }

    let mut plus = vec![C64::new(0.0, 0.0); dim];
    let mut minus = plus.clone();
    let mut zero = plus.clone();
    let mut one = plus.clone();
    let sqrt2 = std::f64::consts::SQRT_2;
    for (n, &t) in theta.iter().enumerate() {
        let level = s * n;
        let amp = t * C64::from_polar(1.0, interface_angle(&params.f, params.s, level));
        plus[level] = amp;
        minus[level] = if n % 2 == 0 { amp } else { -amp };
        if n % 2 == 0 {
            zero[level] = amp * sqrt2;
        } else {
            one[level] = amp * sqrt2;
        }
    }
    let mut params = params.clone();
    params.dim = Some(dim);
    Ok(LogicalBasis {
        params,
        dim,
        theta,
        plus: FockState::from_amps(plus)?,
        minus: FockState::from_amps(minus)?,
        zero: FockState::from_amps(zero)?,
        one: FockState::from_amps(one)?,
    })
}

/// Summary numbers of one code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeMetrics {
    pub nbar: f64,
    pub delta_phi: f64,
    pub d_n: i64,
    pub d_phi: f64,
    pub overlap: f64,
}

/// Holevo phase uncertainty `|sum conj(theta_n) theta_{n+1}|^-2 - 1`.
pub fn holevo_phase_uncertainty(theta: &[C64]) -> Result<f64> {
    let sum: C64 = theta.windows(2).map(|w| w[0].conj() * w[1]).sum();
    let m = sum.norm();
    if m < 1e-300 {
        return Err(Error::PhaseUncertaintyUndefined);
    }
    Ok(m.powi(-2) - 1.0)
}

pub fn code_metrics(params: &CodeParams) -> Result<CodeMetrics> {
    let theta = params.amplitude.amplitudes()?;
    let delta_phi = holevo_phase_uncertainty(&theta)?;
    let s = params.s as f64;
    let nbar = s * theta.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum::<f64>();
    let overlap = theta.iter().enumerate().map(|(n, z)| if n % 2 == 0 { z.norm_sqr() } else { -z.norm_sqr() }).sum::<f64>();
    Ok(CodeMetrics { nbar, delta_phi, d_n: params.d_n(), d_phi: PI / s, overlap: overlap.abs() })
}
