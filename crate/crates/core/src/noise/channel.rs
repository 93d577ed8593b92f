use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::C64;

/// Loss exposure `gamma t` and dephasing exposure `kappa t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub gamma_t: f64,
    pub kappa_t: f64,
}

impl NoiseParams {
    pub fn new(gamma_t: f64, kappa_t: f64) -> Result<Self> {
        for (name, v) in [("gamma_t", gamma_t), ("kappa_t", kappa_t)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be finite and >= 0")));
            }
            if v > 0.5 {
                log::warn!("{name} = {v} is far outside the weak-noise regime");
            }
        }
        Ok(Self { gamma_t, kappa_t })
    }

    pub fn is_identity(&self) -> bool {
        self.gamma_t == 0.0 && self.kappa_t == 0.0
    }
}

/// `exp(t L)` for `L rho = gamma D[a] rho + kappa D[n] rho`, stored per
/// coherence order `d = n - m`.
///
/// Sector `d` acts on the vector `v_j = rho_{j+d, j}` (or `rho_{j, j+|d|}`
/// for negative `d`, which shares the same real propagator).
#[derive(Debug, Clone)]
pub struct ChannelSectors {
    dim: usize,
    params: NoiseParams,
    sectors: Vec<DMatrix<f64>>,
}

/// Generator of sector `d >= 0`, dimension `dim - d`.
pub(crate) fn sector_generator(params: NoiseParams, dim: usize, d: usize) -> DMatrix<f64> {
    let size = dim - d;
    let (g, k) = (params.gamma_t, params.kappa_t);
    let df = d as f64;
    DMatrix::from_fn(size, size, |i, j| {
        if i == j {
            -g * (2.0 * i as f64 + df) / 2.0 - k * df * df / 2.0
        } else if j == i + 1 {
            g * (((i + d + 1) * (i + 1)) as f64).sqrt()
        } else {
            0.0
        }
    })
}

pub fn lindblad_channel(params: NoiseParams, dim: usize) -> Result<ChannelSectors> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("channel needs dim >= 2, got {dim}")));
    }
    let sectors = (0..dim)
        .into_par_iter()
        .map(|d| {
            if params.gamma_t == 0.0 {
                let v = (-params.kappa_t * (d * d) as f64 / 2.0).exp();
                DMatrix::from_diagonal_element(dim - d, dim - d, v)
            } else {
                sector_generator(params, dim, d).exp()
            }
        })
        .collect();
    Ok(ChannelSectors { dim, params, sectors })
}

impl ChannelSectors {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> NoiseParams {
        self.params
    }

    /// Propagator of coherence order `|d|`.
    pub fn sector(&self, d: usize) -> &DMatrix<f64> {
        &self.sectors[d]
    }

    /// Coefficient of `|a><b|` in the image of `|a+l><b+l|`.
    pub(crate) fn transfer(&self, a: usize, b: usize, l: usize) -> f64 {
        let (lo, d) = if a >= b { (b, a - b) } else { (a, b - a) };
        self.sectors[d][(lo, lo + l)]
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::InvalidDimension(format!(
                "density matrix is {}x{}, channel dim is {}",
                rho.nrows(),
                rho.ncols(),
                self.dim
            )));
        }
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (d, p) in self.sectors.iter().enumerate() {
            let size = self.dim - d;
            for i in 0..size {
                let (mut lower, mut upper) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                for j in i..size {
                    let c = p[(i, j)];
                    if c != 0.0 {
                        lower += rho[(j + d, j)] * c;
                        upper += rho[(j, j + d)] * c;
                    }
                }
                out[(i + d, i)] = lower;
                if d > 0 {
                    out[(i, i + d)] = upper;
                }
            }
        }
        Ok(out)
    }

    /// Largest deviation of the population sector columns from unit sum,
    /// ignoring the top `margin` levels.
    pub fn trace_defect(&self, margin: usize) -> f64 {
        let p = &self.sectors[0];
        (0..self.dim.saturating_sub(margin)).map(|j| (p.column(j).sum() - 1.0).abs()).fold(0.0, f64::max)
    }
}
