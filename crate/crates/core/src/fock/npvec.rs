use std::ops::RangeInclusive;

use nalgebra::DMatrix;

use super::{wrap_pi, FockOperator, PhaseGrid, PhaseTransform, C64};
use crate::error::{Error, Result};

/// Number-phase vector `(l, phi)`: Fock shift `l`, phase `phi` in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpVector {
    pub l: i64,
    pub phi: f64,
}

impl NpVector {
    /// Reduces `phi` to `(-pi, pi]`.
    ///
    /// The displacement prefactor `exp(i l phi / 2)` is only defined up to
    /// `(-1)^l` under `phi -> phi + 2pi`; the reduced representative is the
    /// canonical one.
    pub fn new(l: i64, phi: f64) -> Self {
        Self { l, phi: wrap_pi(phi) }
    }

    /// `l phi' - phi l'`.
    pub fn cross(&self, other: &NpVector) -> f64 {
        self.l as f64 * other.phi - self.phi * other.l as f64
    }

    pub fn scaled(&self, k: i64) -> NpVector {
        NpVector::new(self.l * k, self.phi * k as f64)
    }

    pub fn plus(&self, other: &NpVector) -> NpVector {
        NpVector::new(self.l + other.l, self.phi + other.phi)
    }
}

/// Matrix entry of `D(l, phi)` at `(n, n + l)` with an unreduced phase.
fn displacement_entry(l: i64, phi: f64, n: i64) -> C64 {
    C64::from_polar(1.0, 0.5 * l as f64 * phi + n as f64 * phi)
}

fn displacement_raw(l: i64, phi: f64, dim: usize) -> Result<FockOperator> {
    if l.unsigned_abs() as usize >= dim {
        return Err(Error::InvalidDimension(format!("|l| = {} must be < dim = {dim}", l.abs())));
    }
    let mut m = DMatrix::zeros(dim, dim);
    for n in 0..dim as i64 {
        let col = n + l;
        if (0..dim as i64).contains(&col) {
            m[(n as usize, col as usize)] = displacement_entry(l, phi, n);
        }
    }
    FockOperator::from_matrix(m)
}

/// `D(n) = exp(i l phi / 2) R(phi) Sigma_l`.
pub fn np_displace(nvec: NpVector, dim: usize) -> Result<FockOperator> {
    displacement_raw(nvec.l, nvec.phi, dim)
}

/// Expansion weights `Tr(D^dag(l, phi) E)` sampled on a phase grid.
#[derive(Debug, Clone)]
pub struct NpWeights {
    dim: usize,
    l_values: Vec<i64>,
    grid: PhaseGrid,
    /// `weights[i][j]` belongs to `l_values[i]` and grid point `j`.
    weights: Vec<Vec<C64>>,
}

impl NpWeights {
    pub fn l_values(&self) -> &[i64] {
        &self.l_values
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn weights_for(&self, l: i64) -> Option<&[C64]> {
        self.l_values.iter().position(|&x| x == l).map(|i| self.weights[i].as_slice())
    }

    /// Largest weight magnitude for shift `l`.
    pub fn max_weight(&self, l: i64) -> f64 {
        self.weights_for(l).map_or(0.0, |w| w.iter().fold(0.0, |a, z| a.max(z.norm())))
    }

    /// Trapezoid quadrature of `sum_l int dphi/2pi  w(l, phi) D(l, phi)`.
    pub fn reconstruct(&self) -> FockOperator {
        let dim = self.dim;
        let dphi = self.grid.spacing();
        let mut out = DMatrix::zeros(dim, dim);
        for (i, &l) in self.l_values.iter().enumerate() {
            let w = &self.weights[i];
            for n in 0..dim as i64 {
                let col = n + l;
                if !(0..dim as i64).contains(&col) {
                    continue;
                }
                let mut acc = C64::new(0.0, 0.0);
                for (j, &phi) in self.grid.points().iter().enumerate() {
                    acc += w[j] * displacement_entry(l, phi, n);
                }
                out[(n as usize, col as usize)] = acc * (dphi / std::f64::consts::TAU);
            }
        }
        FockOperator::from_matrix(out).expect("square by construction")
    }

    /// `max |reconstruct() - op|`.
    pub fn residual(&self, op: &FockOperator) -> f64 {
        self.reconstruct().max_abs_diff(op)
    }

    /// Errors when the reconstruction misses `op` by more than `tolerance`.
    pub fn check(&self, op: &FockOperator, tolerance: f64) -> Result<f64> {
        let residual = self.residual(op);
        if residual > tolerance {
            return Err(Error::ReconstructionResidual { residual, tolerance });
        }
        Ok(residual)
    }
}

/// Samples `Tr(D^dag((l, phi)) op)` for every `l` in `l_range` and every grid
/// phase.
pub fn np_decompose(op: &FockOperator, l_range: RangeInclusive<i64>, grid: &PhaseGrid) -> NpWeights {
    let dim = op.dim();
    let tf = PhaseTransform::new(grid.n_points());
    let mut l_values = Vec::new();
    let mut weights = Vec::new();
    for l in l_range {
        let mut diag = vec![C64::new(0.0, 0.0); dim];
        for n in 0..dim as i64 {
            let col = n + l;
            if (0..dim as i64).contains(&col) {
                diag[n as usize] = op.mat()[(n as usize, col as usize)];
            }
        }
        // sum_n exp(-i n phi) E[n, n+l], then the half-angle prefactor
        let summed = tf.transform(&diag);
        let w = summed
            .iter()
            .zip(grid.points())
            .map(|(z, &phi)| z * C64::from_polar(1.0, -0.5 * l as f64 * phi))
            .collect();
        l_values.push(l);
        weights.push(w);
    }
    NpWeights { dim, l_values, grid: grid.clone(), weights }
}
