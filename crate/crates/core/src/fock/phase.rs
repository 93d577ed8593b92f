use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::{FockState, C64};
use crate::error::{Error, Result};

/// Uniform grid on `[0, 2pi)` for canonical phase integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    n_points: usize,
    points: Vec<f64>,
}

impl PhaseGrid {
    /// Smallest grid accepted for POVM integration.
    pub const MIN_POVM_POINTS: usize = 256;

    pub fn new(n_points: usize) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::InvalidParameter("phase grid needs at least one point".into()));
        }
        let step = TAU / n_points as f64;
        let points = (0..n_points).map(|j| j as f64 * step).collect();
        Ok(Self { n_points, points })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.n_points as f64
    }

    /// Grid points mapped to `(-pi, pi]`, same order.
    pub fn centered_points(&self) -> Vec<f64> {
        self.points.iter().map(|&x| if x > PI { x - TAU } else { x }).collect()
    }
}

/// Evaluates `sum_n c_n exp(-i n X_j)` on every grid point with one FFT.
///
/// Amplitudes beyond the grid size are folded (`n mod M`), which is exact on
/// the grid points themselves.
#[derive(Clone)]
pub struct PhaseTransform {
    fft: Arc<dyn Fft<f64>>,
    n_points: usize,
}

impl std::fmt::Debug for PhaseTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhaseTransform").field("n_points", &self.n_points).finish()
    }
}

impl PhaseTransform {
    pub fn new(n_points: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(n_points);
        Self { fft, n_points }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Writes the transform of `amps` into `out` (resized to the grid).
    pub fn transform_into(&self, amps: &[C64], out: &mut Vec<C64>) {
        out.clear();
        out.resize(self.n_points, C64::new(0.0, 0.0));
        for (n, &a) in amps.iter().enumerate() {
            out[n % self.n_points] += a;
        }
        self.fft.process(out);
    }

    pub fn transform(&self, amps: &[C64]) -> Vec<C64> {
        let mut out = Vec::new();
        self.transform_into(amps, &mut out);
        out
    }
}

/// Canonical phase distribution `|<e_X|psi>|^2` on `grid`, with
/// `|e_X> = (2pi)^{-1/2} sum_n exp(i n X) |n>`.
pub fn phase_povm_weights(state: &FockState, grid: &PhaseGrid) -> Result<Vec<f64>> {
    state.check_normalized()?;
    let amps = PhaseTransform::new(grid.n_points()).transform(state.as_slice());
    Ok(amps.iter().map(|z| z.norm_sqr() / TAU).collect())
}
