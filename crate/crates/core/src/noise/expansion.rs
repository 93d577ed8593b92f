use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{np_displace, FockOperator, NpVector, PhaseGrid, C64};

/// Weight `c(phi) = sqrt(gt) e^{i phi/2} / (4 sqrt(pi) (gt/2 + i phi)^{3/2})`
/// of the single-loss operator on `D(1, phi)`.
pub fn loss_weight(gamma_t: f64, phi: f64) -> C64 {
    let denom = C64::new(gamma_t / 2.0, phi).powf(1.5) * (4.0 * PI.sqrt());
    C64::from_polar(gamma_t.sqrt(), phi / 2.0) / denom
}

/// `sqrt(gt) a exp(-gt n / 2)`.
pub fn first_order_loss(gamma_t: f64, dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("need dim >= 2, got {dim}")));
    }
    let mut m = DMatrix::zeros(dim, dim);
    for n in 0..dim - 1 {
        let k = (n + 1) as f64;
        m[(n, n + 1)] = C64::new(gamma_t.sqrt() * k.sqrt() * (-gamma_t * k / 2.0).exp(), 0.0);
    }
    FockOperator::from_matrix(m)
}

/// Max-norm gap between `sqrt(gt) a e^{-gt n/2}` and the grid sum
/// `sum_phi c(phi) D(1, phi) dphi` over `(-pi, pi]`, on Fock rows below
/// `dim / 2`.
pub fn loss_expansion_residual(gamma_t: f64, dim: usize, grid: &PhaseGrid) -> Result<f64> {
    if !(gamma_t > 0.0 && gamma_t < 0.5) {
        return Err(Error::InvalidParameter(format!("gamma_t = {gamma_t} must lie in (0, 0.5)")));
    }
    let required = gamma_t / 2.0;
    let spacing = grid.spacing();
    if spacing > required {
        let suggested_points = ((2.0 * PI / required).ceil() as usize).next_power_of_two();
        return Err(Error::GridTooCoarse { spacing, required, suggested_points });
    }
    let lhs = first_order_loss(gamma_t, dim)?;
    let rows = dim / 2;
    let nodes = grid.centered_points();
    let mut worst = 0.0f64;
    for n in 0..rows.min(dim - 1) {
        let mut acc = C64::new(0.0, 0.0);
        for &phi in &nodes {
            acc += loss_weight(gamma_t, phi) * C64::from_polar(1.0, (0.5 + n as f64) * phi);
        }
        acc *= spacing;
        worst = worst.max((acc - lhs.mat()[(n, n + 1)]).norm());
    }
    Ok(worst)
}

/// Max-norm gap between `sqrt(kt) n` and `[D(0, sqrt(kt)) - D(0, -sqrt(kt))] / 2i`
/// over Fock levels below `dim`.
pub fn dephasing_expansion_residual(kappa_t: f64, dim: usize) -> Result<f64> {
    if !(kappa_t > 0.0 && kappa_t.is_finite()) {
        return Err(Error::InvalidParameter(format!("kappa_t = {kappa_t} must be > 0")));
    }
    let theta = kappa_t.sqrt();
    let plus = np_displace(NpVector::new(0, theta), dim)?;
    let minus = np_displace(NpVector::new(0, -theta), dim)?;
    let approx = plus.sub(&minus).scale(C64::new(0.0, -0.5));
    let exact = FockOperator::diagonal(dim, |n| C64::new(theta * n as f64, 0.0));
    Ok(exact.max_abs_diff(&approx))
}
