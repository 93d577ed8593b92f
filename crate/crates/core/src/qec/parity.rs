use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{auto_dim, FockOperator, PhaseTransform, C64};

/// Largest mode dimension accepted by the literal two-mode simulations.
pub const MAX_TWO_MODE_DIM: usize = 30;

/// Sector of `|N>` under `P_{s,k}`: `N = s n - k`, i.e. `k = (-N) mod s`.
pub fn parity_sector(n: usize, s: u32) -> u32 {
    ((s as i64 - (n as i64 % s as i64)) % s as i64) as u32
}

/// `P_{s,k} = sum_n |s n - k><s n - k|` for `k = 0..s`.
pub fn modular_parity_projectors(s: u32, dim: usize) -> Result<Vec<FockOperator>> {
    if s == 0 {
        return Err(Error::InvalidParameter("rotation parameter s must be >= 1".into()));
    }
    Ok((0..s)
        .map(|k| FockOperator::diagonal(dim, |n| C64::new(if parity_sector(n, s) == k { 1.0 } else { 0.0 }, 0.0)))
        .collect())
}

/// Phase of `exp(-i pi n1 n2 / (s1 s2))`, reduced exactly.
pub(crate) fn cz_angle(s1: u32, s2: u32, n1: usize, n2: usize) -> f64 {
    let period = 2 * s1 as u128 * s2 as u128;
    let r = (n1 as u128 * n2 as u128) % period;
    -PI * r as f64 / (s1 as f64 * s2 as f64)
}

/// Two-mode diagonal `exp(-i pi n1 n2 / (s1 s2))` on `dims.0 x dims.1`,
/// indexed `n1 * dims.1 + n2`.
pub fn controlled_phase(s1: u32, s2: u32, dims: (usize, usize)) -> Result<FockOperator> {
    if s1 == 0 || s2 == 0 {
        return Err(Error::InvalidParameter("rotation parameters must be >= 1".into()));
    }
    if dims.0 > MAX_TWO_MODE_DIM || dims.1 > MAX_TWO_MODE_DIM {
        return Err(Error::ResourceGuard(format!(
            "two-mode operator {}x{} exceeds {MAX_TWO_MODE_DIM} levels per mode",
            dims.0, dims.1
        )));
    }
    let d2 = dims.1;
    Ok(FockOperator::diagonal(dims.0 * d2, |idx| C64::from_polar(1.0, cz_angle(s1, s2, idx / d2, idx % d2))))
}

/// Coherent amplitudes cut at `dim` and renormalized.
pub(crate) fn truncated_coherent(alpha: f64, dim: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(dim);
    let mut ln_mag = -alpha * alpha / 2.0;
    for n in 0..dim {
        if n > 0 {
            ln_mag += alpha.ln() - 0.5 * (n as f64).ln();
        }
        out.push(C64::new(ln_mag.exp(), 0.0));
    }
    let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    out.iter_mut().for_each(|z| *z /= norm);
    out
}

/// Sum over midpoint phases `X_j = (j + 1/2) 2pi/M` of `sum_n c_n e^{-i n X_j}`.
fn midpoint_transform(tf: &PhaseTransform, amps: &[C64]) -> Vec<C64> {
    let m = tf.n_points() as f64;
    let shifted: Vec<C64> = amps.iter().enumerate().map(|(n, c)| c * C64::from_polar(1.0, -(n as f64) * PI / m)).collect();
    tf.transform(&shifted)
}

/// Bin of midpoint `j` among `s` arcs centred on `2 pi b / s`.
fn bin_of(j: usize, m: usize, s: u32) -> u32 {
    let x = (j as f64 + 0.5) / m as f64 * s as f64;
    (x.round() as u32) % s
}

fn readout_points(dim: usize, s: u32) -> usize {
    (4 * dim).max(256).next_power_of_two().max(2 * s as usize).next_multiple_of(2 * s as usize)
}

/// Data-side Kraus operator of one readout outcome: `sum_k coeffs[k] P_{s,k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityKraus {
    pub decoded: u32,
    pub coeffs: Vec<C64>,
}

/// Kraus operators of the coherent-ancilla parity readout.
///
/// With `C_Z^2 = exp(-i 2pi N n / s)`, sector `k` rotates the ancilla to
/// `|alpha e^{i 2pi k / s}>`; outcome `b` is the arc around `2pi b / s`.
pub fn circuit_parity_kraus(s: u32, alpha: f64, dim: Option<usize>) -> Result<Vec<ParityKraus>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("parity ancilla amplitude {alpha} must be > 0")));
    }
    let dim = dim.unwrap_or_else(|| auto_dim(alpha * alpha));
    let beta = truncated_coherent(alpha, dim);
    let m = readout_points(dim, s);
    let tf = PhaseTransform::new(m);
    let norm = 1.0 / (m as f64).sqrt();
    let g: Vec<Vec<C64>> = (0..s)
        .map(|k| {
            let rotated: Vec<C64> = beta
                .iter()
                .enumerate()
                .map(|(n, b)| b * C64::from_polar(norm, 2.0 * PI * (k as f64) * n as f64 / s as f64))
                .collect();
            midpoint_transform(&tf, &rotated)
        })
        .collect();
    let su = s as usize;
    let mut out = Vec::new();
    for b in 0..s {
        let mut c = DMatrix::<C64>::zeros(su, su);
        for j in (0..m).filter(|&j| bin_of(j, m, s) == b) {
            for k1 in 0..su {
                for k2 in 0..su {
                    c[(k1, k2)] += g[k1][j] * g[k2][j].conj();
                }
            }
        }
        let eig = c.symmetric_eigen();
        for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda < -1e-10 {
                return Err(Error::NotCompletelyPositive { eigenvalue: lambda });
            }
            if lambda <= 1e-14 {
                continue;
            }
            let u = eig.eigenvectors.column(idx);
            out.push(ParityKraus { decoded: b, coeffs: u.iter().map(|z| z * lambda.sqrt()).collect() });
        }
    }
    Ok(out)
}

/// Confusion matrix `[injected k][decoded b]` of the coherent-ancilla parity
/// readout, from a literal two-mode simulation.
///
/// The data mode holds the uniform superposition of all levels in sector
/// `k`; the doubled controlled-phase gate is applied as a dense two-mode
/// operator and the ancilla phase is binned into `s` arcs.
pub fn parity_circuit_validation(s: u32, alpha_anc: f64, dims: (usize, usize)) -> Result<Vec<Vec<f64>>> {
    if !(alpha_anc > 0.0 && alpha_anc.is_finite()) {
        return Err(Error::InvalidParameter(format!("parity ancilla amplitude {alpha_anc} must be > 0")));
    }
    let (d1, d2) = dims;
    if s == 1 {
        controlled_phase(1, 1, dims)?;
        return Ok(vec![vec![1.0]]);
    }
    if d1 < s as usize || d2 < 2 {
        return Err(Error::InvalidDimension(format!("dims {dims:?} too small for s = {s}")));
    }
    let cz = controlled_phase(s, 1, dims)?;
    let cz2 = cz.compose(&cz);
    let beta = truncated_coherent(alpha_anc, d2);
    let m = readout_points(d2, s);
    let tf = PhaseTransform::new(m);
    let mut confusion = vec![vec![0.0; s as usize]; s as usize];
    for k in 0..s {
        let levels: Vec<usize> = (0..d1).filter(|&n| parity_sector(n, s) == k).collect();
        let amp = 1.0 / (levels.len() as f64).sqrt();
        let mut joint = nalgebra::DVector::<C64>::zeros(d1 * d2);
        for &n in &levels {
            for (a, b) in beta.iter().enumerate() {
                joint[n * d2 + a] = b * amp;
            }
        }
        let joint = cz2.apply_vec(&joint);
        for n in 0..d1 {
            let row: Vec<C64> = (0..d2).map(|a| joint[n * d2 + a]).collect();
            if row.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            for (j, z) in midpoint_transform(&tf, &row).iter().enumerate() {
                confusion[k as usize][bin_of(j, m, s) as usize] += z.norm_sqr() / m as f64;
            }
        }
    }
    Ok(confusion)
}
