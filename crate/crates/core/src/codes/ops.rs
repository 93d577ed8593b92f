use std::f64::consts::PI;

use super::codewords::{build_codewords, LogicalBasis};
use super::params::{interface_angle, CodeParams, Fraction};
use crate::error::{Error, Result};
use crate::fock::{np_displace, rotation, wrap_tau, FockOperator, FockState, NpVector, C64};

/// Logical Paulis and stabilizers of a code.
#[derive(Debug, Clone)]
pub struct LogicalOperators {
    pub x_bar: FockOperator,
    pub z_bar: FockOperator,
    pub s_x: FockOperator,
    pub s_z: FockOperator,
}

/// `n_x = (s, f pi / s)`.
pub fn pauli_x_vector(params: &CodeParams) -> NpVector {
    NpVector::new(params.s as i64, params.shear_angle())
}

/// `n_z = (0, pi / s)`.
pub fn pauli_z_vector(params: &CodeParams) -> NpVector {
    NpVector::new(0, params.d_phi())
}

pub fn logical_operators(params: &CodeParams) -> Result<LogicalOperators> {
    let dim = match params.dim {
        Some(d) => d,
        None => build_codewords(params)?.dim(),
    };
    let nx = pauli_x_vector(params);
    let nz = pauli_z_vector(params);
    Ok(LogicalOperators {
        x_bar: np_displace(nx, dim)?,
        z_bar: np_displace(nz, dim)?,
        s_x: np_displace(nx.scaled(2), dim)?,
        s_z: np_displace(nz.scaled(2), dim)?,
    })
}

/// Outcome of [`check_pauli_pair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliPair {
    pub area: f64,
    pub valid: bool,
}

/// A pair of NP vectors forms a logical Pauli pair iff it spans area `pi`.
pub fn check_pauli_pair(nx: NpVector, nz: NpVector) -> PauliPair {
    let area = nx.cross(&nz).abs();
    PauliPair { area, valid: (area - PI).abs() < 1e-12 }
}

/// Point of the code lattice in number-phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint {
    pub n: f64,
    pub phi: f64,
}

/// Lattice `r (s, -f pi/s) + t (0, pi/s) + n_0` with `0 <= n <= n_max` and
/// phases folded into `[0, 2pi)`; `origin = (nu_x, nu_z)` in lattice units.
pub fn lattice_points(s: u32, f: Fraction, origin: (f64, f64), n_max: u32) -> Result<Vec<LatticePoint>> {
    if s == 0 {
        return Err(Error::InvalidParameter("rotation parameter s must be >= 1".into()));
    }
    let (nu_x, nu_z) = origin;
    if !(0.0..1.0).contains(&nu_x) || !(0.0..1.0).contains(&nu_z) {
        return Err(Error::InvalidParameter(format!("lattice origin {origin:?} must lie in [0, 1)^2")));
    }
    let sf = s as f64;
    let shear = PI * f.p() as f64 / (f.q() as f64 * sf);
    let mut out = Vec::new();
    let mut r = 0u32;
    loop {
        let x = r as f64 + nu_x;
        let n = sf * x;
        if n > n_max as f64 {
            break;
        }
        for t in 0..2 * s {
            let phi = -x * shear + (t as f64 + nu_z) * PI / sf;
            out.push(LatticePoint { n, phi: wrap_tau(phi) });
        }
        r += 1;
    }
    Ok(out)
}

/// `U_s(df) = exp(-i df pi n^2 / (2 s^2))`.
pub fn interface_gate(s: u32, delta_f: Fraction, dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("interface gate needs dim >= 2, got {dim}")));
    }
    if s == 0 {
        return Err(Error::InvalidParameter("rotation parameter s must be >= 1".into()));
    }
    Ok(FockOperator::diagonal(dim, |n| C64::from_polar(1.0, interface_angle(&delta_f, s, n))))
}

/// Result of comparing a lowered codeword with its predicted rotated image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexCheck {
    pub residual: f64,
    /// Alignment phase left over after the predicted prefactor.
    pub phase: C64,
    /// Rotation angle applied to the relabelled state.
    pub angle: f64,
    /// `exp(-i f l^2 pi / (2 s))`.
    pub prefactor: C64,
}

/// Checks `Sigma_l psi = exp(-i f l^2 pi/(2s)) R(-l f pi/s^2) psi~_l`, where
/// `psi~_l` is `psi` with its pre-interface amplitudes moved down by `l`.
pub fn vortex_check(basis: &LogicalBasis, l: i64, psi: &FockState) -> Result<VortexCheck> {
    let p = basis.params();
    let angle = -(l as f64) * PI * p.f.p() as f64 / (p.f.q() as f64 * (p.s as f64).powi(2));
    vortex_with_angle(basis, l, psi, angle)
}

fn vortex_with_angle(basis: &LogicalBasis, l: i64, psi: &FockState, angle: f64) -> Result<VortexCheck> {
    let p = basis.params();
    let dim = basis.dim();
    if psi.dim() != dim {
        return Err(Error::InvalidDimension(format!("state dim {} differs from code dim {dim}", psi.dim())));
    }
    let amps = psi.as_slice();
    let zero = C64::new(0.0, 0.0);
    let shifted = |src: &dyn Fn(usize) -> C64| -> Vec<C64> {
        (0..dim as i64).map(|m| if (0..dim as i64).contains(&(m + l)) { src((m + l) as usize) } else { zero }).collect()
    };
    let lhs = shifted(&|n| amps[n]);
    let mut tilde = shifted(&|n| amps[n] * C64::from_polar(1.0, -interface_angle(&p.f, p.s, n)));
    let mut tilde_norm = 0.0;
    for (m, z) in tilde.iter_mut().enumerate() {
        *z *= C64::from_polar(1.0, interface_angle(&p.f, p.s, m));
        tilde_norm += z.norm_sqr();
    }
    if tilde_norm < 1e-28 {
        return Err(Error::ZeroNorm { shift: l });
    }
    let prefactor = C64::from_polar(1.0, -PI * (p.f.p() * (l * l).rem_euclid(4 * p.f.q() * p.s as i64)) as f64 / (2.0 * p.f.q() as f64 * p.s as f64));
    let rot = rotation(angle, dim);
    let rhs: Vec<C64> = tilde.iter().enumerate().map(|(m, z)| prefactor * rot.mat()[(m, m)] * z).collect();
    let overlap: C64 = rhs.iter().zip(&lhs).map(|(r, x)| r.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    let residual = lhs.iter().zip(&rhs).map(|(x, r)| (x - phase * r).norm_sqr()).sum::<f64>().sqrt();
    Ok(VortexCheck { residual, phase, angle, prefactor })
}

/// Sign of the rotation a single loss imprints, relative to `+f pi / s^2`.
///
/// Decided numerically on `|+>_L` by comparing both orientations; codes
/// with `f = 0` carry no vortex and report `-1`.
pub fn vortex_sign(basis: &LogicalBasis) -> Result<f64> {
    let p = basis.params();
    if p.f.is_zero() {
        return Ok(-1.0);
    }
    let a = PI * p.f.p() as f64 / (p.f.q() as f64 * (p.s as f64).powi(2));
    let l = p.s as i64;
    let plus = vortex_with_angle(basis, l, &basis.plus, l as f64 * a)?.residual;
    let minus = vortex_with_angle(basis, l, &basis.plus, -(l as f64) * a)?.residual;
    Ok(if minus <= plus { -1.0 } else { 1.0 })
}
