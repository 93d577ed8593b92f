use nalgebra::DMatrix;

use super::{ladder_operators, tail_mass, FockOperator, FockState, C64};
use crate::error::{Error, Result};

/// Tail tolerance for the displaced-squeezed vacuum produced by
/// [`gaussian_unitary`].
const GAUSSIAN_TAIL: f64 = 1e-10;

fn padded_dim(dim: usize) -> usize {
    dim + (dim / 2).max(24)
}

/// `D(alpha) S(r)` with `S(r) = exp[(r* a^2 - r a^dag^2) / 2]`.
///
/// Both exponentials are evaluated on a padded truncation and cropped back to
/// `dim`, so only the columns near the cutoff edge feel the truncation. The
/// image of the vacuum must have less than `1e-10` mass in the top five
/// levels of `dim`.
pub fn gaussian_unitary(alpha: C64, r: C64, dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("gaussian_unitary needs dim >= 2, got {dim}")));
    }
    if alpha == C64::new(0.0, 0.0) && r == C64::new(0.0, 0.0) {
        return Ok(FockOperator::identity(dim));
    }
    let work = padded_dim(dim);
    let lad = ladder_operators(work)?;
    let a = lad.a.mat();
    let ad = lad.a_dag.mat();

    let disp_gen: DMatrix<C64> = ad * alpha - a * alpha.conj();
    let a2 = a * a;
    let ad2 = ad * ad;
    let sq_gen: DMatrix<C64> = (a2 * r.conj() - ad2 * r) * C64::new(0.5, 0.0);

    let d = if alpha == C64::new(0.0, 0.0) { DMatrix::identity(work, work) } else { disp_gen.exp() };
    let s = if r == C64::new(0.0, 0.0) { DMatrix::identity(work, work) } else { sq_gen.exp() };
    let full = d * s;
    let out = full.view((0, 0), (dim, dim)).into_owned();

    let vac: Vec<C64> = out.column(0).iter().copied().collect();
    let tail = tail_mass(&vac);
    if tail > GAUSSIAN_TAIL {
        return Err(Error::TruncationInsufficient { tail, tolerance: GAUSSIAN_TAIL, dim });
    }
    FockOperator::from_matrix(out)
}

/// `|alpha, r> = D(alpha) S(r) |0>`, renormalized on the truncation.
pub fn gaussian_state(alpha: C64, r: C64, dim: usize) -> Result<FockState> {
    let u = gaussian_unitary(alpha, r, dim)?;
    let col = u.mat().column(0).into_owned();
    FockState::from_vector(col).normalized()
}

pub fn coherent_state(alpha: C64, dim: usize) -> Result<FockState> {
    gaussian_state(alpha, C64::new(0.0, 0.0), dim)
}
