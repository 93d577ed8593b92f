use nalgebra::DMatrix;

use super::codewords::LogicalBasis;
use crate::error::{Error, Result};
use crate::fock::{sigma, FockOperator, C64};

/// QEC matrix `M[(j,mu),(k,nu)] = <mu_L| E_j^dag E_k |nu_L>` (row `2j + mu`)
/// and the summed squared size of its Knill-Laflamme violations.
#[derive(Debug, Clone)]
pub struct KlMatrix {
    pub matrix: DMatrix<C64>,
    pub cost: f64,
}

impl KlMatrix {
    pub fn n_errors(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn entry(&self, j: usize, mu: usize, k: usize, nu: usize) -> C64 {
        self.matrix[(2 * j + mu, 2 * k + nu)]
    }
}

/// Built on the orthonormal encodings [`LogicalBasis::encoded`].
pub fn kl_matrix(basis: &LogicalBasis, errors: &[FockOperator]) -> Result<KlMatrix> {
    let logical = [basis.encoded(0)?, basis.encoded(1)?];
    let mut images = Vec::with_capacity(2 * errors.len());
    for e in errors {
        if e.dim() != basis.dim() {
            return Err(Error::InvalidDimension(format!("error operator dim {} differs from code dim {}", e.dim(), basis.dim())));
        }
        for state in &logical {
            images.push(e.apply_vec(state.amps()));
        }
    }
    let size = images.len();
    let matrix = DMatrix::from_fn(size, size, |a, b| images[a].dotc(&images[b]));
    let mut cost = 0.0;
    for j in 0..errors.len() {
        for k in 0..errors.len() {
            let m = |mu: usize, nu: usize| matrix[(2 * j + mu, 2 * k + nu)];
            cost += m(0, 1).norm_sqr() + m(1, 0).norm_sqr() + (m(0, 0) - m(1, 1)).norm_sqr();
        }
    }
    Ok(KlMatrix { matrix, cost })
}

/// Smallest `l > 0` whose pure shift `Sigma_l` violates the KL conditions
/// (cost of `{I, Sigma_l}` above `threshold`), searched up to `l_max`.
pub fn first_violating_shift(basis: &LogicalBasis, l_max: i64, threshold: f64) -> Result<Option<i64>> {
    let id = FockOperator::identity(basis.dim());
    for l in 1..=l_max.min(basis.dim() as i64 - 1) {
        let kl = kl_matrix(basis, &[id.clone(), sigma(l, basis.dim())?])?;
        if kl.cost > threshold {
            return Ok(Some(l));
        }
    }
    Ok(None)
}
