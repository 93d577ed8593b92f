use nalgebra::{DMatrix, DVector};

use super::{FockState, C64};
use crate::error::{Error, Result};

/// Dense operator on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    mat: DMatrix<C64>,
}

impl FockOperator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "operator must be square and non-empty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: DMatrix::zeros(dim, dim) }
    }

    /// Diagonal operator with entries `f(n)`.
    pub fn diagonal(dim: usize, f: impl Fn(usize) -> C64) -> Self {
        let d = DVector::from_iterator(dim, (0..dim).map(f));
        Self { mat: DMatrix::from_diagonal(&d) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint() }
    }

    pub fn apply(&self, state: &FockState) -> FockState {
        assert_eq!(self.dim(), state.dim(), "operator/state dimension mismatch");
        FockState::from_vector(&self.mat * state.amps())
    }

    pub fn apply_vec(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.mat * v
    }

    pub fn compose(&self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Self { mat: &self.mat * &rhs.mat }
    }

    pub fn scale(&self, c: C64) -> FockOperator {
        Self { mat: &self.mat * c }
    }

    pub fn add(&self, rhs: &FockOperator) -> FockOperator {
        Self { mat: &self.mat + &rhs.mat }
    }

    pub fn sub(&self, rhs: &FockOperator) -> FockOperator {
        Self { mat: &self.mat - &rhs.mat }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Largest entry magnitude of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &FockOperator) -> f64 {
        max_abs(&(&self.mat - &rhs.mat))
    }

    /// Largest entry magnitude restricted to rows and columns `< limit`.
    pub fn max_abs_diff_block(&self, rhs: &FockOperator, limit: usize) -> f64 {
        let k = limit.min(self.dim());
        max_abs(&(self.mat.view((0, 0), (k, k)) - rhs.mat.view((0, 0), (k, k))))
    }

    /// Top-left `dim x dim` block.
    pub fn cropped(&self, dim: usize) -> FockOperator {
        assert!(dim <= self.dim());
        Self { mat: self.mat.view((0, 0), (dim, dim)).into_owned() }
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Annihilation, creation and number operators on a truncated space.
#[derive(Debug, Clone)]
pub struct Ladder {
    pub a: FockOperator,
    pub a_dag: FockOperator,
    pub n: FockOperator,
}

impl Ladder {
    /// Fock ladder shift `Sigma_l` on the same truncation.
    pub fn sigma(&self, l: i64) -> Result<FockOperator> {
        sigma(l, self.a.dim())
    }
}

pub fn ladder_operators(dim: usize) -> Result<Ladder> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!("ladder operators need dim >= 2, got {dim}")));
    }
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let a_dag = a.adjoint();
    let n = FockOperator::diagonal(dim, |k| C64::new(k as f64, 0.0));
    Ok(Ladder { a: FockOperator { mat: a }, a_dag: FockOperator { mat: a_dag }, n })
}

/// `Sigma_l = sum_n |n><n+l|`; negative `l` raises.
pub fn sigma(l: i64, dim: usize) -> Result<FockOperator> {
    if dim < 2 || l.unsigned_abs() as usize >= dim {
        return Err(Error::InvalidDimension(format!("|l| = {} must be < dim = {dim}", l.abs())));
    }
    let mut m = DMatrix::zeros(dim, dim);
    for n in 0..dim as i64 {
        let col = n + l;
        if (0..dim as i64).contains(&col) {
            m[(n as usize, col as usize)] = C64::new(1.0, 0.0);
        }
    }
    Ok(FockOperator { mat: m })
}

/// `R(phi) = exp(i n phi)`.
pub fn rotation(phi: f64, dim: usize) -> FockOperator {
    FockOperator::diagonal(dim, |n| C64::from_polar(1.0, n as f64 * phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annihilation_lowers_one_to_vacuum() {
        let lad = ladder_operators(5).unwrap();
        let out = lad.a.apply(&FockState::fock(1, 5).unwrap());
        assert_eq!(out, FockState::fock(0, 5).unwrap());
    }

    #[test]
    fn sigma_two_maps_five_to_three() {
        let s2 = sigma(2, 8).unwrap();
        assert_eq!(s2.apply(&FockState::fock(5, 8).unwrap()), FockState::fock(3, 8).unwrap());
        // negative shift raises
        let sm2 = sigma(-2, 8).unwrap();
        assert_eq!(sm2.apply(&FockState::fock(3, 8).unwrap()), FockState::fock(5, 8).unwrap());
    }

    #[test]
    fn annihilation_factors_through_shift() {
        let dim = 30;
        let lad = ladder_operators(dim).unwrap();
        let sqrt_n1 = FockOperator::diagonal(dim, |n| C64::new(((n + 1) as f64).sqrt(), 0.0));
        let rhs = sqrt_n1.compose(&lad.sigma(1).unwrap());
        assert!(lad.a.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(matches!(ladder_operators(1), Err(Error::InvalidDimension(_))));
        assert!(matches!(sigma(5, 5), Err(Error::InvalidDimension(_))));
        assert!(matches!(sigma(-5, 5), Err(Error::InvalidDimension(_))));
    }
}
