use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::channel::{lindblad_channel, ChannelSectors, NoiseParams};
use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockState, C64};

/// Default cut on Choi eigenvalues.
pub const DEFAULT_KRAUS_TOL: f64 = 1e-12;

/// Choi eigenvalues below this are treated as a broken channel.
const NEGATIVE_EIGENVALUE_LIMIT: f64 = -1e-8;

/// Kraus operator that lowers the photon number by exactly `shift`:
/// `K = sum_a coeffs[a] |a><a + shift|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftKraus {
    pub shift: usize,
    pub coeffs: Vec<f64>,
    /// Choi eigenvalue, equal to the Hilbert-Schmidt weight `Tr K^dag K`.
    pub weight: f64,
}

impl ShiftKraus {
    pub fn dim(&self) -> usize {
        self.coeffs.len() + self.shift
    }

    pub fn apply_slice(&self, amps: &[C64], out: &mut Vec<C64>) {
        out.clear();
        out.resize(amps.len(), C64::new(0.0, 0.0));
        for (a, c) in self.coeffs.iter().enumerate() {
            if a + self.shift < amps.len() {
                out[a] = amps[a + self.shift] * *c;
            }
        }
    }

    pub fn apply(&self, state: &FockState) -> FockState {
        let mut out = Vec::new();
        self.apply_slice(state.as_slice(), &mut out);
        FockState::from_amps(out).expect("non-empty state")
    }

    pub fn to_operator(&self) -> FockOperator {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (a, c) in self.coeffs.iter().enumerate() {
            m[(a, a + self.shift)] = C64::new(*c, 0.0);
        }
        FockOperator::from_matrix(m).expect("square")
    }

    fn cropped(&self, dim: usize) -> Option<ShiftKraus> {
        if self.shift >= dim {
            return None;
        }
        let coeffs = self.coeffs[..dim - self.shift].to_vec();
        let weight = coeffs.iter().map(|c| c * c).sum();
        Some(ShiftKraus { shift: self.shift, coeffs, weight })
    }
}

/// Operator-sum form of a channel, heaviest operators first.
#[derive(Debug, Clone)]
pub struct KrausSet {
    dim: usize,
    operators: Vec<ShiftKraus>,
}

impl KrausSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn shift_operators(&self) -> &[ShiftKraus] {
        &self.operators
    }

    pub fn operators(&self) -> Vec<FockOperator> {
        self.operators.iter().map(ShiftKraus::to_operator).collect()
    }

    /// `sum_k K rho K^dag`.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for k in &self.operators {
            let l = k.shift;
            for a in 0..k.coeffs.len() {
                for b in 0..k.coeffs.len() {
                    out[(a, b)] += rho[(a + l, b + l)] * (k.coeffs[a] * k.coeffs[b]);
                }
            }
        }
        out
    }

    /// `max |sum K^dag K - I|` over levels below `dim - margin`.
    pub fn completeness_defect(&self, margin: usize) -> f64 {
        let mut diag = vec![0.0; self.dim];
        for k in &self.operators {
            for (a, c) in k.coeffs.iter().enumerate() {
                diag[a + k.shift] += c * c;
            }
        }
        diag[..self.dim.saturating_sub(margin)].iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max)
    }

    fn cropped(&self, dim: usize) -> KrausSet {
        let mut operators: Vec<ShiftKraus> = self.operators.iter().filter_map(|k| k.cropped(dim)).collect();
        operators.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.shift.cmp(&b.shift)));
        KrausSet { dim, operators }
    }
}

/// Kraus operators from the Choi matrix of `channel`.
///
/// The loss + dephasing channel only maps `|a+l><b+l|` onto `|a><b|`, so
/// the Choi matrix splits into one real symmetric block per loss count `l`.
/// Every eigenvector of a block with eigenvalue above `tol` gives one
/// operator; the sign is fixed so the first non-zero coefficient is positive.
pub fn kraus_extract(channel: &ChannelSectors, tol: f64) -> Result<KrausSet> {
    let dim = channel.dim();
    let mut operators = Vec::new();
    for l in 0..dim {
        let size = dim - l;
        let block = DMatrix::from_fn(size, size, |a, b| channel.transfer(a, b, l));
        if block.iter().all(|x| x.abs() <= tol * 1e-3) {
            continue;
        }
        let eig = SymmetricEigen::new(block);
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda < NEGATIVE_EIGENVALUE_LIMIT {
                return Err(Error::NotCompletelyPositive { eigenvalue: lambda });
            }
            if lambda <= tol {
                continue;
            }
            let v: DVector<f64> = eig.eigenvectors.column(i).into_owned();
            let lead = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
            let scale = lambda.sqrt() * lead.signum();
            operators.push(ShiftKraus { shift: l, coeffs: v.iter().map(|x| x * scale).collect(), weight: lambda });
        }
    }
    operators.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.shift.cmp(&b.shift)));
    Ok(KrausSet { dim, operators })
}

type CacheKey = (u64, u64, usize, u64);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<KrausSet>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<KrausSet>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoized Kraus set of the loss + dephasing channel.
///
/// Sets are built on `dim` rounded up to a multiple of 16 and cropped; since
/// the channel never raises the photon number, cropping is exact.
pub fn noise_kraus(params: NoiseParams, dim: usize, tol: f64) -> Result<Arc<KrausSet>> {
    let padded = dim.div_ceil(16).max(1) * 16;
    let key = (params.gamma_t.to_bits(), params.kappa_t.to_bits(), padded, tol.to_bits());
    let full = {
        let hit = cache().lock().expect("kraus cache").get(&key).cloned();
        match hit {
            Some(set) => set,
            None => {
                let set = Arc::new(kraus_extract(&lindblad_channel(params, padded)?, tol)?);
                cache().lock().expect("kraus cache").insert(key, set.clone());
                set
            }
        }
    };
    Ok(if padded == dim { full } else { Arc::new(full.cropped(dim)) })
}
