use std::f64::consts::PI;

use super::{FockState, C64};
use crate::error::Result;

/// Quadrature Wigner function `W(x, p)` of a pure state with
/// `x = (a + a^dag)/sqrt 2`, normalized so that `int W dx dp = 1`.
///
/// Uses the Laguerre recursion for `W_{mn}`, the Wigner function of
/// `|m><n|`. Output is indexed `[ip][ix]`.
pub fn wigner_xp(state: &FockState, x_grid: &[f64], p_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    state.check_normalized()?;
    let psi = state.as_slice();
    let dim = psi.len();
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    let mut out = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let row = x_grid.iter().map(|&x| wigner_point(psi, x, p, &mut buf)).collect();
        out.push(row);
    }
    Ok(out)
}

fn wigner_point(psi: &[C64], x: f64, p: f64, w: &mut [C64]) -> f64 {
    let dim = psi.len();
    let rho = |m: usize, n: usize| psi[m] * psi[n].conj();
    let a = C64::new(x, p) / 2f64.sqrt();
    let a2 = a * 2.0;
    let a2c = a2.conj();

    w[0] = C64::new((-2.0 * a.norm_sqr()).exp() / PI, 0.0);
    let mut total = rho(0, 0).re * w[0].re;
    for n in 1..dim {
        w[n] = a2 * w[n - 1] / (n as f64).sqrt();
        total += 2.0 * (rho(0, n) * w[n]).re;
    }
    for m in 1..dim {
        let sm = (m as f64).sqrt();
        let mut temp = w[m];
        w[m] = (a2c * temp - w[m - 1] * sm) / sm;
        total += (rho(m, m) * w[m]).re;
        for n in (m + 1)..dim {
            let next = (a2 * w[n - 1] - temp * sm) / (n as f64).sqrt();
            temp = w[n];
            w[n] = next;
            total += 2.0 * (rho(m, n) * w[n]).re;
        }
    }
    total
}
