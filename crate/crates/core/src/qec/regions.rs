use std::f64::consts::PI;

use super::config::QecConfig;
use crate::codes::{build_codewords, vortex_sign, CodeParams};
use crate::error::{Error, Result};

/// Decoded syndrome label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub k: u32,
    pub i: u8,
    pub m: i64,
}

impl Label {
    /// `l_e = s m + k`.
    pub fn shift(&self, s: u32) -> i64 {
        s as i64 * self.m + self.k as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    /// Expected measured phase, folded into `[0, 2pi/s)`.
    pub angle: f64,
    pub i: u8,
    pub m: i64,
}

/// Nearest-candidate decoding tables, one per parity sector.
///
/// Given sector `k`, the measured phase is `i pi/s + sigma (m f pi/s + k f pi/s^2)`
/// up to the residual rotation error, with `m` running over the shifts
/// `l = s m + k` inside `[-G, L]`. The readout is `2pi/s`-periodic within a
/// sector, so candidates live on one period.
#[derive(Debug, Clone)]
pub struct DecisionRegions {
    s: u32,
    sigma: f64,
    sectors: Vec<Vec<Candidate>>,
}

/// Inclusive `m` range of sector `k` for the window `[-G, L]`.
pub fn m_window(s: u32, k: u32, g: i64, l: i64) -> (i64, i64) {
    let s = s as i64;
    let k = k as i64;
    ((-g - k).div_euclid(s) + i64::from((-g - k).rem_euclid(s) != 0), (l - k).div_euclid(s))
}

pub fn decision_regions(code: &CodeParams, cfg: &QecConfig) -> Result<DecisionRegions> {
    cfg.validate(code)?;
    let mut sigma = if code.f.is_zero() { -1.0 } else { vortex_sign(&build_codewords(code)?)? };
    if cfg.flip_vortex_sign {
        sigma = -sigma;
    }
    let s = code.s;
    let period = 2.0 * PI / s as f64;
    let shear = code.shear_angle();
    let mut sectors = Vec::with_capacity(s as usize);
    for k in 0..s {
        let (lo, hi) = m_window(s, k, cfg.g, cfg.l);
        let mut cands = Vec::new();
        for m in lo..=hi {
            for i in 0..2u8 {
                let raw = i as f64 * PI / s as f64 + sigma * (m as f64 * shear + k as f64 * shear / s as f64);
                cands.push(Candidate { angle: raw.rem_euclid(period), i, m });
            }
        }
        for (a, ca) in cands.iter().enumerate() {
            for cb in &cands[a + 1..] {
                let d = (ca.angle - cb.angle).rem_euclid(period);
                if d.min(period - d) < 1e-9 {
                    return Err(Error::CandidateCollision { angle: ca.angle });
                }
            }
        }
        sectors.push(cands);
    }
    Ok(DecisionRegions { s, sigma, sectors })
}

impl DecisionRegions {
    pub fn s(&self) -> u32 {
        self.s
    }

    /// Vortex orientation used for the candidates.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn candidates(&self, k: u32) -> &[Candidate] {
        &self.sectors[k as usize]
    }

    /// Nearest candidate to `angle`; ties go to smaller `|m|`, then `i = 0`.
    pub fn decode(&self, k: u32, angle: f64) -> Label {
        let period = 2.0 * PI / self.s as f64;
        let x = angle.rem_euclid(period);
        let mut best: Option<(f64, &Candidate)> = None;
        for c in &self.sectors[k as usize] {
            let d = (x - c.angle).rem_euclid(period);
            let d = d.min(period - d);
            let better = match best {
                None => true,
                Some((bd, bc)) => {
                    if (d - bd).abs() <= 1e-12 {
                        (c.m.abs(), c.i) < (bc.m.abs(), bc.i)
                    } else {
                        d < bd
                    }
                }
            };
            if better {
                best = Some((d, c));
            }
        }
        let c = best.expect("every sector has candidates").1;
        Label { k, i: c.i, m: c.m }
    }

    /// All labels, sector by sector.
    pub fn labels(&self) -> Vec<Label> {
        self.sectors
            .iter()
            .enumerate()
            .flat_map(|(k, c)| c.iter().map(move |c| Label { k: k as u32, i: c.i, m: c.m }))
            .collect()
    }
}
