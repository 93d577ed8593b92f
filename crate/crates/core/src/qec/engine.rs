use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Matrix2, Matrix4};
use rayon::prelude::*;

use super::config::{ParityMode, QecConfig};
use super::parity::{circuit_parity_kraus, cz_angle, parity_sector};
use super::regions::{decision_regions, Label};
use crate::codes::{build_codewords, interface_angle, CodeParams};
use crate::error::{Error, Result};
use crate::fock::{FockOperator, PhaseTransform, C64};
use crate::noise::{KrausSet, ShiftKraus};

/// Operator applied to the data mode on one noise branch.
pub trait BranchOperator: Sync {
    fn dim(&self) -> usize;
    fn apply_into(&self, amps: &[C64], out: &mut Vec<C64>);
}

impl BranchOperator for ShiftKraus {
    fn dim(&self) -> usize {
        ShiftKraus::dim(self)
    }

    fn apply_into(&self, amps: &[C64], out: &mut Vec<C64>) {
        self.apply_slice(amps, out);
    }
}

impl BranchOperator for FockOperator {
    fn dim(&self) -> usize {
        FockOperator::dim(self)
    }

    fn apply_into(&self, amps: &[C64], out: &mut Vec<C64>) {
        out.clear();
        out.extend((0..self.dim()).map(|r| (0..amps.len()).map(|c| self.mat()[(r, c)] * amps[c]).sum::<C64>()));
    }
}

/// How the ancilla side of a branch is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    /// Closed form of the ancilla state after the controlled phase: two FFTs
    /// per branch. Exact when each branch sits in a single parity sector.
    Reduced,
    /// Explicit two-mode amplitudes, one FFT per populated ancilla level,
    /// followed by projection on the ancilla logical basis.
    Joint,
}

/// Probability of one decoded syndrome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyndromeOutcome {
    pub k: u32,
    pub i: u8,
    pub m: i64,
    pub probability: f64,
}

impl SyndromeOutcome {
    pub fn label(&self) -> Label {
        Label { k: self.k, i: self.i, m: self.m }
    }
}

/// Logical map of one correction cycle.
#[derive(Debug, Clone)]
pub struct LogicalChannel {
    /// `process[(a, b), (mu, nu)] = E(|mu><nu|)[a, b]`, pairs flattened as `2x + y`.
    pub process: Matrix4<C64>,
    /// Weight outside the fresh code's logical subspace, averaged over inputs.
    pub leakage: f64,
    pub leakage_by_input: [f64; 2],
    /// Syndrome statistics for the maximally mixed input.
    pub syndromes: Vec<SyndromeOutcome>,
    /// Same labels, conditioned on input `|0>` and `|1>`.
    pub syndromes_by_input: [Vec<f64>; 2],
}

impl LogicalChannel {
    /// `E(|mu><nu|)` as a 2x2 matrix.
    pub fn output(&self, mu: usize, nu: usize) -> Matrix2<C64> {
        Matrix2::from_fn(|a, b| self.process[(a * 2 + b, mu * 2 + nu)])
    }

    /// `Tr E(I/2) + leakage`.
    pub fn total_weight(&self) -> f64 {
        0.5 * (self.output(0, 0).trace().re + self.output(1, 1).trace().re) + self.leakage
    }

    /// Choi matrix `C[(mu, a), (nu, b)] = E(|mu><nu|)[a, b]`.
    pub fn choi(&self) -> Matrix4<C64> {
        Matrix4::from_fn(|r, c| self.process[((r % 2) * 2 + c % 2, (r / 2) * 2 + c / 2)])
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        self.choi().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Most probable syndrome.
    pub fn dominant(&self) -> Option<SyndromeOutcome> {
        self.syndromes.iter().copied().max_by(|a, b| a.probability.total_cmp(&b.probability))
    }

    /// Identity channel, used as a reference.
    pub fn identity() -> Self {
        let mut process = Matrix4::zeros();
        for j in 0..4 {
            process[(j, j)] = C64::new(1.0, 0.0);
        }
        Self { process, leakage: 0.0, leakage_by_input: [0.0; 2], syndromes: Vec::new(), syndromes_by_input: [Vec::new(), Vec::new()] }
    }
}

/// Entanglement fidelity `1/4 sum_{mu nu} <mu| E(|mu><nu|) |nu>`; leaked
/// weight simply never contributes.
pub fn channel_fidelity(lc: &LogicalChannel) -> f64 {
    (0..4).map(|j| lc.process[(j, j)].re).sum::<f64>() / 4.0
}

fn recovery(label: &Label) -> Matrix2<C64> {
    let h = Matrix2::new(1.0, 1.0, 1.0, -1.0).map(|x: f64| C64::new(x * FRAC_1_SQRT_2, 0.0));
    let z = Matrix2::new(1.0, 0.0, 0.0, -1.0).map(|x: f64| C64::new(x, 0.0));
    let x = Matrix2::new(0.0, 1.0, 1.0, 0.0).map(|x: f64| C64::new(x, 0.0));
    let mut r = h;
    if label.m.rem_euclid(2) == 1 {
        r *= z;
    }
    if label.i == 1 {
        r *= x;
    }
    r
}

/// Readout outcome acting on the data mode: weight per parity sector plus
/// the sector the decoder assumes.
struct Readout {
    decoded: u32,
    coeffs: Vec<C64>,
}

struct Prepared {
    s: u32,
    s_anc: u32,
    dim: usize,
    m: usize,
    tf: PhaseTransform,
    encoded: [Vec<C64>; 2],
    anc_encoded: [Vec<C64>; 2],
    anc_plus: Vec<C64>,
    unshear: Vec<C64>,
    readouts: Vec<Readout>,
    labels: Vec<Label>,
    /// `label_at[k][j]` indexes `labels`.
    label_at: Vec<Vec<usize>>,
    pipeline: Pipeline,
}

/// Per-branch sums: for every label a 4x4 block `(mu a),(nu b)`.
struct BranchSums {
    blocks: Vec<[C64; 16]>,
    leakage: [f64; 2],
}

impl Prepared {
    fn new(code: &CodeParams, cfg: &QecConfig, pipeline: Pipeline) -> Result<Self> {
        cfg.validate(code)?;
        let basis = build_codewords(code)?;
        let anc_params = cfg.ancilla.clone().unwrap_or_else(|| code.clone());
        let anc = build_codewords(&anc_params)?;
        let dim = basis.dim();
        let m = cfg.phase_points;
        if m < dim {
            return Err(Error::InvalidParameter(format!("phase_points = {m} must be >= code dim {dim}")));
        }
        let s = code.s;
        let regions = decision_regions(code, cfg)?;
        let labels = regions.labels();
        let index: HashMap<Label, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let step = 2.0 * PI / m as f64;
        let label_at = (0..s).map(|k| (0..m).map(|j| index[&regions.decode(k, j as f64 * step)]).collect()).collect();

        let readouts = match &cfg.parity {
            ParityMode::IdealProjective => (0..s)
                .map(|k| Readout {
                    decoded: k,
                    coeffs: (0..s).map(|x| C64::new(if x == k { 1.0 } else { 0.0 }, 0.0)).collect(),
                })
                .collect(),
            ParityMode::CircuitSim { alpha, dim } => circuit_parity_kraus(s, *alpha, *dim)?
                .into_iter()
                .map(|p| Readout { decoded: p.decoded, coeffs: p.coeffs })
                .collect(),
        };
        let pipeline = if matches!(cfg.parity, ParityMode::CircuitSim { .. }) { Pipeline::Joint } else { pipeline };

        let enc = |b: &crate::codes::LogicalBasis, mu| -> Result<Vec<C64>> { Ok(b.encoded(mu)?.as_slice().to_vec()) };
        let anc_encoded = [enc(&anc, 0)?, enc(&anc, 1)?];
        let anc_plus = anc_encoded[0].iter().zip(&anc_encoded[1]).map(|(a, b)| (a + b) * FRAC_1_SQRT_2).collect();
        Ok(Self {
            s,
            s_anc: anc_params.s,
            dim,
            m,
            tf: PhaseTransform::new(m),
            encoded: [enc(&basis, 0)?, enc(&basis, 1)?],
            anc_encoded,
            anc_plus,
            unshear: (0..dim).map(|n| C64::from_polar(1.0, -interface_angle(&code.f, s, n))).collect(),
            readouts,
            labels,
            label_at,
            pipeline,
        })
    }

    /// Ancilla logical amplitudes `v[j] = (v_0, v_1)` on every grid point and
    /// the leaked weight, for one data vector already in R-NP form.
    fn ancilla_amplitudes(&self, chi: &[C64], decoded: u32) -> (Vec<[C64; 2]>, f64) {
        let m = self.m;
        match self.pipeline {
            Pipeline::Reduced => {
                let scale = 1.0 / (2.0 * m as f64).sqrt();
                let signed: Vec<C64> = chi
                    .iter()
                    .enumerate()
                    .map(|(n, c)| if ((n as u32 + decoded) / self.s) % 2 == 1 { -c } else { *c })
                    .collect();
                let f0 = self.tf.transform(chi);
                let f1 = self.tf.transform(&signed);
                (f0.iter().zip(&f1).map(|(a, b)| [a * scale, b * scale]).collect(), 0.0)
            }
            Pipeline::Joint => {
                let scale = 1.0 / (m as f64).sqrt();
                let mut v = vec![[C64::new(0.0, 0.0); 2]; m];
                let mut norm = vec![0.0; m];
                let mut col = vec![C64::new(0.0, 0.0); chi.len()];
                for (a, &plus) in self.anc_plus.iter().enumerate() {
                    if plus.norm() == 0.0 {
                        continue;
                    }
                    let undo = C64::from_polar(scale, -PI * (decoded as f64) * a as f64 / (self.s as f64 * self.s_anc as f64));
                    for (n, c) in chi.iter().enumerate() {
                        col[n] = c * plus * C64::from_polar(1.0, cz_angle(self.s, self.s_anc, n, a));
                    }
                    let e0 = self.anc_encoded[0][a].conj();
                    let e1 = self.anc_encoded[1][a].conj();
                    for (j, z) in self.tf.transform(&col).into_iter().enumerate() {
                        let z = z * undo;
                        v[j][0] += e0 * z;
                        v[j][1] += e1 * z;
                        norm[j] += z.norm_sqr();
                    }
                }
                let leak = v.iter().zip(&norm).map(|(x, n)| n - x[0].norm_sqr() - x[1].norm_sqr()).sum::<f64>();
                (v, leak.max(0.0))
            }
        }
    }

    fn branch<T: BranchOperator>(&self, op: &T) -> BranchSums {
        let mut blocks = vec![[C64::new(0.0, 0.0); 16]; self.labels.len()];
        let mut leakage = [0.0; 2];
        let mut hit = [Vec::new(), Vec::new()];
        for mu in 0..2 {
            op.apply_into(&self.encoded[mu], &mut hit[mu]);
        }
        for ro in &self.readouts {
            let mut amps: [Vec<[C64; 2]>; 2] = [Vec::new(), Vec::new()];
            for mu in 0..2 {
                let chi: Vec<C64> = hit[mu]
                    .iter()
                    .enumerate()
                    .map(|(n, w)| w * ro.coeffs[parity_sector(n, self.s) as usize] * self.unshear[n])
                    .collect();
                let (v, leak) = self.ancilla_amplitudes(&chi, ro.decoded);
                amps[mu] = v;
                leakage[mu] += leak;
            }
            let labels = &self.label_at[ro.decoded as usize];
            for j in 0..self.m {
                let blk = &mut blocks[labels[j]];
                let (v0, v1) = (&amps[0][j], &amps[1][j]);
                for (r, x) in [v0[0], v0[1], v1[0], v1[1]].into_iter().enumerate() {
                    for (c, y) in [v0[0], v0[1], v1[0], v1[1]].into_iter().enumerate() {
                        blk[r * 4 + c] += x * y.conj();
                    }
                }
            }
        }
        BranchSums { blocks, leakage }
    }
}

fn run<T: BranchOperator>(code: &CodeParams, ops: &[T], cfg: &QecConfig, pipeline: Pipeline) -> Result<LogicalChannel> {
    let prep = Prepared::new(code, cfg, pipeline)?;
    if let Some(bad) = ops.iter().find(|op| op.dim() != prep.dim) {
        return Err(Error::InvalidDimension(format!("noise operator dim {} differs from code dim {}", bad.dim(), prep.dim)));
    }
    let partial: Vec<BranchSums> = ops.par_iter().map(|op| prep.branch(op)).collect();
    let mut blocks = vec![[C64::new(0.0, 0.0); 16]; prep.labels.len()];
    let mut leakage = [0.0; 2];
    for p in &partial {
        for (acc, b) in blocks.iter_mut().zip(&p.blocks) {
            for (x, y) in acc.iter_mut().zip(b) {
                *x += y;
            }
        }
        leakage[0] += p.leakage[0];
        leakage[1] += p.leakage[1];
    }

    let mut process = Matrix4::<C64>::zeros();
    let mut syndromes = Vec::with_capacity(prep.labels.len());
    let mut by_input = [Vec::new(), Vec::new()];
    for (label, blk) in prep.labels.iter().zip(&blocks) {
        let r = recovery(label);
        for mu in 0..2 {
            for nu in 0..2 {
                let a = Matrix2::from_fn(|x, y| blk[(mu * 2 + x) * 4 + nu * 2 + y]);
                let out = r * a * r.adjoint();
                for x in 0..2 {
                    for y in 0..2 {
                        process[(x * 2 + y, mu * 2 + nu)] += out[(x, y)];
                    }
                }
            }
        }
        let p0 = (blk[0] + blk[5]).re;
        let p1 = (blk[10] + blk[15]).re;
        by_input[0].push(p0);
        by_input[1].push(p1);
        syndromes.push(SyndromeOutcome { k: label.k, i: label.i, m: label.m, probability: 0.5 * (p0 + p1) });
    }
    let lc = LogicalChannel {
        process,
        leakage: 0.5 * (leakage[0] + leakage[1]),
        leakage_by_input: leakage,
        syndromes,
        syndromes_by_input: by_input,
    };
    if lc.leakage > 0.5 {
        log::warn!("logical leakage {:.3} exceeds 1/2; decoder and code conventions disagree", lc.leakage);
    }
    let min_eig = lc.min_choi_eigenvalue();
    if min_eig < -1e-8 {
        return Err(Error::NumericalFailure(format!("logical channel is not completely positive (eigenvalue {min_eig:.3e})")));
    }
    Ok(lc)
}

/// One teleportation-based correction cycle under the Kraus set `noise`.
pub fn teleport_qec(code: &CodeParams, noise: &KrausSet, cfg: &QecConfig) -> Result<LogicalChannel> {
    run(code, noise.shift_operators(), cfg, Pipeline::Reduced)
}

/// Same cycle with arbitrary data-mode error operators (e.g. a single
/// injected displacement) and an explicit ancilla pipeline.
pub fn teleport_qec_ops(code: &CodeParams, ops: &[FockOperator], cfg: &QecConfig, pipeline: Pipeline) -> Result<LogicalChannel> {
    run(code, ops, cfg, pipeline)
}

/// [`teleport_qec`] with a chosen ancilla pipeline.
pub fn teleport_qec_with(code: &CodeParams, noise: &KrausSet, cfg: &QecConfig, pipeline: Pipeline) -> Result<LogicalChannel> {
    run(code, noise.shift_operators(), cfg, pipeline)
}
