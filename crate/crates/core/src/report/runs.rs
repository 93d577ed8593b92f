use rayon::prelude::*;
use serde_json::{json, Value};

use super::Cell;
use crate::codes::{build_codewords, code_metrics, lattice_points, AmplitudeSpec, CodeParams, LatticeKind};
use crate::config::{CodeType, RunConfig};
use crate::error::Result;
use crate::fock::{wigner_xp, FockState};
use crate::noise::NoiseParams;
use crate::qec::{channel_fidelity, QecConfig};
use crate::repeater::{
    cycle_channel, optimize_code, pauli_twirl, CodeFamily, Exposure, FamilyAmplitude, GaussianSearch, NoiseSource,
    Objective, OptimizerSettings, SearchSpace, SweepRecord,
};

pub const FIDELITY_COLUMNS: &[&str] = &[
    "code_type",
    "s",
    "p",
    "q",
    "alpha",
    "r",
    "nbar",
    "gamma_t",
    "kappa_t",
    "fidelity",
    "infidelity",
    "leakage",
    "seed",
];

pub const REPEATER_COLUMNS: &[&str] = &[
    "code_type",
    "s",
    "p",
    "q",
    "alpha",
    "r",
    "spacing_km",
    "distance_km",
    "Gamma",
    "Gamma_phi",
    "fidelity",
    "tau",
    "skrpm",
    "skr_bits_per_s",
];

pub const LATTICE_COLUMNS: &[&str] = &["n", "phi"];

pub const WIGNER_COLUMNS: &[&str] = &["x", "p", "plus", "minus", "zero", "one"];

fn code_cells(rec: &SweepRecord) -> Vec<Cell> {
    vec![
        rec.code_type.clone().into(),
        rec.s.into(),
        rec.p.into(),
        rec.q.into(),
        rec.alpha.into(),
        rec.r.into(),
    ]
}

fn settings(cfg: &RunConfig, seed: u64) -> OptimizerSettings {
    let opt = cfg.optimize.as_ref().expect("optimize block");
    OptimizerSettings { budget: opt.budget, restarts: opt.restarts, seed, phase_points: cfg.qec.phase_points }
}

/// Amplitude family searched around one sweep point.
fn family(cfg: &RunConfig, code: &CodeParams) -> CodeFamily {
    let opt = cfg.optimize.as_ref().expect("optimize block");
    let amplitude = match code.amplitude {
        AmplitudeSpec::Binomial { k } => FamilyAmplitude::Binomial { k_values: vec![k] },
        AmplitudeSpec::Gaussian { .. } => {
            let [r_lo, r_hi] = opt.r_range;
            match (cfg.sweep.as_ref().and_then(|s| s.nbar.as_ref()), opt.alpha_range) {
                (Some(_), _) | (None, None) => {
                    FamilyAmplitude::Gaussian(GaussianSearch::FixedNbar { nbar: code.nominal_nbar(), r: (r_lo, r_hi) })
                }
                (None, Some([a_lo, a_hi])) => {
                    FamilyAmplitude::Gaussian(GaussianSearch::Free { alpha: (a_lo, a_hi), r: (r_lo, r_hi) })
                }
            }
        }
    };
    CodeFamily { s: code.s, f: code.f, amplitude }
}

fn fidelity_record(cfg: &RunConfig, code: &CodeParams, noise: NoiseParams, seed: u64) -> Result<SweepRecord> {
    match &cfg.optimize {
        Some(opt) if cfg.code.code_type != CodeType::Binomial => {
            let space = SearchSpace { families: vec![family(cfg, code)], spacings_km: vec![] };
            let best = optimize_code(opt.objective.into(), &NoiseSource::Fixed(noise), &space, &settings(cfg, seed))?;
            Ok(best.best)
        }
        _ => SweepRecord::evaluate(code, &Exposure::fixed(noise), &cfg.qec_template(code)?),
    }
}

/// One row per (sweep point, `gamma_t`, `kappa_t`), computed in parallel and
/// returned in input order.
pub fn fidelity_rows(cfg: &RunConfig, seed: u64) -> Result<Vec<Result<Vec<Cell>>>> {
    let codes = cfg.code_points()?;
    let noises = cfg.noise.points()?;
    let jobs: Vec<(&CodeParams, NoiseParams)> = codes.iter().flat_map(|c| noises.iter().map(move |&n| (c, n))).collect();
    Ok(jobs
        .par_iter()
        .map(|&(code, noise)| {
            let rec = fidelity_record(cfg, code, noise, seed)?;
            let mut row = code_cells(&rec);
            row.extend([
                rec.nbar.into(),
                noise.gamma_t.into(),
                noise.kappa_t.into(),
                rec.fidelity.into(),
                rec.infidelity().into(),
                rec.leakage.into(),
                Cell::Int(seed as i64),
            ]);
            Ok(row)
        })
        .collect())
}

fn repeater_cells(rec: &SweepRecord, t0_us: f64) -> Vec<Cell> {
    let mut row = code_cells(rec);
    row.extend([
        rec.spacing_km.into(),
        rec.distance_km.into(),
        rec.gamma.into(),
        rec.gamma_phi.into(),
        rec.fidelity.into(),
        rec.tau.into(),
        rec.skrpm.into(),
        (rec.skrpm * 1e6 / t0_us).into(),
    ]);
    row
}

/// One row per (sweep point, spacing, distance). Without an optimize block
/// each hop channel is simulated once and shared by all distances; with
/// one, every (sweep point, distance) pair is optimized over the amplitude
/// and the listed spacings.
pub fn repeater_rows(cfg: &RunConfig, seed: u64) -> Result<Vec<Result<Vec<Cell>>>> {
    let rep = cfg.repeater.as_ref().ok_or_else(|| crate::Error::Config("missing repeater block".into()))?;
    let codes = cfg.code_points()?;
    let spacings = rep.spacing_km.to_vec();
    if let Some(opt) = &cfg.optimize {
        let jobs: Vec<(&CodeParams, f64)> =
            codes.iter().flat_map(|c| rep.distances_km.iter().map(move |&d| (c, d))).collect();
        let objective: Objective = opt.objective.into();
        return Ok(jobs
            .par_iter()
            .map(|&(code, distance)| {
                let line = rep.line(spacings[0], distance)?;
                let space = SearchSpace { families: vec![family(cfg, code)], spacings_km: spacings.clone() };
                let best = optimize_code(objective, &NoiseSource::Repeater(line), &space, &settings(cfg, seed))?;
                Ok(repeater_cells(&best.best, rep.t0_us))
            })
            .collect());
    }
    let hops: Vec<(&CodeParams, f64)> = codes.iter().flat_map(|c| spacings.iter().map(move |&s| (c, s))).collect();
    let channels: Vec<_> = hops
        .par_iter()
        .map(|&(code, spacing)| {
            let exposure = Exposure::repeater(&rep.line(spacing, 0.0)?)?;
            let lc = cycle_channel(code, exposure.noise, &cfg.qec_template(code)?)?;
            Ok((code, spacing, lc))
        })
        .collect::<Vec<Result<_>>>();
    let mut rows = Vec::new();
    for ch in channels {
        match ch {
            Ok((code, spacing, lc)) => {
                for &d in &rep.distances_km {
                    rows.push(rep.line(spacing, d).and_then(|line| {
                        let rec = SweepRecord::new(code, &Exposure::repeater(&line)?, &lc);
                        Ok(repeater_cells(&rec, rep.t0_us))
                    }));
                }
            }
            Err(e) => rows.push(Err(e)),
        }
    }
    Ok(rows)
}

/// Lattice points of the first sweep point up to its codeword support.
pub fn lattice_rows(cfg: &RunConfig) -> Result<Vec<Result<Vec<Cell>>>> {
    let code = &cfg.code_points()?[0];
    let n_max = build_codewords(code)?.dim() as u32;
    Ok(lattice_points(code.s, code.f, (0.0, 0.0), n_max)?
        .into_iter()
        .map(|pt| Ok(vec![pt.n.into(), pt.phi.into()]))
        .collect())
}

/// Quadrature Wigner functions of the four logical states on a square grid
/// of `points x points` samples covering the code.
pub fn wigner_rows(cfg: &RunConfig, points: usize) -> Result<Vec<Result<Vec<Cell>>>> {
    let code = &cfg.code_points()?[0];
    let basis = build_codewords(code)?;
    let half = (2.0 * code.nominal_nbar()).sqrt() + 3.0;
    let axis: Vec<f64> = if points < 2 {
        vec![0.0]
    } else {
        (0..points).map(|i| -half + 2.0 * half * i as f64 / (points - 1) as f64).collect()
    };
    let states: Vec<&FockState> = vec![&basis.plus, &basis.minus, &basis.zero, &basis.one];
    let fields = states
        .par_iter()
        .map(|psi| wigner_xp(&psi.normalized()?, &axis, &axis))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(axis.len() * axis.len());
    for (ip, &p) in axis.iter().enumerate() {
        for (ix, &x) in axis.iter().enumerate() {
            let mut row = vec![Cell::from(x), Cell::from(p)];
            row.extend(fields.iter().map(|w| Cell::from(w[ip][ix])));
            rows.push(Ok(row));
        }
    }
    Ok(rows)
}

/// Syndrome pair read out for `D(l, phi_e)`, as labelled per lattice family.
fn syndrome_label(code: &CodeParams) -> &'static str {
    match code.kind() {
        LatticeKind::Rectangular => "(k, phi_e)",
        LatticeKind::Oblique => "(0, m f pi + phi_e)",
        LatticeKind::Diamond | LatticeKind::Sheared => "(k, m f pi / s + phi_e)",
    }
}

/// Metrics, syndrome format and Fock amplitudes of every sweep point, plus
/// the noiseless cycle fidelity.
pub fn codes_report(cfg: &RunConfig) -> Result<Value> {
    let codes = cfg.code_points()?;
    let entries = codes
        .par_iter()
        .map(|code| {
            let m = code_metrics(code)?;
            let basis = build_codewords(code)?;
            let amplitude = match code.amplitude {
                AmplitudeSpec::Binomial { k } => json!({ "k": k }),
                AmplitudeSpec::Gaussian { alpha, r } => json!({ "alpha": alpha.re, "r": r.re }),
            };
            let theta: Vec<Value> = basis
                .theta()
                .iter()
                .enumerate()
                .map(|(n, z)| json!({ "n": n * code.s as usize, "re": z.re, "im": z.im }))
                .collect();
            let noiseless = cycle_channel(code, NoiseParams::new(0.0, 0.0)?, &QecConfig::for_code(code))?;
            Ok(json!({
                "code_type": crate::repeater::code_columns(code).0,
                "s": code.s,
                "p": code.f.p(),
                "q": code.f.q(),
                "amplitude": amplitude,
                "dim": basis.dim(),
                "d_N": m.d_n,
                "d_phi": m.d_phi,
                "nbar": m.nbar,
                "delta_phi": m.delta_phi,
                "overlap": m.overlap,
                "noiseless_fidelity": channel_fidelity(&noiseless),
                "noiseless_pauli": pauli_twirl(&noiseless).p,
                "syndrome": syndrome_label(code),
                "theta": theta,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "config_sha256": cfg.sha256(), "codes": entries }))
}
