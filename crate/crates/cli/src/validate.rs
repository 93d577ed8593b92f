//! Invariant suites behind `nplattice validate`.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector, Matrix4};
use nplattice::analytics::bitflip_estimate;
use nplattice::codes::{build_codewords, AmplitudeSpec, CodeParams, Fraction};
use nplattice::config::RunConfig;
use nplattice::fock::{ladder_operators, np_decompose, np_displace, FockOperator, NpVector, PhaseGrid};
use nplattice::noise::{lindblad_channel, noise_kraus, NoiseParams, DEFAULT_KRAUS_TOL};
use nplattice::qec::{channel_fidelity, teleport_qec, teleport_qec_ops, teleport_qec_with, LogicalChannel, Pipeline, QecConfig};
use nplattice::repeater::{key_fraction, twirl_process, PauliChannel};
use nplattice::report::{fidelity_rows, write_csv, FIDELITY_COLUMNS};
use nplattice::{Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Decode with the vortex orientation reversed.
    SignFlip,
}

/// Outcome of one named invariant.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, outcome: Result<(bool, String)>) -> Self {
        match outcome {
            Ok((passed, detail)) => Self { name, passed, detail },
            Err(e) => Self { name, passed: false, detail: format!("error: {e}") },
        }
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn diamond(alpha2: f64) -> Result<CodeParams> {
    CodeParams::new(2, Fraction::new(1, 2)?, AmplitudeSpec::gaussian_real(alpha2.sqrt(), 0.0))
}

fn commutation(seed: u64) -> Result<(bool, String)> {
    let dim = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = NpVector::new(rng.gen_range(-2..=2), rng.gen_range(-PI..PI));
        let b = NpVector::new(rng.gen_range(-2..=2), rng.gen_range(-PI..PI));
        // keep the state clear of both truncation edges
        let margin = (a.l.abs() + b.l.abs()) as usize;
        let v = DVector::from_fn(dim, |n, _| {
            if (margin..dim - margin).contains(&n) { C64::new(rng.gen(), rng.gen()) } else { c(0.0) }
        });
        let (da, db) = (np_displace(a, dim)?, np_displace(b, dim)?);
        let lhs = da.mat() * (db.mat() * &v);
        let rhs = (db.mat() * (da.mat() * &v)) * C64::from_polar(1.0, a.cross(&b));
        worst = worst.max((lhs - rhs).camax());
    }
    Ok((worst < 1e-12, format!("max error {worst:.2e} over 50 pairs")))
}

fn reconstruction() -> Result<(bool, String)> {
    let dim = 12;
    let grid = PhaseGrid::new(4096)?;
    let lad = ladder_operators(dim)?;
    let res = np_decompose(&lad.a, -1..=2, &grid).residual(&lad.a);
    let root = FockOperator::diagonal(dim, |n| c(((n + 1) as f64).sqrt()));
    let ladder = lad.a.max_abs_diff(&root.compose(&lad.sigma(1)?));
    Ok((res < 1e-6 && ladder < 1e-14, format!("residual {res:.2e}, ladder identity {ladder:.2e}")))
}

fn lindbladian(rho: &DMatrix<C64>, a: &DMatrix<C64>, n: &DMatrix<C64>, gamma: f64, kappa: f64) -> DMatrix<C64> {
    let diss = |op: &DMatrix<C64>, rate: f64| {
        let od = op.adjoint();
        let odo = &od * op;
        (op * rho * &od - (&odo * rho + rho * &odo) * c(0.5)) * c(rate)
    };
    diss(a, gamma) + diss(n, kappa)
}

fn channel_vs_rk4(seed: u64) -> Result<(bool, String)> {
    let dim = 12;
    let (gamma, kappa) = (0.07, 0.03);
    let lad = ladder_operators(dim)?;
    let (a, n) = (lad.a.mat().clone(), lad.n.mat().clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let rho0 = &g * g.adjoint();
    let rho0 = &rho0 / rho0.trace();
    let steps = 2000;
    let dt = 1.0 / steps as f64;
    let mut r = rho0.clone();
    for _ in 0..steps {
        let k1 = lindbladian(&r, &a, &n, gamma, kappa);
        let k2 = lindbladian(&(&r + &k1 * c(dt / 2.0)), &a, &n, gamma, kappa);
        let k3 = lindbladian(&(&r + &k2 * c(dt / 2.0)), &a, &n, gamma, kappa);
        let k4 = lindbladian(&(&r + &k3 * c(dt)), &a, &n, gamma, kappa);
        r += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(dt / 6.0);
    }
    let params = NoiseParams::new(gamma, kappa)?;
    let sectors = lindblad_channel(params, dim)?.apply(&rho0)?;
    let kraus = noise_kraus(params, dim, DEFAULT_KRAUS_TOL)?;
    let via_kraus = kraus.apply(&rho0);
    let e1 = max_abs(&(&sectors - &r));
    let e2 = max_abs(&(&via_kraus - &sectors));
    let e3 = kraus.completeness_defect(0);
    Ok((
        e1 < 1e-7 && e2 < 1e-10 && e3 < 1e-8,
        format!("sectors vs RK4 {e1:.2e}, Kraus vs sectors {e2:.2e}, completeness {e3:.2e}"),
    ))
}

fn pipelines() -> Result<(bool, String)> {
    let code = CodeParams::new(2, Fraction::new(1, 2)?, AmplitudeSpec::Binomial { k: 2 })?.with_dim(12);
    let kraus = noise_kraus(NoiseParams::new(0.05, 0.01)?, 12, DEFAULT_KRAUS_TOL)?;
    let cfg = QecConfig::for_code(&code).with_phase_points(256);
    let red = teleport_qec_with(&code, &kraus, &cfg, Pipeline::Reduced)?;
    let joint = teleport_qec_with(&code, &kraus, &cfg, Pipeline::Joint)?;
    let d = (red.process - joint.process).camax();
    Ok((d < 1e-10, format!("process difference {d:.2e}")))
}

fn conditional_fidelity(lc: &LogicalChannel) -> f64 {
    let tr = 0.5 * (lc.output(0, 0).trace().re + lc.output(1, 1).trace().re);
    channel_fidelity(lc) / tr
}

fn round_trip(fault: Option<Fault>) -> Result<(bool, String)> {
    let code = diamond(9.0)?;
    let dim = build_codewords(&code)?.dim();
    let mut cfg = QecConfig::for_code(&code);
    cfg.flip_vortex_sign = fault == Some(Fault::SignFlip);
    let mut failures = Vec::new();
    for l in 0..code.d_n() {
        let op = np_displace(NpVector::new(l, 0.0), dim)?;
        let lc = teleport_qec_ops(&code, &[op], &cfg, Pipeline::Reduced)?;
        let dom = lc.dominant().expect("non-empty syndromes");
        let expect = (l.rem_euclid(code.s as i64) as u32, l.div_euclid(code.s as i64));
        let f = conditional_fidelity(&lc);
        if (dom.k, dom.m) != expect || f < 0.99 {
            failures.push(format!("l = {l}: decoded (k, m) = ({}, {}), fidelity {f:.4}", dom.k, dom.m));
        }
    }
    Ok(if failures.is_empty() {
        (true, format!("shifts 0..{} decode and recover", code.d_n()))
    } else {
        (false, failures.join("; "))
    })
}

fn pauli_composition(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let w: [f64; 4] = [rng.gen::<f64>() + 1.0, rng.gen(), rng.gen(), rng.gen()];
        let sum: f64 = w.iter().sum();
        let hop = PauliChannel { p: w.map(|x| x / sum) };
        let mut product = Matrix4::<C64>::identity();
        for n in 1..=5u64 {
            product = hop.process() * product;
            let brute = twirl_process(&product);
            let fast = hop.repeated(n);
            for (a, b) in brute.p.iter().zip(fast.p) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let perfect = key_fraction(&PauliChannel::PERFECT.repeated(12345));
    Ok((worst < 1e-10 && perfect == 1.0, format!("max error {worst:.2e}, perfect line key {perfect}")))
}

fn worked_example() -> Result<(bool, String)> {
    let r: f64 = -0.1;
    let code = CodeParams::new(2, Fraction::new(1, 2)?, AmplitudeSpec::gaussian_real((4.5 - r.sinh().powi(2)).sqrt(), r))?;
    let basis = build_codewords(&code)?;
    let kraus = noise_kraus(NoiseParams::new(0.1, 0.01)?, basis.dim(), DEFAULT_KRAUS_TOL)?;
    let plus = basis.plus.normalized()?;
    let v = plus.amps();
    let before = (v.adjoint() * kraus.apply(&(v * v.adjoint())) * v)[(0, 0)].re;
    let lc = teleport_qec(&code, &kraus, &QecConfig::for_code(&code))?;
    let after: f64 = (0..2).flat_map(|mu| (0..2).map(move |nu| (mu, nu))).map(|(mu, nu)| lc.output(mu, nu).sum().re * 0.25).sum();
    Ok((
        (before - 0.37).abs() < 0.01 && (after - 0.97).abs() < 0.01,
        format!("overlap {before:.4} before, {after:.4} after one cycle"),
    ))
}

fn loss_estimate() -> Result<(bool, String)> {
    // large enough that the noiseless decoding error is negligible
    let code = diamond(16.0)?;
    let nbar = code.nominal_nbar();
    let mut worst = 1.0f64;
    for x in [0.1, 0.2] {
        let gamma = x / nbar;
        let kraus = noise_kraus(NoiseParams::new(-(-gamma).ln_1p(), 0.0)?, build_codewords(&code)?.dim(), DEFAULT_KRAUS_TOL)?;
        let sim = 1.0 - channel_fidelity(&teleport_qec(&code, &kraus, &QecConfig::for_code(&code))?);
        let est = bitflip_estimate(nbar, gamma, code.d_n() as u32, 3);
        worst = worst.max(sim / est).max(est / sim);
    }
    Ok((worst < 2.0, format!("worst ratio to the closed-form estimate {worst:.3}")))
}

const SWEEP_FAMILIES: [(&str, &str); 3] = [
    ("dnp", r#"{"type": "dnp", "s": 2, "p": 1, "q": 2}"#),
    ("onp", r#"{"type": "onp", "s": 1, "p": 1, "q": 4}"#),
    ("binomial", r#"{"type": "binomial", "s": 4}"#),
];

fn sweep_config(code: &str) -> Result<RunConfig> {
    RunConfig::from_json(&format!(
        r#"{{"code": {code}, "noise": {{"gamma_t": 0.005, "kappa_t": 0.001}}, "sweep": {{"nbar": [4, 6, 8]}},
            "optimize": {{"objective": "infidelity", "budget": 12, "r_range": [-0.6, 0.6]}}}}"#
    ))
}

/// Optimized infidelity sweep; writes one CSV per family into `dir`.
fn infidelity_sweep(dir: &Path, seed: u64) -> Result<(bool, String)> {
    std::fs::create_dir_all(dir)?;
    let mut infid = Vec::new();
    for (label, code) in SWEEP_FAMILIES {
        let cfg = sweep_config(code)?;
        let rows = fidelity_rows(&cfg, seed)?;
        let vals: Vec<f64> = rows
            .iter()
            .map(|r| match r {
                Ok(cells) => cells[10].to_string().parse::<f64>().unwrap_or(f64::NAN),
                Err(_) => f64::NAN,
            })
            .collect();
        let file = std::fs::File::create(dir.join(format!("infidelity_{label}.csv")))?;
        write_csv(std::io::BufWriter::new(file), &cfg, seed, FIDELITY_COLUMNS, rows)?;
        infid.push(vals);
    }
    let ordered = infid[0].iter().zip(&infid[2]).all(|(d, b)| d < b);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join("/");
    Ok((
        ordered,
        format!("infidelity at nbar 4/6/8: dnp {}, onp {}, binomial {}", fmt(&infid[0]), fmt(&infid[1]), fmt(&infid[2])),
    ))
}

/// Runs the suite for `level`; the full level writes its sweep artifacts to `dir`.
pub fn run(level: Level, fault: Option<Fault>, seed: u64, dir: &Path) -> Vec<Check> {
    let mut checks = vec![
        Check::new("np commutation phase", commutation(seed)),
        Check::new("np reconstruction", reconstruction()),
        Check::new("channel solver equivalence", channel_vs_rk4(seed)),
        Check::new("ancilla pipeline equivalence", pipelines()),
        Check::new("syndrome round trip", round_trip(fault)),
        Check::new("pauli composition", pauli_composition(seed)),
    ];
    if level == Level::Full {
        checks.push(Check::new("worked correction example", worked_example()));
        checks.push(Check::new("loss estimate agreement", loss_estimate()));
        checks.push(Check::new("optimized infidelity ordering", infidelity_sweep(dir, seed)));
    }
    checks
}
