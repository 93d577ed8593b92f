//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! The process exits 0 after reporting so a failing benchmark does not hide
//! the other results; set `ACCEPTANCE_STRICT=1` to turn any FAIL into a
//! non-zero exit.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use nplattice::analytics::{bitflip_estimate, breakeven_baseline, dephasing_lower_bound};
use nplattice::codes::{build_codewords, code_metrics, logical_operators, vortex_check, AmplitudeSpec, CodeParams, Fraction};
use nplattice::config::RunConfig;
use nplattice::fock::{coherent_state, ladder_operators, np_decompose, np_displace, NpVector, PhaseGrid};
use nplattice::noise::{lindblad_channel, noise_kraus, NoiseParams, DEFAULT_KRAUS_TOL};
use nplattice::qec::{channel_fidelity, teleport_qec, teleport_qec_ops, LogicalChannel, Pipeline, QecConfig};
use nplattice::report::{csv_string, fidelity_rows, repeater_rows, Cell, FIDELITY_COLUMNS, REPEATER_COLUMNS};
use nplattice::{Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;

type Outcome = Result<(bool, String)>;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn gaussian(s: u32, p: i64, q: i64, alpha2: f64) -> Result<CodeParams> {
    CodeParams::new(s, Fraction::new(p, q)?, AmplitudeSpec::gaussian_real(alpha2.sqrt(), 0.0))
}

fn operator_algebra() -> Outcome {
    let dim = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = NpVector::new(rng.gen_range(-3..=3), rng.gen_range(-PI..PI));
        let b = NpVector::new(rng.gen_range(-3..=3), rng.gen_range(-PI..PI));
        let margin = (a.l.abs() + b.l.abs()) as usize;
        let v = DVector::from_fn(dim, |n, _| {
            if (margin..dim - margin).contains(&n) { C64::new(rng.gen(), rng.gen()) } else { c(0.0) }
        });
        let (da, db) = (np_displace(a, dim)?, np_displace(b, dim)?);
        let lhs = da.apply_vec(&db.apply_vec(&v));
        let rhs = db.apply_vec(&da.apply_vec(&v)) * C64::from_polar(1.0, a.cross(&b));
        worst = worst.max((lhs - rhs).iter().fold(0.0, |m, z| m.max(z.norm())));
    }
    let lad = ladder_operators(dim)?;
    let residual = np_decompose(&lad.a, -1..=2, &PhaseGrid::new(4096)?).residual(&lad.a);
    Ok((
        worst < 1e-12 && residual < 1e-6,
        format!("commutation error {worst:.1e} over 50 pairs, reconstruction residual {residual:.1e}"),
    ))
}

fn six_photon_codes() -> Result<Vec<CodeParams>> {
    Ok(vec![
        CodeParams::new(4, Fraction::ZERO, AmplitudeSpec::Binomial { k: 3 })?,
        gaussian(1, 1, 4, 6.0)?,
        gaussian(2, 1, 2, 3.0)?,
    ])
}

fn codewords() -> Outcome {
    let mut worst_fix = 0.0f64;
    let mut worst_nbar = 0.0f64;
    for code in six_photon_codes()? {
        worst_nbar = worst_nbar.max((code_metrics(&code)?.nbar - 6.0).abs());
        let basis = build_codewords(&code)?;
        let sz = logical_operators(&code)?.s_z;
        for psi in [&basis.zero, &basis.one, &basis.plus, &basis.minus] {
            worst_fix = worst_fix.max((sz.apply(psi).amps() - psi.amps()).norm());
        }
    }
    Ok((
        worst_fix < 1e-12 && worst_nbar < 1e-6,
        format!("S_z fixed-point error {worst_fix:.1e}, |nbar - 6| <= {worst_nbar:.1e}"),
    ))
}

fn vortex() -> Outcome {
    let mut worst = 0.0f64;
    let mut angles_ok = true;
    for code in [gaussian(1, 1, 4, 6.0)?, gaussian(2, 1, 2, 3.0)?, gaussian(1, 1, 2, 4.0)?] {
        let basis = build_codewords(&code)?;
        for l in 1..=3 {
            for psi in [&basis.plus, &basis.minus, &basis.zero, &basis.one] {
                let v = vortex_check(&basis, l, psi)?;
                worst = worst.max(v.residual);
                let expect = -(l as f64) * code.f.to_f64() * PI / (code.s as f64).powi(2);
                let prefactor = C64::from_polar(1.0, -code.f.to_f64() * (l * l) as f64 * PI / (2.0 * code.s as f64));
                angles_ok &= (v.angle - expect).abs() < 1e-14 && (v.prefactor - prefactor).norm() < 1e-12;
            }
        }
    }
    let half = gaussian(1, 1, 2, 4.0)?;
    let angle = vortex_check(&build_codewords(&half)?, 1, &build_codewords(&half)?.plus)?.angle;
    Ok((
        worst < 1e-12 && angles_ok && (angle + PI / 2.0).abs() < 1e-15,
        format!("max residual {worst:.1e}, s=1 f=1/2 l=1 angle {:.6} pi", angle / PI),
    ))
}

fn lindbladian(rho: &DMatrix<C64>, a: &DMatrix<C64>, n: &DMatrix<C64>, gamma: f64, kappa: f64) -> DMatrix<C64> {
    let diss = |op: &DMatrix<C64>, rate: f64| {
        let od = op.adjoint();
        let odo = &od * op;
        (op * rho * &od - (&odo * rho + rho * &odo) * c(0.5)) * c(rate)
    };
    diss(a, gamma) + diss(n, kappa)
}

fn noise_solver() -> Outcome {
    let dim = 12;
    let (gamma, kappa) = (0.1, 0.05);
    let lad = ladder_operators(dim)?;
    let (a, n) = (lad.a.mat().clone(), lad.n.mat().clone());
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let g = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let rho0 = &g * g.adjoint();
    let rho0 = &rho0 / rho0.trace();
    let steps = 4000;
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
    let rk4 = max_abs(&(lindblad_channel(params, dim)?.apply(&rho0)? - &r));
    let complete = noise_kraus(params, dim, DEFAULT_KRAUS_TOL)?.completeness_defect(0);

    let (alpha, gt, big) = (C64::new(1.2, 0.5), 0.3, 48);
    let psi = coherent_state(alpha, big)?;
    let v = psi.amps();
    let out = lindblad_channel(NoiseParams::new(gt, 0.0)?, big)?.apply(&(v * v.adjoint()))?;
    let target = coherent_state(alpha * (-gt / 2.0).exp(), big)?;
    let w = target.amps();
    let contraction = max_abs(&(out - w * w.adjoint()));
    Ok((
        rk4 < 1e-7 && complete < 1e-8 && contraction < 1e-9,
        format!("sectors vs RK4 {rk4:.1e}, Kraus completeness {complete:.1e}, coherent contraction {contraction:.1e}"),
    ))
}

fn conditional_fidelity(lc: &LogicalChannel) -> f64 {
    let tr = 0.5 * (lc.output(0, 0).trace().re + lc.output(1, 1).trace().re);
    channel_fidelity(lc) / tr
}

fn round_trip() -> Outcome {
    let code = gaussian(2, 1, 2, 9.0)?;
    let dim = build_codewords(&code)?.dim();
    let cfg = QecConfig::for_code(&code).with_window(0, 3);
    let base = channel_fidelity(&teleport_qec_ops(&code, &[np_displace(NpVector::new(0, 0.0), dim)?], &cfg, Pipeline::Reduced)?);
    let phases = [-PI / 64.0, -PI / 128.0, 0.0, PI / 128.0, PI / 64.0];
    let mut worst_loss = 0.0f64;
    let mut wrong = Vec::new();
    for l in 0..4i64 {
        for &phi in &phases {
            let op = np_displace(NpVector::new(l, phi), dim)?;
            let lc = teleport_qec_ops(&code, &[op], &cfg, Pipeline::Reduced)?;
            let dom = lc.dominant().expect("syndromes recorded");
            if (dom.k as i64, dom.m) != (l % 2, l / 2) {
                wrong.push(format!("({l}, {phi:.3})"));
            }
            worst_loss = worst_loss.max(base - conditional_fidelity(&lc));
        }
    }
    Ok((
        wrong.is_empty() && worst_loss < 1e-3,
        format!(
            "4x5 grid l in 0..3, phi in [-pi/64, pi/64]: {} mis-decoded, worst fidelity drop {worst_loss:.2e}",
            wrong.len()
        ),
    ))
}

fn estimates() -> Outcome {
    // large enough that the noiseless decoding error is negligible
    let code = gaussian(2, 1, 2, 16.0)?;
    let nbar = code_metrics(&code)?.nbar;
    let dim = build_codewords(&code)?.dim();
    let mut ratios = Vec::new();
    for x in [0.1, 0.2] {
        let gamma: f64 = x / nbar;
        let kraus = noise_kraus(NoiseParams::new(-(-gamma).ln_1p(), 0.0)?, dim, DEFAULT_KRAUS_TOL)?;
        let sim = 1.0 - channel_fidelity(&teleport_qec(&code, &kraus, &QecConfig::for_code(&code))?);
        let est = bitflip_estimate(nbar, gamma, code.d_n() as u32, 3);
        ratios.push(sim / est);
    }
    let floor = dephasing_lower_bound(2, 0.01)?;
    let ok = ratios.iter().all(|r| (0.5..2.0).contains(r)) && (floor / 4.1e-15 - 1.0).abs() < 0.05;
    Ok((ok, format!("simulated / series at nGamma 0.1, 0.2: {:.3}, {:.3}; dephasing floor {floor:.3e}", ratios[0], ratios[1])))
}

fn real(cell: &Cell) -> f64 {
    match cell {
        Cell::Real(x) => *x,
        Cell::Int(n) => *n as f64,
        Cell::Text(_) => f64::NAN,
    }
}

/// Runs a sweep and returns its CSV text with one column pulled out per row.
fn sweep(
    cfg: &RunConfig,
    columns: &[&str],
    rows: Result<Vec<Result<Vec<Cell>>>>,
    pick: &[usize],
) -> Result<(String, Vec<Vec<f64>>)> {
    let rows = rows?;
    let values = rows
        .iter()
        .map(|r| match r {
            Ok(cells) => pick.iter().map(|&i| real(&cells[i])).collect(),
            Err(_) => vec![f64::NAN; pick.len()],
        })
        .collect();
    let (text, res) = csv_string(cfg, SEED, columns, rows);
    res?;
    Ok((text, values))
}

const INFIDELITY_FAMILIES: [(&str, &str, &str); 3] = [
    ("D-NP", r#"{"type": "dnp", "s": 2, "p": 1, "q": 2}"#, "[4, 5, 6, 7, 8]"),
    ("O-NP", r#"{"type": "onp", "s": 1, "p": 1, "q": 4}"#, "[4, 5, 6, 7, 8]"),
    ("binomial", r#"{"type": "binomial", "s": 4}"#, "[4, 6, 8]"),
];

fn infidelity_runs() -> Result<(String, Vec<Vec<f64>>)> {
    let mut csv = String::new();
    let mut curves = Vec::new();
    for (_, code, nbar) in INFIDELITY_FAMILIES {
        let cfg = RunConfig::from_json(&format!(
            r#"{{"code": {code}, "noise": {{"gamma_t": 0.005, "kappa_t": 0.001}}, "sweep": {{"nbar": {nbar}}},
                "optimize": {{"objective": "infidelity", "budget": 30, "restarts": 3, "r_range": [-1.0, 1.0]}}}}"#
        ))?;
        let (text, vals) = sweep(&cfg, FIDELITY_COLUMNS, fidelity_rows(&cfg, SEED), &[10])?;
        csv.push_str(&text);
        curves.push(vals.into_iter().map(|v| v[0]).collect());
    }
    Ok((csv, curves))
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(" ")
}

fn infidelity_ordering(curves: &[Vec<f64>]) -> Outcome {
    let (dnp, onp) = (&curves[0], &curves[1]);
    // binomial codes with s = 4 exist at even nbar only; odd points are
    // interpolated geometrically
    let b = &curves[2];
    let binomial = vec![b[0], (b[0] * b[1]).sqrt(), b[1], (b[1] * b[2]).sqrt(), b[2]];
    let a = dnp.iter().zip(&binomial).all(|(d, b)| d < b);
    let bo = onp.iter().zip(&binomial).all(|(o, b)| (o / b).max(b / o) < 3.0);
    let line = 1.0 - breakeven_baseline(0.005, 0.001);
    let best = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let cc = [dnp, onp, &binomial].iter().all(|v| best(v) < line);
    Ok((
        a && bo && cc,
        format!(
            "(a) {} (b) {} (c) {}; nbar 4..8 infidelity D-NP [{}] O-NP [{}] binomial [{}] vs break-even {line:.3e}",
            pf(a),
            pf(bo),
            pf(cc),
            fmt(dnp),
            fmt(onp),
            fmt(&binomial)
        ),
    ))
}

const DISTANCES: [f64; 3] = [200.0, 600.0, 1000.0];

const KEY_RATE_FAMILIES: [(&str, &str, &str); 3] = [
    ("D-NP", r#"{"type": "dnp", "s": 2, "p": 1, "q": 2}"#, r#""alpha_range": [1.5, 4.0]"#),
    ("O-NP", r#"{"type": "onp", "s": 1, "p": 1, "q": 4}"#, r#""alpha_range": [2.0, 5.5]"#),
    ("binomial", r#"{"type": "binomial", "s": 4}"#, ""),
];

fn key_rate_runs() -> Result<(String, Vec<Vec<f64>>)> {
    let mut csv = String::new();
    let mut best = Vec::new();
    for (_, code, alpha) in KEY_RATE_FAMILIES {
        let (sweep_block, extra) = if alpha.is_empty() {
            (r#""sweep": {"nbar": [4, 6, 8, 10, 12, 16]},"#, String::new())
        } else {
            ("", format!(", {alpha}"))
        };
        let cfg = RunConfig::from_json(&format!(
            r#"{{"code": {code}, {sweep_block}
                "repeater": {{"spacing_km": [0.5, 1.0, 2.0], "eps": 0.01, "h": 0.1, "distances_km": [200, 600, 1000]}},
                "optimize": {{"objective": "skrpm", "budget": 20, "restarts": 2, "r_range": [-0.6, 0.6]{extra}}}}}"#
        ))?;
        let (text, vals) = sweep(&cfg, REPEATER_COLUMNS, repeater_rows(&cfg, SEED), &[7, 12])?;
        csv.push_str(&text);
        // best key rate per distance over the sweep points
        best.push(
            DISTANCES
                .iter()
                .map(|&d| vals.iter().filter(|v| v[0] == d).map(|v| v[1]).fold(f64::NAN, f64::max))
                .collect(),
        );
    }
    Ok((csv, best))
}

fn key_rate_ordering(best: &[Vec<f64>]) -> Outcome {
    let (dnp, onp, bin) = (&best[0], &best[1], &best[2]);
    let close = |a: f64, b: f64| (a - b).abs() <= 0.5 * a.max(b) || a.max(b) < 1e-6;
    let ordering = (0..3).all(|i| dnp[i] >= onp[i] && dnp[i] >= bin[i] && close(onp[i], bin[i]));
    let reach = dnp[2] > 0.01;
    Ok((
        ordering && reach,
        format!(
            "ordering {}, D-NP at 1000 km {}; SKRPM at 200/600/1000 km D-NP [{}] O-NP [{}] binomial [{}]",
            pf(ordering),
            pf(reach),
            fmt(dnp),
            fmt(onp),
            fmt(bin)
        ),
    ))
}

fn pf(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn report(n: u32, name: &str, t: Instant, outcome: Outcome) -> bool {
    let secs = t.elapsed().as_secs_f64();
    match outcome {
        Ok((ok, detail)) => {
            println!("{} {n} {name}: {detail} [{secs:.1} s]", pf(ok));
            ok
        }
        Err(e) => {
            println!("FAIL {n} {name}: error: {e} [{secs:.1} s]");
            false
        }
    }
}

fn main() {
    let mut passed = Vec::new();
    let t = Instant::now();
    passed.push(report(1, "operator algebra", t, operator_algebra()));
    let t = Instant::now();
    passed.push(report(2, "codewords", t, codewords()));
    let t = Instant::now();
    passed.push(report(3, "vortex effect", t, vortex()));
    let t = Instant::now();
    passed.push(report(4, "noise solver", t, noise_solver()));
    let t = Instant::now();
    passed.push(report(5, "syndrome round trip", t, round_trip()));
    let t = Instant::now();
    passed.push(report(6, "closed-form estimates", t, estimates()));

    let t = Instant::now();
    let a = infidelity_runs();
    let first_a = a.as_ref().map(|(csv, _)| csv.clone()).ok();
    passed.push(report(7, "optimized infidelity vs nbar", t, a.and_then(|(_, curves)| infidelity_ordering(&curves))));
    let t = Instant::now();
    let b = key_rate_runs();
    let first_b = b.as_ref().map(|(csv, _)| csv.clone()).ok();
    passed.push(report(8, "optimized repeater key rate", t, b.and_then(|(_, best)| key_rate_ordering(&best))));

    let t = Instant::now();
    let again = infidelity_runs().and_then(|(a, _)| Ok((a, key_rate_runs()?.0)));
    let outcome = again.map(|(a, b)| {
        let same = first_a.as_deref() == Some(a.as_str()) && first_b.as_deref() == Some(b.as_str());
        (same, format!("re-run of sweeps 7 and 8 with seed {SEED}: {} bytes, identical = {same}", a.len() + b.len()))
    });
    passed.push(report(9, "determinism", t, outcome));

    let n = passed.iter().filter(|&&p| p).count();
    println!("acceptance: {n}/{} criteria pass", passed.len());
    if n < passed.len() && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
