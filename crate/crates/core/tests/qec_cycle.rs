use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, Matrix2};
use nplattice::codes::{build_codewords, interface_gate, AmplitudeSpec, CodeParams, Fraction};
use nplattice::fock::{np_displace, FockOperator, NpVector};
use nplattice::noise::{lindblad_channel, noise_kraus, NoiseParams};
use nplattice::qec::*;
use nplattice::C64;

fn diamond(alpha2: f64) -> CodeParams {
    CodeParams::new(2, Fraction::new(1, 2).unwrap(), AmplitudeSpec::gaussian_real(alpha2.sqrt(), 0.0)).unwrap()
}

/// Fidelity conditioned on the injected operator having acted.
fn conditional_fidelity(lc: &LogicalChannel) -> f64 {
    let tr = 0.5 * (lc.output(0, 0).trace().re + lc.output(1, 1).trace().re);
    channel_fidelity(lc) / tr
}

/// Most likely `(k, m)` after summing over the teleportation outcome `i`.
fn dominant_shift(lc: &LogicalChannel) -> (u32, i64) {
    let mut best = ((0, 0), -1.0);
    for a in &lc.syndromes {
        let p: f64 = lc.syndromes.iter().filter(|b| b.k == a.k && b.m == a.m).map(|b| b.probability).sum();
        if p > best.1 {
            best = ((a.k, a.m), p);
        }
    }
    best.0
}

#[test]
fn noiseless_large_code_is_nearly_perfect() {
    let code = diamond(9.0);
    let dim = build_codewords(&code).unwrap().dim();
    let lc = teleport_qec_ops(&code, &[FockOperator::identity(dim)], &QecConfig::for_code(&code), Pipeline::Reduced).unwrap();
    assert!(channel_fidelity(&lc) > 0.999);
    assert!(lc.leakage < 1e-12);
}

#[test]
fn single_loss_decodes_to_sector_one() {
    let code = diamond(9.0);
    let dim = build_codewords(&code).unwrap().dim();
    let err = np_displace(NpVector::new(1, 0.0), dim).unwrap();
    let lc = teleport_qec_ops(&code, &[err], &QecConfig::for_code(&code), Pipeline::Reduced).unwrap();
    assert_eq!(dominant_shift(&lc), (1, 0));
    assert!(conditional_fidelity(&lc) > 0.999);
}

#[test]
fn small_rotations_keep_the_decoded_labels() {
    let code = diamond(9.0);
    let dim = build_codewords(&code).unwrap().dim();
    let cfg = QecConfig::for_code(&code);
    let bound = PI / (2.0 * code.d_n() as f64);
    for l in 0..4 {
        let base = teleport_qec_ops(&code, &[np_displace(NpVector::new(l, 0.0), dim).unwrap()], &cfg, Pipeline::Reduced).unwrap();
        for phi in [-0.5 * bound, 0.5 * bound] {
            let lc = teleport_qec_ops(&code, &[np_displace(NpVector::new(l, phi), dim).unwrap()], &cfg, Pipeline::Reduced).unwrap();
            assert_eq!(dominant_shift(&lc), dominant_shift(&base));
        }
    }
}

#[test]
fn reduced_and_joint_pipelines_agree() {
    let code = diamond(4.0);
    let dim = build_codewords(&code).unwrap().dim();
    let kraus = noise_kraus(NoiseParams::new(0.03, 0.005).unwrap(), dim, 1e-12).unwrap();
    let cfg = QecConfig::for_code(&code).with_phase_points(512);
    let a = teleport_qec_with(&code, &kraus, &cfg, Pipeline::Reduced).unwrap();
    let b = teleport_qec_with(&code, &kraus, &cfg, Pipeline::Joint).unwrap();
    assert!((a.process - b.process).norm() < 1e-12);
    assert!(b.leakage < 1e-12);
}

#[test]
fn probabilities_close_per_input() {
    let code = diamond(4.0);
    let dim = build_codewords(&code).unwrap().dim();
    let kraus = noise_kraus(NoiseParams::new(0.05, 0.01).unwrap(), dim, 1e-12).unwrap();
    let lc = teleport_qec(&code, &kraus, &QecConfig::for_code(&code)).unwrap();
    for mu in 0..2 {
        let total: f64 = lc.syndromes_by_input[mu].iter().sum::<f64>() + lc.leakage_by_input[mu];
        assert!((total - 1.0).abs() < 1e-8, "{total}");
    }
    assert!((lc.total_weight() - 1.0).abs() < 1e-8);
    assert!(lc.min_choi_eigenvalue() > -1e-8);
}

#[test]
fn fidelity_falls_with_loss() {
    let code = diamond(4.0);
    let dim = build_codewords(&code).unwrap().dim();
    let cfg = QecConfig::for_code(&code);
    let f: Vec<f64> = [0.0, 0.01, 0.02, 0.04]
        .iter()
        .map(|&g| channel_fidelity(&teleport_qec(&code, &noise_kraus(NoiseParams::new(g, 0.001).unwrap(), dim, 1e-12).unwrap(), &cfg).unwrap()))
        .collect();
    assert!(f.windows(2).all(|w| w[1] <= w[0] + 1e-6), "{f:?}");
}

#[test]
fn phase_grid_is_converged() {
    let code = diamond(9.0);
    let dim = build_codewords(&code).unwrap().dim();
    let kraus = noise_kraus(NoiseParams::new(0.01, 0.001).unwrap(), dim, 1e-12).unwrap();
    let cfg = QecConfig::for_code(&code);
    let coarse = channel_fidelity(&teleport_qec(&code, &kraus, &cfg.clone().with_phase_points(4096)).unwrap());
    let fine = channel_fidelity(&teleport_qec(&code, &kraus, &cfg.with_phase_points(8192)).unwrap());
    assert!((coarse - fine).abs() < 1e-6);
}

#[test]
fn circuit_parity_matches_projective_parity() {
    let code = CodeParams::new(2, Fraction::new(1, 2).unwrap(), AmplitudeSpec::Binomial { k: 3 }).unwrap();
    let dim = build_codewords(&code).unwrap().dim();
    let cfg = QecConfig::for_code(&code).with_phase_points(256);
    let circuit = cfg.clone().with_parity(ParityMode::CircuitSim { alpha: 4.0, dim: Some(30) });
    for l in [0, 1] {
        let err = np_displace(NpVector::new(l, 0.0), dim).unwrap();
        let ideal = teleport_qec_ops(&code, &[err.clone()], &cfg, Pipeline::Reduced).unwrap();
        let sim = teleport_qec_ops(&code, &[err], &circuit, Pipeline::Joint).unwrap();
        let p_k = |lc: &LogicalChannel| -> f64 {
            let tot: f64 = lc.syndromes.iter().map(|s| s.probability).sum();
            lc.syndromes.iter().filter(|s| s.k == l as u32).map(|s| s.probability).sum::<f64>() / tot
        };
        assert!((p_k(&ideal) - 1.0).abs() < 1e-12);
        assert!(p_k(&sim) > 0.99, "{}", p_k(&sim));
    }
}

/// Independent density-matrix evolution of the full cycle on a dim-12 code.
fn density_reference(code: &CodeParams, noise: NoiseParams, cfg: &QecConfig) -> [[Matrix2<C64>; 2]; 2] {
    let basis = build_codewords(code).unwrap();
    let d = basis.dim();
    let s = code.s as usize;
    let m = cfg.phase_points;
    let enc: Vec<Vec<C64>> = (0..2).map(|mu| basis.encoded(mu).unwrap().as_slice().to_vec()).collect();
    let plus: Vec<C64> = (0..d).map(|a| (enc[0][a] + enc[1][a]) * FRAC_1_SQRT_2).collect();
    let channel = lindblad_channel(noise, d).unwrap();
    let udag = interface_gate(code.s, code.f, d).unwrap().adjoint();
    let regions = decision_regions(code, cfg).unwrap();
    let h = Matrix2::new(1.0, 1.0, 1.0, -1.0).map(|x: f64| C64::new(x * FRAC_1_SQRT_2, 0.0));
    let z = Matrix2::new(1.0, 0.0, 0.0, -1.0).map(|x: f64| C64::new(x, 0.0));
    let x = Matrix2::new(0.0, 1.0, 1.0, 0.0).map(|x: f64| C64::new(x, 0.0));

    let mut out = [[Matrix2::zeros(); 2]; 2];
    for mu in 0..2 {
        for nu in 0..2 {
            let rho_in = DMatrix::from_fn(d, d, |i, j| enc[mu][i] * enc[nu][j].conj());
            let rho = channel.apply(&rho_in).unwrap();
            for k in 0..s {
                let proj = DMatrix::from_fn(d, d, |i, j| {
                    if i == j && (s - i % s) % s == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
                });
                let r = udag.mat() * &proj * &rho * proj.adjoint() * udag.mat().adjoint();
                // joint data (x) ancilla density after the controlled phase
                let idx = |n: usize, a: usize| n * d + a;
                let cz = |n: usize, a: usize| C64::from_polar(1.0, -PI * (n * a) as f64 / (s * s) as f64);
                let mut joint = DMatrix::<C64>::zeros(d * d, d * d);
                for n in 0..d {
                    for a in 0..d {
                        for n2 in 0..d {
                            for a2 in 0..d {
                                joint[(idx(n, a), idx(n2, a2))] = cz(n, a) * r[(n, n2)] * plus[a] * plus[a2].conj() * cz(n2, a2).conj();
                            }
                        }
                    }
                }
                for j in 0..m {
                    let xj = 2.0 * PI * j as f64 / m as f64;
                    let mut sigma = DMatrix::<C64>::zeros(d, d);
                    for n in 0..d {
                        for n2 in 0..d {
                            let w = C64::from_polar(1.0 / m as f64, -(n as f64) * xj + n2 as f64 * xj);
                            for a in 0..d {
                                for a2 in 0..d {
                                    sigma[(a, a2)] += w * joint[(idx(n, a), idx(n2, a2))];
                                }
                            }
                        }
                    }
                    let undo = |a: usize| C64::from_polar(1.0, -PI * (k * a) as f64 / (s * s) as f64);
                    let logical = Matrix2::from_fn(|p, q| {
                        let mut acc = C64::new(0.0, 0.0);
                        for a in 0..d {
                            for a2 in 0..d {
                                acc += enc[p][a].conj() * undo(a) * sigma[(a, a2)] * undo(a2).conj() * enc[q][a2];
                            }
                        }
                        acc
                    });
                    let label = regions.decode(k as u32, xj);
                    let mut rec = h;
                    if label.m.rem_euclid(2) == 1 {
                        rec *= z;
                    }
                    if label.i == 1 {
                        rec *= x;
                    }
                    out[mu][nu] += rec * logical * rec.adjoint();
                }
            }
        }
    }
    out
}

#[test]
fn pure_branches_match_density_evolution() {
    let code = CodeParams::new(2, Fraction::new(1, 2).unwrap(), AmplitudeSpec::Binomial { k: 2 }).unwrap().with_dim(12);
    let noise = NoiseParams::new(0.08, 0.02).unwrap();
    let cfg = QecConfig::for_code(&code).with_phase_points(32);
    let reference = density_reference(&code, noise, &cfg);
    let kraus = noise_kraus(noise, 12, 1e-13).unwrap();
    let lc = teleport_qec(&code, &kraus, &cfg).unwrap();
    for mu in 0..2 {
        for nu in 0..2 {
            let diff = (lc.output(mu, nu) - reference[mu][nu]).norm();
            assert!(diff < 1e-10, "({mu},{nu}) {diff}");
        }
    }
}

/// Worked example: D-NP code with `r = -0.1`, `nbar = 9` after `gamma t = 0.1`,
/// `kappa t = 0.01`; overlap with `|+>` is about 0.37 before and 0.97 after
/// one perfect correction cycle.
#[test]
fn worked_example_overlaps() {
    let r: f64 = -0.1;
    let alpha = (4.5 - r.sinh().powi(2)).sqrt();
    let code = CodeParams::new(2, Fraction::new(1, 2).unwrap(), AmplitudeSpec::gaussian_real(alpha, r)).unwrap();
    assert!((code.nominal_nbar() - 9.0).abs() < 1e-12);
    let basis = build_codewords(&code).unwrap();
    let kraus = noise_kraus(NoiseParams::new(0.1, 0.01).unwrap(), basis.dim(), 1e-12).unwrap();
    let plus = basis.plus.normalized().unwrap();
    let v = plus.amps();
    let noisy = kraus.apply(&(v * v.adjoint()));
    let before = (v.adjoint() * &noisy * v)[(0, 0)].re;
    assert!((before - 0.37).abs() < 0.01, "{before}");

    let lc = teleport_qec(&code, &kraus, &QecConfig::for_code(&code)).unwrap();
    let mut after = C64::new(0.0, 0.0);
    for mu in 0..2 {
        for nu in 0..2 {
            after += lc.output(mu, nu).sum() * 0.25;
        }
    }
    assert!((after.re - 0.97).abs() < 0.01, "{}", after.re);
}
