use std::f64::consts::PI;

use nalgebra::DVector;
use nplattice::codes::{
    build_codewords, code_metrics, first_violating_shift, interface_gate, kl_matrix, logical_operators, vortex_check,
    AmplitudeSpec, CodeParams, Fraction,
};
use nplattice::fock::{ladder_operators, np_decompose, np_displace, sigma, FockOperator, NpVector, PhaseGrid};
use nplattice::C64;
use proptest::prelude::*;

fn frac(p: i64, q: i64) -> Fraction {
    Fraction::new(p, q).unwrap()
}

fn gaussian(s: u32, f: Fraction, alpha2: f64) -> CodeParams {
    CodeParams::new(s, f, AmplitudeSpec::gaussian_real(alpha2.sqrt(), 0.0)).unwrap()
}

fn distance(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    (a - b).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn displacements_commute_up_to_the_cross_phase(
        la in -2i64..=2, pa in -PI..PI, lb in -2i64..=2, pb in -PI..PI,
        re in prop::collection::vec(-1.0f64..1.0, 16), im in prop::collection::vec(-1.0f64..1.0, 16),
    ) {
        let dim = 16;
        let (a, b) = (NpVector::new(la, pa), NpVector::new(lb, pb));
        let margin = (la.abs() + lb.abs()) as usize;
        let v = DVector::from_fn(dim, |n, _| {
            if (margin..dim - margin).contains(&n) { C64::new(re[n], im[n]) } else { C64::new(0.0, 0.0) }
        });
        let (da, db) = (np_displace(a, dim).unwrap(), np_displace(b, dim).unwrap());
        let lhs = da.apply_vec(&db.apply_vec(&v));
        let rhs = db.apply_vec(&da.apply_vec(&v)) * C64::from_polar(1.0, a.cross(&b));
        prop_assert!((lhs - rhs).iter().all(|z| z.norm() < 1e-12));
    }
}

#[test]
fn annihilation_expands_over_four_shifts() {
    let lad = ladder_operators(14).unwrap();
    let grid = PhaseGrid::new(4096).unwrap();
    let w = np_decompose(&lad.a, -1..=2, &grid);
    assert!(w.residual(&lad.a) < 1e-6);
    // only the l = 1 component carries weight
    for l in [-1, 0, 2] {
        assert!(w.max_weight(l) < 1e-12, "l = {l}");
    }
}

#[test]
fn stabilizer_overlap_grows_with_amplitude() {
    let mut last = 0.0;
    for alpha2 in [1.0, 2.0, 4.0, 8.0] {
        let code = gaussian(2, frac(1, 2), alpha2);
        let basis = build_codewords(&code).unwrap();
        let ops = logical_operators(&code).unwrap();
        let plus = basis.plus.normalized().unwrap();
        let o = plus.inner(&ops.s_x.apply(&plus)).norm();
        assert!(o > last, "alpha^2 = {alpha2}: {o} <= {last}");
        last = o;
    }
    assert!(last > 0.9);
}

#[test]
fn number_distance_shows_up_in_kl_violations() {
    for (s, f, d_n) in [(2, frac(1, 2), 4), (1, frac(1, 4), 4), (3, frac(0, 1), 3), (2, frac(1, 3), 6)] {
        let code = gaussian(s, f, 64.0 / s as f64);
        let basis = build_codewords(&code).unwrap();
        assert_eq!(code.d_n(), d_n);
        assert_eq!(first_violating_shift(&basis, 10, 1e-3).unwrap(), Some(d_n), "s={s} f={f:?}");
    }
}

#[test]
fn kl_cost_falls_with_amplitude() {
    let costs: Vec<f64> = [2.0, 4.0, 6.0, 8.0]
        .iter()
        .map(|&a2| {
            let basis = build_codewords(&gaussian(2, frac(1, 2), a2)).unwrap();
            let dim = basis.dim();
            let lad = ladder_operators(dim).unwrap();
            let errors = [FockOperator::identity(dim), lad.a.clone(), lad.a.compose(&lad.a), lad.n.clone()];
            kl_matrix(&basis, &errors).unwrap().cost
        })
        .collect();
    assert!(costs.windows(2).all(|w| w[1] < w[0]), "{costs:?}");
}

#[test]
fn interface_gate_converts_lattices_and_inverts() {
    let r = gaussian(2, frac(0, 1), 3.0);
    let d = gaussian(2, frac(1, 2), 3.0);
    let (br, bd) = (build_codewords(&r).unwrap(), build_codewords(&d).unwrap());
    let dim = br.dim().max(bd.dim());
    let u = interface_gate(2, frac(1, 2), dim).unwrap();
    let back = interface_gate(2, frac(-1, 2), dim).unwrap();
    assert!(u.compose(&back).max_abs_diff(&FockOperator::identity(dim)) < 1e-14);
    for (sr, sd) in [(&br.plus, &bd.plus), (&br.minus, &bd.minus)] {
        let (sr, sd) = (sr.resized(dim), sd.resized(dim));
        assert!(distance(u.apply(&sr).amps(), sd.amps()) < 1e-12);
    }
}

#[test]
fn six_photon_codes_share_their_mean_excitation() {
    let codes = [
        CodeParams::new(4, frac(0, 1), AmplitudeSpec::Binomial { k: 3 }).unwrap(),
        gaussian(1, frac(1, 4), 6.0),
        gaussian(2, frac(1, 2), 3.0),
    ];
    for code in &codes {
        let m = code_metrics(code).unwrap();
        assert!((m.nbar - 6.0).abs() < 1e-6, "{code:?}: {}", m.nbar);
        let basis = build_codewords(code).unwrap();
        let sz = logical_operators(code).unwrap().s_z;
        for psi in [&basis.zero, &basis.one, &basis.plus, &basis.minus] {
            assert!(distance(sz.apply(psi).amps(), psi.amps()) < 1e-12);
        }
    }
}

#[test]
fn lowering_rotates_sheared_codewords() {
    for code in [gaussian(1, frac(1, 4), 6.0), gaussian(2, frac(1, 2), 3.0), gaussian(1, frac(1, 2), 4.0)] {
        let basis = build_codewords(&code).unwrap();
        for l in 1..=3 {
            let v = vortex_check(&basis, l, &basis.plus).unwrap();
            assert!(v.residual < 1e-12, "{code:?} l={l}: {}", v.residual);
            let f = code.f.to_f64();
            assert!((v.angle + l as f64 * f * PI / (code.s as f64).powi(2)).abs() < 1e-15);
        }
    }
    let code = gaussian(1, frac(1, 2), 4.0);
    let v = vortex_check(&build_codewords(&code).unwrap(), 1, &build_codewords(&code).unwrap().plus).unwrap();
    assert!((v.angle + PI / 2.0).abs() < 1e-15);
}

#[test]
fn sigma_matches_ladder_power() {
    let dim = 10;
    let lad = ladder_operators(dim).unwrap();
    let s2 = sigma(2, dim).unwrap();
    assert!(s2.max_abs_diff(&lad.sigma(1).unwrap().compose(&lad.sigma(1).unwrap())) < 1e-15);
}
