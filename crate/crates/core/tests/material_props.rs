mod support;

use proptest::prelude::*;
use support::hermitian_spectrum;
use tpt_engine::material::{FieldPotential, MaterialParams, Valley};

fn closed_form(p: &MaterialParams, kx: f64, ky: f64, u: f64) -> Vec<f64> {
    let b = p.band_energies(kx.hypot(ky), FieldPotential(u)).unwrap();
    let mut v = vec![-b.e2, -b.e1, b.e1, b.e2];
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn spectrum_example_point() {
    let p = MaterialParams::STANENE;
    let h = p.hamiltonian_matrix(3.0, 4.0, Valley::KPrime, FieldPotential(10.0));
    let ev = hermitian_spectrum(&h);
    let want = [
        -(1625f64).sqrt(),
        -(425f64).sqrt(),
        (425f64).sqrt(),
        (1625f64).sqrt(),
    ];
    for (a, b) in ev.iter().zip(want) {
        assert!((a - b).abs() < 1e-10, "{ev:?}");
    }
    assert!((ev[2] - 20.616).abs() < 1e-3 && (ev[3] - 40.311).abs() < 1e-3);
}

proptest! {
    #[test]
    fn hamiltonian_spectrum_matches_bands(
        kx in -300.0..300.0f64,
        ky in -300.0..300.0f64,
        u in -150.0..150.0f64,
        k_valley in any::<bool>(),
    ) {
        let p = MaterialParams::STANENE;
        let valley = if k_valley { Valley::K } else { Valley::KPrime };
        let h = p.hamiltonian_matrix(kx, ky, valley, FieldPotential(u));
        let ev = hermitian_spectrum(&h);
        for (a, b) in ev.iter().zip(closed_form(&p, kx, ky, u)) {
            prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn mass_term_independent_of_momentum(
        k1 in 0.0..500.0f64,
        k2 in 0.0..500.0f64,
        u in -150.0..150.0f64,
        lambda in 1.0..80.0f64,
    ) {
        let p = MaterialParams::new(lambda).unwrap();
        let a = p.band_energies(k1, u.into()).unwrap();
        let b = p.band_energies(k2, u.into()).unwrap();
        for (x, y) in [(a.e1 * a.e1 - k1 * k1, b.e1 * b.e1 - k2 * k2), (a.e2 * a.e2 - k1 * k1, b.e2 * b.e2 - k2 * k2)] {
            // the mass is reconstructed by subtraction, so compare on the scale of E²
            let scale = (a.e2 * a.e2).max(b.e2 * b.e2);
            prop_assert!((x - y).abs() <= 1e-12 * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn gap_mirrors_about_critical_field(n in -30_720i32..=30_720) {
        // dyadic offsets keep λ ± x exact; beyond |x| = λ the gap folds at u = 0
        let x = f64::from(n) / 1024.0;
        let p = MaterialParams::STANENE;
        let l = p.lambda_so();
        prop_assert_eq!(p.band_gap((l + x).into()), p.band_gap((l - x).into()));
    }

    #[test]
    fn bands_even_in_field_and_monotone_in_momentum(
        k in 0.0..400.0f64,
        dk in 0.0..50.0f64,
        u in -150.0..150.0f64,
    ) {
        let p = MaterialParams::STANENE;
        let a = p.band_energies(k, u.into()).unwrap();
        prop_assert_eq!(a, p.band_energies(k, (-u).into()).unwrap());
        let b = p.band_energies(k + dk, u.into()).unwrap();
        prop_assert!(b.e1 >= a.e1 && b.e2 >= a.e2);
        prop_assert!(a.e1 <= a.e2);
    }
}
