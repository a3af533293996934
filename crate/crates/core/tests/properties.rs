//! Property tests for the algebraic invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use diskwalk::cmeasure::CircleMeasure;
use diskwalk::gmeasure::GroupMeasure;
use diskwalk::moebius::MoebiusMap;
use diskwalk::transforms::cauchy_transform;

fn arb_map() -> impl Strategy<Value = MoebiusMap> {
    (
        0.0..2.0f64,
        0.0..std::f64::consts::TAU,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(r, phase_a, phase_b)| {
            let b = Complex64::from_polar(r, phase_b);
            let a = Complex64::from_polar((1.0 + b.norm_sqr()).sqrt(), phase_a);
            MoebiusMap::new(a, b).expect("valid representative")
        })
}

fn arb_disk_point() -> impl Strategy<Value = Complex64> {
    (0.0..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #[test]
    fn composition_acts_like_function_composition(
        g in arb_map(),
        h in arb_map(),
        z in arb_disk_point(),
    ) {
        let lhs = g.compose(&h).apply_finite(z);
        let rhs = g.apply_finite(h.apply_finite(z));
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn inverse_round_trip_and_normalization(g in arb_map(), z in arb_disk_point()) {
        let back = g.inverse().apply_finite(g.apply_finite(z));
        prop_assert!((back - z).norm() < 1e-10);
        prop_assert!(g.normalization_defect() < 1e-10);
        prop_assert!(g.compose(&g.inverse()).is_identity());
    }

    #[test]
    fn disk_automorphisms_preserve_the_circle(g in arb_map(), t in 0.0..std::f64::consts::TAU) {
        let xi = Complex64::from_polar(1.0, t);
        prop_assert!((g.apply_finite(xi).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convolution_masses_multiply(
        g in arb_map(),
        h in arb_map(),
        wg in -1.0..1.0f64,
        wh in -1.0..1.0f64,
    ) {
        let a = GroupMeasure::from_atoms(vec![(g, Complex64::new(wg, 0.2))], "a").unwrap();
        let b = GroupMeasure::from_atoms(vec![(h, Complex64::new(wh, -0.1))], "b").unwrap();
        let c = a.convolve(&b).unwrap();
        prop_assert!((c.mass() - a.mass() * b.mass()).norm() < 1e-12);
        prop_assert!(c.total_variation() <= a.total_variation() * b.total_variation() + 1e-10);
    }

    #[test]
    fn pushforward_keeps_mass_and_positivity(
        g in arb_map(),
        t1 in 0.0..std::f64::consts::TAU,
        t2 in 0.0..std::f64::consts::TAU,
        w in 0.05..0.95f64,
    ) {
        let nu = CircleMeasure::atomic(
            vec![t1, t2],
            vec![Complex64::new(w, 0.0), Complex64::new(1.0 - w, 0.0)],
        )
        .unwrap();
        let pushed = nu.pushforward(&g);
        let coeffs = pushed.fourier_coeffs(4);
        prop_assert!((coeffs.get(0) - 1.0).norm() < 1e-12);
        prop_assert!(pushed.is_positive(1e-12));
        prop_assert!(coeffs.is_hermitian(1e-12));
    }

    #[test]
    fn markov_step_preserves_unit_mass(
        g in arb_map(),
        h in arb_map(),
        w in 0.1..0.9f64,
    ) {
        let mu = GroupMeasure::from_atoms(
            vec![
                (g, Complex64::new(w, 0.0)),
                (h, Complex64::new(1.0 - w, 0.0)),
            ],
            "pair",
        )
        .unwrap();
        let nu = CircleMeasure::grid_from_density(256, |t| 1.0 + 0.3 * t.sin()).unwrap();
        let out = nu.markov_step(&mu).unwrap();
        prop_assert!((out.fourier_coeffs(0).get(0) - 1.0).norm() < 1e-9);
    }

    #[test]
    fn atomic_cauchy_agrees_with_band_series(
        t1 in 0.0..std::f64::consts::TAU,
        w in 0.1..0.9f64,
        z in arb_disk_point(),
    ) {
        // interior/exterior consistency of the two evaluation routes
        let nu = CircleMeasure::atomic(
            vec![t1, t1 + 2.0],
            vec![Complex64::new(w, 0.0), Complex64::new(1.0 - w, 0.0)],
        )
        .unwrap();
        let band = CircleMeasure::fourier(nu.fourier_coeffs(256)).unwrap();
        let z = z * 0.9 / 0.95; // keep |z| <= 0.9
        let exact = cauchy_transform(&nu, z).unwrap();
        let series = cauchy_transform(&band, z).unwrap();
        prop_assert!((exact - series).norm() < 1e-8);
        let ze = z.finv() * 1.0; // |1/z| >= 1.11 when |z| <= 0.9
        if z.norm() > 1e-3 {
            let exact = cauchy_transform(&nu, ze).unwrap();
            let series = cauchy_transform(&band, ze).unwrap();
            prop_assert!((exact - series).norm() < 1e-8);
        }
    }
}
