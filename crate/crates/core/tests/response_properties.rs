use hartree_core::equilibria::{CovarianceProfile, Distribution, Potential};
use hartree_core::response::{apply_l1_time_domain, mf_from_profile};
use hartree_core::spectral::{SpectralField, TorusGrid};
use hartree_core::twowave::{build_symbol, closed_form_spectrum, multiset_distance, TwoWaveParams};
use hartree_core::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn fermi_profile() -> &'static CovarianceProfile {
    static P: OnceLock<CovarianceProfile> = OnceLock::new();
    P.get_or_init(|| CovarianceProfile::new(&Distribution::fermi(1.0, 0.0).unwrap(), 2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplier_is_conjugate_symmetric(tau in 0.0f64..50.0, xi in 0.01f64..4.0) {
        let p = fermi_profile();
        let a = mf_from_profile(p, tau, xi);
        let b = mf_from_profile(p, -tau, xi);
        prop_assert!((a.value - b.value.conj()).norm() <= 2.0 * a.error.max(b.error));
    }

    #[test]
    fn static_multiplier_is_real(xi in 0.01f64..4.0) {
        let v = mf_from_profile(fermi_profile(), 0.0, xi);
        prop_assert!(v.value.im.abs() <= v.error);
        prop_assert!(v.value.re < 0.0);
    }

    #[test]
    fn two_wave_spectrum_is_symmetric_under_negation(
        xi in prop::collection::vec(-2.0f64..2.0, 1..=4),
        seed in prop::collection::vec(-3.0f64..3.0, 4),
        m in 0.0f64..3.0,
        a in 0.0f64..2.0,
    ) {
        let d = xi.len();
        let p = TwoWaveParams::new(&xi, m, Potential::delta(a).unwrap()).unwrap();
        let s = closed_form_spectrum(&p, &seed[..d]).unwrap();
        let neg = s.map(|l| -l);
        let scale = s.iter().map(|l| l.norm()).fold(1.0, f64::max);
        prop_assert!(multiset_distance(&s, &neg) <= 1e-12 * scale);
        let sym = build_symbol(&p, &seed[..d]).unwrap();
        for l in s {
            prop_assert!(sym.poly_residual(l) <= 1e-10 * scale.powi(4));
        }
    }
}

#[test]
fn time_domain_response_is_linear() {
    let g = TorusGrid::new(1, 6.0, 16).unwrap();
    let p = CovarianceProfile::new(&Distribution::gaussian(1.0).unwrap(), 1).unwrap();
    let w = Potential::gaussian(1.0, 0.5).unwrap();
    let series = |c: f64, k: f64| -> Vec<SpectralField> {
        (0..60)
            .map(|n| {
                let t = n as f64 * 0.05;
                SpectralField::from_fn(&g, |x| Complex64::new(c * (-t).exp() * (k * x[0]).cos(), 0.0))
            })
            .collect()
    };
    let (u, v) = (
        series(1.0, 2.0 * std::f64::consts::PI / 6.0),
        series(-0.5, 4.0 * std::f64::consts::PI / 6.0),
    );
    let sum: Vec<SpectralField> = u
        .iter()
        .zip(&v)
        .map(|(a, b)| {
            a.combine(Complex64::new(1.0, 0.0), b, Complex64::new(1.0, 0.0))
                .unwrap()
        })
        .collect();
    let lu = apply_l1_time_domain(&u, 0.05, &p, &w).unwrap();
    let lv = apply_l1_time_domain(&v, 0.05, &p, &w).unwrap();
    let ls = apply_l1_time_domain(&sum, 0.05, &p, &w).unwrap();
    for n in 0..60 {
        let expect = lu[n]
            .combine(Complex64::new(1.0, 0.0), &lv[n], Complex64::new(1.0, 0.0))
            .unwrap();
        assert!(ls[n].max_abs_diff(&expect) < 1e-13);
    }
}
