use hartree_core::spectral::{
    apply_multiplier, besov_norm, frequency_l2_norm, lebesgue_norm, sobolev_norm, LittlewoodPaley, SpectralField,
    TorusGrid,
};
use hartree_core::Complex64;
use proptest::prelude::*;

fn grid_and_values() -> impl Strategy<Value = (TorusGrid, Vec<Complex64>)> {
    (1usize..=3, 1u32..=4, 1.0f64..40.0).prop_flat_map(|(d, log_n, len)| {
        let n = 1usize << log_n;
        let g = TorusGrid::new(d, len, n).unwrap();
        let total = g.len();
        (
            Just(g),
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), total)
                .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()),
        )
    })
}

fn field((g, v): (TorusGrid, Vec<Complex64>)) -> SpectralField {
    SpectralField::from_values(&g, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_holds(gv in grid_and_values()) {
        let f = field(gv);
        let a = lebesgue_norm(&f, 2.0);
        let b = frequency_l2_norm(&f);
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn blocks_reassemble_mean_free_part(gv in grid_and_values()) {
        let f = field(gv);
        let g = f.grid().clone();
        let lp = LittlewoodPaley::new(&g);
        let mut sum = vec![Complex64::new(0.0, 0.0); g.len()];
        for p in lp.decompose(&f) {
            for (s, c) in sum.iter_mut().zip(p.field.coefficients()) {
                *s += c;
            }
        }
        for (i, (s, c)) in sum.iter().zip(f.coefficients()).enumerate() {
            let expect = if i == 0 { Complex64::new(0.0, 0.0) } else { *c };
            prop_assert!((s - expect).norm() <= 1e-12 * (1.0 + c.norm()));
        }
    }

    #[test]
    fn projection_commutes_with_lattice_shift(gv in grid_and_values(), sh in prop::array::uniform3(-5i64..5)) {
        let f = field(gv);
        let lp = LittlewoodPaley::new(f.grid());
        let d = f.grid().dim();
        let j = *lp.covering_range().end();
        let a = lp.project(&f.shifted(&sh[..d]), j).field;
        let b = lp.project(&f, j).field.shifted(&sh[..d]);
        prop_assert!(a.max_abs_diff(&b) <= 1e-12 * (1.0 + f.max_abs()));
    }

    #[test]
    fn multipliers_are_linear(gv in grid_and_values(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let f = field(gv);
        let h = f.shifted(&[1, 0, 0][..f.grid().dim()]);
        let sym = |xi: &[f64]| Complex64::new(1.0 + xi.iter().map(|x| x * x).sum::<f64>(), xi[0]);
        let lhs = apply_multiplier(&f.combine(Complex64::new(a, 0.0), &h, Complex64::new(b, 0.0)).unwrap(), sym).unwrap();
        let rhs = apply_multiplier(&f, sym)
            .unwrap()
            .combine(Complex64::new(a, 0.0), &apply_multiplier(&h, sym).unwrap(), Complex64::new(b, 0.0))
            .unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn besov_norm_is_monotone_in_regularity(
        gv in grid_and_values(),
        p in 1.0f64..8.0,
        s1 in -2.0f64..2.0, ds in 0.0f64..2.0,
        t2 in -2.0f64..2.0, dt in 0.0f64..2.0,
    ) {
        let f = field(gv);
        let weak = besov_norm(&f, p, s1 + ds, t2).value;
        let strong = besov_norm(&f, p, s1, t2 + dt).value;
        prop_assert!(weak <= strong * (1.0 + 1e-12));
    }
}

#[test]
fn zero_order_sobolev_is_l2() {
    let g = TorusGrid::new(2, 7.0, 16).unwrap();
    let f = SpectralField::from_fn(&g, |x| Complex64::new((x[0]).sin() * x[1].cos(), 0.3));
    let a = sobolev_norm(&f, 0.0, 2.0);
    let b = lebesgue_norm(&f, 2.0);
    assert!((a - b).abs() <= 1e-12 * b);
}

#[test]
fn lebesgue_norm_of_constant() {
    let g = TorusGrid::new(3, 2.0, 8).unwrap();
    let f = SpectralField::from_fn(&g, |_| Complex64::new(0.0, 2.0));
    for p in [1.0, 2.0, 3.5, f64::INFINITY] {
        let expect = if p.is_infinite() { 2.0 } else { 2.0 * 8f64.powf(1.0 / p) };
        assert!((lebesgue_norm(&f, p) - expect).abs() <= 1e-12 * expect, "p = {p}");
    }
}
