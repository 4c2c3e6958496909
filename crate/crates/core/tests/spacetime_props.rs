use latticewave::bump::AmplitudeSpec;
use latticewave::dispersion::DispersionRelation;
use latticewave::evolve::{LatticeField, Propagator};
use latticewave::oscquad::{green_g, oscint_j, JOptions, QuadOptions};
use latticewave::polynewton::{rat_int, SparsePoly};
use num_complex::Complex64;
use proptest::prelude::*;

fn field(d: usize, l: usize) -> impl Strategy<Value = LatticeField> {
    prop::collection::vec(-1.0f64..1.0, l.pow(d as u32)).prop_map(move |v| LatticeField::from_real(d, l, &v).unwrap())
}

fn pairing(a: &LatticeField, b: &LatticeField) -> Complex64 {
    a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum()
}

fn phase() -> impl Strategy<Value = SparsePoly> {
    let term = (prop::collection::vec(0u32..4, 2), -3i64..=3).prop_filter("nonconstant", |(e, c)| *c != 0 && e.iter().sum::<u32>() > 0);
    prop::collection::vec(term, 1..4).prop_map(|t| SparsePoly::from_terms(2, t.into_iter().map(|(e, c)| (e, rat_int(c)))).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn j_conjugation_symmetry(s in phase(), t in 0.5f64..20.0) {
        let amp = AmplitudeSpec::Separable { radius: 1.0 };
        let o = JOptions::default();
        let p = oscint_j(&s, &amp, t, &o).unwrap().value;
        let m = oscint_j(&s, &amp, -t, &o).unwrap().value;
        prop_assert!((p - m.conj()).norm() <= 1e-12 * p.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn green_is_odd_and_lattice_symmetric(x in prop::collection::vec(-6i64..=6, 3), t in 0.5f64..12.0, perm in Just(vec![0usize, 1, 2]).prop_shuffle(), flips in prop::collection::vec(any::<bool>(), 3)) {
        let rel = DispersionRelation::wave(3);
        let o = QuadOptions::default();
        let g = green_g(&rel, &x, t, &o).unwrap().value.re;
        let odd = green_g(&rel, &x, -t, &o).unwrap().value.re;
        prop_assert!((g + odd).abs() <= 1e-12);
        let y: Vec<i64> = perm.iter().zip(&flips).map(|(&i, &f)| if f { -x[i] } else { x[i] }).collect();
        let h = green_g(&rel, &y, t, &o).unwrap().value.re;
        prop_assert!((g - h).abs() <= 1e-10, "{g} vs {h}");
    }

    #[test]
    fn green_convolution_is_self_adjoint(f in field(2, 12), h in field(2, 12), t in 0.0f64..30.0) {
        let p = Propagator::new(&DispersionRelation::wave(2), 12);
        let zero = LatticeField::zeros(2, 12);
        let gf = p.propagate(&zero, &f, t).unwrap().u;
        let gh = p.propagate(&zero, &h, t).unwrap().u;
        let a = pairing(&gf, &h);
        let b = pairing(&f, &gh);
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn half_wave_is_unitary_group(f in field(3, 6), s in -10.0f64..10.0, r in -10.0f64..10.0) {
        let p = Propagator::new(&DispersionRelation::wave(3), 6);
        let n0 = f.lp_norm(2.0);
        let a = p.half_wave(&f, s, 1.0).unwrap();
        prop_assert!((a.lp_norm(2.0) - n0).abs() <= 1e-12 * n0);
        let ab = p.half_wave(&a, r, 1.0).unwrap();
        let c = p.half_wave(&f, s + r, 1.0).unwrap();
        prop_assert!(ab.max_abs_diff(&c) <= 1e-12 * (1.0 + n0));
    }

    #[test]
    fn energy_is_conserved(f in field(3, 8), g in field(3, 8), t in 0.0f64..100.0, mass in 0.0f64..1.0) {
        let p = Propagator::new(&DispersionRelation::new(3, mass).unwrap(), 8);
        let s0 = p.propagate(&g, &f, 0.0).unwrap();
        let e0 = p.energy(&s0);
        let e = p.energy(&p.propagate(&g, &f, t).unwrap());
        prop_assert!((e - e0).abs() <= 1e-10 * e0);
        let st = p.propagate(&g, &f, t).unwrap();
        prop_assert!((st.u.lp_norm(2.0) - p.l2_fourier(&st.u)).abs() <= 1e-12 * (1.0 + st.u.lp_norm(2.0)));
    }
}
