use alkdimer::corecore::{london_dispersion, DispersionSource};
use alkdimer::curve::Curve;
use alkdimer::data::{load_core_parameters, DataDir, Element, Series};
use alkdimer::integrals::{one_electron_blocks, Shell};
use alkdimer::pipeline::config::GridSpec;
use alkdimer::vibrational::{average_dipole, solve_levels, SplinePotential, VibOptions, VibrationalTable};
use proptest::prelude::*;
use std::sync::OnceLock;

fn shell() -> impl Strategy<Value = Shell> {
    (0usize..4, 0.05f64..5.0, -2.0f64..2.0, -2.0f64..2.0, -3.0f64..3.0)
        .prop_map(|(l, a, x, y, z)| Shell::new([x, y, z], 0, l, &[(a, 1.0)]).unwrap())
}

fn morse_levels() -> &'static VibrationalTable {
    static T: OnceLock<VibrationalTable> = OnceLock::new();
    T.get_or_init(|| {
        let r: Vec<f64> = (0..=400).map(|i| 3.5 + 0.05 * i as f64).collect();
        let v = r.iter().map(|x| 0.02 * ((1.0 - (-0.5 * (x - 6.0)).exp()).powi(2) - 1.0)).collect();
        let c = Curve::new(r, v, "morse").unwrap();
        solve_levels(&SplinePotential::new(&c), 1000.0, &VibOptions { max_levels: Some(6), ..Default::default() }).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overlap_is_hermitian_and_bounded(a in shell(), b in shell()) {
        let ab = one_electron_blocks(&a, &b, [0.0; 3]).overlap;
        let ba = one_electron_blocks(&b, &a, [0.0; 3]).overlap;
        let (na, nb) = (a.n_functions(), b.n_functions());
        for i in 0..na {
            for j in 0..nb {
                prop_assert!((ab[i * nb + j] - ba[j * na + i]).abs() < 1e-13);
                prop_assert!(ab[i * nb + j].abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn spline_interpolates_and_reproduces_lines(
        steps in prop::collection::vec(0.05f64..1.5, 3..30),
        ys in prop::collection::vec(-5.0f64..5.0, 30),
        slope in -3.0f64..3.0,
        t in 0.0f64..1.0,
    ) {
        let mut r = vec![2.0];
        for h in &steps {
            r.push(r.last().unwrap() + h);
        }
        let values: Vec<f64> = ys[..r.len()].to_vec();
        let c = Curve::new(r.clone(), values.clone(), "p").unwrap();
        let s = c.spline();
        for (x, y) in r.iter().zip(&values) {
            prop_assert!((s.eval(*x) - y).abs() < 1e-10);
        }
        let line = Curve::new(r.clone(), r.iter().map(|x| slope * x - 1.0).collect(), "l").unwrap().spline();
        let x = r[0] + t * (r[r.len() - 1] - r[0]);
        prop_assert!((line.eval(x) - (slope * x - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn dispersion_is_symmetric_attractive_and_r6(i in 0usize..5, j in 0usize..5, r in 3.0f64..30.0) {
        let atoms = [Element::Li, Element::Na, Element::K, Element::Rb, Element::Cs];
        let dd = DataDir::from_env();
        let a = load_core_parameters(&dd.core_path(atoms[i], Series::A)).unwrap();
        let b = load_core_parameters(&dd.core_path(atoms[j], Series::A)).unwrap();
        let ab = london_dispersion(&a, &b, r, DispersionSource::NeutralAtomIp).unwrap();
        let ba = london_dispersion(&b, &a, r, DispersionSource::NeutralAtomIp).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-15 * ab.abs());
        prop_assert!(ab < 0.0);
        let far = london_dispersion(&a, &b, 2.0 * r, DispersionSource::NeutralAtomIp).unwrap();
        prop_assert!((far * 64.0 / ab - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dipole_average_stays_within_curve_range(amp in -5.0f64..5.0, center in 4.0f64..9.0, width in 0.5f64..10.0, offset in -2.0f64..2.0) {
        let mut t = morse_levels().clone();
        let r: Vec<f64> = (0..=300).map(|i| 1.0 + 0.1 * i as f64).collect();
        let d: Vec<f64> = r.iter().map(|x| offset + amp * (-(x - center).powi(2) / width).exp()).collect();
        let (lo, hi) = d.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        average_dipole(&mut t, &Curve::new(r, d, "d").unwrap()).unwrap();
        for l in &t.levels {
            let v = l.dipole_debye.unwrap();
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }

    #[test]
    fn grid_resolution_is_sorted_unique_and_complete(min in 3.0f64..6.0, span in 1.0f64..10.0, step in 0.1f64..1.0, extra in prop::collection::vec(3.0f64..50.0, 0..5)) {
        let g = GridSpec { min: Some(min), max: Some(min + span), step: Some(step), points: None, extra: extra.clone() };
        let r = g.resolve().unwrap();
        prop_assert!(r.windows(2).all(|w| w[1] > w[0]));
        prop_assert!((r[0] - min.min(extra.iter().copied().fold(f64::MAX, f64::min))).abs() < 1e-12);
        for e in &extra {
            prop_assert!(r.iter().any(|x| (x - e).abs() < 1e-12));
        }
    }
}
