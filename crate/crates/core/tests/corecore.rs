use alkdimer::corecore::{
    apply_shift, assemble, empirical_shift, induced_dipole_term, london_dispersion, summarize, terms, CoreCoreModel,
    DispersionCutoff, DispersionSource, Repulsion,
};
use alkdimer::curve::Curve;
use alkdimer::data::{load_core_parameters, CoreParameters, DataDir, Element, Series};
use alkdimer::units::hartree_to_cm1;

fn core(atom: Element) -> CoreParameters {
    load_core_parameters(&DataDir::from_env().core_path(atom, Series::A)).unwrap()
}

// closed-form evaluations with the bundled polarizabilities and NIST energies
const KRB_DISP_NEUTRAL_CM1: f64 = -6.4099837716353445;
const KRB_DISP_ION_CM1: f64 = -44.11175181429056;
const RBCS_DISP_NEUTRAL_CM1: f64 = -10.422284406464499;

#[test]
fn dispersion_matches_closed_form_and_table() {
    let (k, rb, cs) = (core(Element::K), core(Element::Rb), core(Element::Cs));
    let krb = hartree_to_cm1(london_dispersion(&k, &rb, 7.64, DispersionSource::NeutralAtomIp).unwrap());
    assert!((krb - KRB_DISP_NEUTRAL_CM1).abs() < 1e-9);
    assert!((krb / -6.41 - 1.0).abs() < 0.02);
    let ion = hartree_to_cm1(london_dispersion(&k, &rb, 7.64, DispersionSource::IonIp).unwrap());
    assert!((ion - KRB_DISP_ION_CM1).abs() < 1e-9);
    let rbcs = hartree_to_cm1(london_dispersion(&rb, &cs, 8.30, DispersionSource::NeutralAtomIp).unwrap());
    assert!((rbcs - RBCS_DISP_NEUTRAL_CM1).abs() < 1e-9);
    assert!((rbcs / -10.22 - 1.0).abs() < 0.03);
}

#[test]
fn induced_dipole_closed_form() {
    let (k, rb) = (core(Element::K), core(Element::Rb));
    let v = induced_dipole_term(&k, &rb, 7.64).unwrap();
    assert!((v - -2.1424943168902827e-3).abs() < 1e-15);
    assert!((hartree_to_cm1(v) - -470.2).abs() < 0.05);
    let far = induced_dipole_term(&k, &rb, 76.4).unwrap();
    assert!((far / v - 1e-4).abs() < 1e-16);
    let mut zero = k.clone();
    zero.alpha_d = 0.0;
    let mut zero2 = rb.clone();
    zero2.alpha_d = 0.0;
    assert_eq!(induced_dipole_term(&zero, &zero2, 5.0).unwrap(), 0.0);
    assert_eq!(london_dispersion(&zero, &rb, 5.0, DispersionSource::NeutralAtomIp).unwrap(), 0.0);
    assert!(induced_dipole_term(&k, &rb, 0.0).is_err());
}

#[test]
fn correction_terms_vanish_far_away() {
    let (k, rb) = (core(Element::K), core(Element::Rb));
    let model = CoreCoreModel {
        dispersion: true,
        repulsion: Some(Repulsion { a: 2.0, b: 0.8 }),
        ..Default::default()
    };
    let t = terms(&model, [&k, &rb], 100.0, 5.0).unwrap();
    assert!(t.dispersion.abs() < 1e-9 && t.repulsion.abs() < 1e-9);
    // the R⁻⁴ induction term is still ~7e-8 hartree at 100 bohr
    assert!(t.induced_dipole.abs() < 1e-7);
    let t1000 = terms(&model, [&k, &rb], 1000.0, 5.0).unwrap();
    assert!(t1000.induced_dipole.abs() < 1e-11);
}

fn morse_like(label: &str) -> Curve {
    let r: Vec<f64> = (0..120).map(|i| 4.5 + 0.25 * i as f64).collect();
    let v: Vec<f64> = r.iter().map(|x| 0.015 * ((1.0 - (-0.45 * (x - 7.6)).exp()).powi(2) - 1.0) - 1.0 / x - 0.3).collect();
    Curve::new(r, v, label).unwrap()
}

#[test]
fn assembly_flags() {
    let (k, rb) = (core(Element::K), core(Element::Rb));
    let e = morse_like("KRb X");
    let off = assemble(&e, [&k, &rb], &CoreCoreModel::none()).unwrap();
    let last = *e.values.last().unwrap();
    for (a, b) in off.v.values.iter().zip(&e.values) {
        assert!((a - (b - last)).abs() < 1e-15);
    }
    let base = CoreCoreModel {
        induced_dipole: false,
        ..Default::default()
    };
    let plain = assemble(&e, [&k, &rb], &base).unwrap();
    let with_ind = assemble(&e, [&k, &rb], &CoreCoreModel::default()).unwrap();
    let s0 = summarize(&plain.v, None).unwrap();
    let s1 = summarize(&with_ind.v, None).unwrap();
    assert!(s1.d_e_cm1 > s0.d_e_cm1);
    assert!(s1.r_e <= s0.r_e + 1e-12);

    // each term enters additively
    let disp = CoreCoreModel {
        induced_dipole: false,
        dispersion: true,
        dispersion_cutoff: DispersionCutoff::Fixed(0.0),
        ..Default::default()
    };
    let both = CoreCoreModel {
        dispersion: true,
        dispersion_cutoff: DispersionCutoff::Fixed(0.0),
        ..Default::default()
    };
    let vd = assemble(&e, [&k, &rb], &disp).unwrap().v;
    let vb = assemble(&e, [&k, &rb], &both).unwrap().v;
    for i in 0..e.len() {
        let sum = (with_ind.v.values[i] - plain.v.values[i]) + (vd.values[i] - plain.v.values[i]);
        assert!((vb.values[i] - plain.v.values[i] - sum).abs() < 1e-14);
    }
    // the dispersion term deepens the curve at 7.64 bohr by its tabulated size
    let grid = Curve::new(vec![7.64, 1000.0], vec![-0.01, 0.0], "two points").unwrap();
    let a = assemble(&grid, [&k, &rb], &base).unwrap().v.values[0];
    let b = assemble(&grid, [&k, &rb], &CoreCoreModel { dispersion: true, dispersion_cutoff: DispersionCutoff::Fixed(0.0), ..base }).unwrap().v.values[0];
    assert!((hartree_to_cm1(b - a) - KRB_DISP_NEUTRAL_CM1).abs() < 1e-6);
}

#[test]
fn auto_cutoff_freezes_inner_dispersion() {
    let (k, rb) = (core(Element::K), core(Element::Rb));
    let e = morse_like("KRb X");
    let model = CoreCoreModel {
        dispersion: true,
        ..Default::default()
    };
    let out = assemble(&e, [&k, &rb], &model).unwrap();
    let r_cut = out.dispersion_cutoff.unwrap();
    let r_e = summarize(&out.v_prime, None).unwrap().r_e;
    assert!((r_cut - (r_e - 2.0)).abs() < 1e-12);
    let inner = terms(&model, [&k, &rb], 4.5, r_cut).unwrap().dispersion;
    let at_cut = london_dispersion(&k, &rb, r_cut, DispersionSource::NeutralAtomIp).unwrap();
    assert_eq!(inner, at_cut);
}

#[test]
fn shift_round_trip_and_shape() {
    let computed = morse_like("computed");
    let zero = empirical_shift(&computed, &computed).unwrap();
    assert!(zero.values.iter().all(|v| v.abs() < 1e-15));

    let reference = computed.map("reference", |r, v| v + 1e-3 * (r - 6.0).sin());
    let shift = empirical_shift(&reference, &computed).unwrap();
    let back = apply_shift(&computed, &shift).unwrap();
    for (a, b) in back.values.iter().zip(&reference.values) {
        assert!((a - b).abs() < 1e-9);
    }
    // linear shift leaves second differences unchanged
    let linear = computed.map("linear", |r, _| 2e-4 * r - 1e-3);
    let other = morse_like("other").map("other", |r, v| v + 0.01 / r);
    let shifted = apply_shift(&other, &linear).unwrap();
    for i in 1..other.len() - 1 {
        let d2 = |c: &Curve| c.values[i + 1] - 2.0 * c.values[i] + c.values[i - 1];
        assert!((d2(&shifted) - d2(&other)).abs() < 1e-15);
    }
    let short = Curve::new(vec![5.0, 6.0, 7.0], vec![0.0; 3], "short").unwrap();
    assert!(empirical_shift(&short, &computed).is_err());
}

#[test]
fn dipole_summary_uses_largest_magnitude() {
    let e = morse_like("X");
    let d = e.map("D", |r, _| -3.0 * (-(r - 9.3).powi(2) / 8.0).exp());
    let s = summarize(&e, Some(&d)).unwrap();
    assert!((s.r_d.unwrap() - 9.3).abs() < 0.01);
    assert!(s.d_rd.unwrap() < -2.99);
    assert!(s.d_re.unwrap() < 0.0);
}
