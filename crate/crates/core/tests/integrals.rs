mod common;

use alkdimer::integrals::hermite::ShellPair;
use alkdimer::integrals::{
    build_eri, build_operators, center_integrals, eri_quartet, one_electron_blocks, pair_classes_couple, CppParams, EcpSpec, EcpTerm,
    EriScratch, IntegralOptions, MolecularBasis, QuadratureOptions, Shell,
};
use common::toy::small_lina;
use nalgebra::DMatrix;
use std::f64::consts::PI;

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

fn one_center_basis(per_l: &[(usize, f64)], zc: f64) -> MolecularBasis {
    let shells = per_l
        .iter()
        .map(|&(l, a)| Shell::new([0.0, 0.0, zc], 0, l, &[(a, 1.0)]).unwrap())
        .collect();
    MolecularBasis::from_shells(shells)
}

#[test]
fn operator_matrices_are_symmetric_with_unit_overlap_diagonal() {
    let geom = small_lina(5.0);
    let basis = geom.basis().unwrap();
    let ops = build_operators(&geom, &basis, &IntegralOptions::default()).unwrap();
    for m in [&ops.overlap, &ops.kinetic, &ops.v_core, &ops.v_cpp, &ops.dz] {
        let scale = m.abs().max();
        assert!(max_abs_diff(m, &m.transpose()) <= 1e-12 * scale);
    }
    for i in 0..basis.n_functions() {
        assert!((ops.overlap[(i, i)] - 1.0).abs() < 1e-12);
    }
    let eig = ops.overlap.clone().symmetric_eigen().eigenvalues;
    assert!(eig.min() > -1e-12);
}

#[test]
fn translation_leaves_matrices_unchanged() {
    let opts = IntegralOptions::default();
    let geom = small_lina(5.5);
    let basis = geom.basis().unwrap();
    let ops = build_operators(&geom, &basis, &opts).unwrap();
    let eri = build_eri(&basis, &ops, &opts);
    let mut moved = small_lina(5.5);
    moved.z0 = 3.7;
    let mb = moved.basis().unwrap();
    let mops = build_operators(&moved, &mb, &opts).unwrap();
    let meri = build_eri(&mb, &mops, &opts);
    assert!((mops.dipole_origin[2] - ops.dipole_origin[2] - 3.7).abs() < 1e-12);
    for (a, b) in [
        (&ops.overlap, &mops.overlap),
        (&ops.kinetic, &mops.kinetic),
        (&ops.v_core, &mops.v_core),
        (&ops.v_cpp, &mops.v_cpp),
        (&ops.dz, &mops.dz),
    ] {
        assert!(max_abs_diff(a, b) < 1e-10, "{}", max_abs_diff(a, b));
    }
    let n = basis.n_functions();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    assert!((eri.get(i, j, k, l) - meri.get(i, j, k, l)).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn eri_permutation_symmetry_and_schwarz_bound() {
    let geom = small_lina(4.0);
    let basis = geom.basis().unwrap();
    let opts = IntegralOptions::default();
    let ops = build_operators(&geom, &basis, &opts).unwrap();
    let eri = build_eri(&basis, &ops, &opts);
    let n = basis.n_functions();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = eri.get(i, j, k, l);
                    assert!(v.is_finite());
                    for w in [eri.get(j, i, k, l), eri.get(i, j, l, k), eri.get(k, l, i, j), eri.get(l, k, j, i)] {
                        assert_eq!(v.to_bits(), w.to_bits());
                    }
                    let bound = (eri.get(i, j, i, j) * eri.get(k, l, k, l)).sqrt();
                    assert!(v.abs() <= bound + 1e-10);
                }
            }
        }
    }
}

#[test]
fn separated_s_distributions_follow_the_multipole_limit() {
    let sep = 60.0;
    let a = [(0.4, 0.0), (1.3, 0.2)];
    let b = [(0.7, sep), (0.25, sep - 0.1)];
    let sh = |(e, z): (f64, f64)| Shell::new([0.0, 0.0, z], 0, 0, &[(e, 1.0)]).unwrap();
    let (a1, a2, b1, b2) = (sh(a[0]), sh(a[1]), sh(b[0]), sh(b[1]));
    let overlap = |x: &Shell, y: &Shell| one_electron_blocks(x, y, [0.0; 3]).overlap[0];
    let mut out = Vec::new();
    eri_quartet(&ShellPair::new(&a1, &a2), &ShellPair::new(&b1, &b2), &mut EriScratch::default(), &mut out);
    // centroids of the two product distributions
    let za = (a[0].0 * a[0].1 + a[1].0 * a[1].1) / (a[0].0 + a[1].0);
    let zb = (b[0].0 * b[0].1 + b[1].0 * b[1].1) / (b[0].0 + b[1].0);
    let expect = overlap(&a1, &a2) * overlap(&b1, &b2) / (zb - za);
    assert!(((out[0] - expect) / expect).abs() < 1e-6, "{} vs {}", out[0], expect);
}

#[test]
fn symmetry_forbidden_quartet_elements_vanish() {
    let sh = [
        Shell::new([0.0, 0.0, 0.0], 0, 2, &[(0.5, 1.0)]).unwrap(),
        Shell::new([0.0, 0.0, 1.5], 1, 1, &[(0.8, 1.0)]).unwrap(),
        Shell::new([0.0, 0.0, -0.4], 0, 3, &[(0.3, 1.0)]).unwrap(),
        Shell::new([0.0, 0.0, 2.0], 1, 2, &[(1.1, 1.0)]).unwrap(),
    ];
    let mut out = Vec::new();
    eri_quartet(&ShellPair::new(&sh[0], &sh[1]), &ShellPair::new(&sh[2], &sh[3]), &mut EriScratch::default(), &mut out);
    let labels: Vec<_> = sh.iter().map(|s| s.labels()).collect();
    let (mut allowed, mut forbidden) = (0.0f64, 0.0f64);
    let mut idx = 0;
    for x in &labels[0] {
        for y in &labels[1] {
            for z in &labels[2] {
                for w in &labels[3] {
                    if pair_classes_couple(x.class(), y.class(), z.class(), w.class()) {
                        allowed = allowed.max(out[idx].abs());
                    } else {
                        forbidden = forbidden.max(out[idx].abs());
                    }
                    idx += 1;
                }
            }
        }
    }
    assert!(allowed > 1e-3);
    assert!(forbidden < 1e-14, "{forbidden:e}");
}

fn gaussian(c: f64, beta: f64) -> Vec<EcpTerm> {
    vec![EcpTerm { c, beta, n: 0 }]
}

#[test]
fn empty_potentials_give_zero_blocks() {
    let basis = one_center_basis(&[(0, 0.5), (1, 0.3), (2, 0.9), (3, 0.4)], 0.0);
    let q = QuadratureOptions::default();
    let ci = center_integrals(&basis, 0.0, Some(&EcpSpec::default()), None, false, &q).unwrap();
    assert_eq!(ci.ecp.abs().max(), 0.0);
    let no_alpha = CppParams {
        alpha: 0.0,
        rho: [1.0; 4],
        other_field_z: 0.01,
    };
    let ci = center_integrals(&basis, 0.0, None, Some(&no_alpha), false, &q).unwrap();
    assert_eq!(ci.cpp.abs().max(), 0.0);
    let far = CppParams {
        alpha: 9.0,
        rho: [1e3; 4],
        other_field_z: 0.01,
    };
    let ci = center_integrals(&basis, 0.0, None, Some(&far), false, &q).unwrap();
    assert!(ci.cpp.abs().max() < 1e-14, "{:e}", ci.cpp.abs().max());
}

#[test]
fn identical_channels_equal_the_local_path() {
    // the projectors sum to one only on functions centered on the core
    let basis = one_center_basis(&[(0, 0.5), (0, 0.07), (1, 0.3), (1, 1.2), (2, 0.9), (3, 0.4)], 4.5);
    let q = QuadratureOptions::default();
    let t = gaussian(-1.7, 0.6);
    let projected = EcpSpec {
        atom: None,
        channels: [t.clone(), t.clone(), t.clone(), t.clone()],
        local: Vec::new(),
    };
    let local = EcpSpec {
        atom: None,
        channels: Default::default(),
        local: t,
    };
    let a = center_integrals(&basis, 4.5, Some(&projected), None, false, &q).unwrap();
    let b = center_integrals(&basis, 4.5, Some(&local), None, false, &q).unwrap();
    assert!(max_abs_diff(&a.ecp, &b.ecp) < 1e-10, "{:e}", max_abs_diff(&a.ecp, &b.ecp));
}

#[test]
fn one_center_gaussian_channel_matches_closed_form() {
    let (a, b, c, beta) = (0.45, 1.6, 2.3, 0.8);
    let basis = one_center_basis(&[(0, a), (0, b)], 1.0);
    let ecp = EcpSpec {
        atom: None,
        channels: [gaussian(c, beta), Vec::new(), Vec::new(), Vec::new()],
        local: Vec::new(),
    };
    let ci = center_integrals(&basis, 1.0, Some(&ecp), None, false, &QuadratureOptions::default()).unwrap();
    let norm = |x: f64| (2.0 * x / PI).powf(0.75);
    let exact = c * norm(a) * norm(b) * (PI / (a + b + beta)).powf(1.5);
    assert!(((ci.ecp[(0, 1)] - exact) / exact).abs() < 1e-10, "{} vs {}", ci.ecp[(0, 1)], exact);
}

#[test]
fn one_center_cpp_matches_radial_grid() {
    let (a, b, alpha, rho) = (0.3, 0.9, 5.3, 1.4);
    let basis = one_center_basis(&[(0, a), (0, b)], 0.0);
    let cpp = CppParams {
        alpha,
        rho: [rho, 2.0, 2.0, 2.0],
        other_field_z: 0.0,
    };
    let ci = center_integrals(&basis, 0.0, None, Some(&cpp), false, &QuadratureOptions::default()).unwrap();
    // -α/2 ⟨a| θ(r-ρ) / r⁴ |b⟩ by Simpson on a fine radial grid
    let norm = |x: f64| (2.0 * x / PI).powf(0.75);
    let f = |r: f64| (-(a + b) * r * r).exp() / (r * r);
    let (r1, n) = (40.0, 400_000);
    let h = (r1 - rho) / n as f64;
    let mut s = f(rho) + f(r1);
    for i in 1..n {
        s += f(rho + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let oracle = -0.5 * alpha * norm(a) * norm(b) * 4.0 * PI * s * h / 3.0;
    let got = ci.cpp[(0, 1)];
    assert!(((got - oracle) / oracle).abs() < 1e-6, "{got} vs {oracle}");
}

#[test]
fn quadrature_refinement_converges() {
    let geom = small_lina(5.0);
    let basis = geom.basis().unwrap();
    let c = &geom.centers[1];
    let cpp = CppParams {
        alpha: c.core.alpha_d,
        rho: c.core.rho,
        other_field_z: -1.0 / 25.0,
    };
    let coarse = QuadratureOptions::default();
    let fine = QuadratureOptions {
        tolerance: 1e-11,
        max_level: 6,
        ..coarse.clone()
    };
    let a = center_integrals(&basis, 5.0, Some(&c.ecp), Some(&cpp), false, &coarse).unwrap();
    let b = center_integrals(&basis, 5.0, Some(&c.ecp), Some(&cpp), false, &fine).unwrap();
    assert!(b.level >= a.level);
    assert!(max_abs_diff(&a.ecp, &b.ecp) < 1e-8);
    assert!(max_abs_diff(&a.cpp, &b.cpp) < 1e-8);
}
