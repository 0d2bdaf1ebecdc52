mod common;

use alkdimer::data::Element;
use alkdimer::electronic::{
    class_ranges, compute_point, full_ci, scf, CiHamiltonian, CiOptions, ElectronicOptions, ScfOptions, ScfResult, Spin,
};
use alkdimer::integrals::{build_eri, build_operators, GeometrySpec, IntegralOptions, OperatorMatrices, TwoElectronTensor};
use alkdimer::units::AU_TO_DEBYE;
use alkdimer::Error;
use common::toy::{center, determinant_ci, primitive_basis, small_lina};

struct Prepared {
    ops: OperatorMatrices,
    eri: TwoElectronTensor,
    scf: ScfResult,
}

fn prepare(geom: &GeometrySpec, opts: &IntegralOptions) -> Prepared {
    let basis = geom.basis().unwrap();
    let ops = build_operators(geom, &basis, opts).unwrap();
    let eri = build_eri(&basis, &ops, opts);
    let scf = scf(&ops, &eri, &class_ranges(&basis.class_start), &ScfOptions::default()).unwrap();
    Prepared { ops, eri, scf }
}

fn one_s(atom: Element, a: f64) -> alkdimer::integrals::CenterSpec {
    center(atom, primitive_basis(atom, &[&[a]]))
}

#[test]
fn spin_adapted_ci_matches_determinant_oracle() {
    for (r, two_e) in [(5.0, false), (7.5, true), (12.0, false)] {
        let geom = small_lina(r);
        let opts = IntegralOptions {
            cpp_two_electron: two_e,
            ..Default::default()
        };
        let p = prepare(&geom, &opts);
        assert!(p.scf.coefficients().ncols() <= 20);
        let (s_ref, t_ref) = determinant_ci(&p.ops, &p.eri, &p.scf);
        let s = full_ci(&p.scf, &p.ops, &p.eri, Spin::Singlet, &CiOptions::default()).unwrap();
        let t = full_ci(&p.scf, &p.ops, &p.eri, Spin::Triplet, &CiOptions::default()).unwrap();
        eprintln!("R {r}: singlet {} vs {s_ref}, triplet {} vs {t_ref}", s.energy, t.energy);
        assert!((s.energy - s_ref).abs() < 1e-10, "singlet {} vs {}", s.energy, s_ref);
        assert!((t.energy - t_ref).abs() < 1e-10, "triplet {} vs {}", t.energy, t_ref);
        assert!((s.norm_squared() - 1.0).abs() < 1e-12);
        assert!((t.norm_squared() - 1.0).abs() < 1e-12);
        assert!(s.energy <= p.scf.energy + 1e-12);
        // Pauli: no doubly occupied spatial orbital in the triplet
        for c in &t.coefficients {
            for i in 0..c.nrows() {
                assert!(c[(i, i)].abs() < 1e-14);
            }
        }
    }
}

#[test]
fn scf_orbitals_orthonormal_and_density_idempotent() {
    let p = prepare(&small_lina(6.0), &IntegralOptions::default());
    let c = p.scf.coefficients();
    let ortho = c.transpose() * &p.ops.overlap * &c;
    let dev = (ortho - nalgebra::DMatrix::identity(c.ncols(), c.ncols())).amax();
    assert!(dev < 1e-9, "orthonormality {dev:e}");
    let d = p.scf.density();
    let idem = (&d * &p.ops.overlap * &d - &d * 2.0).amax();
    assert!(idem < 1e-8, "idempotency {idem:e}");
    assert_eq!(p.scf.lambdas().len(), c.ncols());
    assert!(p.scf.energy_change < 1e-10);
}

#[test]
fn two_function_homonuclear_scf_is_closed_form() {
    let geom = GeometrySpec::new(one_s(Element::Na, 0.05), one_s(Element::Na, 0.05), 6.0).unwrap();
    let p = prepare(&geom, &IntegralOptions::default());
    let h = p.ops.core_hamiltonian();
    let s = p.ops.overlap[(0, 1)];
    // σ_g = (a + b)/sqrt(2(1 + S)) is fixed by symmetry
    let c = 1.0 / (2.0 * (1.0 + s)).sqrt();
    let hgg = c * c * (h[(0, 0)] + h[(1, 1)] + 2.0 * h[(0, 1)]);
    let mut gggg = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    gggg += c.powi(4) * p.eri.get(i, j, k, l);
                }
            }
        }
    }
    let exact = 2.0 * hgg + gggg;
    assert!((p.scf.energy - exact).abs() < 1e-12, "{} vs {}", p.scf.energy, exact);
}

#[test]
fn two_orbital_ci_is_closed_form() {
    let geom = GeometrySpec::new(one_s(Element::Li, 0.04), one_s(Element::Na, 0.05), 7.0).unwrap();
    let p = prepare(&geom, &IntegralOptions::default());
    let c = p.scf.coefficients();
    let h = c.transpose() * p.ops.core_hamiltonian() * &c;
    let g = |a: usize, b: usize, x: usize, y: usize| {
        let mut v = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        v += c[(i, a)] * c[(j, b)] * c[(k, x)] * c[(l, y)] * p.eri.get(i, j, k, l);
                    }
                }
            }
        }
        v
    };
    let r2 = std::f64::consts::SQRT_2;
    // configurations 1², 2², (12 + 21)/√2
    let m = nalgebra::Matrix3::new(
        2.0 * h[(0, 0)] + g(0, 0, 0, 0),
        g(0, 1, 0, 1),
        r2 * (h[(0, 1)] + g(0, 0, 0, 1)),
        g(0, 1, 0, 1),
        2.0 * h[(1, 1)] + g(1, 1, 1, 1),
        r2 * (h[(0, 1)] + g(1, 1, 0, 1)),
        r2 * (h[(0, 1)] + g(0, 0, 0, 1)),
        r2 * (h[(0, 1)] + g(1, 1, 0, 1)),
        h[(0, 0)] + h[(1, 1)] + g(0, 0, 1, 1) + g(0, 1, 0, 1),
    );
    let singlet = m.symmetric_eigenvalues().min();
    let triplet = h[(0, 0)] + h[(1, 1)] + g(0, 0, 1, 1) - g(0, 1, 0, 1);
    let s = full_ci(&p.scf, &p.ops, &p.eri, Spin::Singlet, &CiOptions::default()).unwrap();
    let t = full_ci(&p.scf, &p.ops, &p.eri, Spin::Triplet, &CiOptions::default()).unwrap();
    assert_eq!(s.dimension, 3);
    assert_eq!(t.dimension, 1);
    assert!((s.energy - singlet).abs() < 1e-12, "{} vs {}", s.energy, singlet);
    assert!((t.energy - triplet).abs() < 1e-12, "{} vs {}", t.energy, triplet);
}

#[test]
fn iterative_and_dense_diagonalization_agree() {
    let p = prepare(&small_lina(6.5), &IntegralOptions::default());
    let ham = CiHamiltonian::new(&p.ops, &p.eri, &p.scf);
    for spin in [Spin::Singlet, Spin::Triplet] {
        let dense = ham.lowest(spin, &CiOptions { dense_limit: usize::MAX, ..Default::default() }).unwrap();
        let iter = ham.lowest(spin, &CiOptions { dense_limit: 0, ..Default::default() }).unwrap();
        assert!((dense.energy - iter.energy).abs() < 1e-10);
        let zd = ham.electronic_z(&dense);
        let zi = ham.electronic_z(&iter);
        assert!((zd - zi).abs() < 1e-8, "{zd} vs {zi}");
    }
}

#[test]
fn homonuclear_probe_has_no_dipole() {
    let na = || center(Element::Na, primitive_basis(Element::Na, &[&[0.5, 0.05, 0.02], &[0.06], &[0.1]]));
    let geom = GeometrySpec::new(na(), na(), 6.0).unwrap();
    let pt = compute_point(&geom, &ElectronicOptions::default()).unwrap();
    assert!(pt.singlet.dipole_au.abs() < 1e-8, "{}", pt.singlet.dipole_au);
    assert!(pt.triplet.dipole_au.abs() < 1e-8, "{}", pt.triplet.dipole_au);
}

#[test]
fn dipole_is_origin_independent() {
    let opts = ElectronicOptions::default();
    let base = compute_point(&small_lina(6.0), &opts).unwrap();
    let mut shifted = small_lina(6.0);
    shifted.z0 = 5.0;
    let moved = compute_point(&shifted, &opts).unwrap();
    for spin in [Spin::Singlet, Spin::Triplet] {
        let (a, b) = (base.state(spin), moved.state(spin));
        assert!((a.dipole_debye() - b.dipole_debye()).abs() < 1e-9, "{spin}: {} vs {}", a.dipole_debye(), b.dipole_debye());
        assert!((a.state.energy - b.state.energy).abs() < 1e-9);
    }
    // an excess electron on the lighter atom reads negative
    assert!(base.singlet.dipole_au < 0.0);
    assert_eq!(base.singlet.dipole_debye(), base.singlet.dipole_au * AU_TO_DEBYE);
}

#[test]
fn separated_atoms_are_degenerate_and_neutral() {
    let pt = compute_point(&small_lina(40.0), &ElectronicOptions::default()).unwrap();
    let gap = pt.triplet.state.energy - pt.singlet.state.energy;
    assert!((0.0..1e-5).contains(&gap), "gap {gap:e}");
    assert!(pt.singlet.dipole_debye().abs() < 0.05);
    assert!(pt.triplet.dipole_debye().abs() < 0.05);
}

#[test]
fn triplet_lies_above_singlet() {
    for r in [4.0, 6.0, 9.0, 14.0] {
        let pt = compute_point(&small_lina(r), &ElectronicOptions::default()).unwrap();
        assert!(pt.triplet.state.energy >= pt.singlet.state.energy, "R {r}");
    }
}

#[test]
fn larger_orbital_space_never_raises_energies() {
    let r = 6.5;
    let small = compute_point(&small_lina(r), &ElectronicOptions::default()).unwrap();
    let mut geom = small_lina(r);
    geom.centers[0].basis = geom.centers[0].basis.with_extra_primitive(1, 0.02);
    geom.centers[1].basis = geom.centers[1].basis.with_extra_primitive(2, 0.03);
    let big = compute_point(&geom, &ElectronicOptions::default()).unwrap();
    assert!(big.n_functions > small.n_functions);
    assert!(big.singlet.state.energy <= small.singlet.state.energy + 1e-10);
    assert!(big.triplet.state.energy <= small.triplet.state.energy + 1e-10);
}

#[test]
fn scf_failure_reports_energy_trace() {
    let geom = small_lina(6.0);
    let basis = geom.basis().unwrap();
    let opts = IntegralOptions::default();
    let ops = build_operators(&geom, &basis, &opts).unwrap();
    let eri = build_eri(&basis, &ops, &opts);
    let tight = ScfOptions {
        max_iterations: 2,
        ..Default::default()
    };
    match scf(&ops, &eri, &class_ranges(&basis.class_start), &tight) {
        Err(Error::ScfNotConverged { iterations, trace }) => {
            assert_eq!(iterations, 2);
            assert_eq!(trace.len(), 2);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}
