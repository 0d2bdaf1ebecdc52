mod common;

use alkdimer::integrals::Shell;
use common::{check_eri, check_one_electron};

#[test]
fn one_electron_matches_quadrature() {
    let w = check_one_electron(200, 0x9e3779b97f4a7c15);
    eprintln!("worst {w:e}");
    assert!(w < 1e-8, "worst relative deviation {w:e}");
}

#[test]
fn eri_matches_quadrature() {
    let w = check_eri(50, 0x2545f4914f6cdd1d);
    eprintln!("worst {w:e}");
    assert!(w < 1e-8, "worst relative deviation {w:e}");
}

#[test]
fn oracle_self_check() {
    let a = Shell::new([0.0; 3], 0, 0, &[(0.7, 1.0)]).unwrap();
    let [s, _, _] = common::one_electron(&a, &a, [0.0; 3]);
    assert!((s[0] - 1.0).abs() < 1e-12);
    let e = common::eri(&a, &a, &a, &a);
    // (ss|ss) for equal normalized s Gaussians = 2 sqrt(a/π)
    let exact = 2.0 * (0.7 / std::f64::consts::PI).sqrt();
    assert!((e[0] - exact).abs() < 1e-10, "{} vs {}", e[0], exact);
}
